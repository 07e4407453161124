"""
Corpus de regresión.

Lee `data/corpus.yaml` (o el archivo configurado) y ejecuta cada entrada
según su `kind`. Las fallas de cómputo de una entrada se registran como
fallas de esa entrada; un corpus ausente o mal formado lanza CorpusError.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional, Union

import yaml

from .brackets import Connectivity, CoverCountQuery, count_covers, sv_series, area_sv_constant
from .errors import CorpusError, PillowcaseError
from .graphs import parse_graph_spec
from .graphsum import PropagatorFactor, aux_bracket, graph_contributions, graph_engine_count, zeta_constant_term
from .localpoly import LocalTable, named_element
from .models import CorpusResult
from .oracle import MAX_DEGREE, brute_force_hurwitz
from .qmforms import QMForm, ev_map, recognize, volume_from_form
from .qseries import QSeries
from .shifted import Monomial, ShiftedSymElement, expand_g
from .sympart import Partition, RamificationProfile

logger = logging.getLogger(__name__)

DEFAULT_CORPUS = Path(__file__).parent / "data" / "corpus.yaml"


@dataclass
class CorpusEntry:
    """Una entrada del corpus."""

    name: str
    kind: str
    data: Dict[str, Any] = field(default_factory=dict)
    slow: bool = False


def load_corpus(path: Optional[Union[str, Path]] = None) -> List[CorpusEntry]:
    """
    Cargar el corpus.

    Raises:
        CorpusError: Si el archivo falta o no tiene la estructura esperada
    """
    path = Path(path) if path is not None else DEFAULT_CORPUS
    if not path.exists():
        raise CorpusError(f"Corpus no encontrado: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            document = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise CorpusError(f"Error parseando el corpus {path}: {e}")
    if not isinstance(document, dict) or not isinstance(document.get("entries"), list):
        raise CorpusError(f"El corpus {path} debe tener una lista 'entries'")

    entries = []
    for i, raw in enumerate(document["entries"]):
        if not isinstance(raw, dict) or "name" not in raw or "kind" not in raw:
            raise CorpusError(f"Entrada {i} del corpus sin 'name' o 'kind'")
        if raw["kind"] not in HANDLERS:
            raise CorpusError(f"Entrada {raw['name']}: tipo desconocido '{raw['kind']}'")
        data = {k: v for k, v in raw.items() if k not in ("name", "kind", "slow")}
        entries.append(CorpusEntry(raw["name"], raw["kind"], data, bool(raw.get("slow", False))))
    logger.info(f"Corpus cargado desde {path}: {len(entries)} entradas")
    return entries


# -- comprobaciones por tipo ------------------------------------------------------

def _form(data: Mapping[str, Any], key: str = "expected") -> QMForm:
    return QMForm.parse(data.get("gens", "gamma02"), str(data[key]))


def _pi_terms(raw: List[List[Any]]) -> Dict[int, Fraction]:
    return {int(j): Fraction(str(c)) for c, j in raw}


def _check_g_expansion(data: Mapping[str, Any], context: "RunContext") -> str:
    expected = ShiftedSymElement({
        Monomial(Partition.of(t.get("p", [])), Partition.of(t.get("pbar", []))): Fraction(str(t["coeff"]))
        for t in data["expected"]
    })
    got = expand_g(Partition.of(data["nu"]))
    if got != expected:
        raise AssertionError(f"g_{data['nu']} = {got}, se esperaba {expected}")
    return str(got)


def _check_local_stabilized(data: Mapping[str, Any], context: "RunContext") -> str:
    value = context.table.stabilized(data["widths"], named_element(data["element"]))
    expected = Fraction(str(data["expected"]))
    if value != expected:
        raise AssertionError(f"A₂′({data['widths']}) = {value}, se esperaba {expected}")
    return str(value)


def _check_local_triple(data: Mapping[str, Any], context: "RunContext") -> str:
    value = context.table.triple(data["wminus"], data["wplus"], named_element(data["element"]))
    expected = Fraction(str(data["expected"]))
    if value != expected:
        raise AssertionError(f"A′({data['wminus']}, {data['wplus']}) = {value}, se esperaba {expected}")
    return str(value)


def _recognized_equal(series: QSeries, data: Mapping[str, Any]) -> str:
    form = recognize(series, data.get("gens", "gamma02"), int(data.get("max_weight", 6)))
    expected = _form(data)
    if form != expected:
        raise AssertionError(f"forma {form}, se esperaba {expected}")
    return str(form)


def _check_zeta(data: Mapping[str, Any], context: "RunContext") -> str:
    factors = [
        PropagatorFactor(tuple((int(v), int(e)) for v, e in f["argument"]), int(f.get("m", 0)), f.get("parity"))
        for f in data["factors"]
    ]
    return _recognized_equal(zeta_constant_term(factors, int(data["cutoff"])), data)


def _check_graph_row(data: Mapping[str, Any], context: "RunContext") -> str:
    graph, eplus = parse_graph_spec(data["graph"])
    locals_ = [named_element(name) for name in data["locals"]]
    special = named_element(data["special"])
    cutoff = int(data["cutoff"])
    parity = tuple(data["parity"]) if data.get("parity") is not None else None
    total = QSeries.zero(cutoff)
    for row in graph_contributions(locals_, special, cutoff, graphs=[graph], table=context.table):
        if row.eplus != eplus:
            continue
        if parity is not None and tuple(p for _, p in row.parity) != parity:
            continue
        total = total + row.series
    return _recognized_equal(total, data)


def _check_graph_total(data: Mapping[str, Any], context: "RunContext") -> str:
    cutoff = int(data["cutoff"])
    total = QSeries.zero(cutoff)
    for term in data["terms"]:
        bracket = aux_bracket(
            [named_element(name) for name in term["locals"]],
            named_element(term["special"]),
            cutoff,
            table=context.table,
        )
        total = total + bracket.scalar_mul(Fraction(str(term.get("coeff", 1))))
    return _recognized_equal(total, data)


def _check_growth(data: Mapping[str, Any], context: "RunContext") -> str:
    leading = ev_map(_form(data, "form")).leading(int(data["dim"]))
    expected = _pi_terms(data["expected"])
    if leading.terms != expected:
        raise AssertionError(f"ev principal {leading}, se esperaba {expected}")
    return str(leading)


def _check_volume(data: Mapping[str, Any], context: "RunContext") -> str:
    volume = volume_from_form(_form(data, "form"), int(data["dim"]))
    expected = _pi_terms(data["expected"])
    if volume.terms != expected:
        raise AssertionError(f"volumen {volume}, se esperaba {expected}")
    return str(volume)


def _check_area(data: Mapping[str, Any], context: "RunContext") -> str:
    value = area_sv_constant(_form(data, "counting"), _form(data, "siegel_veech"), int(data["dim"]))
    expected = Fraction(str(data["expected"]))
    if value != expected:
        raise AssertionError(f"(π²/3)c_area = {value}, se esperaba {expected}")
    return str(value)


def _check_oracle(data: Mapping[str, Any], context: "RunContext") -> str:
    profile = RamificationProfile.from_json(data["profile"])
    max_d = min(int(data.get("max_d", 3)), context.max_degree // 2)
    checked = 0
    for connectivity in Connectivity:
        series = count_covers(CoverCountQuery(profile, max_d, connectivity))
        for d in range(max_d + 1):
            brute = brute_force_hurwitz(profile, d, connectivity, context.max_degree)
            if series.coefficient(d) != brute:
                raise AssertionError(
                    f"{connectivity.value}, d={d}: caracteres {series.coefficient(d)} ≠ fuerza bruta {brute}"
                )
            checked += 1
    return f"{checked} coeficientes coinciden"


def _check_count_form(data: Mapping[str, Any], context: "RunContext") -> str:
    profile = RamificationProfile.from_json(data["profile"])
    query = CoverCountQuery(profile, int(data["cutoff"]), Connectivity(data.get("connectivity", "connected")))
    return _recognized_equal(count_covers(query), data)


def _check_sv_leading(data: Mapping[str, Any], context: "RunContext") -> str:
    profile = RamificationProfile.from_json(data["profile"])
    series = sv_series(profile, int(data["p"]), int(data["cutoff"]))
    form = recognize(series, data.get("gens", "gamma02"), int(data.get("max_weight", 6)))
    expected = _form(data)
    if form.leading_component() != expected.leading_component():
        raise AssertionError(f"parte principal {form.leading_component()}, se esperaba {expected}")
    if "ratio_to_counting" not in data:
        return str(form)
    counting = count_covers(CoverCountQuery(profile, int(data["cutoff"]), Connectivity.CONNECTED))
    ratio = series.is_proportional_to(counting)
    expected_ratio = Fraction(str(data["ratio_to_counting"]))
    if ratio != expected_ratio:
        raise AssertionError(f"c_p/N⁰ = {ratio}, se esperaba {expected_ratio}")
    return f"{form} (= {ratio}·N⁰)"


def _check_graph_engine(data: Mapping[str, Any], context: "RunContext") -> str:
    profile = RamificationProfile.from_json(data["profile"])
    cutoff = int(data["cutoff"])
    graph_series = graph_engine_count(profile, cutoff, context.table)
    character = count_covers(CoverCountQuery(profile, cutoff, Connectivity.NO_UNRAMIFIED))
    if graph_series != character:
        raise AssertionError(f"grafos {graph_series} ≠ caracteres {character}")
    return "los motores coinciden"


HANDLERS: Dict[str, Callable[[Mapping[str, Any], "RunContext"], str]] = {
    "g_expansion": _check_g_expansion,
    "local_stabilized": _check_local_stabilized,
    "local_triple": _check_local_triple,
    "zeta": _check_zeta,
    "graph_row": _check_graph_row,
    "graph_total": _check_graph_total,
    "growth": _check_growth,
    "volume": _check_volume,
    "area": _check_area,
    "oracle": _check_oracle,
    "count_form": _check_count_form,
    "sv_leading": _check_sv_leading,
    "graph_engine": _check_graph_engine,
}


@dataclass
class RunContext:
    """Estado compartido entre entradas."""

    table: LocalTable = field(default_factory=LocalTable)
    max_degree: int = MAX_DEGREE


def run_entry(entry: CorpusEntry, context: Optional[RunContext] = None) -> CorpusResult:
    """Ejecutar una entrada; cualquier falla queda en el resultado."""
    context = context or RunContext()
    try:
        detail = HANDLERS[entry.kind](entry.data, context)
        logger.info(f"✅ {entry.name}")
        return CorpusResult(entry.name, entry.kind, True, detail)
    except (AssertionError, PillowcaseError, ValueError, KeyError) as e:
        logger.warning(f"❌ {entry.name}: {e}")
        return CorpusResult(entry.name, entry.kind, False, str(e))


def run_corpus(
    entries: List[CorpusEntry],
    quick: bool = False,
    context: Optional[RunContext] = None,
    progress: Optional[Callable[[CorpusResult], None]] = None,
) -> List[CorpusResult]:
    """
    Ejecutar el corpus en orden.

    Args:
        entries: Entradas cargadas
        quick: Omitir las entradas lentas
        context: Estado compartido (tabla de factores locales, cota del oráculo)
        progress: Callback opcional por resultado

    Returns:
        Un resultado por entrada, en el orden del corpus
    """
    context = context or RunContext()
    results = []
    for entry in entries:
        if quick and entry.slow:
            result = CorpusResult(entry.name, entry.kind, True, "omitida (--quick)", skipped=True)
        else:
            result = run_entry(entry, context)
        results.append(result)
        if progress is not None:
            progress(result)
    return results
