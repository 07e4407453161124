"""
Sumas sobre grafos globales.

Tres familias de sumas comparten el mismo recorrido de anchos:

    S(Γ, E⁺, m, pc)       Π w_e^{m_e+1} q^{Σ k_e w_e}, con paridades en E⁰
    [F₁..Fₙ; F₀]_Γ         Π w_e · A₂′(w₀, F₀) · Π A′(w_v⁻, w_v⁺, F_v)
    variantes SV          las anteriores con el peso Σ_e H_e w_e^p insertado

Para cada orientación las alturas recorren H_e ∈ Δ_e + ℤ, H_e > 0, así que
la suma sobre alturas de una arista es q^{k_min w}/(1 - q^w). Los anchos
quedan acotados por Σ H_min(e)·w_e ≤ cutoff; con un W_max explícito se
exige además estabilidad al duplicarlo.

El módulo incluye también la extracción de términos constantes de
productos de propagadores y la descomposición de w-corchetes en corchetes
auxiliares.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import prod
from typing import Any, Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from .brackets import check_sv_exponent
from .errors import SaturationError, SolveError
from .graphs import (
    EdgeLayout,
    GlobalGraph,
    Orientation,
    edge_layouts,
    enumerate_graphs,
    enumerate_orientations,
)
from .localpoly import LocalTable
from .qseries import QSeries, eisenstein, eisenstein_constant
from .shifted import (
    Monomial,
    ShiftedSymElement,
    degree_part,
    eval_p,
    expand_g,
    fmu_to_p_basis,
    pbar_monomial_in_g_span,
)
from .sympart import EMPTY, Partition, RamificationProfile
from .workers import map_ordered

logger = logging.getLogger(__name__)

ParityCondition = Mapping[int, int]
SeriesKey = Tuple[int, Tuple[int, ...]]
Bucket = Dict[SeriesKey, Fraction]
WeightFunction = Callable[[Sequence[EdgeLayout], Tuple[int, ...]], Fraction]
EdgeWeight = Callable[[int, int], Fraction]


# -- recorrido de anchos ----------------------------------------------------------

def _vertex_coefficients(graph: GlobalGraph, layouts: Sequence[EdgeLayout]) -> List[Dict[int, int]]:
    """Coeficiente neto (+ entrante, - saliente) de cada arista en cada vértice no especial."""
    result = []
    for layout in layouts:
        net: Dict[int, int] = {}
        for v, incoming in layout.half_edges:
            if graph.special and v == 0:
                continue
            net[v] = net.get(v, 0) + (1 if incoming else -1)
        result.append({v: c for v, c in net.items() if c})
    return result


def width_assignments(
    graph: GlobalGraph,
    layouts: Sequence[EdgeLayout],
    cutoff: int,
    wmax: Optional[int] = None,
    parities: Optional[ParityCondition] = None,
) -> Iterator[Tuple[int, ...]]:
    """
    Anchos balanceados con Σ H_min·w ≤ cutoff.

    El ancho de la última arista que toca un vértice se despeja del
    balance en ese vértice en lugar de recorrerse.
    """
    count = len(layouts)
    coefficients = _vertex_coefficients(graph, layouts)
    last: Dict[int, int] = {}
    for e, coeff in enumerate(coefficients):
        for v in coeff:
            last[v] = e
    closing = [[v for v, e in last.items() if e == i] for i in range(count)]
    h_min = [layout.h_min for layout in layouts]
    tail = [Fraction(0)] * (count + 1)
    for i in range(count - 1, -1, -1):
        tail[i] = tail[i + 1] + h_min[i]
    parities = dict(parities or {})
    net: Dict[int, int] = {}
    widths = [0] * count

    def step(i: int, remaining: Fraction) -> Iterator[Tuple[int, ...]]:
        if i == count:
            yield tuple(widths)
            return
        budget = remaining - tail[i + 1]
        if budget < h_min[i]:
            return
        upper = int(budget // h_min[i])
        if wmax is not None:
            upper = min(upper, wmax)
        closers = closing[i]
        if closers:
            v = closers[0]
            w, rest = divmod(-net.get(v, 0), coefficients[i][v])
            if rest or w < 1 or w > upper:
                return
            candidates: Sequence[int] = (w,)
        else:
            candidates = range(1, upper + 1)
        parity = parities.get(i)
        for w in candidates:
            if parity is not None and w % 2 != parity:
                continue
            for v, c in coefficients[i].items():
                net[v] = net.get(v, 0) + c * w
            if all(net.get(v, 0) == 0 for v in closers):
                widths[i] = w
                yield from step(i + 1, remaining - h_min[i] * w)
            for v, c in coefficients[i].items():
                net[v] -= c * w

    yield from step(0, Fraction(cutoff))


def _add(bucket: Bucket, key: SeriesKey, value: Fraction) -> None:
    total = bucket.get(key, Fraction(0)) + value
    if total:
        bucket[key] = total
    else:
        bucket.pop(key, None)


def _collect(
    graph: GlobalGraph,
    orientation: Orientation,
    cutoff: int,
    weight: WeightFunction,
    wmax: Optional[int] = None,
    parities: Optional[ParityCondition] = None,
    edge_weight: Optional[EdgeWeight] = None,
) -> Dict[Tuple[int, ...], Bucket]:
    """
    Sumar una orientación, agrupando por paridades de E⁰.

    Cada configuración de anchos aporta coef·q^{Σk_min w}·Π 1/(1-q^w); con
    edge_weight se inserta además Σ_e f_e(w_e)·H_e, usando que
    Σ_{k≥k₀}(k+Δ)q^{kw} = q^{k₀w}/(1-q^w)·(H_min + q^w/(1-q^w)).
    """
    layouts = edge_layouts(graph, orientation)
    zero = graph.zero_edges() if graph.special else []
    groups: Dict[Tuple[int, ...], Bucket] = {}
    for widths in width_assignments(graph, layouts, cutoff, wmax, parities):
        value = weight(layouts, widths)
        if not value:
            continue
        value *= orientation.multiplicity
        area = sum(layout.k_min * w for layout, w in zip(layouts, widths))
        bucket = groups.setdefault(tuple(widths[e] % 2 for e in zero), {})
        ordered = tuple(sorted(widths))
        if edge_weight is None:
            _add(bucket, (area, ordered), value)
            continue
        scalar = Fraction(0)
        for e, (layout, w) in enumerate(zip(layouts, widths)):
            factor = edge_weight(e, w)
            if not factor:
                continue
            scalar += factor * layout.h_min
            _add(bucket, (area + w, tuple(sorted(widths + (w,)))), value * factor)
        if scalar:
            _add(bucket, (area, ordered), value * scalar)
    return groups


@lru_cache(maxsize=None)
def _geometric_product(widths: Tuple[int, ...], length: int) -> Tuple[int, ...]:
    """Coeficientes de Π 1/(1 - q^w) hasta q^length."""
    coeffs = [1] + [0] * length
    for w in widths:
        for n in range(w, length + 1):
            coeffs[n] += coeffs[n - w]
    return tuple(coeffs)


def _assemble(bucket: Bucket, cutoff: int) -> QSeries:
    coeffs = [Fraction(0)] * (cutoff + 1)
    for (area, widths), value in bucket.items():
        if area > cutoff:
            continue
        for j, c in enumerate(_geometric_product(widths, cutoff - area)):
            if c:
                coeffs[area + j] += value * c
    return QSeries.from_q_coefficients(coeffs, cutoff)


def _merge(target: Bucket, source: Bucket) -> None:
    for key, value in source.items():
        _add(target, key, value)


# -- sumas S ----------------------------------------------------------------------

def _check_edge_data(graph: GlobalGraph, m: Sequence[int], pc: Optional[ParityCondition]) -> None:
    if len(m) != len(graph.edges):
        raise ValueError(f"Se esperaban {len(graph.edges)} exponentes m, llegaron {len(m)}")
    if any(x < 0 or x % 2 for x in m):
        raise ValueError(f"Los exponentes m deben ser pares ≥ 0: {list(m)}")
    if pc is not None:
        zero = set(graph.zero_edges()) if graph.special else set()
        if set(pc) != zero:
            raise ValueError(f"La condición de paridad debe cubrir exactamente E⁰ = {sorted(zero)}")
        if any(value not in (0, 1) for value in pc.values()):
            raise ValueError(f"Paridades inválidas: {dict(pc)}")


def parity_conditions(graph: GlobalGraph) -> List[Dict[int, int]]:
    """PC(Γ) = {0,1}^{E⁰}."""
    zero = graph.zero_edges() if graph.special else []
    return [dict(zip(zero, bits)) for bits in product((0, 1), repeat=len(zero))]


def _saturated(compute: Callable[[Optional[int]], QSeries], wmax: Optional[int], label: str) -> QSeries:
    if wmax is None:
        return compute(None)
    first = compute(wmax)
    logger.info(f"{label}: re-ejecución de saturación con W_max={2 * wmax}")
    second = compute(2 * wmax)
    if first != second:
        raise SaturationError(f"{label}: los coeficientes cambian entre W_max={wmax} y {2 * wmax}")
    return first


def graph_sum_S(
    graph: GlobalGraph,
    eplus: FrozenSet[int],
    m: Sequence[int],
    pc: Optional[ParityCondition],
    cutoff: int,
    wmax: Optional[int] = None,
) -> QSeries:
    """
    Suma S(Γ, E⁺, m, pc) hasta q^cutoff.

    Args:
        graph: Grafo global
        eplus: Aristas coherentes (no pueden tocar el vértice 0)
        m: Exponentes pares por arista
        pc: Paridad de cada arista de E⁰ (None: sin restricción)
        cutoff: Último exponente de q
        wmax: Cota de anchos opcional; activa la verificación de saturación

    Raises:
        ValueError: Si m o pc no son válidos
        SaturationError: Si la serie cambia al duplicar wmax
    """
    _check_edge_data(graph, m, pc)
    orientations = enumerate_orientations(graph, eplus)
    logger.debug(f"S{graph}: {len(orientations)} orientaciones, E⁺={sorted(eplus)}")

    def weight(layouts, widths):
        return Fraction(prod(w ** (k + 1) for w, k in zip(widths, m)))

    def compute(limit: Optional[int]) -> QSeries:
        total: Bucket = {}
        for orientation in orientations:
            for bucket in _collect(graph, orientation, cutoff, weight, limit, pc).values():
                _merge(total, bucket)
        return _assemble(total, cutoff)

    return _saturated(compute, wmax, f"S{graph}")


def sv_graph_sum(
    graph: GlobalGraph,
    eplus: FrozenSet[int],
    m: Sequence[int],
    pc: Optional[ParityCondition],
    e0: int,
    cutoff: int,
    wmax: Optional[int] = None,
) -> QSeries:
    """S^SV_{e₀}: la suma S con el factor H_{e₀}/w_{e₀} insertado."""
    _check_edge_data(graph, m, pc)
    if not 0 <= e0 < len(graph.edges):
        raise ValueError(f"Arista e₀ fuera de rango: {e0}")
    orientations = enumerate_orientations(graph, eplus)

    def weight(layouts, widths):
        return Fraction(prod(w ** (k + 1) for w, k in zip(widths, m)))

    def edge_weight(e: int, w: int) -> Fraction:
        return Fraction(1, w) if e == e0 else Fraction(0)

    def compute(limit: Optional[int]) -> QSeries:
        total: Bucket = {}
        for orientation in orientations:
            for bucket in _collect(graph, orientation, cutoff, weight, limit, pc, edge_weight).values():
                _merge(total, bucket)
        return _assemble(total, cutoff)

    return _saturated(compute, wmax, f"S^SV{graph}")


def loop_series(m: int, parity: Optional[int], cutoff: int) -> QSeries:
    """
    S_m = Σ w^{m+1}q^{wh} = G_{m+2} - G_{m+2}(0); con paridad, la parte de w par
    2^{m+1}(G_{m+2}(q²) - G_{m+2}(0)) o su complemento impar.
    """
    k2 = m + 2
    full = eisenstein(k2, 1, cutoff) - eisenstein_constant(k2)
    if parity is None:
        return full
    even = (eisenstein(k2, 2, cutoff) - eisenstein_constant(k2)).scalar_mul(2 ** (m + 1))
    return even if parity == 0 else full - even


def reduce_graph(
    graph: GlobalGraph,
    eplus: FrozenSet[int],
    m: Sequence[int],
    pc: Optional[ParityCondition],
) -> Tuple[GlobalGraph, FrozenSet[int], Tuple[int, ...], Optional[Dict[int, int]]]:
    """Quitar los lazos en 0 y los lazos de E⁺, reindexando E⁺, m y pc."""
    removed = set(graph.factored_loops(eplus))
    kept = [e for e in range(len(graph.edges)) if e not in removed]
    reduced = graph.without(removed)
    # `without` conserva el orden relativo, que ya es canónico
    position = {e: i for i, e in enumerate(kept)}
    new_eplus = frozenset(position[e] for e in eplus if e in position)
    new_m = tuple(m[e] for e in kept)
    new_pc = None if pc is None else {position[e]: v for e, v in pc.items() if e in position}
    return reduced, new_eplus, new_m, new_pc


def loop_factor(
    graph: GlobalGraph,
    eplus: FrozenSet[int],
    m: Sequence[int],
    pc: Optional[ParityCondition],
    cutoff: int,
) -> QSeries:
    """Producto cerrado de S_m / S_{m,even} / S_{m,odd} sobre los lazos factorizables."""
    _check_edge_data(graph, m, pc)
    result = QSeries.one(cutoff)
    for e in graph.factored_loops(eplus):
        parity = None if pc is None else pc.get(e)
        result = result * loop_series(m[e], parity, cutoff)
    return result


# -- términos constantes de propagadores -----------------------------------------

@dataclass(frozen=True)
class PropagatorFactor:
    """
    Factor P^{(m)}(Z) con Z = Π ζ_v^{e_v}.

    P^{(m)}(Z) = Σ_w w^{m+1}(Z^w Σ_{h≥0} q^{wh} + Z^{-w} Σ_{h≥1} q^{wh}),
    con w restringido a una paridad si `parity` no es None.
    """

    argument: Tuple[Tuple[int, int], ...]
    m: int = 0
    parity: Optional[int] = None


def propagator_factors(
    graph: GlobalGraph,
    eplus: FrozenSet[int],
    m: Sequence[int],
    pc: Optional[ParityCondition],
) -> List[PropagatorFactor]:
    """
    Propagador de un grafo reducido.

    Raises:
        ValueError: Si quedan lazos en 0 o lazos de E⁺
    """
    _check_edge_data(graph, m, pc)
    if graph.factored_loops(eplus):
        raise ValueError(f"El grafo {graph} no está reducido")
    factors = []
    for e, (u, v) in enumerate(graph.edges):
        if graph.special and u == 0:
            argument = ((v, 1),)
            parity = None if pc is None else pc.get(e)
        elif u == v:
            argument, parity = ((v, 2),), None
        elif e in eplus:
            argument, parity = ((u, 1), (v, -1)), None
        else:
            argument, parity = ((u, 1), (v, 1)), None
        factors.append(PropagatorFactor(argument, m[e], parity))
    return factors


def _expanded_terms(factor: PropagatorFactor, index: Dict[int, int], cutoff: int,
                    wmax: int) -> List[Tuple[Tuple[int, ...], int, int]]:
    terms = []
    for w in range(1, wmax + 1):
        if factor.parity is not None and w % 2 != factor.parity:
            continue
        plus = [0] * len(index)
        for v, e in factor.argument:
            plus[index[v]] += e * w
        minus = tuple(-x for x in plus)
        weight = w ** (factor.m + 1)
        for h in range(0, cutoff // w + 1):
            terms.append((tuple(plus), w * h, weight))
            if h:
                terms.append((minus, w * h, weight))
    return terms


def zeta_constant_term(factors: Sequence[PropagatorFactor], cutoff: int, wmax: Optional[int] = None) -> QSeries:
    """
    [ζ⁰] del producto de propagadores, hasta q^cutoff.

    Se multiplican las expansiones truncadas a w ≤ wmax y se verifica que
    duplicar wmax no cambia el resultado.

    Raises:
        SaturationError: Si el truncamiento en anchos no es estable
    """
    variables = sorted({v for factor in factors for v, _ in factor.argument})
    index = {v: i for i, v in enumerate(variables)}
    if wmax is None:
        wmax = 2 * (len(variables) + 1) * max(cutoff, 1)

    def compute(limit: Optional[int]) -> QSeries:
        expansions = [_expanded_terms(f, index, cutoff, limit) for f in factors]
        reach = [[0] * len(variables) for _ in range(len(factors) + 1)]
        for i in range(len(factors) - 1, -1, -1):
            reach[i] = list(reach[i + 1])
            for v, e in factors[i].argument:
                reach[i][index[v]] += abs(e) * limit

        current: Dict[Tuple[Tuple[int, ...], int], int] = {((0,) * len(variables), 0): 1}
        for i, terms in enumerate(expansions):
            following: Dict[Tuple[Tuple[int, ...], int], int] = {}
            for (exps, qexp), coeff in current.items():
                for delta, qd, weight in terms:
                    total_q = qexp + qd
                    if total_q > cutoff:
                        continue
                    new = tuple(a + b for a, b in zip(exps, delta))
                    if any(abs(x) > r for x, r in zip(new, reach[i + 1])):
                        continue
                    key = (new, total_q)
                    following[key] = following.get(key, 0) + coeff * weight
            current = following
        coeffs = [Fraction(0)] * (cutoff + 1)
        zero = (0,) * len(variables)
        for (exps, qexp), coeff in current.items():
            if exps == zero:
                coeffs[qexp] += coeff
        return QSeries.from_q_coefficients(coeffs, cutoff)

    return _saturated(compute, wmax, "[ζ⁰]")


# -- corchetes auxiliares ----------------------------------------------------------

@dataclass(frozen=True)
class GraphContribution:
    """Aporte de un grafo con un E⁺ y una paridad de E⁰ fijos (sin 1/|Aut|)."""

    graph: GlobalGraph
    eplus: FrozenSet[int]
    parity: Tuple[Tuple[int, int], ...]
    automorphisms: int
    series: QSeries

    def to_dict(self) -> Dict[str, Any]:
        return {
            "graph": self.graph.to_json(self.eplus),
            "parity": {str(e): p for e, p in self.parity},
            "automorphisms": self.automorphisms,
            "series": self.series.to_json(),
        }


def _capacities(locals_: Sequence[ShiftedSymElement], special: ShiftedSymElement) -> Dict[int, int]:
    capacities = {v: F.weight for v, F in enumerate(locals_, start=1)}
    capacities[0] = special.weight
    return capacities


def _aux_weight(graph: GlobalGraph, locals_: Sequence[ShiftedSymElement], special: ShiftedSymElement,
                table: LocalTable) -> WeightFunction:
    def weight(layouts: Sequence[EdgeLayout], widths: Tuple[int, ...]) -> Fraction:
        incoming: Dict[int, List[int]] = {v: [] for v in graph.vertices}
        outgoing: Dict[int, List[int]] = {v: [] for v in graph.vertices}
        for layout, w in zip(layouts, widths):
            for v, is_in in layout.half_edges:
                (incoming if is_in else outgoing)[v].append(w)
        value = table.stabilized(outgoing[0], special)
        for v, F in enumerate(locals_, start=1):
            if not value:
                return value
            value *= table.triple(incoming[v], outgoing[v], F)
        return value * prod(widths)

    return weight


def graph_contributions(
    locals_: Sequence[ShiftedSymElement],
    special: ShiftedSymElement,
    cutoff: int,
    graphs: Optional[Sequence[GlobalGraph]] = None,
    table: Optional[LocalTable] = None,
    sv_exponent: Optional[int] = None,
) -> List[GraphContribution]:
    """
    Aportes por (grafo, E⁺, paridad) de [F₁..Fₙ; F₀].

    Args:
        locals_: Factores locales de los vértices 1..n
        special: Factor local F₀ del vértice 0
        cutoff: Último exponente de q
        graphs: Restringir a estos grafos (por defecto todos los admisibles)
        table: Tabla de factores locales compartida
        sv_exponent: Si se da, inserta el peso Σ_e H_e w_e^p

    Returns:
        Filas deterministas (orden de grafos, luego E⁺ y paridad)
    """
    n = len(locals_)
    table = table or LocalTable()
    if graphs is None:
        capacities = _capacities(locals_, special)
        graphs = enumerate_graphs(n, True, sum(capacities.values()) // 2, capacities)
    edge_weight: Optional[EdgeWeight] = None
    if sv_exponent is not None:
        check_sv_exponent(sv_exponent)

        def edge_weight(e: int, w: int) -> Fraction:
            return Fraction(w) ** sv_exponent

    tasks = [(graph, orientation) for graph in graphs for orientation in enumerate_orientations(graph)]
    logger.info(f"Corchete auxiliar: {len(graphs)} grafos, {len(tasks)} orientaciones, cutoff={cutoff}")

    def run(task: Tuple[GlobalGraph, Orientation]) -> Dict[Tuple[int, ...], Bucket]:
        graph, orientation = task
        weight = _aux_weight(graph, locals_, special, table)
        return _collect(graph, orientation, cutoff, weight, edge_weight=edge_weight)

    results = map_ordered(run, tasks)

    grouped: Dict[Tuple[GlobalGraph, FrozenSet[int], Tuple[int, ...]], Bucket] = {}
    order: List[Tuple[GlobalGraph, FrozenSet[int], Tuple[int, ...]]] = []
    for (graph, orientation), groups in zip(tasks, results):
        eplus = orientation.eplus(graph)
        for pc, bucket in groups.items():
            key = (graph, eplus, pc)
            if key not in grouped:
                grouped[key] = {}
                order.append(key)
            _merge(grouped[key], bucket)

    rows = []
    for graph, eplus, pc in order:
        series = _assemble(grouped[(graph, eplus, pc)], cutoff)
        if series.is_zero():
            continue
        zero = graph.zero_edges()
        rows.append(GraphContribution(graph, eplus, tuple(zip(zero, pc)), graph.automorphism_order(), series))
    return rows


def _weighted_total(rows: Sequence[GraphContribution], cutoff: int) -> QSeries:
    total = QSeries.zero(cutoff)
    for row in rows:
        total = total + row.series.scalar_mul(Fraction(1, row.automorphisms))
    return total


def aux_bracket(
    locals_: Sequence[ShiftedSymElement],
    special: ShiftedSymElement,
    cutoff: int,
    graphs: Optional[Sequence[GlobalGraph]] = None,
    table: Optional[LocalTable] = None,
) -> QSeries:
    """
    [F₁, …, Fₙ; F₀] = Σ_Γ 1/|Aut Γ| · [F₁, …, Fₙ; F₀]_Γ.

    Con F_v = f_μ y F₀ = g_ν coincide con ⟨Π f_μ · g_ν⟩_w.
    """
    return _weighted_total(graph_contributions(locals_, special, cutoff, graphs, table), cutoff)


def sv_aux_bracket(
    locals_: Sequence[ShiftedSymElement],
    special: ShiftedSymElement,
    p: int,
    cutoff: int,
    graphs: Optional[Sequence[GlobalGraph]] = None,
    table: Optional[LocalTable] = None,
) -> QSeries:
    """
    Corchete auxiliar con peso de Siegel-Veech Σ_e H_e·w_e^p.

    Raises:
        ValueError: Si p no es impar ≥ -1
    """
    rows = graph_contributions(locals_, special, cutoff, graphs, table, sv_exponent=p)
    return _weighted_total(rows, cutoff)


# -- descomposición de w-corchetes ----------------------------------------------------

@dataclass(frozen=True, order=True)
class AuxBracketSpec:
    """[p_{t₁}, …, p_{t_k}; Π p̄_{s_i}]."""

    locals: Tuple[int, ...]
    special: Partition = EMPTY

    @property
    def weight(self) -> int:
        return sum(t + 1 for t in self.locals) + self.special.size

    def local_elements(self) -> List[ShiftedSymElement]:
        return [ShiftedSymElement.p(t) for t in self.locals]

    def special_element(self) -> ShiftedSymElement:
        return ShiftedSymElement.monomial(Monomial(EMPTY, self.special))

    def to_json(self) -> Dict[str, List[int]]:
        return {"locals": list(self.locals), "special": list(self.special.parts)}

    def __str__(self) -> str:
        left = ", ".join(f"p{t}" for t in self.locals)
        right = "·".join(f"p̄{s}" for s in self.special.parts) or "1"
        return f"[{left}; {right}]"


def _constant_split(ells: Sequence[int]) -> List[Tuple[Fraction, Tuple[int, ...]]]:
    """Π p_ℓ = Σ_T Π_{ℓ∉T} p_ℓ(∅) · Π_{ℓ∈T} (p_ℓ - p_ℓ(∅))."""
    terms = [(Fraction(1), ())]
    for ell in ells:
        constant = eval_p(ell, EMPTY)
        grown = []
        for coeff, kept in terms:
            grown.append((coeff, kept + (ell,)))
            if constant:
                grown.append((coeff * constant, kept))
        terms = grown
    return terms


def _canonical(ells: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sorted(ells, reverse=True))


def _decompose(ells: Tuple[int, ...], pbar: Partition, coeff: Fraction,
               out: Dict[AuxBracketSpec, Fraction]) -> None:
    """
    Acumular coef·⟨Π (p_ℓ - p_ℓ(∅)) · p̄_a⟩_w como corchetes auxiliares.

    p̄_a = Σ h_j g_{ν_j}; cada g_ν se separa en su parte pura en p̄ (corchete
    terminal) y monomios con p, que vuelven a ser w-corchetes de peso p̄ menor.
    """
    if not pbar.parts:
        spec = AuxBracketSpec(_canonical(ells))
        out[spec] = out.get(spec, Fraction(0)) + coeff
        return
    for h, nu in pbar_monomial_in_g_span(pbar):
        pure, rest = degree_part(expand_g(nu))
        for h_mono, h_coeff in h:
            for c_split, kept in _constant_split(h_mono.p.parts):
                vertices = ells + kept
                factor = coeff * h_coeff * c_split
                for g_mono, g_coeff in pure:
                    spec = AuxBracketSpec(_canonical(vertices), g_mono.pbar)
                    out[spec] = out.get(spec, Fraction(0)) + factor * g_coeff
                for g_mono, g_coeff in rest:
                    if g_mono.pbar.size >= pbar.size:
                        raise SolveError(f"La descomposición de p̄_{pbar} no reduce el peso ({g_mono})")
                    for c_inner, inner in _constant_split(g_mono.p.parts):
                        _decompose(vertices + inner, g_mono.pbar, factor * g_coeff * c_inner, out)


def decompose_element(element: ShiftedSymElement) -> List[Tuple[Fraction, AuxBracketSpec]]:
    """
    Escribir ⟨F⟩_w como combinación de corchetes [p_t…; Π p̄_s].

    Returns:
        Pares (coeficiente, corchete) ordenados y sin ceros
    """
    out: Dict[AuxBracketSpec, Fraction] = {}
    for mono, coeff in element:
        for c_split, kept in _constant_split(mono.p.parts):
            _decompose(kept, mono.pbar, coeff * c_split, out)
    terms = sorted((spec, c) for spec, c in out.items() if c)
    logger.debug(f"Descomposición de {element}: {len(terms)} corchetes auxiliares")
    return [(c, spec) for spec, c in terms]


def decompose_wbracket(target: Monomial) -> List[Tuple[Fraction, AuxBracketSpec]]:
    """Descomposición de ⟨Π p_ℓ Π p̄_k⟩_w (ver decompose_element)."""
    return decompose_element(ShiftedSymElement.monomial(target))


def evaluate_decomposition(
    terms: Sequence[Tuple[Fraction, AuxBracketSpec]],
    cutoff: int,
    table: Optional[LocalTable] = None,
) -> QSeries:
    """Σ c·[p_t…; p̄_s] hasta q^cutoff."""
    table = table or LocalTable()
    total = QSeries.zero(cutoff)
    for coeff, spec in terms:
        series = aux_bracket(spec.local_elements(), spec.special_element(), cutoff, table=table)
        total = total + series.scalar_mul(coeff)
    return total


# -- motor de grafos para perfiles ----------------------------------------------------

def profile_element(profile: RamificationProfile) -> ShiftedSymElement:
    """g_ν·Π f_{μ_i} expandido en Λ̄."""
    element = expand_g(profile.nu)
    for mu in profile.mus:
        element = element * fmu_to_p_basis(mu)
    return element


def graph_engine_count(profile: RamificationProfile, cutoff: int, table: Optional[LocalTable] = None) -> QSeries:
    """
    N′(Π) = ⟨g_ν Π f_{μ_i}⟩_w evaluado como suma de corchetes auxiliares.

    Args:
        profile: Perfil de ramificación
        cutoff: Área máxima
        table: Tabla de factores locales compartida

    Returns:
        QSeries de N′ hasta q^cutoff
    """
    terms = decompose_element(profile_element(profile))
    logger.info(f"Motor de grafos para {profile}: {len(terms)} corchetes auxiliares")
    return evaluate_decomposition(terms, cutoff, table)
