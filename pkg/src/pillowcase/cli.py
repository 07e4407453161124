#!/usr/bin/env python3
"""
pillowcase CLI
==============

Interfaz de línea de comandos con Click: series de conteo de cubrimientos
de la almohada, series de Siegel-Veech, reconocimiento cuasimodular,
ajuste de factores locales, sumas de grafos y corpus de regresión.

Códigos de salida: 0 éxito, 2 uso o validación, 3 error de cómputo,
4 fallas en el corpus.
"""

import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import click
import pydantic
import sympy
from rich.console import Console
from rich.table import Table

from . import __version__
from .brackets import Connectivity, CoverCountQuery, area_sv_constant, count_covers, sv_series
from .config_loader import load_config
from .corpus import RunContext, load_corpus, run_corpus
from .errors import EngineMismatchError, PillowcaseError, RecognitionError
from .graphs import parse_graph_spec
from .graphsum import (
    decompose_element,
    graph_contributions,
    graph_engine_count,
    graph_sum_S,
    parity_conditions,
    profile_element,
)
from .localpoly import LocalTable, fit_quasipolynomial, fit_triple_polynomial, named_element
from .models import CountReport, Engine, JobSpec, dump_json
from .qmforms import QMForm, monomial_basis, recognize, required_coefficients, volume_from_form
from .qseries import QSeries
from .sympart import RamificationProfile
from .validator import ValidationError, require_valid, validate_graph_data, validate_profile_data
from .workers import configure_threads

console = Console()
logger = logging.getLogger(__name__)

EXIT_USAGE = 2
EXIT_COMPUTATION = 3
EXIT_CORPUS = 4

SERIES_PREVIEW = 8
WEIGHT_SLACK = 2


def _setup_logging(settings: Dict[str, Any], verbose: bool) -> None:
    """Configurar logging desde la sección `logging` de la configuración."""
    level = logging.DEBUG if verbose else getattr(logging, str(settings["level"]).upper())
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    file_error: Optional[OSError] = None
    if settings.get("file"):
        try:
            handlers.append(logging.FileHandler(settings["file"], mode="a"))
        except OSError as e:
            file_error = e
    logging.basicConfig(level=level, format=settings["format"], handlers=handlers, force=True)
    if file_error is not None:
        logger.warning(f"No se pudo abrir el archivo de log {settings['file']}: {file_error}; se usa solo stderr")


def _fail(error: Exception) -> None:
    """Imprimir el error y salir con el código que corresponde."""
    console.print(f"❌ Error: {error}", style="red")
    if isinstance(error, (ValidationError, pydantic.ValidationError, click.BadParameter)):
        sys.exit(EXIT_USAGE)
    sys.exit(EXIT_COMPUTATION)


def _read_json(source: str, label: str) -> Any:
    """Documento JSON desde un archivo existente o escrito en línea."""
    try:
        if source.lstrip().startswith(("{", "[")):
            return json.loads(source)
        return json.loads(Path(source).read_text(encoding="utf-8"))
    except OSError as e:
        raise click.BadParameter(f"No se pudo leer {label} '{source}': {e}")
    except json.JSONDecodeError as e:
        raise click.BadParameter(f"{label} no es JSON válido: {e}")


def _load_profile(source: str) -> Dict[str, Any]:
    data = _read_json(source, "el perfil")
    require_valid(validate_profile_data(data), "Perfil")
    return data


def _computation(ctx: click.Context) -> Dict[str, Any]:
    return ctx.obj["config"]["computation"]


def _default_cutoff(ctx: click.Context, max_weight: int) -> int:
    """Dimensión de la base cuasimodular más el margen, como último exponente."""
    margin = int(_computation(ctx)["cutoff_margin"])
    return len(monomial_basis("gamma02", max_weight)) + margin - 1


def _series_preview(series: QSeries) -> str:
    shown = [str(c) for c in series.q_coefficients()[:SERIES_PREVIEW]]
    return ", ".join(shown) + (", …" if len(series.q_coefficients()) > SERIES_PREVIEW else "")


def _recognize_into(report: CountReport, series: QSeries, max_weight: int) -> Optional[QMForm]:
    """
    Reconocer la serie y anotar el resultado en el reporte.

    Se reconoce hasta peso max_weight + WEIGHT_SLACK para poder detectar
    formas que exceden la cota; si la serie es demasiado corta para eso,
    se reconoce hasta la cota y within_bound queda sin decidir.
    """
    search_weight = max_weight + WEIGHT_SLACK
    if len(series.q_coefficients()) < required_coefficients("gamma02", search_weight):
        logger.info(f"Serie corta para peso {search_weight}; se reconoce solo hasta {max_weight}")
        search_weight = max_weight
    try:
        form = recognize(series, "gamma02", search_weight)
    except RecognitionError as e:
        logger.warning(f"Sin forma cuasimodular: {e}")
        report.recognition_error = str(e)
        return None
    report.form = form.to_json()
    report.form_text = str(form)
    report.mixed_weight = form.weight
    if search_weight > max_weight:
        report.within_bound = form.weight <= max_weight
        if not report.within_bound:
            logger.warning(f"Peso reconocido {form.weight} excede la cota {max_weight}")
    return form


def _print_report(report: CountReport) -> None:
    table = Table(show_header=True, header_style="bold blue", title=f"{report.command} {report.profile}")
    table.add_column("Campo", style="cyan")
    table.add_column("Valor", style="green")
    table.add_row("Estrato", report.profile.stratum_label())
    table.add_row("Conectividad", report.connectivity)
    table.add_row("Motores", ", ".join(report.engines))
    if report.p is not None:
        table.add_row("p", str(report.p))
    table.add_row("cutoff", str(report.cutoff))
    table.add_row("Coeficientes", _series_preview(QSeries.from_json(report.series)))
    table.add_row("Cota de peso", str(report.weight_bound))
    if report.form_text is not None:
        table.add_row("Forma", report.form_text)
        table.add_row("Peso mixto", str(report.mixed_weight))
    if report.recognition_error is not None:
        table.add_row("Reconocimiento", report.recognition_error)
    for key, value in report.area.items():
        table.add_row(key, str(value))
    console.print(table)


def _emit(data: Dict[str, Any], out: Optional[Path]) -> None:
    if out is not None:
        dump_json(data, out)
        console.print(f"✅ Resultado escrito en {out}", style="green")


@click.group()
@click.version_option(version=__version__, prog_name="pillowcase")
@click.option('--verbose', '-v', is_flag=True, help='Activar modo verbose')
@click.option('--config', '-c', type=click.Path(exists=True), help='Archivo de configuración')
@click.pass_context
def cli(ctx, verbose, config):
    """
    🧮 pillowcase: conteo de cubrimientos de la almohada y formas cuasimodulares

    Calcula series de conteo por sumas de caracteres o de grafos, las
    reconoce como formas cuasimodulares para Γ₀(2) y deriva volúmenes y
    constantes de Siegel-Veech.
    """
    ctx.ensure_object(dict)
    try:
        settings = load_config(config)
    except (FileNotFoundError, ValueError) as e:
        console.print(f"❌ Error: {e}", style="red")
        sys.exit(EXIT_USAGE)
    _setup_logging(settings["logging"], verbose)
    configure_threads(int(settings["computation"]["threads"]))
    ctx.obj["config"] = settings
    ctx.obj["verbose"] = verbose


@cli.command()
@click.argument('profile')
@click.option('--cutoff', type=int, help='Último exponente de q (por defecto según la cota de peso)')
@click.option('--engine', type=click.Choice([e.value for e in Engine]), help='Motor de cómputo')
@click.option('--connectivity', type=click.Choice([c.value for c in Connectivity]), help='Modo de conteo')
@click.option('--out', '-o', type=click.Path(dir_okay=False, path_type=Path), help='Archivo JSON de salida')
@click.pass_context
def count(ctx, profile, cutoff, engine, connectivity, out):
    """
    📈 Serie de conteo N(Π) de un perfil de ramificación

    Ejemplos:
    pillowcase count '{"nu":[3,1,1,1],"mus":[[2]]}'
    pillowcase count perfil.json --engine both --connectivity no-unramified
    """
    computation = _computation(ctx)
    try:
        data = _load_profile(profile)
        job = JobSpec(
            command="count",
            profile=data,
            cutoff=cutoff,
            engine=engine or computation["engine"],
            connectivity=connectivity or computation["connectivity"],
            out=out,
        )
        pi = job.ramification_profile()
        bound = pi.weight_bound
        cutoff = job.cutoff or _default_cutoff(ctx, bound + WEIGHT_SLACK)

        series_by_engine: Dict[str, QSeries] = {}
        if job.engine in (Engine.CHARACTER, Engine.BOTH):
            series_by_engine["character"] = count_covers(CoverCountQuery(pi, cutoff, job.connectivity))
        if job.engine in (Engine.GRAPH, Engine.BOTH):
            table = LocalTable(int(computation["local_direct_limit"]))
            series_by_engine["graph"] = graph_engine_count(pi, cutoff, table)

        engines_agree = None
        if job.engine is Engine.BOTH:
            engines_agree = series_by_engine["character"] == series_by_engine["graph"]
            if not engines_agree:
                raise EngineMismatchError(
                    f"Caracteres {series_by_engine['character']} ≠ grafos {series_by_engine['graph']}"
                )
        series = next(iter(series_by_engine.values()))

        report = CountReport(
            command="count",
            profile=pi,
            connectivity=job.connectivity.value,
            cutoff=cutoff,
            series=series.to_json(),
            weight_bound=bound,
            engines=list(series_by_engine),
            engines_agree=engines_agree,
        )
        _recognize_into(report, series, bound)
        _print_report(report)
        _emit(report.to_dict(), job.out)
    except (ValidationError, pydantic.ValidationError, click.BadParameter, PillowcaseError) as e:
        _fail(e)


@cli.command()
@click.argument('profile')
@click.option('--p', 'p', type=int, required=True, help='Exponente impar ≥ -1 del peso de Siegel-Veech')
@click.option('--cutoff', type=int, help='Último exponente de q')
@click.option('--connectivity', type=click.Choice([c.value for c in Connectivity]), help='Modo de conteo')
@click.option('--area', is_flag=True, help='Calcular volumen y constante de área (requiere p = -1)')
@click.option('--convention', type=click.Choice(["eo", "aez"]), default="eo", help='Normalización del volumen')
@click.option('--out', '-o', type=click.Path(dir_okay=False, path_type=Path), help='Archivo JSON de salida')
@click.pass_context
def sv(ctx, profile, p, cutoff, connectivity, area, convention, out):
    """
    📐 Serie de Siegel-Veech c_p(Π)

    Ejemplos:
    pillowcase sv '{"nu":[3,1,1,1],"mus":[[2]]}' --p -1 --area
    """
    computation = _computation(ctx)
    try:
        data = _load_profile(profile)
        job = JobSpec(
            command="sv",
            profile=data,
            cutoff=cutoff,
            p=p,
            connectivity=connectivity or computation["connectivity"],
            area=area,
            out=out,
        )
        pi = job.ramification_profile()
        bound = pi.weight_bound + job.p + 1
        cutoff = job.cutoff or _default_cutoff(ctx, max(bound, pi.weight_bound) + WEIGHT_SLACK)
        series = sv_series(pi, job.p, cutoff, job.connectivity)

        report = CountReport(
            command="sv",
            profile=pi,
            connectivity=job.connectivity.value,
            cutoff=cutoff,
            series=series.to_json(),
            weight_bound=bound,
            engines=["character"],
            p=job.p,
        )
        sv_form = _recognize_into(report, series, bound)

        if job.area:
            if sv_form is None:
                raise RecognitionError("La serie c_{-1} no se reconoce: no hay constante de área")
            counting = count_covers(CoverCountQuery(pi, cutoff, Connectivity.CONNECTED))
            n0_form = recognize(counting, "gamma02", pi.weight_bound)
            ratio = area_sv_constant(n0_form, sv_form, pi.dimension)
            volume = volume_from_form(n0_form, pi.dimension, convention)
            c_area = sympy.Rational(3 * ratio.numerator, ratio.denominator) / sympy.pi ** 2
            series_ratio = series.is_proportional_to(counting)
            if series_ratio is None:
                logger.warning("c_{-1} no es proporcional a N⁰: el estrato no es no variante")
            report.area = {
                "proportional_to_counting": series_ratio is not None,
                "series_ratio": None if series_ratio is None else str(series_ratio),
                "counting_form": str(n0_form),
                "volume": str(volume.to_sympy()),
                "volume_convention": convention,
                "pi2_over_3_c_area": str(ratio),
                "c_area": str(c_area),
            }
        _print_report(report)
        _emit(report.to_dict(), job.out)
    except (ValidationError, pydantic.ValidationError, click.BadParameter, PillowcaseError) as e:
        _fail(e)


@cli.command(name="recognize")
@click.argument('series_file', type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option('--gens', type=click.Choice(["gamma02", "level1", "gamma2"]), default="gamma02", help='Generadores')
@click.option('--max-weight', type=int, default=6, show_default=True, help='Peso mixto máximo')
@click.option('--out', '-o', type=click.Path(dir_okay=False, path_type=Path), help='Archivo JSON de salida')
def recognize_cmd(series_file, gens, max_weight, out):
    """
    🔎 Reconocer una serie guardada como forma cuasimodular

    Acepta una serie JSON o un reporte de `count`/`sv` (usa su campo "series").
    """
    try:
        data = _read_json(str(series_file), "la serie")
        if isinstance(data, dict) and "series" in data:
            data = data["series"]
        series = QSeries.from_json(data)
        form = recognize(series, gens, max_weight)
        console.print(f"✅ Forma ({gens}, peso {form.weight}): [bold]{form}[/bold]")
        _emit({"form": form.to_json(), "form_text": str(form), "mixed_weight": form.weight}, out)
    except (click.BadParameter, PillowcaseError) as e:
        _fail(e)


@cli.command()
@click.argument('element')
@click.option('--arity', type=int, default=1, show_default=True, help='Número de anchos de A₂′')
@click.option('--coset', help='Clase de paridad, p. ej. 11 (por defecto todas)')
@click.option('--degree-bound', type=int, help='Cota de grado del ajuste')
@click.option('--triple', nargs=2, type=int, help='Ajustar A′ con N_MINUS anchos de entrada y N_PLUS de salida')
@click.option('--out', '-o', type=click.Path(dir_okay=False, path_type=Path), help='Archivo JSON de salida')
def fitlocal(element, arity, coset, degree_bound, triple, out):
    """
    🧩 Ajustar el (cuasi-)polinomio de un factor local

    ELEMENT es un elemento con nombre: gbar3111, gdeg3111, pbar1, pbar4, p1, p2, f2, one, p5/5.
    """
    try:
        try:
            F = named_element(element)
        except KeyError as e:
            raise click.BadParameter(str(e))
        if triple:
            poly = fit_triple_polynomial(F, triple[0], triple[1], degree_bound)
            label = f"A′({element}; {triple[0]},{triple[1]})"
        else:
            parity = None
            if coset is not None:
                if len(coset) != arity or any(c not in "01" for c in coset):
                    raise click.BadParameter(f"Clase de paridad inválida para aridad {arity}: {coset}")
                parity = tuple(int(c) for c in coset)
            poly = fit_quasipolynomial(F, arity, degree_bound, parity)
            label = f"A₂′({element}; {arity})"

        table = Table(show_header=True, header_style="bold blue", title=label)
        table.add_column("Clase", style="cyan")
        table.add_column("Polinomio", style="green")
        for c in sorted(poly.cosets):
            table.add_row("".join(map(str, c)) or "-", str(poly.to_sympy(c)))
        console.print(table)
        _emit({"element": element, "label": label, "arity": poly.arity, "cosets": poly.to_json()}, out)
    except (click.BadParameter, PillowcaseError) as e:
        _fail(e)


@cli.command()
@click.argument('profile', required=False)
@click.option('--graph', 'graph_spec', help='Grafo global en JSON (lista orientaciones y sumas S)')
@click.option('--cutoff', type=int, default=4, show_default=True, help='Último exponente de q')
@click.option('--wmax', type=int, help='Cota de anchos; activa la re-ejecución de saturación')
@click.option('--out', '-o', type=click.Path(dir_okay=False, path_type=Path), help='Archivo JSON de salida')
@click.pass_context
def graphs(ctx, profile, graph_spec, cutoff, wmax, out):
    """
    🕸️ Grafos, orientaciones y aportes

    Con PROFILE lista los corchetes auxiliares de N′(Π) y el aporte de cada
    grafo; con --graph lista las sumas S(Γ, E⁺, 0, pc) de un grafo.
    """
    if (profile is None) == (graph_spec is None):
        raise click.UsageError("Indique un PROFILE o --graph, pero no ambos")
    if cutoff < 1:
        raise click.UsageError(f"cutoff debe ser ≥ 1: {cutoff}")
    wmax = wmax if wmax is not None else _computation(ctx)["wmax"]
    try:
        if graph_spec is not None:
            data = _read_json(graph_spec, "el grafo")
            require_valid(validate_graph_data(data), "Grafo")
            document = _graph_sums(data, cutoff, wmax)
        else:
            table = LocalTable(int(_computation(ctx)["local_direct_limit"]))
            document = _profile_graphs(_load_profile(profile), cutoff, table)
        _emit(document, out)
    except (ValidationError, click.BadParameter, PillowcaseError) as e:
        _fail(e)
    except ValueError as e:
        _fail(ValidationError(str(e)))


def _graph_sums(data: Dict[str, Any], cutoff: int, wmax: Optional[int]) -> Dict[str, Any]:
    graph, eplus = parse_graph_spec(data)
    m = [0] * len(graph.edges)
    table = Table(show_header=True, header_style="bold blue", title=f"S{graph}, E⁺={sorted(eplus)}")
    table.add_column("Paridad E⁰", style="cyan")
    table.add_column("Coeficientes", style="green")
    rows = []
    for pc in parity_conditions(graph):
        series = graph_sum_S(graph, eplus, m, pc, cutoff, wmax)
        table.add_row(str(pc) if pc else "-", _series_preview(series))
        rows.append({"parity": {str(e): p for e, p in pc.items()}, "series": series.to_json()})
    console.print(table)
    return {"graph": graph.to_json(eplus), "automorphisms": graph.automorphism_order(), "sums": rows}


def _profile_graphs(data: Dict[str, Any], cutoff: int, local_table: LocalTable) -> Dict[str, Any]:
    pi = RamificationProfile.from_json(data)
    terms = decompose_element(profile_element(pi))
    table = Table(show_header=True, header_style="bold blue", title=f"Grafos de N′{pi}")
    table.add_column("Corchete", style="cyan")
    table.add_column("Coef.", style="yellow")
    table.add_column("Grafo", style="blue")
    table.add_column("E⁺ / paridad")
    table.add_column("|Aut|")
    table.add_column("Coeficientes", style="green")
    brackets = []
    for coeff, spec in terms:
        rows = graph_contributions(spec.local_elements(), spec.special_element(), cutoff, table=local_table)
        for row in rows:
            table.add_row(
                str(spec), str(coeff), str(row.graph),
                f"{sorted(row.eplus)} / {dict(row.parity)}", str(row.automorphisms),
                _series_preview(row.series),
            )
        brackets.append({"bracket": spec.to_json(), "coefficient": str(coeff),
                         "contributions": [row.to_dict() for row in rows]})
    console.print(table)
    return {"profile": pi.to_json(), "cutoff": cutoff, "brackets": brackets}


@cli.command()
@click.option('--path', 'corpus_path', type=click.Path(exists=True, dir_okay=False), help='Corpus YAML')
@click.option('--quick', is_flag=True, help='Omitir las entradas lentas')
@click.option('--out', '-o', type=click.Path(dir_okay=False, path_type=Path), help='Archivo JSON de salida')
@click.pass_context
def corpus(ctx, corpus_path, quick, out):
    """
    🧪 Ejecutar el corpus de regresión

    Sale con código 4 si alguna entrada falla.
    """
    settings = ctx.obj["config"]
    computation = settings["computation"]
    try:
        entries = load_corpus(corpus_path or settings["corpus"]["path"])
    except PillowcaseError as e:
        _fail(e)
        return

    context = RunContext(
        table=LocalTable(int(computation["local_direct_limit"])),
        max_degree=int(computation["brute_force_max_degree"]),
    )

    def progress(result):
        if result.skipped:
            console.print(f"⏭️  {result.name}", style="dim")
        elif result.passed:
            console.print(f"✅ {result.name}", style="green")
        else:
            console.print(f"❌ {result.name}: {result.detail}", style="red")

    results = run_corpus(entries, quick=quick, context=context, progress=progress)
    failed = [r for r in results if not r.passed]
    skipped = sum(1 for r in results if r.skipped)

    table = Table(show_header=True, header_style="bold blue", title="Corpus")
    table.add_column("Total", style="cyan")
    table.add_column("Correctas", style="green")
    table.add_column("Fallidas", style="red")
    table.add_column("Omitidas", style="yellow")
    table.add_row(str(len(results)), str(len(results) - len(failed) - skipped), str(len(failed)), str(skipped))
    console.print(table)

    _emit({"results": [r.to_dict() for r in results], "failed": len(failed)}, out)
    if failed:
        sys.exit(EXIT_CORPUS)


def main():
    """Punto de entrada principal."""
    cli()


if __name__ == '__main__':
    main()
