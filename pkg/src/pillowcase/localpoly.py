"""
Factores locales de las sumas de grafos.

    A(w⁻, w⁺, F) = 1/(Πw⁻·Πw⁺)·Σ_{|λ|=d} χ^λ(w⁻)·χ^λ(w⁺)·F(λ)
    A₂(w, F)     = 1/Πw·Σ_{|λ|=d} √w(λ)·χ^λ(w)·F(λ)

Las versiones primadas restan por inclusión-exclusión los cilindros no
ramificados (pares de anchos iguales, cada par con peso 1/w). Para anchos
grandes los valores salen de (cuasi-)polinomios ajustados y guardados en
LocalTable.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import prod
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import sympy

from .brackets import sqrt_weight_w
from .errors import PiecewiseFitError, SolveError
from .linalg import matrix_rank, solve_unique
from .shifted import ShiftedSymElement
from .sympart import Partition, character, enum_partitions

logger = logging.getLogger(__name__)

Widths = Tuple[int, ...]
Exponents = Tuple[int, ...]

HELD_OUT_POINTS = 10
DIRECT_LIMIT = 10
MAX_SAMPLE_TOTAL = 40


def _check_widths(widths: Sequence[int]) -> Widths:
    widths = tuple(int(w) for w in widths)
    if any(w < 1 for w in widths):
        raise SolveError(f"Anchos no positivos: {list(widths)}")
    return widths


# -- sumas directas ------------------------------------------------------------

@lru_cache(maxsize=None)
def _triple(wminus: Widths, wplus: Widths, F: ShiftedSymElement) -> Fraction:
    d = sum(wminus)
    cls_minus, cls_plus = Partition.of(wminus), Partition.of(wplus)
    total = Fraction(0)
    for lam in enum_partitions(d):
        a = character(lam, cls_minus)
        if not a:
            continue
        b = character(lam, cls_plus)
        if b:
            total += a * b * F(lam)
    return total / (prod(wminus) * prod(wplus))


def triple_hurwitz(wminus: Sequence[int], wplus: Sequence[int], F: ShiftedSymElement) -> Fraction:
    """
    A(w⁻, w⁺, F) por suma de caracteres.

    Raises:
        SolveError: Si Σw⁻ ≠ Σw⁺
    """
    wminus, wplus = _check_widths(wminus), _check_widths(wplus)
    if sum(wminus) != sum(wplus):
        raise SolveError(f"Tamaños distintos: Σw⁻ = {sum(wminus)}, Σw⁺ = {sum(wplus)}")
    return _triple(tuple(sorted(wminus)), tuple(sorted(wplus)), F)


@lru_cache(maxsize=None)
def _stabilized(widths: Widths, F: ShiftedSymElement) -> Fraction:
    d = sum(widths)
    cls = Partition.of(widths)
    total = Fraction(0)
    for lam in enum_partitions(d):
        chi = character(lam, cls)
        if not chi:
            continue
        root = sqrt_weight_w(lam)
        if root:
            total += root * chi * F(lam)
    return total / prod(widths)


def stabilized_hurwitz(widths: Sequence[int], F: ShiftedSymElement) -> Fraction:
    """
    A₂(w, F) por suma de caracteres; solo λ balanceadas contribuyen.

    Raises:
        SolveError: Si Σw es impar
    """
    widths = _check_widths(widths)
    if sum(widths) % 2:
        raise SolveError(f"A₂ requiere Σw par: {list(widths)}")
    return _stabilized(tuple(sorted(widths)), F)


def _cross_matchings(left: Widths, right: Widths) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Emparejamientos parciales entre anchos iguales de dos tuplas."""

    def extend(i: int, used: frozenset, chosen: Tuple[Tuple[int, int], ...]):
        if i == len(left):
            yield chosen
            return
        yield from extend(i + 1, used, chosen)
        for j, w in enumerate(right):
            if j not in used and w == left[i]:
                yield from extend(i + 1, used | {j}, chosen + ((i, j),))

    yield from extend(0, frozenset(), ())


def _self_matchings(widths: Widths) -> Iterator[Tuple[Tuple[int, int], ...]]:
    """Emparejamientos parciales entre anchos iguales de una misma tupla."""

    def extend(i: int, used: frozenset, chosen: Tuple[Tuple[int, int], ...]):
        while i < len(widths) and i in used:
            i += 1
        if i >= len(widths):
            yield chosen
            return
        yield from extend(i + 1, used | {i}, chosen)
        for j in range(i + 1, len(widths)):
            if j not in used and widths[j] == widths[i]:
                yield from extend(i + 1, used | {i, j}, chosen + ((i, j),))

    yield from extend(0, frozenset(), ())


def connected_triple(wminus: Sequence[int], wplus: Sequence[int], F: ShiftedSymElement) -> Fraction:
    """A′(w⁻, w⁺, F): sin cilindros no ramificados."""
    wminus, wplus = _check_widths(wminus), _check_widths(wplus)
    if sum(wminus) != sum(wplus):
        raise SolveError(f"Tamaños distintos: Σw⁻ = {sum(wminus)}, Σw⁺ = {sum(wplus)}")
    total = Fraction(0)
    for matching in _cross_matchings(wminus, wplus):
        left = {i for i, _ in matching}
        right = {j for _, j in matching}
        rest_minus = tuple(w for i, w in enumerate(wminus) if i not in left)
        rest_plus = tuple(w for j, w in enumerate(wplus) if j not in right)
        factor = Fraction((-1) ** len(matching), prod(wminus[i] for i, _ in matching))
        total += factor * _triple(tuple(sorted(rest_minus)), tuple(sorted(rest_plus)), F)
    return total


def connected_stabilized(widths: Sequence[int], F: ShiftedSymElement) -> Fraction:
    """A₂′(w, F): sin cilindros no ramificados (pares de anchos iguales)."""
    widths = _check_widths(widths)
    if sum(widths) % 2:
        raise SolveError(f"A₂ requiere Σw par: {list(widths)}")
    total = Fraction(0)
    for matching in _self_matchings(widths):
        used = {i for pair in matching for i in pair}
        rest = tuple(w for i, w in enumerate(widths) if i not in used)
        factor = Fraction((-1) ** len(matching), prod(widths[i] for i, _ in matching))
        total += factor * _stabilized(tuple(sorted(rest)), F)
    return total


# -- cuasi-polinomios ------------------------------------------------------------

def _monomials(arity: int, degree: int) -> List[Exponents]:
    if arity == 0:
        return [()]
    result = []
    for total in range(degree + 1):
        result.extend(_compositions_nonneg(total, arity))
    return result


def _compositions_nonneg(total: int, parts: int) -> List[Exponents]:
    if parts == 1:
        return [(total,)]
    return [(first,) + rest for first in range(total, -1, -1)
            for rest in _compositions_nonneg(total - first, parts - 1)]


def _evaluate_monomial(exps: Exponents, point: Sequence[int]) -> Fraction:
    return Fraction(prod(x ** e for x, e in zip(point, exps)))


@dataclass
class QuasiPolynomial:
    """Polinomio exacto por clase de paridad de los anchos."""

    arity: int
    cosets: Dict[Tuple[int, ...], Dict[Exponents, Fraction]] = field(default_factory=dict)

    def coset_of(self, point: Sequence[int]) -> Tuple[int, ...]:
        return tuple(x % 2 for x in point)

    def evaluate(self, point: Sequence[int]) -> Fraction:
        coset = self.coset_of(point)
        if coset not in self.cosets:
            raise SolveError(f"Clase de paridad {coset} sin ajustar")
        return sum((c * _evaluate_monomial(e, point) for e, c in self.cosets[coset].items()),
                   Fraction(0))

    def to_sympy(self, coset: Tuple[int, ...]) -> sympy.Expr:
        symbols = sympy.symbols(f"w1:{self.arity + 1}") if self.arity else ()
        expr = sympy.Integer(0)
        for exps, c in self.cosets.get(coset, {}).items():
            term = sympy.Rational(c.numerator, c.denominator)
            for s, e in zip(symbols, exps):
                term *= s ** e
            expr += term
        return expr

    def to_json(self) -> Dict[str, List[List[Any]]]:
        return {
            "".join(str(m) for m in coset) or "-": [[list(e), str(c)] for e, c in sorted(poly.items())]
            for coset, poly in sorted(self.cosets.items())
        }


def _coset_points(coset: Tuple[int, ...], start_total: int = 0) -> Iterator[Widths]:
    """Puntos con w_i ≡ coset_i (mod 2), por suma creciente."""
    arity = len(coset)
    total = max(start_total, sum(1 if m else 2 for m in coset))
    while total <= MAX_SAMPLE_TOTAL:
        for comp in _compositions_nonneg(total, arity) if arity else [()]:
            if all(x >= 1 and x % 2 == m for x, m in zip(comp, coset)):
                yield comp
        total += 1


def _fit_on_points(
    label: str,
    values: Callable[[Widths], Fraction],
    points: Iterator[Widths],
    arity: int,
    degree: int,
) -> Tuple[Dict[Exponents, Fraction], List[Widths]]:
    monomials = _monomials(arity, degree)
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    used: List[Widths] = []
    for point in points:
        rows.append([_evaluate_monomial(e, point) for e in monomials])
        rhs.append(values(point))
        used.append(point)
        if len(rows) >= len(monomials) and matrix_rank(rows, len(monomials)) == len(monomials):
            break
    else:
        raise SolveError(f"{label}: muestra insuficiente para {len(monomials)} monomios")
    solution = solve_unique(rows, rhs, len(monomials))
    return dict(zip(monomials, solution)), used


def _verify(poly: Dict[Exponents, Fraction], values: Callable[[Widths], Fraction],
            points: Iterator[Widths], count: int) -> Optional[Widths]:
    checked = 0
    for point in points:
        predicted = sum((c * _evaluate_monomial(e, point) for e, c in poly.items()), Fraction(0))
        if predicted != values(point):
            return point
        checked += 1
        if checked == count:
            break
    return None


def fit_function(
    values: Callable[[Widths], Fraction],
    arity: int,
    degree_bound: int,
    coset: Tuple[int, ...],
    label: str = "F",
) -> Dict[Exponents, Fraction]:
    """
    Interpolar exactamente una función de anchos sobre una clase de paridad.

    Raises:
        PiecewiseFitError: Si el polinomio no reproduce los puntos reservados
    """
    points = _coset_points(coset)
    poly, used = _fit_on_points(label, values, points, arity, degree_bound)
    failure = _verify(poly, values, points, HELD_OUT_POINTS)
    if failure is not None:
        diagnostic = chamber_diagnostic(values, arity, degree_bound, coset)
        raise PiecewiseFitError(
            f"{label}: el ajuste de grado {degree_bound} falla en {list(failure)}", diagnostic
        )
    logger.debug(f"{label}: ajuste en la clase {coset} con {len(used)} puntos")
    return poly


def chamber_diagnostic(values: Callable[[Widths], Fraction], arity: int,
                       degree_bound: int, coset: Tuple[int, ...]) -> Dict[str, Any]:
    """
    Ajustes por cámara en coordenadas u = min(w₁, w₂), v = max(w₁, w₂) (solo aridad 2).

    La cámara u<v se ajusta en dos variables; la diagonal u=v en una sola,
    con la función restringida t ↦ values((t, t)).

    Returns:
        Diccionario con el polinomio de cada cámara o el motivo de falla
    """
    diagnostic: Dict[str, Any] = {"coset": list(coset), "degree_bound": degree_bound}
    if arity != 2:
        diagnostic["chambers"] = None
        return diagnostic
    diagnostic["convention"] = "u = min(w1, w2), v = max(w1, w2)"

    def diagonal(point: Widths) -> Fraction:
        return values((point[0], point[0]))

    chambers: Dict[str, Any] = {}
    for name, restricted, variables, points in (
        ("u<v", values, 2, (p for p in _coset_points(coset) if p[0] < p[1])),
        ("u=v", diagonal, 1, ((p[0],) for p in _coset_points(coset) if p[0] == p[1])),
    ):
        try:
            poly, _ = _fit_on_points(name, restricted, points, variables, degree_bound)
            failure = _verify(poly, restricted, points, HELD_OUT_POINTS)
            chambers[name] = {
                "polynomial": str(evaluate_chamber_fit(poly)),
                "verified": failure is None,
            }
        except SolveError as e:
            chambers[name] = {"error": str(e)}
    diagnostic["chambers"] = chambers
    return diagnostic


def evaluate_chamber_fit(poly: Dict[Exponents, Fraction]) -> sympy.Expr:
    """Polinomio de cámara como expresión en u (mínimo) y, si hay dos variables, v (máximo)."""
    u, v = sympy.symbols("u v")
    expr = sympy.Integer(0)
    for e, c in poly.items():
        term = sympy.Rational(c.numerator, c.denominator) * u ** e[0]
        if len(e) > 1:
            term *= v ** e[1]
        expr += term
    return sympy.expand(expr)


def stabilized_cosets(arity: int) -> List[Tuple[int, ...]]:
    """Clases de paridad con Σ m_i par."""
    return [c for c in product((0, 1), repeat=arity) if sum(c) % 2 == 0]


def degree_bound_for(F: ShiftedSymElement, arity: int) -> int:
    return max(F.weight - arity, 0)


def fit_quasipolynomial(
    F: ShiftedSymElement,
    arity: int,
    degree_bound: Optional[int] = None,
    coset: Optional[Tuple[int, ...]] = None,
) -> QuasiPolynomial:
    """
    Cuasi-polinomio de A₂′(w, F) en w = (w₁,...,w_t).

    Args:
        F: Elemento (producto de p̄_k en el caso polinomial)
        arity: Número de anchos t
        degree_bound: Cota de grado (por defecto wt(F) - t)
        coset: Clase de paridad; por defecto todas las de suma par

    Raises:
        PiecewiseFitError: Si en alguna clase el ajuste no verifica
    """
    if degree_bound is None:
        degree_bound = degree_bound_for(F, arity)
    cosets = [tuple(coset)] if coset is not None else stabilized_cosets(arity)
    result = QuasiPolynomial(arity)
    for c in cosets:
        if sum(c) % 2:
            raise SolveError(f"Clase de paridad {c} con suma impar")
        result.cosets[c] = fit_function(
            lambda w: connected_stabilized(w, F), arity, degree_bound, c, label=f"A₂′({F})"
        )
    return result


def fit_triple_polynomial(F: ShiftedSymElement, n_minus: int, n_plus: int,
                          degree_bound: Optional[int] = None) -> QuasiPolynomial:
    """
    Polinomio de A′(w⁻, w⁺, F) en las variables libres w⁻[:-1] + w⁺.

    El último ancho de entrada queda determinado por Σw⁻ = Σw⁺.
    """
    if n_minus < 1 or n_plus < 1:
        raise SolveError("A′ requiere anchos de entrada y de salida")
    free = n_minus - 1 + n_plus
    if degree_bound is None:
        degree_bound = degree_bound_for(F, n_minus + n_plus)

    def values(point: Widths) -> Fraction:
        head, wplus = point[: n_minus - 1], point[n_minus - 1:]
        return connected_triple(head + (sum(wplus) - sum(head),), wplus, F)

    def points() -> Iterator[Widths]:
        for point in _all_points(free):
            head, wplus = point[: n_minus - 1], point[n_minus - 1:]
            if sum(wplus) - sum(head) >= 1:
                yield point

    label = f"A′({F}; {n_minus},{n_plus})"
    stream = points()
    poly, _ = _fit_on_points(label, values, stream, free, degree_bound)
    failure = _verify(poly, values, stream, HELD_OUT_POINTS)
    if failure is not None:
        raise PiecewiseFitError(f"{label}: el ajuste falla en {list(failure)}", {"point": list(failure)})
    result = QuasiPolynomial(free)
    for c in product((0, 1), repeat=free):
        result.cosets[c] = poly
    return result


def _all_points(arity: int) -> Iterator[Widths]:
    total = arity
    while total <= MAX_SAMPLE_TOTAL:
        for comp in _compositions_nonneg(total, arity):
            if all(x >= 1 for x in comp):
                yield comp
        total += 1


class LocalTable:
    """
    Memoria de factores locales A′ y A₂′.

    Para Σw ≤ DIRECT_LIMIT se evalúa por suma de caracteres; por encima se
    usa el (cuasi-)polinomio ajustado una sola vez por (F, forma).
    """

    def __init__(self, direct_limit: int = DIRECT_LIMIT):
        self.direct_limit = direct_limit
        self._triple_fits: Dict[Tuple[ShiftedSymElement, int, int], QuasiPolynomial] = {}
        self._stabilized_fits: Dict[Tuple[ShiftedSymElement, int], QuasiPolynomial] = {}

    def triple(self, wminus: Sequence[int], wplus: Sequence[int], F: ShiftedSymElement) -> Fraction:
        wminus, wplus = tuple(sorted(wminus)), tuple(sorted(wplus))
        if sum(wminus) != sum(wplus):
            return Fraction(0)
        if sum(wminus) <= self.direct_limit:
            return connected_triple(wminus, wplus, F)
        key = (F, len(wminus), len(wplus))
        if key not in self._triple_fits:
            self._triple_fits[key] = fit_triple_polynomial(F, len(wminus), len(wplus))
        return self._triple_fits[key].evaluate(wminus[:-1] + wplus)

    def stabilized(self, widths: Sequence[int], F: ShiftedSymElement) -> Fraction:
        widths = tuple(sorted(widths))
        if sum(widths) % 2:
            return Fraction(0)
        if sum(widths) <= self.direct_limit:
            return connected_stabilized(widths, F)
        key = (F, len(widths))
        if key not in self._stabilized_fits:
            self._stabilized_fits[key] = fit_quasipolynomial(F, len(widths))
        return self._stabilized_fits[key].evaluate(widths)


# -- elementos con nombre ------------------------------------------------------------

def gbar_3111_local() -> ShiftedSymElement:
    """ḡ′ = ḡ_{(3,1,1,1)} + p̄₁/96, el factor local del vértice especial."""
    return (
        ShiftedSymElement.pbar(1, 1, 1).scale(Fraction(1, 108))
        - ShiftedSymElement.pbar(2, 1).scale(Fraction(1, 36))
        + ShiftedSymElement.pbar(1).scale(Fraction(3, 8) + Fraction(1, 96))
        + ShiftedSymElement.pbar(3).scale(Fraction(2, 27))
    )


def named_element(name: str) -> ShiftedSymElement:
    """
    Elementos predefinidos para `fitlocal`.

    Raises:
        KeyError: Si el nombre no existe
    """
    presets: Dict[str, Callable[[], ShiftedSymElement]] = {
        "gbar3111": gbar_3111_local,
        "gdeg3111": lambda: ShiftedSymElement.pbar(1).scale(Fraction(-1, 4)),
        "pbar1": lambda: ShiftedSymElement.pbar(1),
        "pbar4": lambda: ShiftedSymElement.pbar(4),
        "p1": lambda: ShiftedSymElement.p(1),
        "p2": lambda: ShiftedSymElement.p(2),
        "f2": lambda: ShiftedSymElement.p(2).scale(Fraction(1, 2)),
        "one": lambda: ShiftedSymElement.constant(1),
        "p5/5": lambda: ShiftedSymElement.p(5).scale(Fraction(1, 5)),
    }
    if name not in presets:
        raise KeyError(f"Elemento desconocido: {name}. Disponibles: {', '.join(sorted(presets))}")
    return presets[name]()
