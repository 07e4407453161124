"""
Formas cuasimodulares para Γ₀(2) y reconocimiento exacto de series.

Conjuntos de generadores:
    level1  : G₂, G₄, G₆
    gamma02 : G₂(τ), G₂(2τ), G₄(2τ)
    gamma2  : G₂(τ/2), G₂(τ), G₂(2τ)

Las formas se guardan como polinomios exactos en los generadores; el
reconocimiento resuelve un sistema lineal con los coeficientes de la serie
y verifica los últimos RECOGNITION_MARGIN coeficientes.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy
from sympy import Poly, Rational, Symbol

from .errors import RecognitionError, SaturationError, SolveError
from .linalg import solve_unique
from .qseries import QSeries, eisenstein

logger = logging.getLogger(__name__)

RECOGNITION_MARGIN = 4
SATURATION_FIT_MARGIN = 2


@dataclass(frozen=True)
class Generator:
    """Generador G_k(sτ)."""

    name: str
    weight: int
    k2: int
    scale: Fraction


GENERATOR_SETS: Dict[str, Tuple[Generator, ...]] = {
    "level1": (
        Generator("G2", 2, 2, Fraction(1)),
        Generator("G4", 4, 4, Fraction(1)),
        Generator("G6", 6, 6, Fraction(1)),
    ),
    "gamma02": (
        Generator("G2", 2, 2, Fraction(1)),
        Generator("G22", 2, 2, Fraction(2)),
        Generator("G42", 4, 4, Fraction(2)),
    ),
    "gamma2": (
        Generator("G2h", 2, 2, Fraction(1, 2)),
        Generator("G2", 2, 2, Fraction(1)),
        Generator("G22", 2, 2, Fraction(2)),
    ),
}

Exponents = Tuple[int, ...]


def _generators(generator_set: str) -> Tuple[Generator, ...]:
    try:
        return GENERATOR_SETS[generator_set]
    except KeyError:
        raise RecognitionError(
            f"Conjunto de generadores desconocido: {generator_set}. "
            f"Disponibles: {', '.join(GENERATOR_SETS)}"
        )


def _symbols(generator_set: str) -> List[Symbol]:
    return [Symbol(g.name) for g in _generators(generator_set)]


def level1_aliases() -> Dict[str, sympy.Expr]:
    """G₄ y G₆ escritos en G₂, G₂(2τ), G₄(2τ)."""
    g2, g22, g42 = _symbols("gamma02")
    F = g2 - 2 * g22
    return {
        "G4": 12 * F ** 2 - 4 * g42,
        "G6": Rational(2112, 7) * F ** 3 - Rational(960, 7) * F * g42,
    }


def _rational(value) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def _exponent_vectors(weights: Sequence[int], total: int) -> List[Exponents]:
    if not weights:
        return [()] if total == 0 else []
    head, rest = weights[0], weights[1:]
    vectors = []
    for e in range(total // head, -1, -1):
        for tail in _exponent_vectors(rest, total - e * head):
            vectors.append((e,) + tail)
    return vectors


def monomial_basis(generator_set: str, max_weight: int) -> List[Exponents]:
    """
    Monomios de peso ≤ max_weight, por peso y luego lexicográfico descendente.

    Args:
        generator_set: "level1", "gamma02" o "gamma2"
        max_weight: Peso máximo (par, ≥ 0)
    """
    if max_weight < 0 or max_weight % 2:
        raise RecognitionError(f"Peso máximo inválido: {max_weight}")
    weights = [g.weight for g in _generators(generator_set)]
    basis: List[Exponents] = []
    for weight in range(0, max_weight + 1, 2):
        basis.extend(sorted(_exponent_vectors(weights, weight), reverse=True))
    return basis


@lru_cache(maxsize=None)
def _generator_series(generator_set: str, cutoff: int) -> Tuple[QSeries, ...]:
    return tuple(eisenstein(g.k2, g.scale, cutoff) for g in _generators(generator_set))


@lru_cache(maxsize=None)
def monomial_series(generator_set: str, exponents: Exponents, cutoff: int) -> QSeries:
    """Expansión del monomio Π G_i^{e_i} hasta q^cutoff."""
    result = QSeries.one(cutoff)
    for series, e in zip(_generator_series(generator_set, cutoff), exponents):
        if e:
            result = result * series ** e
    return result


class QMForm:
    """Polinomio exacto en los generadores de un conjunto dado."""

    __slots__ = ("generator_set", "terms")

    def __init__(self, generator_set: str, terms: Optional[Mapping[Exponents, Any]] = None):
        size = len(_generators(generator_set))
        clean: Dict[Exponents, Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != size:
                raise RecognitionError(f"Vector de exponentes {exps} para {generator_set}")
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, Fraction(0)) + c
        self.generator_set = generator_set
        self.terms = {e: c for e, c in clean.items() if c}

    @property
    def generators(self) -> Tuple[Generator, ...]:
        return _generators(self.generator_set)

    def monomial_weight(self, exps: Exponents) -> int:
        return sum(e * g.weight for e, g in zip(exps, self.generators))

    @property
    def weight(self) -> int:
        """Peso mixto: máximo peso de los monomios presentes."""
        return max((self.monomial_weight(e) for e in self.terms), default=0)

    def weight_components(self) -> Dict[int, "QMForm"]:
        components: Dict[int, Dict[Exponents, Fraction]] = {}
        for exps, c in self.terms.items():
            components.setdefault(self.monomial_weight(exps), {})[exps] = c
        return {k: QMForm(self.generator_set, v) for k, v in sorted(components.items())}

    def leading_component(self) -> "QMForm":
        components = self.weight_components()
        return components[max(components)] if components else QMForm(self.generator_set)

    def is_zero(self) -> bool:
        return not self.terms

    def expand(self, cutoff: int) -> QSeries:
        """Expansión en q hasta q^cutoff."""
        total = QSeries.zero(cutoff)
        for exps, c in self.terms.items():
            total = total + monomial_series(self.generator_set, exps, cutoff).scalar_mul(c)
        return total

    def scale(self, value: Any) -> "QMForm":
        value = Fraction(value)
        return QMForm(self.generator_set, {e: c * value for e, c in self.terms.items()})

    def __add__(self, other: "QMForm") -> "QMForm":
        other = other.in_set(self.generator_set)
        merged = dict(self.terms)
        for e, c in other.terms.items():
            merged[e] = merged.get(e, Fraction(0)) + c
        return QMForm(self.generator_set, merged)

    def __sub__(self, other: "QMForm") -> "QMForm":
        return self + other.scale(-1)

    def __mul__(self, other: Any) -> "QMForm":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = other.in_set(self.generator_set)
        product: Dict[Exponents, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                product[e] = product.get(e, Fraction(0)) + c1 * c2
        return QMForm(self.generator_set, product)

    __rmul__ = __mul__

    def canonical(self) -> "QMForm":
        """La forma en gamma02 si hay reescritura; si no, ella misma."""
        try:
            return self.in_set("gamma02")
        except RecognitionError:
            return self

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, QMForm):
            return NotImplemented
        left, right = self.canonical(), other.canonical()
        return left.generator_set == right.generator_set and left.terms == right.terms

    def __hash__(self):
        form = self.canonical()
        return hash((form.generator_set, tuple(sorted(form.terms.items()))))

    # -- sympy ------------------------------------------------------------

    def to_sympy(self) -> sympy.Expr:
        symbols = _symbols(self.generator_set)
        expr = sympy.Integer(0)
        for exps, c in self.terms.items():
            term = Rational(c.numerator, c.denominator)
            for s, e in zip(symbols, exps):
                term *= s ** e
            expr += term
        return expr

    @classmethod
    def from_sympy(cls, generator_set: str, expr: sympy.Expr) -> "QMForm":
        symbols = _symbols(generator_set)
        poly = Poly(sympy.expand(expr), *symbols)
        return cls(generator_set, {m: _rational(c) for m, c in poly.terms()})

    def in_set(self, generator_set: str) -> "QMForm":
        """
        Reescribir en otro conjunto de generadores (level1 → gamma02).

        Raises:
            RecognitionError: Si la reescritura no está disponible
        """
        if generator_set == self.generator_set:
            return self
        if self.generator_set == "level1" and generator_set == "gamma02":
            substitution = {Symbol(name): expr for name, expr in level1_aliases().items()}
            return QMForm.from_sympy("gamma02", self.to_sympy().subs(substitution))
        raise RecognitionError(
            f"Sin reescritura exacta de {self.generator_set} a {generator_set}"
        )

    # -- serialización ----------------------------------------------------

    def to_json(self) -> Dict[str, Any]:
        ordered = sorted(self.terms.items(), key=lambda kv: (-self.monomial_weight(kv[0]), tuple(-e for e in kv[0])))
        return {"gens": self.generator_set, "terms": [[list(e), str(c)] for e, c in ordered]}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "QMForm":
        try:
            return cls(data["gens"], {tuple(e): Fraction(c) for e, c in data["terms"]})
        except (KeyError, TypeError, ValueError) as e:
            raise RecognitionError(f"Forma JSON mal formada: {e}")

    @classmethod
    def parse(cls, generator_set: str, text: str) -> "QMForm":
        """Leer una forma escrita con los nombres de los generadores, p. ej. '3*G2**2 - G22'.

        En gamma02 se aceptan además G4 y G6 como alias de nivel 1.
        """
        symbols: Dict[str, Any] = {s.name: s for s in _symbols(generator_set)}
        if generator_set == "gamma02":
            symbols.update(level1_aliases())
        return cls.from_sympy(generator_set, sympy.sympify(text, locals=symbols))

    def __str__(self) -> str:
        return str(self.to_sympy()) if self.terms else "0"

    def __repr__(self) -> str:
        return f"QMForm({self.generator_set}: {self})"


def _coefficient_vector(series: QSeries, generator_set: str) -> List[Fraction]:
    if generator_set == "gamma2":
        return series.half_coefficients()
    if not series.is_integral_power():
        raise RecognitionError(
            f"La serie tiene potencias semienteras; use gamma2 en lugar de {generator_set}",
            series,
        )
    return series.q_coefficients()


def _fit(series: QSeries, generator_set: str, max_weight: int, fit_count: int,
         check_count: int) -> QMForm:
    basis = monomial_basis(generator_set, max_weight)
    target = _coefficient_vector(series, generator_set)
    needed = fit_count + check_count
    if len(target) < needed:
        raise RecognitionError(
            f"Se necesitan {needed} coeficientes para reconocer con {len(basis)} monomios; "
            f"la serie tiene {len(target)}",
            series,
        )
    step = 1 if generator_set == "gamma2" else 2
    cutoff = (needed - 1) * step // 2 + 1
    columns = [_coefficient_vector(monomial_series(generator_set, e, cutoff), generator_set)
               for e in basis]
    rows = [[col[i] for col in columns] for i in range(fit_count)]
    try:
        solution = solve_unique(rows, target[:fit_count], len(basis))
    except SolveError as e:
        raise RecognitionError(
            f"No es cuasimodular de peso ≤ {max_weight} ({generator_set}): {e}", series
        )
    for i in range(fit_count, needed):
        predicted = sum((c * col[i] for c, col in zip(solution, columns)), Fraction(0))
        if predicted != target[i]:
            raise RecognitionError(
                f"La verificación falla en el coeficiente {i}: {predicted} ≠ {target[i]}", series
            )
    return QMForm(generator_set, dict(zip(basis, solution)))


def recognize(series: QSeries, generator_set: str = "gamma02", max_weight: int = 6) -> QMForm:
    """
    Reconocer una serie como forma cuasimodular de peso mixto ≤ max_weight.

    Usa todos los coeficientes salvo los últimos RECOGNITION_MARGIN para el
    ajuste y verifica esos últimos.

    Raises:
        RecognitionError: Sin solución única o si la verificación falla
    """
    basis_size = len(monomial_basis(generator_set, max_weight))
    available = len(_coefficient_vector(series, generator_set))
    form = _fit(series, generator_set, max_weight,
                max(available - RECOGNITION_MARGIN, basis_size), RECOGNITION_MARGIN)
    logger.info(f"Serie reconocida ({generator_set}, peso ≤ {max_weight}): {form}")
    return form


def required_coefficients(generator_set: str, max_weight: int) -> int:
    """Coeficientes mínimos para reconocer: dim + RECOGNITION_MARGIN."""
    return len(monomial_basis(generator_set, max_weight)) + RECOGNITION_MARGIN


def saturation_check(series: QSeries, generator_set: str = "gamma02", max_weight: int = 6) -> QMForm:
    """
    Ajustar con dim + 2 coeficientes y predecir los 4 siguientes.

    Raises:
        SaturationError: Si alguna predicción falla
    """
    basis_size = len(monomial_basis(generator_set, max_weight))
    try:
        return _fit(series, generator_set, max_weight,
                    basis_size + SATURATION_FIT_MARGIN, RECOGNITION_MARGIN)
    except RecognitionError as e:
        raise SaturationError(f"Saturación cuasimodular fallida: {e}")


# -- crecimiento ---------------------------------------------------------------

class PiPolynomial:
    """Valor exacto Σ c_j·π^{2j}."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[int, Any]] = None):
        self.terms = {int(j): Fraction(c) for j, c in (terms or {}).items() if Fraction(c)}

    def is_zero(self) -> bool:
        return not self.terms

    def scale(self, value: Any) -> "PiPolynomial":
        value = Fraction(value)
        return PiPolynomial({j: c * value for j, c in self.terms.items()})

    def __add__(self, other: "PiPolynomial") -> "PiPolynomial":
        merged = dict(self.terms)
        for j, c in other.terms.items():
            merged[j] = merged.get(j, Fraction(0)) + c
        return PiPolynomial(merged)

    def ratio_to(self, other: "PiPolynomial") -> Optional[Fraction]:
        """c con self = c·other, o None si no son proporcionales."""
        if other.is_zero():
            return None
        if self.is_zero():
            return Fraction(0)
        if set(self.terms) != set(other.terms):
            return None
        ratios = {self.terms[j] / other.terms[j] for j in self.terms}
        return ratios.pop() if len(ratios) == 1 else None

    def __eq__(self, other: Any) -> bool:
        if not isinstance(other, PiPolynomial):
            return NotImplemented
        return self.terms == other.terms

    def to_sympy(self) -> sympy.Expr:
        return sum(
            (Rational(c.numerator, c.denominator) * sympy.pi ** (2 * j) for j, c in self.terms.items()),
            sympy.Integer(0),
        )

    def to_json(self) -> List[List[Any]]:
        return [[str(c), j] for j, c in sorted(self.terms.items(), reverse=True)]

    def __str__(self) -> str:
        return str(self.to_sympy())


class GrowthPolynomial:
    """Polinomio en 1/h con coeficientes racionales por potencias de π²."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Tuple[int, int], Any]] = None):
        self.terms = {
            (int(h), int(j)): Fraction(c) for (h, j), c in (terms or {}).items() if Fraction(c)
        }

    @property
    def degree(self) -> int:
        return max((h for h, _ in self.terms), default=0)

    def coefficient(self, hpow: int) -> PiPolynomial:
        """Coeficiente de 1/h^hpow."""
        return PiPolynomial({j: c for (h, j), c in self.terms.items() if h == hpow})

    def leading(self, dim: int) -> PiPolynomial:
        """
        Coeficiente de 1/h^dim, exigiendo que no haya potencias mayores.

        Raises:
            RecognitionError: Si aparecen potencias de 1/h mayores que dim
        """
        if self.degree > dim:
            raise RecognitionError(
                f"ev tiene términos en 1/h^{self.degree}, más allá de la dimensión {dim}"
            )
        return self.coefficient(dim)

    def to_json(self) -> List[List[Any]]:
        return [[h, str(c), j] for (h, j), c in sorted(self.terms.items(), reverse=True)]

    def to_sympy(self) -> sympy.Expr:
        h = Symbol("h")
        return sum(
            (Rational(c.numerator, c.denominator) * sympy.pi ** (2 * j) / h ** hp
             for (hp, j), c in self.terms.items()),
            sympy.Integer(0),
        )

    def __str__(self) -> str:
        return str(self.to_sympy())


_X = Symbol("X")

EV_IMAGES = {
    "G2": -_X / 24 - Rational(1, 2),
    "G22": -_X / 96 - Rational(1, 4),
    "G42": _X ** 2 / 3840,
}


def ev_polynomial(form: QMForm) -> Dict[int, Dict[int, Fraction]]:
    """Ev por componente de peso: {peso: {j: coeficiente de X^j}}."""
    form = form.in_set("gamma02")
    symbols = _symbols("gamma02")
    substitution = {s: EV_IMAGES[s.name] for s in symbols}
    result: Dict[int, Dict[int, Fraction]] = {}
    for weight, component in form.weight_components().items():
        image = sympy.expand(component.to_sympy().subs(substitution))
        poly = Poly(image, _X)
        result[weight] = {int(m[0]): _rational(c) for m, c in poly.terms() if c != 0}
    return result


def ev_map(form: QMForm) -> GrowthPolynomial:
    """
    ev[F](h) = h^{-k}·Ev[F](-4π²/h) sumado sobre las componentes de peso 2k.

    Raises:
        RecognitionError: Si la forma no puede escribirse en gamma02
    """
    terms: Dict[Tuple[int, int], Fraction] = {}
    for weight, poly in ev_polynomial(form).items():
        k = weight // 2
        for j, c in poly.items():
            key = (k + j, j)
            terms[key] = terms.get(key, Fraction(0)) + c * (-4) ** j
    return GrowthPolynomial(terms)


def volume_from_form(form: QMForm, dim: int, convention: str = "eo") -> PiPolynomial:
    """
    Volumen de Masur-Veech: (2·dim)/(2^dim·dim!)·lim h^dim·ev[N⁰](h).

    Args:
        form: Forma reconocida de la serie N⁰
        dim: Dimensión compleja del estrato
        convention: "eo", o "aez" para la otra normalización (factor 3072)

    Raises:
        RecognitionError: Si el coeficiente principal se anula
    """
    if dim < 1:
        raise RecognitionError(f"Dimensión inválida: {dim}")
    leading = ev_map(form).leading(dim)
    if leading.is_zero():
        raise RecognitionError(f"Coeficiente principal nulo en 1/h^{dim}")
    volume = leading.scale(Fraction(2 * dim, 2 ** dim * factorial(dim)))
    if convention == "aez":
        volume = volume.scale(3072)
    elif convention != "eo":
        raise RecognitionError(f"Convención de volumen desconocida: {convention}")
    return volume
