"""
Cuasi-polinomios simétricos desplazados (el álgebra Λ̄).

Contiene:
    - RegularizationConstants: constantes β_k, γ_k y ζ(-ℓ)
    - ShiftedSymElement: combinaciones lineales de monomios p_ρ·p̄_ρ̄
    - evaluación de p_ℓ, p̄_k, f_μ y g_ν en particiones
    - conversiones exactas entre bases por resolución de sistemas lineales

Los monomios p̄ se indexan con partes ≥ 1: p̄₀ vale 1/2 sobre toda
partición balanceada y no entra en la base.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from sympy import bernoulli, euler

from .errors import PartitionError, SolveError
from .linalg import matrix_rank, solve_particular, solve_unique
from .sympart import (
    EMPTY,
    Partition,
    centralizer_order,
    character,
    dimension,
    enum_partitions,
    is_balanced,
)

logger = logging.getLogger(__name__)

MAX_SAMPLE_SIZE = 26
VERIFICATION_SIZES = 2


def _rational(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


class RegularizationConstants:
    """
    Constantes de regularización de p_ℓ y p̄_k.

    β_k son los coeficientes de B(z) = (z/2)/sinh(z/2) y γ_k = k!·[z^k]C(z)
    con C(z) = 1/(e^{z/2} + e^{-z/2}).
    """

    def beta(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError(f"Índice negativo: {k}")
        if k % 2:
            return Fraction(0)
        return (Fraction(2) ** (1 - k) - 1) * _rational(bernoulli(k)) / factorial(k)

    def gamma(self, k: int) -> Fraction:
        if k < 0:
            raise ValueError(f"Índice negativo: {k}")
        if k % 2:
            return Fraction(0)
        return _rational(euler(k)) / 2 ** (k + 1)

    def zeta_negative(self, ell: int) -> Fraction:
        """ζ(-ℓ) = -B_{ℓ+1}/(ℓ+1) para ℓ ≥ 1."""
        if ell < 1:
            raise ValueError(f"ζ(-ℓ) solo se tabula para ℓ ≥ 1: {ell}")
        return -_rational(bernoulli(ell + 1)) / (ell + 1)

    def p_constant(self, ell: int) -> Fraction:
        """Término constante de p_ℓ: ℓ!·β_{ℓ+1} = (1 - 2^{-ℓ})ζ(-ℓ)."""
        return factorial(ell) * self.beta(ell + 1)


REGULARIZATION = RegularizationConstants()


# -- evaluación de generadores ------------------------------------------

@lru_cache(maxsize=None)
def _p_sum(ell: int, parts: Tuple[int, ...]) -> Fraction:
    half = Fraction(1, 2)
    total = Fraction(0)
    for i, part in enumerate(parts, start=1):
        total += (part - i + half) ** ell - (-i + half) ** ell
    return total


@lru_cache(maxsize=None)
def _pbar_sum(k: int, parts: Tuple[int, ...]) -> Fraction:
    half = Fraction(1, 2)
    total = Fraction(0)
    for i, part in enumerate(parts, start=1):
        shifted = part - i + half
        empty = -i + half
        sign = -1 if (part - i + 1) % 2 else 1
        empty_sign = -1 if (-i + 1) % 2 else 1
        total += sign * shifted ** k - empty_sign * empty ** k
    return total


def eval_p(ell: int, lam: Partition) -> Fraction:
    """p_ℓ(λ) = Σ[(λ_i-i+½)^ℓ - (-i+½)^ℓ] + ℓ!β_{ℓ+1}."""
    if ell < 1:
        raise ValueError(f"p_ℓ requiere ℓ ≥ 1: {ell}")
    return _p_sum(ell, lam.parts) + REGULARIZATION.p_constant(ell)


def eval_pbar(k: int, lam: Partition) -> Fraction:
    """p̄_k(λ) = Σ[(-1)^{λ_i-i+1}(λ_i-i+½)^k - (-1)^{-i+1}(-i+½)^k] + γ_k."""
    if k < 0:
        raise ValueError(f"p̄_k requiere k ≥ 0: {k}")
    return _pbar_sum(k, lam.parts) + REGULARIZATION.gamma(k)


@lru_cache(maxsize=None)
def _f_value(mu: Tuple[int, ...], lam: Tuple[int, ...]) -> Fraction:
    n, m = sum(lam), sum(mu)
    if m > n:
        return Fraction(0)
    mu_p = Partition(mu)
    padded = mu_p.padded(1, n - m)
    lam_p = Partition(lam)
    scale = Fraction(factorial(n), factorial(n - m) * centralizer_order(mu_p))
    return scale * character(lam_p, padded) / dimension(lam_p)


def eval_f(mu: Partition, lam: Partition) -> Fraction:
    """
    Carácter central f_μ(λ) = n!/((n-|μ|)!·𝔷(μ))·χ^λ(μ,1^{n-|μ|})/dim λ.

    Vale 0 si |μ| > |λ|.
    """
    return _f_value(mu.parts, lam.parts)


@lru_cache(maxsize=None)
def _g_value(nu: Tuple[int, ...], lam: Tuple[int, ...]) -> Fraction:
    n, m = sum(lam), sum(nu)
    if m > n:
        return Fraction(0)
    lam_p = Partition(lam)
    halves = n // 2
    twos = Partition((2,) * halves)
    numerator_class = Partition(nu).padded(2, (n - m) // 2)
    denominator = character(lam_p, twos)
    if denominator == 0:
        raise PartitionError(f"f_(2,...,2) se anula en la partición balanceada {lam_p}")
    return Fraction(
        centralizer_order(twos) * character(lam_p, numerator_class),
        centralizer_order(numerator_class) * denominator,
    )


def eval_g(nu: Partition, lam: Partition) -> Fraction:
    """
    g_ν(λ) = f_{(ν,2,...,2)}(λ)/f_{(2,...,2)}(λ) sobre particiones balanceadas.

    Raises:
        PartitionError: Si λ no es balanceada o ν no tiene partes impares y tamaño par
    """
    if any(p % 2 == 0 for p in nu.parts) or nu.size % 2:
        raise PartitionError(f"ν debe tener partes impares y tamaño par: {nu}")
    if not is_balanced(lam):
        raise PartitionError(f"g_ν solo está definida en particiones balanceadas: {lam}")
    return _g_value(nu.parts, lam.parts)


# -- elementos de Λ̄ -------------------------------------------------------

@dataclass(frozen=True, order=True)
class Monomial:
    """Monomio p_ρ·p̄_ρ̄ (ρ̄ con partes ≥ 1)."""

    p: Partition = EMPTY
    pbar: Partition = EMPTY

    @property
    def weight(self) -> int:
        return sum(ell + 1 for ell in self.p.parts) + self.pbar.size

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(self.p.union(other.p), self.pbar.union(other.pbar))

    def evaluate(self, lam: Partition) -> Fraction:
        value = Fraction(1)
        for ell in self.p.parts:
            value *= eval_p(ell, lam)
        for k in self.pbar.parts:
            value *= eval_pbar(k, lam)
        return value

    def to_json(self) -> Dict[str, List[int]]:
        return {"p": self.p.to_json(), "pbar": self.pbar.to_json()}

    def __str__(self) -> str:
        factors = [f"p{ell}" for ell in self.p.parts] + [f"pb{k}" for k in self.pbar.parts]
        return "·".join(factors) or "1"


ONE = Monomial()


class ShiftedSymElement:
    """Combinación lineal exacta de monomios p_ρ·p̄_ρ̄."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Any]] = None):
        clean: Dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            coeff = Fraction(coeff)
            if coeff:
                clean[mono] = clean.get(mono, Fraction(0)) + coeff
                if not clean[mono]:
                    del clean[mono]
        self.terms = clean

    @classmethod
    def constant(cls, value: Any) -> "ShiftedSymElement":
        return cls({ONE: value})

    @classmethod
    def p(cls, *ells: int) -> "ShiftedSymElement":
        """Producto p_{ℓ1}·p_{ℓ2}···"""
        return cls({Monomial(Partition.of(ells), EMPTY): 1})

    @classmethod
    def pbar(cls, *ks: int) -> "ShiftedSymElement":
        """Producto p̄_{k1}·p̄_{k2}···; p̄₀ se reemplaza por 1/2."""
        zeros = sum(1 for k in ks if k == 0)
        rest = [k for k in ks if k != 0]
        return cls({Monomial(EMPTY, Partition.of(rest)): Fraction(1, 2 ** zeros)})

    @classmethod
    def monomial(cls, mono: Monomial, coeff: Any = 1) -> "ShiftedSymElement":
        return cls({mono: coeff})

    def __add__(self, other: "ShiftedSymElement") -> "ShiftedSymElement":
        if isinstance(other, (int, Fraction)):
            other = ShiftedSymElement.constant(other)
        merged = dict(self.terms)
        for mono, c in other.terms.items():
            merged[mono] = merged.get(mono, Fraction(0)) + c
        return ShiftedSymElement(merged)

    __radd__ = __add__

    def __neg__(self) -> "ShiftedSymElement":
        return self.scale(-1)

    def __sub__(self, other: "ShiftedSymElement") -> "ShiftedSymElement":
        if isinstance(other, (int, Fraction)):
            other = ShiftedSymElement.constant(other)
        return self + (-other)

    def scale(self, value: Any) -> "ShiftedSymElement":
        value = Fraction(value)
        return ShiftedSymElement({m: c * value for m, c in self.terms.items()})

    def __mul__(self, other: Any) -> "ShiftedSymElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        result: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = m1 * m2
                result[mono] = result.get(mono, Fraction(0)) + c1 * c2
        return ShiftedSymElement(result)

    __rmul__ = __mul__

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ShiftedSymElement.constant(other)
        if not isinstance(other, ShiftedSymElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def __iter__(self) -> Iterator[Tuple[Monomial, Fraction]]:
        return iter(sorted(self.terms.items(), key=lambda kv: (-kv[0].weight, kv[0])))

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def weight(self) -> int:
        return max((m.weight for m in self.terms), default=0)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get(ONE, Fraction(0))

    def is_pure_p(self) -> bool:
        return all(m.pbar.length == 0 for m in self.terms)

    def is_pure_pbar(self) -> bool:
        return all(m.p.length == 0 for m in self.terms)

    def evaluate(self, lam: Partition) -> Fraction:
        return sum((c * m.evaluate(lam) for m, c in self.terms.items()), Fraction(0))

    __call__ = evaluate

    def to_json(self) -> List[Dict[str, Any]]:
        return [dict(m.to_json(), coeff=str(c)) for m, c in self]

    @classmethod
    def from_json(cls, data: Iterable[Mapping[str, Any]]) -> "ShiftedSymElement":
        terms: Dict[Monomial, Fraction] = {}
        for entry in data:
            pbar = [int(k) for k in entry.get("pbar", [])]
            zeros = sum(1 for k in pbar if k == 0)
            mono = Monomial(
                Partition.of(entry.get("p", [])),
                Partition.of([k for k in pbar if k != 0]),
            )
            terms[mono] = terms.get(mono, Fraction(0)) + Fraction(entry["coeff"]) / 2 ** zeros
        return cls(terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({c})·{m}" for m, c in self)

    __repr__ = __str__


# -- bases y muestreo -----------------------------------------------------

def p_monomials(weight_bound: int) -> List[Monomial]:
    """Monomios p_ρ con Σ(ρ_i+1) ≤ weight_bound, ordenados por peso."""
    found = []
    for total in range(weight_bound + 1):
        for rho in enum_partitions(total):
            if rho.size + rho.length <= weight_bound:
                found.append(Monomial(rho, EMPTY))
    unique = sorted(set(found), key=lambda m: (m.weight, m))
    return unique


def mixed_monomials(weight_bound: int) -> List[Monomial]:
    """Monomios p_ρ·p̄_ρ̄ de peso ≤ weight_bound."""
    result = []
    for mono in p_monomials(weight_bound):
        rest = weight_bound - mono.weight
        for total in range(rest + 1):
            for rho_bar in enum_partitions(total):
                result.append(Monomial(mono.p, rho_bar))
    return sorted(set(result), key=lambda m: (m.weight, m))


def f_indices(weight_bound: int) -> List[Partition]:
    """Particiones μ con |μ| + ℓ(μ) ≤ weight_bound."""
    found = []
    for total in range(weight_bound + 1):
        for mu in enum_partitions(total):
            if mu.size + mu.length <= weight_bound:
                found.append(mu)
    return found


def _balanced_of_size(n: int) -> List[Partition]:
    return [lam for lam in enum_partitions(n) if is_balanced(lam)]


def _interpolate(
    label: str,
    columns: Sequence[Callable[[Partition], Fraction]],
    target: Callable[[Partition], Fraction],
    balanced_only: bool,
    max_size: int = MAX_SAMPLE_SIZE,
) -> List[Fraction]:
    """
    Resolver Σ c_j·columns_j = target muestreando particiones por tamaño.

    La muestra crece de a un tamaño (pares si balanced_only) hasta rango
    completo; la solución se verifica en los dos tamaños siguientes.
    """
    ncols = len(columns)
    step = 2 if balanced_only else 1
    source = _balanced_of_size if balanced_only else enum_partitions
    rows: List[List[Fraction]] = []
    rhs: List[Fraction] = []
    size = 0
    while True:
        if size > max_size:
            raise SolveError(
                f"{label}: rango incompleto con particiones hasta tamaño {max_size} "
                f"({len(rows)} filas, {ncols} incógnitas)"
            )
        for lam in source(size):
            rows.append([col(lam) for col in columns])
            rhs.append(target(lam))
        if len(rows) >= ncols and matrix_rank(rows, ncols) == ncols:
            break
        size += step
    solution = solve_unique(rows, rhs, ncols)
    logger.debug(f"{label}: {ncols} incógnitas, muestra hasta tamaño {size}")
    for extra in range(1, VERIFICATION_SIZES + 1):
        for lam in source(size + extra * step):
            value = sum((c * col(lam) for c, col in zip(solution, columns)), Fraction(0))
            if value != target(lam):
                raise SolveError(f"{label}: la verificación falla en {lam}")
    return solution


def _to_element(monomials: Sequence[Monomial], solution: Sequence[Fraction]) -> ShiftedSymElement:
    return ShiftedSymElement({m: c for m, c in zip(monomials, solution)})


# -- conversiones ---------------------------------------------------------

@lru_cache(maxsize=None)
def _fmu_to_p(mu: Partition, weight_bound: int) -> ShiftedSymElement:
    basis = p_monomials(weight_bound)
    solution = _interpolate(
        f"f_{mu}",
        [m.evaluate for m in basis],
        lambda lam: eval_f(mu, lam),
        balanced_only=False,
    )
    return _to_element(basis, solution)


def fmu_to_p_basis(mu: Partition, weight_bound: Optional[int] = None) -> ShiftedSymElement:
    """
    Expansión de f_μ en la base de monomios p_ρ.

    Args:
        mu: Partición μ
        weight_bound: Cota de peso, al menos |μ| + ℓ(μ)

    Returns:
        Elemento de Λ* que interpola f_μ en todas las particiones
    """
    minimum = mu.size + mu.length
    if weight_bound is None:
        weight_bound = minimum
    if weight_bound < minimum:
        raise SolveError(f"Cota de peso {weight_bound} menor que |μ|+ℓ(μ) = {minimum}")
    return _fmu_to_p(mu, weight_bound)


@lru_cache(maxsize=None)
def _p_to_f(rho: Partition) -> Tuple[Tuple[Partition, Fraction], ...]:
    mono = Monomial(rho, EMPTY)
    indices = f_indices(mono.weight)
    solution = _interpolate(
        f"p_{rho}",
        [lambda lam, mu=mu: eval_f(mu, lam) for mu in indices],
        mono.evaluate,
        balanced_only=False,
    )
    return tuple((mu, c) for mu, c in zip(indices, solution) if c)


def p_monomial_to_f_basis(rho: Partition) -> Dict[Partition, Fraction]:
    """Expansión del monomio p_ρ en caracteres centrales f_μ."""
    return dict(_p_to_f(rho))


def element_to_f_basis(element: ShiftedSymElement) -> Dict[Partition, Fraction]:
    """
    Reescribir un elemento de Λ* en la base f_μ.

    Raises:
        SolveError: Si el elemento contiene p̄
    """
    if not element.is_pure_p():
        raise SolveError("Solo elementos de Λ* admiten expansión en f_μ")
    result: Dict[Partition, Fraction] = {}
    for mono, coeff in element.terms.items():
        for mu, c in p_monomial_to_f_basis(mono.p).items():
            result[mu] = result.get(mu, Fraction(0)) + coeff * c
    return {mu: c for mu, c in result.items() if c}


def f_basis_to_element(coeffs: Mapping[Partition, Any]) -> ShiftedSymElement:
    total = ShiftedSymElement()
    for mu, c in coeffs.items():
        total = total + fmu_to_p_basis(mu).scale(c)
    return total


@lru_cache(maxsize=None)
def _expand_g(nu: Partition) -> ShiftedSymElement:
    basis = mixed_monomials(nu.size // 2)
    solution = _interpolate(
        f"g_{nu}",
        [m.evaluate for m in basis],
        lambda lam: _g_value(nu.parts, lam.parts),
        balanced_only=True,
    )
    return _to_element(basis, solution)


def expand_g(nu: Partition) -> ShiftedSymElement:
    """
    Expansión de g_ν en Λ̄, de peso ≤ |ν|/2.

    Raises:
        PartitionError: Si ν no tiene partes impares y tamaño par
        SolveError: Si la muestra no alcanza rango completo
    """
    if any(p % 2 == 0 for p in nu.parts) or nu.size % 2:
        raise PartitionError(f"ν debe tener partes impares y tamaño par: {nu}")
    return _expand_g(nu)


def degree_part(element: ShiftedSymElement) -> Tuple[ShiftedSymElement, ShiftedSymElement]:
    """Separar (parte sin p, resto con algún p_ℓ)."""
    pure = {m: c for m, c in element.terms.items() if m.p.length == 0}
    rest = {m: c for m, c in element.terms.items() if m.p.length > 0}
    return ShiftedSymElement(pure), ShiftedSymElement(rest)


def odd_nus(max_size: int) -> List[Partition]:
    """Particiones ν de partes impares y tamaño par ≤ max_size."""
    return [
        nu
        for n in range(0, max_size + 1, 2)
        for nu in enum_partitions(n)
        if all(p % 2 for p in nu.parts)
    ]


@lru_cache(maxsize=None)
def _pbar_in_g_span(mubar: Partition) -> Tuple[Tuple[ShiftedSymElement, Partition], ...]:
    target = ShiftedSymElement.monomial(Monomial(EMPTY, mubar))
    weight = target.weight
    spanning: List[Tuple[Monomial, Partition, ShiftedSymElement]] = []
    for nu in odd_nus(2 * weight):
        g = expand_g(nu)
        for mono in p_monomials(weight - nu.size // 2):
            spanning.append((mono, nu, ShiftedSymElement.monomial(mono) * g))
    coordinates = sorted(
        {m for _, _, product in spanning for m in product.terms} | set(target.terms),
        key=lambda m: (m.weight, m),
    )
    rows = [[product.coefficient(c) for _, _, product in spanning] for c in coordinates]
    rhs = [target.coefficient(c) for c in coordinates]
    solution = solve_particular(rows, rhs, len(spanning))

    grouped: Dict[Partition, Dict[Monomial, Fraction]] = {}
    for (mono, nu, _), c in zip(spanning, solution):
        if c:
            grouped.setdefault(nu, {})[mono] = c
    result = tuple((ShiftedSymElement(terms), nu) for nu, terms in grouped.items())

    check = ShiftedSymElement()
    for h, nu in result:
        check = check + h * expand_g(nu)
    if check != target:
        raise SolveError(f"La reexpansión de p̄_{mubar} no reproduce el monomio")
    return result


def pbar_monomial_in_g_span(
    mubar: Partition, weight_bound: Optional[int] = None
) -> List[Tuple[ShiftedSymElement, Partition]]:
    """
    Escribir Π p̄_{μ̄_i} como Σ h_j·g_{ν_j} con h_j ∈ Λ*.

    Args:
        mubar: Índices del monomio (partes ≥ 1)
        weight_bound: Cota opcional; debe ser al menos el peso del monomio

    Returns:
        Lista de pares (h, ν) con wt(h) + |ν|/2 ≤ peso del monomio

    Raises:
        SolveError: Si no hay solución dentro de la cota
    """
    if weight_bound is not None and weight_bound < mubar.size:
        raise SolveError(f"Cota {weight_bound} menor que el peso de p̄_{mubar}")
    return list(_pbar_in_g_span(mubar))


def clear_caches() -> None:
    """Vaciar las memorias de expansiones (tras cambiar constantes)."""
    for cached in (_fmu_to_p, _p_to_f, _expand_g, _pbar_in_g_span):
        cached.cache_clear()
