"""
Particiones enteras y caracteres de grupos simétricos.

Este módulo provee la partición como valor inmutable, la enumeración
determinista de particiones, el orden del centralizador, los caracteres
irreducibles por la regla de Murnaghan-Nakayama (con memo compartida por
pares canónicos de particiones) y la combinatoria de 2-núcleos y
2-cocientes que decide qué particiones son balanceadas.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from .errors import PartitionError, ProfileError

logger = logging.getLogger(__name__)

Parts = Tuple[int, ...]


@dataclass(frozen=True, order=True)
class Partition:
    """Partición entera con partes débilmente decrecientes."""

    parts: Parts = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        object.__setattr__(self, "parts", parts)
        if any(p < 1 for p in parts):
            raise PartitionError(f"Partes no positivas en {list(parts)}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise PartitionError(f"Partes no decrecientes en {list(parts)}")

    @classmethod
    def of(cls, values: Iterable[int]) -> "Partition":
        """Construir ordenando las partes de mayor a menor."""
        return cls(tuple(sorted((int(v) for v in values), reverse=True)))

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def multiplicities(self) -> Dict[int, int]:
        return dict(Counter(self.parts))

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(
            sum(1 for p in self.parts if p > j) for j in range(self.parts[0])
        ))

    def hooks(self) -> List[int]:
        """Longitudes de gancho de todas las celdas, fila por fila."""
        conj = self.conjugate().parts
        return [
            self.parts[i] - j - 1 + conj[j] - i
            for i in range(self.length)
            for j in range(self.parts[i])
        ]

    def contents(self) -> List[int]:
        return [j - i for i in range(self.length) for j in range(self.parts[i])]

    def padded(self, part: int, count: int) -> "Partition":
        """Agregar `count` copias de `part` (por ejemplo unos o doses)."""
        return Partition.of(self.parts + (part,) * count)

    def union(self, other: "Partition") -> "Partition":
        return Partition.of(self.parts + other.parts)

    def to_json(self) -> List[int]:
        return list(self.parts)

    def __str__(self) -> str:
        if not self.parts:
            return "∅"
        return "(" + ",".join(str(p) for p in self.parts) + ")"


EMPTY = Partition()


@lru_cache(maxsize=None)
def _partition_tuples(n: int, max_part: int) -> Tuple[Parts, ...]:
    if n == 0:
        return ((),)
    result = []
    for first in range(min(n, max_part), 0, -1):
        for rest in _partition_tuples(n - first, first):
            result.append((first,) + rest)
    return tuple(result)


def enum_partitions(n: int) -> List[Partition]:
    """
    Todas las particiones de n en orden lexicográfico inverso.

    Args:
        n: Entero no negativo

    Returns:
        Lista determinista de particiones, (n) primero y (1^n) al final
    """
    if n < 0:
        raise PartitionError(f"No hay particiones de {n}")
    return [Partition(t) for t in _partition_tuples(n, n)]


def centralizer_order(mu: Partition) -> int:
    """𝔷(μ) = Π m^{r_m} · r_m!"""
    return prod(m ** r * factorial(r) for m, r in mu.multiplicities().items())


@lru_cache(maxsize=None)
def _hook_dimension(parts: Parts) -> int:
    lam = Partition(parts)
    return factorial(lam.size) // prod(lam.hooks())


def dimension(lam: Partition) -> int:
    """Dimensión de la representación irreducible por la fórmula de ganchos."""
    return _hook_dimension(lam.parts)


def _beta_set(parts: Parts, length: int) -> List[int]:
    padded = list(parts) + [0] * (length - len(parts))
    return [padded[i] + length - 1 - i for i in range(length)]


def _from_beta_set(beta: Iterable[int]) -> Parts:
    ordered = sorted(beta, reverse=True)
    length = len(ordered)
    parts = [b - (length - 1 - i) for i, b in enumerate(ordered)]
    return tuple(p for p in parts if p > 0)


@lru_cache(maxsize=None)
def _remove_strips(parts: Parts, r: int) -> Tuple[Tuple[Parts, int], ...]:
    # movimientos de cuentas en el ábaco: b -> b - r, signo por cuentas saltadas
    beta = _beta_set(parts, len(parts))
    occupied = set(beta)
    found = []
    for b in beta:
        target = b - r
        if target < 0 or target in occupied:
            continue
        skipped = sum(1 for x in beta if target < x < b)
        remaining = [x for x in beta if x != b] + [target]
        found.append((_from_beta_set(remaining), -1 if skipped % 2 else 1))
    return tuple(found)


def border_strips(lam: Partition, r: int) -> List[Tuple[Partition, int]]:
    """
    Todas las tiras de borde de longitud r removibles de λ.

    Returns:
        Lista de (κ, signo) con λ/κ una r-tira y signo (-1)^{altura}
    """
    if r < 1:
        raise PartitionError(f"Longitud de tira inválida: {r}")
    return [(Partition(k), s) for k, s in _remove_strips(lam.parts, r)]


@lru_cache(maxsize=None)
def _mn(parts: Parts, rest: Parts) -> int:
    if not rest:
        return 1 if not parts else 0
    if rest[0] == 1:
        return _hook_dimension(parts)
    r, tail = rest[0], rest[1:]
    return sum(sign * _mn(kappa, tail) for kappa, sign in _remove_strips(parts, r))


def character(lam: Partition, mu: Partition) -> int:
    """
    Carácter χ^λ(μ) por Murnaghan-Nakayama.

    Raises:
        PartitionError: Si |λ| ≠ |μ|
    """
    if lam.size != mu.size:
        raise PartitionError(f"Tamaños distintos: |{lam}| = {lam.size}, |{mu}| = {mu.size}")
    return _mn(lam.parts, mu.parts)


def _even_length(lam: Partition) -> int:
    return lam.length + (lam.length % 2)


def _balanced_by_parity(lam: Partition) -> bool:
    length = _even_length(lam)
    padded = list(lam.parts) + [0] * (length - lam.length)
    values = [padded[i] - i for i in range(length)]
    evens = sum(1 for v in values if v % 2 == 0)
    return 2 * evens == length


def two_core(lam: Partition) -> Partition:
    """2-núcleo vía el ábaco de dos corredores."""
    length = _even_length(lam)
    beta = _beta_set(lam.parts, length)
    n_even = sum(1 for b in beta if b % 2 == 0)
    n_odd = length - n_even
    core_beta = [2 * k for k in range(n_even)] + [2 * k + 1 for k in range(n_odd)]
    return Partition(_from_beta_set(core_beta))


def is_balanced(lam: Partition) -> bool:
    """
    Balanceada: tantos valores pares como impares entre λ_i - i + 1.

    Se verifica además que el 2-núcleo sea vacío; ambos criterios deben
    coincidir.
    """
    by_parity = _balanced_by_parity(lam)
    by_core = two_core(lam).size == 0
    if by_parity != by_core:
        raise PartitionError(f"Criterios de balance en desacuerdo para {lam}")
    return by_parity


def two_quotients(lam: Partition) -> Tuple[Partition, Partition]:
    """2-cocientes (corredor par, corredor impar)."""
    length = _even_length(lam)
    beta = _beta_set(lam.parts, length)
    runners = []
    for parity in (0, 1):
        positions = [b // 2 for b in beta if b % 2 == parity]
        runners.append(Partition(_from_beta_set(positions)))
    return runners[0], runners[1]


def hook_weight_sum(lam: Partition, p: int) -> Fraction:
    """T_p(λ) = Σ_ξ h(ξ)^{p-1}."""
    if p < -1:
        raise PartitionError(f"Exponente fuera de rango: p = {p}")
    return sum((Fraction(h) ** (p - 1) for h in lam.hooks()), Fraction(0))


def _as_partition(value: Union[Partition, Sequence[int], int]) -> Partition:
    if isinstance(value, Partition):
        return value
    if isinstance(value, int):
        return Partition((value,))
    return Partition.of(value)


@dataclass(frozen=True)
class RamificationProfile:
    """
    Perfil de ramificación Π = (ν; μ_5, ..., μ_{n+4}).

    ν va sobre una esquina (partes impares, tamaño par); cada μ_i es un
    único ciclo sobre un punto de ramificación adicional.
    """

    nu: Partition = EMPTY
    mus: Tuple[Partition, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "nu", _as_partition(self.nu))
        object.__setattr__(self, "mus", tuple(_as_partition(m) for m in self.mus))
        if any(p % 2 == 0 for p in self.nu.parts):
            raise ProfileError(f"ν debe tener partes impares: {self.nu}")
        if self.nu.size % 2:
            raise ProfileError(f"|ν| debe ser par: {self.nu}")
        for mu in self.mus:
            if mu.length != 1:
                raise ProfileError(f"Cada μ debe ser un único ciclo: {mu}")
            if mu.parts[0] < 2:
                raise ProfileError(f"Ciclo trivial en μ: {mu}")
        euler = len(self.mus) + self.nu.length - self.mu_size - Fraction(self.nu.size, 2)
        genus = (2 - euler) / 2
        if genus.denominator != 1 or genus < 0:
            raise ProfileError(
                f"Perfil sin género entero no negativo: ν={self.nu}, "
                f"μ={[str(m) for m in self.mus]} (2-2g = {euler})"
            )

    @classmethod
    def empty(cls) -> "RamificationProfile":
        return cls()

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> "RamificationProfile":
        """Perfil desde {"nu":[3,1,1,1],"mus":[[2]]}."""
        try:
            nu = Partition.of(data.get("nu", []))
            mus = tuple(Partition.of(m) for m in data.get("mus", []))
        except (TypeError, AttributeError) as e:
            raise ProfileError(f"Perfil mal formado: {e}")
        return cls(nu, mus)

    def to_json(self) -> Dict[str, Any]:
        return {"nu": self.nu.to_json(), "mus": [m.to_json() for m in self.mus]}

    @property
    def mu_size(self) -> int:
        return sum(m.size for m in self.mus)

    @property
    def genus(self) -> int:
        euler = len(self.mus) + self.nu.length - self.mu_size - Fraction(self.nu.size, 2)
        return int((2 - euler) / 2)

    @property
    def dimension(self) -> int:
        """Dimensión compleja del estrato: 2g - 2 + #singularidades."""
        return 2 * self.genus - 2 + self.nu.length + len(self.mus)

    @property
    def weight_bound(self) -> int:
        """wt(Π) = |ν|/2 + Σ(|μ_i| + 1)."""
        return self.nu.size // 2 + sum(m.size + 1 for m in self.mus)

    @property
    def min_area(self) -> int:
        """Menor d con 2d ≥ max(|ν|, |μ_i|)."""
        largest = max([self.nu.size] + [m.size for m in self.mus])
        return (largest + 1) // 2

    def stratum_label(self) -> str:
        orders = sorted(
            [2 * m.parts[0] - 2 for m in self.mus] + [k - 2 for k in self.nu.parts],
            reverse=True,
        )
        if not orders:
            return "Q(∅)"
        chunks = []
        for order, count in sorted(Counter(orders).items(), key=lambda kv: -kv[0]):
            chunks.append(str(order) if count == 1 else f"{order}^{count}")
        return "Q(" + ",".join(chunks) + ")"

    def __str__(self) -> str:
        mus = ",".join(str(m) for m in self.mus)
        return f"Π(ν={self.nu}; μ=[{mus}])"
