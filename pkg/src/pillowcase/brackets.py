"""
w-corchetes y conteo de cubrimientos de la almohada.

Los conteos se obtienen por sumas de caracteres (fórmula de Burnside):
    N_d(Π) = Σ_{|λ|=2d} w(λ)·g_ν(λ)·Π f_{μ_i}(λ) = |Hur_d(Π)|/(2d)!
y las versiones sin componentes no ramificadas (N′) y conexas (N⁰) se
derivan por división de series e inclusión-exclusión sobre etiquetas.
Las series van en la variable q^d (d = área = |λ|/2).

El oráculo de fuerza bruta vive en `oracle.py`.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .errors import PartitionError, ProfileError, RecognitionError
from .qmforms import QMForm, ev_map
from .qseries import QSeries
from .shifted import eval_f, eval_g
from .sympart import (
    EMPTY,
    Partition,
    RamificationProfile,
    border_strips,
    centralizer_order,
    character,
    dimension,
    enum_partitions,
    is_balanced,
)
from .workers import map_ordered

logger = logging.getLogger(__name__)

PartitionFunction = Callable[[Partition], Fraction]


class Connectivity(str, Enum):
    """Modo de conteo de componentes."""

    ALL = "all"
    NO_UNRAMIFIED = "no-unramified"
    CONNECTED = "connected"


@dataclass(frozen=True)
class CoverCountQuery:
    """Consulta de conteo: perfil, área máxima y conectividad."""

    profile: RamificationProfile
    d_max: int
    connectivity: Connectivity = Connectivity.CONNECTED

    def __post_init__(self):
        if self.d_max < 0:
            raise ProfileError(f"d_max debe ser ≥ 0: {self.d_max}")
        object.__setattr__(self, "connectivity", Connectivity(self.connectivity))


# -- pesos ------------------------------------------------------------------

@lru_cache(maxsize=None)
def _sqrt_w(parts: Tuple[int, ...]) -> Fraction:
    lam = Partition(parts)
    n = lam.size
    twos = Partition((2,) * (n // 2))
    chi = character(lam, twos)
    return Fraction(factorial(n) * chi * chi, centralizer_order(twos) ** 2 * dimension(lam))


def sqrt_weight_w(lam: Partition) -> Fraction:
    """
    √w(λ) = dim λ/|λ|!·f_{(2,...,2)}(λ)².

    Raises:
        PartitionError: Si |λ| es impar
    """
    if lam.size % 2:
        raise PartitionError(f"w(λ) requiere |λ| par: {lam}")
    return _sqrt_w(lam.parts)


def weight_w(lam: Partition) -> Fraction:
    """w(λ) = √w(λ)²; se anula fuera de las particiones balanceadas."""
    root = sqrt_weight_w(lam)
    return root * root


@lru_cache(maxsize=None)
def balanced_partitions(d: int) -> Tuple[Partition, ...]:
    """Particiones balanceadas de tamaño 2d."""
    return tuple(lam for lam in enum_partitions(2 * d) if is_balanced(lam))


# -- w-sumas y w-corchetes -----------------------------------------------------

def wsum(F: PartitionFunction, cutoff: int, balanced_only: bool = True) -> QSeries:
    """
    Σ_λ w(λ)F(λ)q^{|λ|/2} hasta q^cutoff.

    Con balanced_only=False se recorren todas las particiones de tamaño par.
    """

    def coefficient(d: int) -> Fraction:
        source = balanced_partitions(d) if balanced_only else enum_partitions(2 * d)
        total = Fraction(0)
        for lam in source:
            w = weight_w(lam)
            if w:
                total += w * F(lam)
        return total

    values = map_ordered(coefficient, range(cutoff + 1))
    return QSeries({2 * d: c for d, c in enumerate(values)}, 2 * cutoff)


@lru_cache(maxsize=None)
def partition_weight_series(cutoff: int) -> QSeries:
    """Σ_λ w(λ)q^{|λ|/2} = N(Π_∅)."""
    return wsum(lambda lam: Fraction(1), cutoff)


def wbracket(F: PartitionFunction, cutoff: int) -> QSeries:
    """⟨F⟩_w = Σ w F q^d / Σ w q^d."""
    return wsum(F, cutoff) / partition_weight_series(cutoff)


# -- conteos --------------------------------------------------------------------

def _profile_function(nu: Partition, mus: Sequence[int]) -> PartitionFunction:
    cycles = [Partition((m,)) for m in mus]

    def value(lam: Partition) -> Fraction:
        result = eval_g(nu, lam)
        for mu in cycles:
            if not result:
                break
            result *= eval_f(mu, lam)
        return result

    return value


@lru_cache(maxsize=None)
def _raw_count(nu: Partition, mus: Tuple[int, ...], cutoff: int) -> QSeries:
    if nu.size % 2:
        return QSeries.zero(cutoff)
    logger.debug(f"Suma de caracteres para ν={nu}, μ={list(mus)}, corte {cutoff}")
    return wsum(_profile_function(nu, mus), cutoff)


def _primed_count(nu: Partition, mus: Tuple[int, ...], cutoff: int) -> QSeries:
    return _raw_count(nu, mus, cutoff) / partition_weight_series(cutoff)


def _label_factor(nu: Partition) -> int:
    return prod(factorial(r) for r in nu.multiplicities().values())


class _Labels:
    """Etiquetas de ν-partes y de puntos de ramificación para inclusión-exclusión."""

    def __init__(self, nu: Partition, mus: Sequence[int]):
        self.items: List[Tuple[str, int, int]] = [("nu", i, p) for i, p in enumerate(nu.parts)]
        self.items += [("mu", j, m) for j, m in enumerate(mus)]
        self.full = (1 << len(self.items)) - 1

    def split(self, mask: int) -> Tuple[Partition, Tuple[int, ...], Tuple[int, ...]]:
        """(ν_B, partes μ_B, índices μ_B)."""
        chosen = [self.items[i] for i in range(len(self.items)) if mask >> i & 1]
        nu = Partition.of(p for kind, _, p in chosen if kind == "nu")
        mus = tuple(m for kind, _, m in chosen if kind == "mu")
        indices = tuple(j for kind, j, _ in chosen if kind == "mu")
        return nu, mus, indices

    @staticmethod
    def proper_submasks_with_lowest(mask: int):
        lowest = mask & -mask
        sub = (mask - 1) & mask
        while sub:
            if sub & lowest:
                yield sub
            sub = (sub - 1) & mask

    @staticmethod
    def proper_submasks(mask: int):
        sub = (mask - 1) & mask
        while sub:
            yield sub
            sub = (sub - 1) & mask


def _labeled_primed(labels: _Labels, mask: int, cutoff: int) -> QSeries:
    if mask == 0:
        return QSeries.one(cutoff)
    nu, mus, _ = labels.split(mask)
    return _primed_count(nu, tuple(sorted(mus, reverse=True)), cutoff) * _label_factor(nu)


def _connected_count(nu: Partition, mus: Tuple[int, ...], cutoff: int) -> QSeries:
    labels = _Labels(nu, mus)
    primed: Dict[int, QSeries] = {}
    connected: Dict[int, QSeries] = {}

    def primed_of(mask: int) -> QSeries:
        if mask not in primed:
            primed[mask] = _labeled_primed(labels, mask, cutoff)
        return primed[mask]

    for mask in range(1, labels.full + 1):
        total = primed_of(mask)
        for block in labels.proper_submasks_with_lowest(mask):
            total = total - connected[block] * primed_of(mask ^ block)
        connected[mask] = total
    return connected[labels.full] / _label_factor(nu)


def _mu_parts(profile: RamificationProfile) -> Tuple[int, ...]:
    return tuple(m.parts[0] for m in profile.mus)


def count_covers(query: CoverCountQuery) -> QSeries:
    """
    Serie de conteo N, N′ o N⁰ del perfil.

    Args:
        query: Perfil, área máxima y conectividad

    Returns:
        QSeries en q^d hasta q^{d_max}
    """
    profile, cutoff = query.profile, query.d_max
    nu, mus = profile.nu, _mu_parts(profile)
    logger.info(f"Contando {profile} ({query.connectivity.value}) hasta q^{cutoff}")
    if query.connectivity is Connectivity.ALL:
        return _raw_count(nu, mus, cutoff)
    if query.connectivity is Connectivity.NO_UNRAMIFIED:
        return _primed_count(nu, mus, cutoff)
    if nu.length == 0 and not mus:
        return partition_weight_series(cutoff).log()
    return _connected_count(nu, mus, cutoff)


# -- Siegel-Veech ----------------------------------------------------------------

def branch_heights(n: int) -> List[Fraction]:
    """Altura del i-ésimo punto de ramificación μ_i: (n-i)/(2(n+1))."""
    return [Fraction(n - i, 2 * (n + 1)) for i in range(n)]


def strip_layout(heights: Sequence[Fraction]) -> List[Tuple[Fraction, Tuple[int, ...]]]:
    """
    Franjas horizontales entre niveles de ramificación.

    Returns:
        Lista de (altura de la franja, índices de los puntos por debajo)
    """
    order = sorted(range(len(heights)), key=lambda i: heights[i])
    levels = [Fraction(0)] + [heights[i] for i in order] + [Fraction(1, 2)]
    strips = []
    for k in range(len(levels) - 1):
        t = levels[k + 1] - levels[k]
        if t:
            strips.append((t, tuple(sorted(order[:k]))))
    return strips


def check_sv_exponent(p: int) -> None:
    if p < -1 or p % 2 == 0:
        raise ValueError(f"El exponente de Siegel-Veech debe ser impar y ≥ -1: {p}")


def _sv_coefficient(nu: Partition, mus: Tuple[int, ...], heights: Tuple[Fraction, ...],
                    p: int, d: int) -> Fraction:
    strips = strip_layout(heights)
    cycles = [Partition((m,)) for m in mus]
    lower: List[Dict[Tuple[Tuple[int, ...], int], Fraction]] = [{} for _ in strips]
    upper: List[Dict[Tuple[Tuple[int, ...], int], Fraction]] = [{} for _ in strips]
    size = 2 * d
    for lam in balanced_partitions(d):
        root = sqrt_weight_w(lam)
        if not root:
            continue
        g_value = eval_g(nu, lam)
        f_values = [eval_f(mu, lam) for mu in cycles]
        factors = []
        for _, below in strips:
            low = root * g_value * prod((f_values[i] for i in below), start=Fraction(1))
            high = root * prod(
                (f_values[i] for i in range(len(cycles)) if i not in below), start=Fraction(1)
            )
            factors.append((low, high))
        for ell in range(1, size + 1):
            for kappa, sign in border_strips(lam, ell):
                key = (kappa.parts, ell)
                for k, (low, high) in enumerate(factors):
                    if low:
                        lower[k][key] = lower[k].get(key, Fraction(0)) + sign * low
                    if high:
                        upper[k][key] = upper[k].get(key, Fraction(0)) + sign * high
    total = Fraction(0)
    for k, (t, _) in enumerate(strips):
        strip_total = Fraction(0)
        for key, low in lower[k].items():
            high = upper[k].get(key)
            if high:
                strip_total += Fraction(key[1]) ** (p - 1) * low * high
        total += t * strip_total
    return total


@lru_cache(maxsize=None)
def _sv_raw(nu: Partition, mus: Tuple[int, ...], heights: Tuple[Fraction, ...],
            p: int, cutoff: int) -> QSeries:
    if nu.size % 2:
        return QSeries.zero(cutoff)
    values = map_ordered(lambda d: _sv_coefficient(nu, mus, heights, p, d), range(cutoff + 1))
    return QSeries({2 * d: c for d, c in enumerate(values)}, 2 * cutoff)


def _sv_primed(nu: Partition, mus: Tuple[int, ...], heights: Tuple[Fraction, ...],
               p: int, cutoff: int) -> QSeries:
    n_empty = partition_weight_series(cutoff)
    c_empty = _sv_raw(EMPTY, (), (), p, cutoff)
    raw = _sv_raw(nu, mus, heights, p, cutoff)
    return (raw - _primed_count(nu, tuple(sorted(mus, reverse=True)), cutoff) * c_empty) / n_empty


def sv_series(profile: RamificationProfile, p: int, cutoff: int,
              connectivity: Connectivity = Connectivity.CONNECTED) -> QSeries:
    """
    Serie de conteo con peso de Siegel-Veech c_p.

    Cada punto de ramificación μ_i está a altura (n-i)/(2(n+1)); el peso de
    un cubrimiento es Σ_franjas t_k·Σ_cilindros ℓ^p.

    Args:
        profile: Perfil de ramificación
        p: Exponente impar ≥ -1
        cutoff: Área máxima
        connectivity: Modo de conteo

    Returns:
        QSeries c_p, c′_p o c⁰_p
    """
    check_sv_exponent(p)
    connectivity = Connectivity(connectivity)
    nu, mus = profile.nu, _mu_parts(profile)
    heights = tuple(branch_heights(len(mus)))
    logger.info(f"Serie de Siegel-Veech p={p} para {profile} ({connectivity.value})")
    if connectivity is Connectivity.ALL:
        return _sv_raw(nu, mus, heights, p, cutoff)
    if connectivity is Connectivity.NO_UNRAMIFIED:
        return _sv_primed(nu, mus, heights, p, cutoff)

    n_empty = partition_weight_series(cutoff)
    if nu.length == 0 and not mus:
        return _sv_raw(EMPTY, (), (), p, cutoff) / n_empty

    labels = _Labels(nu, mus)
    connected: Dict[int, QSeries] = {}
    for mask in range(1, labels.full + 1):
        sub_nu, sub_mus, indices = labels.split(mask)
        sub_heights = tuple(heights[j] for j in indices)
        total = _sv_primed(sub_nu, sub_mus, sub_heights, p, cutoff) * _label_factor(sub_nu)
        for block in labels.proper_submasks(mask):
            total = total - connected[block] * _labeled_primed(labels, mask ^ block, cutoff)
        connected[mask] = total
    return connected[labels.full] / _label_factor(nu)


def area_sv_constant(n0: QMForm, cminus1: QMForm, dim: int) -> Fraction:
    """
    (π²/3)·c_area como cociente de los coeficientes principales de ev.

    Args:
        n0: QMForm de la serie conexa N⁰
        cminus1: QMForm de la serie c⁰_{-1}
        dim: Dimensión compleja del estrato

    Raises:
        RecognitionError: Si el denominador se anula o los coeficientes no son proporcionales
    """
    lead_n = ev_map(n0).leading(dim)
    lead_c = ev_map(cminus1).leading(dim)
    if lead_n.is_zero():
        raise RecognitionError(f"ev[N⁰] no tiene término en 1/h^{dim}")
    ratio = lead_c.ratio_to(lead_n)
    if ratio is None:
        raise RecognitionError("Los coeficientes principales no son proporcionales")
    return ratio
