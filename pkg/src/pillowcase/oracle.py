"""
Oráculo de fuerza bruta: enumeración de tuplas de Hurwitz en S_{2d}.

Una tupla (α₁,α₂,α₃,α₄,γ₁,...,γ_n) cumple α₁α₄γ_n···γ₁α₂α₃ = id, con
α₁, α₂, α₃ involuciones sin puntos fijos, α₄ de tipo (ν,2,...,2) y γ_j de
tipo (μ_j,1,...,1). El producto compone de izquierda a derecha:
(xy)[i] = y[x[i]].

Solo para grados 2d ≤ MAX_DEGREE; α₁ se fija y se multiplica por (2d-1)!!.
"""

import logging
from fractions import Fraction
from functools import lru_cache
from itertools import permutations
from math import factorial, prod
from typing import Iterator, List, Sequence, Tuple

from .brackets import Connectivity, branch_heights, strip_layout, check_sv_exponent
from .errors import OracleLimitError
from .sympart import Partition, RamificationProfile

logger = logging.getLogger(__name__)

MAX_DEGREE = 6

Perm = Tuple[int, ...]


def compose(x: Perm, y: Perm) -> Perm:
    """Producto xy: primero x, luego y."""
    return tuple(y[i] for i in x)


def inverse(x: Perm) -> Perm:
    result = [0] * len(x)
    for i, image in enumerate(x):
        result[image] = i
    return tuple(result)


def cycle_lengths(x: Perm) -> List[int]:
    seen = [False] * len(x)
    lengths = []
    for start in range(len(x)):
        if seen[start]:
            continue
        length, i = 0, start
        while not seen[i]:
            seen[i] = True
            i = x[i]
            length += 1
        lengths.append(length)
    return sorted(lengths, reverse=True)


@lru_cache(maxsize=None)
def conjugacy_class(n: int, cycle_type: Tuple[int, ...]) -> Tuple[Perm, ...]:
    """Todas las permutaciones de S_n con el tipo de ciclos dado."""
    target = sorted(cycle_type, reverse=True)
    return tuple(p for p in permutations(range(n)) if cycle_lengths(p) == target)


def _double_factorial(n: int) -> int:
    return prod(range(n, 0, -2)) if n > 0 else 1


def _orbits(n: int, generators: Sequence[Perm]) -> List[List[int]]:
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for perm in generators:
        for i, image in enumerate(perm):
            a, b = find(i), find(image)
            if a != b:
                parent[a] = b
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _is_unramified(orbit: Sequence[int], alpha4: Perm, gammas: Sequence[Perm]) -> bool:
    for i in orbit:
        j = alpha4[i]
        if j == i or alpha4[j] != i:
            return False
        if any(g[i] != i for g in gammas):
            return False
    return True


def _accepts(n: int, connectivity: Connectivity, alphas: Sequence[Perm], gammas: Sequence[Perm]) -> bool:
    if connectivity is Connectivity.ALL:
        return True
    orbits = _orbits(n, list(alphas) + list(gammas))
    if connectivity is Connectivity.CONNECTED:
        return n > 0 and len(orbits) == 1
    return not any(_is_unramified(o, alphas[3], gammas) for o in orbits)


def hurwitz_tuples(profile: RamificationProfile, d: int, max_degree: int = MAX_DEGREE) -> Iterator[Tuple[Perm, Perm, Perm, Perm, Tuple[Perm, ...]]]:
    """
    Tuplas (α₁, α₂, α₃, α₄, γ) con α₁ fijo.

    Raises:
        OracleLimitError: Si 2d supera MAX_DEGREE
    """
    n = 2 * d
    if n > max_degree:
        raise OracleLimitError(f"Fuerza bruta limitada a 2d ≤ {max_degree}: 2d = {n}")
    nu = profile.nu
    if nu.size > n or any(m.size > n for m in profile.mus):
        return
    involutions = conjugacy_class(n, (2,) * d)
    alpha1 = involutions[0] if involutions else tuple()
    alpha4_class = conjugacy_class(n, nu.padded(2, (n - nu.size) // 2).parts)
    gamma_classes = [conjugacy_class(n, m.padded(1, n - m.size).parts) for m in profile.mus]
    involution_set = set(involutions)

    def extend(prefix: Perm, chosen: Tuple[Perm, ...], remaining):
        if not remaining:
            yield prefix, chosen
            return
        # γ_n primero: el producto es α₁α₄γ_n···γ₁
        for gamma in remaining[-1]:
            yield from extend(compose(prefix, gamma), (gamma,) + chosen, remaining[:-1])

    for alpha4 in alpha4_class:
        start = compose(alpha1, alpha4)
        for product, gammas in extend(start, (), gamma_classes):
            for alpha2 in involutions:
                alpha3 = inverse(compose(product, alpha2))
                if alpha3 in involution_set:
                    yield alpha1, alpha2, alpha3, alpha4, gammas


def brute_force_hurwitz(profile: RamificationProfile, d: int,
                        connectivity: Connectivity = Connectivity.ALL,
                        max_degree: int = MAX_DEGREE) -> Fraction:
    """
    N_d(Π) = |Hur_d(Π)|/(2d)! por enumeración directa.

    Raises:
        OracleLimitError: Si 2d > MAX_DEGREE
    """
    connectivity = Connectivity(connectivity)
    n = 2 * d
    count = 0
    for alpha1, alpha2, alpha3, alpha4, gammas in hurwitz_tuples(profile, d, max_degree):
        if _accepts(n, connectivity, (alpha1, alpha2, alpha3, alpha4), gammas):
            count += 1
    total = count * _double_factorial(n - 1)
    logger.debug(f"Fuerza bruta {profile}, 2d={n}: {total} tuplas ({connectivity.value})")
    return Fraction(total, factorial(n))


def core_monodromies(alpha1: Perm, alpha4: Perm, gammas: Sequence[Perm]) -> List[Perm]:
    """σ_k = α₁α₄γ_n···γ_{n-k+1} para k = 0..n."""
    current = compose(alpha1, alpha4)
    result = [current]
    for gamma in reversed(gammas):
        current = compose(current, gamma)
        result.append(current)
    return result


def brute_force_sv(profile: RamificationProfile, d: int, p: int,
                   connectivity: Connectivity = Connectivity.ALL,
                   max_degree: int = MAX_DEGREE) -> Fraction:
    """
    Suma de pesos de Siegel-Veech Σ_k t_k Σ_cilindros ℓ^p sobre tuplas, / (2d)!.

    Raises:
        OracleLimitError: Si 2d > MAX_DEGREE
    """
    check_sv_exponent(p)
    connectivity = Connectivity(connectivity)
    n = 2 * d
    heights = branch_heights(len(profile.mus))
    strips = strip_layout(heights)
    total = Fraction(0)
    for alpha1, alpha2, alpha3, alpha4, gammas in hurwitz_tuples(profile, d, max_degree):
        if not _accepts(n, connectivity, (alpha1, alpha2, alpha3, alpha4), gammas):
            continue
        sigmas = core_monodromies(alpha1, alpha4, gammas)
        for t, below in strips:
            sigma = sigmas[len(below)]
            total += t * sum((Fraction(ell) ** p for ell in cycle_lengths(sigma)), Fraction(0))
    return total * _double_factorial(n - 1) / factorial(n)
