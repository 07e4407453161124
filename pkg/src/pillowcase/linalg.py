"""
Álgebra lineal exacta sobre Q.

Envoltorio delgado sobre DomainMatrix de sympy: todos los solvers del paquete
(bases de Λ̄, ajuste de cuasi-polinomios, reconocimiento cuasimodular) pasan
por aquí con entradas Fraction y devuelven Fraction.
"""

import logging
from fractions import Fraction
from typing import List, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .errors import SolveError

logger = logging.getLogger(__name__)

Row = Sequence[Fraction]


def _to_qq(value: Fraction):
    value = Fraction(value)
    return QQ(value.numerator, value.denominator)


def _from_sympy(value) -> Fraction:
    return Fraction(int(value.p), int(value.q))


def rref(rows: Sequence[Row], ncols: int) -> Tuple[List[List[Fraction]], Tuple[int, ...]]:
    """
    Forma escalonada reducida por filas.

    Args:
        rows: Filas de la matriz (Fraction o int)
        ncols: Número de columnas (necesario si no hay filas)

    Returns:
        Tupla (filas reducidas, columnas pivote)
    """
    if not rows:
        return [], ()
    matrix = DomainMatrix([[_to_qq(x) for x in row] for row in rows], (len(rows), ncols), QQ)
    reduced, pivots = matrix.rref()
    dense = reduced.to_Matrix()
    out = [[_from_sympy(dense[i, j]) for j in range(ncols)] for i in range(len(rows))]
    return out, tuple(pivots)


def matrix_rank(rows: Sequence[Row], ncols: int) -> int:
    """Rango exacto de la matriz."""
    return len(rref(rows, ncols)[1])


def _solve(rows: Sequence[Row], rhs: Sequence[Fraction], ncols: int, unique: bool) -> List[Fraction]:
    if len(rows) != len(rhs):
        raise SolveError(f"Dimensiones incompatibles: {len(rows)} filas y {len(rhs)} términos")
    augmented = [list(row) + [Fraction(b)] for row, b in zip(rows, rhs)]
    reduced, pivots = rref(augmented, ncols + 1)
    if ncols in pivots:
        raise SolveError("Sistema inconsistente")
    if unique and len(pivots) < ncols:
        raise SolveError(
            f"Sistema indeterminado: rango {len(pivots)} para {ncols} incógnitas"
        )
    solution = [Fraction(0)] * ncols
    for row_index, col in enumerate(pivots):
        solution[col] = reduced[row_index][ncols]
    return solution


def solve_unique(rows: Sequence[Row], rhs: Sequence[Fraction], ncols: int) -> List[Fraction]:
    """
    Resolver un sistema sobredeterminado que debe tener solución única.

    Raises:
        SolveError: Si el sistema es inconsistente o de rango incompleto
    """
    return _solve(rows, rhs, ncols, unique=True)


def solve_particular(rows: Sequence[Row], rhs: Sequence[Fraction], ncols: int) -> List[Fraction]:
    """
    Solución particular con variables libres en cero.

    Raises:
        SolveError: Si el sistema es inconsistente
    """
    return _solve(rows, rhs, ncols, unique=False)
