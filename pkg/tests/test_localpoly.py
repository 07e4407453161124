"""
Tests unitarios para factores locales y ajustes cuasi-polinomiales.
"""

import pytest
from fractions import Fraction
from itertools import product
from math import factorial
from pathlib import Path
import sys

import sympy

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.errors import PiecewiseFitError, SolveError
from pillowcase.localpoly import (
    LocalTable,
    QuasiPolynomial,
    chamber_diagnostic,
    connected_stabilized,
    connected_triple,
    fit_function,
    fit_quasipolynomial,
    fit_triple_polynomial,
    named_element,
    stabilized_cosets,
    stabilized_hurwitz,
    triple_hurwitz,
)
from pillowcase.shifted import ShiftedSymElement


def _central(a):
    """Coeficiente de t^a en (1 - t)^{-1/2}."""
    return sympy.Rational(sympy.binomial(2 * a, a), 4 ** a)


def vertex_operator_value(widths, k):
    """
    A₂′(w, p̄_k) por la fórmula de operadores de vértice:

        k!·[z^k] (e^{z/2} + e^{-z/2})^{-1} [y^0] D(y, z) Π K_{w_i}(y, z)

    con K_n = y^n((-e^z)^n - 1)/n + y^{-n}(1 - (-e^{-z})^n)/n y
    D = (1 + t e^{-z}) / sqrt((1 - t)(1 - t e^{-2z})), t = y^{-2}.
    """
    z = sympy.Symbol("z")
    e2 = sympy.exp(-2 * z)

    def d_coefficient(j):
        total = sum(_central(a) * _central(j - a) * e2 ** (j - a) for a in range(j + 1))
        if j:
            total += sympy.exp(-z) * sum(_central(a) * _central(j - 1 - a) * e2 ** (j - 1 - a)
                                         for a in range(j))
        return total

    expr = sympy.Integer(0)
    for signs in product((1, -1), repeat=len(widths)):
        exponent = sum(s * w for s, w in zip(signs, widths))
        if exponent < 0 or exponent % 2:
            continue
        term = d_coefficient(exponent // 2)
        for s, w in zip(signs, widths):
            if s > 0:
                term *= ((-sympy.exp(z)) ** w - 1) / w
            else:
                term *= (1 - (-sympy.exp(-z)) ** w) / w
        expr += term
    expr = expr / (sympy.exp(z / 2) + sympy.exp(-z / 2))
    coefficient = sympy.series(expr, z, 0, k + 1).removeO().coeff(z, k)
    value = sympy.Rational(sympy.nsimplify(coefficient)) * factorial(k)
    return Fraction(int(value.p), int(value.q))


class TestDirectSums:
    """Tests de A, A₂ y sus versiones primadas."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.one = ShiftedSymElement.constant(1)
        self.p1 = ShiftedSymElement.p(1)

    def test_single_cylinder_triple(self):
        """Test de A′((3),(3),p₁) = 1."""
        assert connected_triple((3,), (3,), self.p1) == 1

    def test_triple_with_unramified_part(self):
        """Test de A((3),(3),p₁) = 1 - 1/72."""
        assert triple_hurwitz((3,), (3,), self.p1) == 1 - Fraction(1, 72)

    def test_triple_size_mismatch(self):
        """Test de Σw⁻ ≠ Σw⁺."""
        with pytest.raises(SolveError, match="Tamaños distintos"):
            triple_hurwitz((2,), (3,), self.one)
        with pytest.raises(SolveError):
            connected_triple((1, 1), (3,), self.one)

    def test_non_positive_width(self):
        """Test de anchos nulos."""
        with pytest.raises(SolveError, match="no positivos"):
            stabilized_hurwitz((0, 2), self.one)

    def test_stabilized_single_width(self):
        """Test de A₂((2),1) = 0."""
        assert stabilized_hurwitz((2,), self.one) == 0

    def test_stabilized_pair_removes_unramified(self):
        """Test de A₂′((1,1),1) = 0."""
        assert stabilized_hurwitz((1, 1), self.one) == 1
        assert connected_stabilized((1, 1), self.one) == 0

    def test_stabilized_odd_sum(self):
        """Test de Σw impar."""
        with pytest.raises(SolveError, match="par"):
            connected_stabilized((1, 2), self.one)

    def test_special_vertex_values(self):
        """Test de A₂′ del vértice especial en anchos pequeños."""
        gbar = named_element("gbar3111")
        assert connected_stabilized((2,), gbar) == Fraction(1, 2)
        assert connected_stabilized((4,), gbar) == 1


class TestPbarProducts:
    """Tests de A₂′ con productos de p̄_k."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.pbar2 = ShiftedSymElement.pbar(2)
        self.pbar4 = named_element("pbar4")

    def test_small_values_by_hand(self):
        """Test de A₂′((1,1),p̄₂) = 2 y A₂′((2,2),p̄₄) = 34."""
        assert connected_stabilized((1, 1), self.pbar2) == 2
        assert connected_stabilized((1, 3), self.pbar2) == 2
        assert connected_stabilized((2, 2), self.pbar4) == 34

    @pytest.mark.parametrize("widths,k", [
        ((1, 1), 2), ((1, 3), 2), ((2, 2), 2),
        ((1, 1), 4), ((2, 2), 4), ((1, 3), 4), ((2, 4), 4),
    ])
    def test_agrees_with_vertex_operators(self, widths, k):
        """Test de la suma de caracteres contra la fórmula de operadores de vértice."""
        assert connected_stabilized(widths, ShiftedSymElement.pbar(k)) == vertex_operator_value(widths, k)

    def test_pbar4_global_polynomial(self):
        """Test de ½A₂′((2w₁,2w₂),p̄₄) = 10w₁² + 10w₂² - 3."""
        poly = fit_quasipolynomial(self.pbar4, 2, coset=(0, 0))
        assert {e: c for e, c in poly.cosets[(0, 0)].items() if c} == {(2, 0): 5, (0, 2): 5, (0, 0): -6}
        for w1 in range(1, 4):
            for w2 in range(1, 4):
                value = connected_stabilized((2 * w1, 2 * w2), self.pbar4) / 2
                assert value == 10 * w1 ** 2 + 10 * w2 ** 2 - 3


class TestFits:
    """Tests de ajustes polinomiales."""

    def test_fit_exact_polynomial(self):
        """Test de interpolación de w₁² + 3w₁w₂."""
        poly = fit_function(lambda w: Fraction(w[0] ** 2 + 3 * w[0] * w[1]), 2, 2, (0, 0))
        assert {e: c for e, c in poly.items() if c} == {(2, 0): 1, (1, 1): 3}

    def test_fit_piecewise_function_fails(self):
        """Test de max(w₁, w₂), que no es polinomial."""
        with pytest.raises(PiecewiseFitError) as excinfo:
            fit_function(lambda w: Fraction(max(w)), 2, 1, (0, 0))
        assert excinfo.value.diagnostic["coset"] == [0, 0]
        assert set(excinfo.value.diagnostic["chambers"]) == {"u<v", "u=v"}
        chambers = excinfo.value.diagnostic["chambers"]
        assert chambers["u<v"] == {"polynomial": "v", "verified": True}
        assert chambers["u=v"] == {"polynomial": "u", "verified": True}
        assert excinfo.value.diagnostic["convention"] == "u = min(w1, w2), v = max(w1, w2)"

    def test_diagonal_chamber_is_one_variable(self):
        """Test de la diagonal ajustada en una sola variable."""
        diagnostic = chamber_diagnostic(lambda w: Fraction(w[0] * w[1]), 2, 2, (1, 1))
        assert diagnostic["chambers"]["u=v"] == {"polynomial": "u**2", "verified": True}
        assert diagnostic["chambers"]["u<v"] == {"polynomial": "u*v", "verified": True}

    @pytest.mark.slow
    def test_p5_chamber_polynomial(self):
        """Test de A₂′((u,v),p₅/5) = 13/8·u²v + 7/8·v³ - v para u < v impares."""
        p5 = named_element("p5/5")
        assert connected_stabilized((1, 3), p5) == Fraction(51, 2)
        diagnostic = chamber_diagnostic(lambda w: connected_stabilized(w, p5), 2, 3, (1, 1))
        chamber = diagnostic["chambers"]["u<v"]
        u, v = sympy.symbols("u v")
        expected = sympy.Rational(13, 8) * u ** 2 * v + sympy.Rational(7, 8) * v ** 3 - v
        assert sympy.expand(sympy.sympify(chamber["polynomial"]) - expected) == 0
        assert chamber["verified"] is True

    def test_triple_polynomial(self):
        """Test de A′((w),(w),p₁) = 1 para todo w."""
        poly = fit_triple_polynomial(ShiftedSymElement.p(1), 1, 1)
        assert poly.evaluate((5,)) == 1
        assert poly.evaluate((12,)) == 1

    def test_triple_polynomial_needs_widths(self):
        """Test de aridad vacía."""
        with pytest.raises(SolveError):
            fit_triple_polynomial(ShiftedSymElement.p(1), 0, 1)

    def test_stabilized_cosets(self):
        """Test de clases de paridad de suma par."""
        assert stabilized_cosets(2) == [(0, 0), (1, 1)]

    def test_quasipolynomial_missing_coset(self):
        """Test de evaluación en una clase sin ajustar."""
        poly = QuasiPolynomial(1, {(0,): {(1,): Fraction(1)}})
        assert poly.evaluate((4,)) == 4
        with pytest.raises(SolveError):
            poly.evaluate((3,))
        assert poly.to_json() == {"0": [[[1], "1"]]}


class TestLocalTable:
    """Tests para LocalTable."""

    def test_direct_values(self):
        """Test de valores directos del corpus."""
        table = LocalTable()
        pbar4 = named_element("pbar4")
        assert table.stabilized((2, 2), pbar4) == 34
        assert table.stabilized((4, 2), pbar4) == 94
        assert table.stabilized((4, 4), pbar4) == 154

    def test_mismatched_and_odd(self):
        """Test de anchos incompatibles."""
        table = LocalTable()
        assert table.triple((2,), (3,), named_element("one")) == 0
        assert table.stabilized((1, 2), named_element("one")) == 0

    def test_fitted_triple(self):
        """Test del camino ajustado por encima del límite directo."""
        table = LocalTable(direct_limit=4)
        assert table.triple((9,), (9,), named_element("p1")) == 1

    def test_named_element(self):
        """Test de elementos con nombre."""
        assert named_element("f2") == ShiftedSymElement.p(2).scale(Fraction(1, 2))
        with pytest.raises(KeyError, match="Elemento desconocido"):
            named_element("nope")
