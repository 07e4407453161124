"""
Tests de sumas sobre grafos, propagadores y corchetes auxiliares.
"""

import pytest
from fractions import Fraction
from pathlib import Path
import sys

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.brackets import Connectivity, CoverCountQuery, count_covers
from pillowcase.errors import SaturationError
from pillowcase.graphs import GlobalGraph
from pillowcase.graphsum import (
    AuxBracketSpec,
    PropagatorFactor,
    aux_bracket,
    decompose_element,
    decompose_wbracket,
    graph_engine_count,
    graph_sum_S,
    loop_factor,
    loop_series,
    parity_conditions,
    propagator_factors,
    reduce_graph,
    sv_aux_bracket,
    sv_graph_sum,
    zeta_constant_term,
)
from pillowcase.qseries import QSeries
from pillowcase.shifted import Monomial, ShiftedSymElement
from pillowcase.sympart import EMPTY, Partition, RamificationProfile

NO_EPLUS = frozenset()


class TestGraphSums:
    """Tests de S(Γ, E⁺, m, pc)."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.loop0 = GlobalGraph(0, ((0, 0),))

    def test_loop_at_zero(self):
        """Test de S para un lazo en 0: Σσ(n)q^n."""
        series = graph_sum_S(self.loop0, NO_EPLUS, [0], None, 5)
        assert series.q_coefficients() == [0, 1, 3, 4, 7, 6]
        assert series == loop_series(0, None, 5)

    def test_loop_even_parity(self):
        """Test de la parte de anchos pares."""
        series = graph_sum_S(self.loop0, NO_EPLUS, [0], {0: 0}, 5)
        assert series.coefficient(2) == 2
        assert series.coefficient(4) == 6
        assert series == loop_series(0, 0, 5)
        odd = graph_sum_S(self.loop0, NO_EPLUS, [0], {0: 1}, 5)
        assert odd + series == loop_series(0, None, 5)

    def test_saturation(self):
        """Test de W_max explícito estable."""
        assert graph_sum_S(self.loop0, NO_EPLUS, [0], None, 4, wmax=4) == loop_series(0, None, 4)

    def test_saturation_failure(self):
        """Test de W_max demasiado chico."""
        with pytest.raises(SaturationError):
            graph_sum_S(self.loop0, NO_EPLUS, [0], None, 4, wmax=1)

    def test_sv_sum_is_derivative(self):
        """Test de S^SV con m=2 igual a D_q S con m=0 para un lazo."""
        sv = sv_graph_sum(self.loop0, NO_EPLUS, [2], None, 0, 5)
        assert sv == graph_sum_S(self.loop0, NO_EPLUS, [0], None, 5).d_q()

    def test_parity_conditions(self):
        """Test de PC(Γ) = {0,1}^{E⁰}."""
        graph = GlobalGraph(1, ((0, 1), (0, 1), (1, 1)))
        assert len(parity_conditions(graph)) == 4
        assert parity_conditions(GlobalGraph(1, ((1, 1),))) == [{}]

    def test_edge_data_validation(self):
        """Test de exponentes y paridades inválidos."""
        with pytest.raises(ValueError, match="exponentes"):
            graph_sum_S(self.loop0, NO_EPLUS, [0, 0], None, 3)
        with pytest.raises(ValueError, match="pares"):
            graph_sum_S(self.loop0, NO_EPLUS, [1], None, 3)
        with pytest.raises(ValueError, match="E⁰"):
            graph_sum_S(self.loop0, NO_EPLUS, [0], {}, 3)
        with pytest.raises(ValueError):
            sv_graph_sum(self.loop0, NO_EPLUS, [0], None, 1, 3)


class TestLoopFactorization:
    """Tests de la factorización de lazos."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.graph = GlobalGraph(1, ((0, 0), (0, 1), (0, 1)))

    def test_reduce_graph(self):
        """Test de reducción del lazo en 0."""
        reduced, eplus, m, pc = reduce_graph(self.graph, NO_EPLUS, [0, 2, 0], {0: 1, 1: 0, 2: 1})
        assert reduced.edges == ((0, 1), (0, 1))
        assert m == (2, 0)
        assert pc == {0: 0, 1: 1}

    def test_factorization(self):
        """Test de S(Γ) = S_lazos · S(Γ reducido)."""
        cutoff = 4
        full = graph_sum_S(self.graph, NO_EPLUS, [0, 0, 0], None, cutoff)
        reduced, eplus, m, pc = reduce_graph(self.graph, NO_EPLUS, [0, 0, 0], None)
        factor = loop_factor(self.graph, NO_EPLUS, [0, 0, 0], None, cutoff)
        assert full == factor * graph_sum_S(reduced, eplus, m, pc, cutoff)

    def test_propagators_need_reduced_graph(self):
        """Test de propagadores sobre un grafo sin reducir."""
        with pytest.raises(ValueError, match="reducido"):
            propagator_factors(self.graph, NO_EPLUS, [0, 0, 0], None)

    def test_propagator_arguments(self):
        """Test de argumentos Z por tipo de arista."""
        graph = GlobalGraph(2, ((0, 1), (1, 1), (1, 2), (1, 2)))
        factors = propagator_factors(graph, frozenset({2}), [0, 0, 0, 0], {0: 1})
        assert [f.argument for f in factors] == [((1, 1),), ((1, 2),), ((1, 1), (2, -1)), ((1, 1), (2, 1))]
        assert factors[0].parity == 1


class TestZetaConstantTerm:
    """Tests de [ζ⁰] de productos de propagadores."""

    def test_p_zeta_squared_times_p_zeta(self):
        """Test de [ζ⁰]P(ζ²)P(ζ)."""
        factors = [PropagatorFactor(((1, 2),)), PropagatorFactor(((1, 1),))]
        series = zeta_constant_term(factors, 4)
        assert series.coefficient(0) == 0
        assert series.coefficient(1) == 2

    def test_single_propagator_has_no_constant_term(self):
        """Test de [ζ⁰]P(ζ) = 0."""
        series = zeta_constant_term([PropagatorFactor(((1, 1),))], 4)
        assert series.is_zero()


class TestAuxBrackets:
    """Tests de corchetes auxiliares y del motor de grafos."""

    def test_empty_bracket(self):
        """Test de [; 1] = 1."""
        assert aux_bracket([], ShiftedSymElement.constant(1), 3) == QSeries.one(3)

    def test_engine_on_empty_profile(self):
        """Test de N′(∅) = 1 por el motor de grafos."""
        assert graph_engine_count(RamificationProfile.empty(), 3) == QSeries.one(3)

    def test_spec(self):
        """Test de AuxBracketSpec."""
        spec = AuxBracketSpec((2, 1), Partition((1,)))
        assert spec.weight == 6
        assert str(spec) == "[p2, p1; p̄1]"
        assert spec.to_json() == {"locals": [2, 1], "special": [1]}

    def test_decompose_p1(self):
        """Test de ⟨p₁⟩_w = [p₁; 1] - 1/24."""
        terms = decompose_element(ShiftedSymElement.p(1))
        assert terms == [(Fraction(-1, 24), AuxBracketSpec(())), (Fraction(1), AuxBracketSpec((1,)))]

    def test_decompose_wbracket_monomial(self):
        """Test de decompose_wbracket sobre el monomio p₁."""
        target = Monomial(Partition((1,)), EMPTY)
        assert decompose_wbracket(target) == decompose_element(ShiftedSymElement.p(1))

    def test_sv_bracket_of_loop_is_derivative(self):
        """Test de SV con p=1 sobre un lazo en 0 igual a D_q del corchete."""
        graphs = [GlobalGraph(0, ((0, 0),))]
        special = ShiftedSymElement.pbar(1)
        plain = aux_bracket([], special, 4, graphs=graphs)
        assert sv_aux_bracket([], special, 1, 4, graphs=graphs) == plain.d_q()

    def test_sv_bracket_rejects_even_exponent(self):
        """Test de exponente de Siegel-Veech par."""
        with pytest.raises(ValueError, match="impar"):
            sv_aux_bracket([], ShiftedSymElement.constant(1), 2, 3)

    @pytest.mark.slow
    def test_engines_agree(self):
        """Test de N′ por caracteres y por grafos en ν=(1,1), μ=(2)."""
        profile = RamificationProfile.from_json({"nu": [1, 1], "mus": [[2]]})
        cutoff = 3
        expected = count_covers(CoverCountQuery(profile, cutoff, Connectivity.NO_UNRAMIFIED))
        assert graph_engine_count(profile, cutoff) == expected

    @pytest.mark.slow
    @pytest.mark.parametrize("data", [
        {"nu": [], "mus": [[3]]},
        {"nu": [1, 1, 1, 1], "mus": []},
        {"nu": [], "mus": [[5]]},
    ])
    def test_engines_agree_on_more_profiles(self, data):
        """Test de N′ por caracteres y por grafos en otros perfiles."""
        profile = RamificationProfile.from_json(data)
        cutoff = 3
        expected = count_covers(CoverCountQuery(profile, cutoff, Connectivity.NO_UNRAMIFIED))
        assert graph_engine_count(profile, cutoff) == expected


class TestPropagatorExpansion:
    """Tests de S(Γ) contra [ζ⁰] de su propagador en grafos reducidos."""

    @pytest.mark.parametrize("graph,eplus,m,pc", [
        (GlobalGraph(1, ((0, 1), (1, 1))), NO_EPLUS, (0, 0), None),
        (GlobalGraph(1, ((0, 1), (1, 1))), NO_EPLUS, (2, 0), None),
        (GlobalGraph(1, ((0, 1), (0, 1), (0, 1))), NO_EPLUS, (0, 0, 0), {0: 1, 1: 1, 2: 0}),
        (GlobalGraph(1, ((0, 1), (0, 1), (0, 1))), NO_EPLUS, (0, 0, 0), {0: 0, 1: 0, 2: 0}),
        (GlobalGraph(2, ((0, 1), (1, 2), (2, 2))), frozenset({1}), (0, 0, 0), None),
        (GlobalGraph(2, ((0, 1), (1, 2), (2, 2))), NO_EPLUS, (0, 0, 0), None),
        (GlobalGraph(2, ((0, 2), (1, 2), (1, 2))), frozenset({1}), (0, 0, 0), None),
    ])
    def test_direct_sum_equals_constant_term(self, graph, eplus, m, pc):
        """Test de S(Γ, E⁺, m, pc) = [ζ⁰] Π P^{(m_e)}(Z_e)."""
        cutoff = 6
        direct = graph_sum_S(graph, eplus, m, pc, cutoff)
        expanded = zeta_constant_term(propagator_factors(graph, eplus, m, pc), cutoff)
        assert direct == expanded


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
