"""
Tests del oráculo de fuerza bruta y comparación con las sumas de caracteres.
"""

import pytest
from fractions import Fraction
from pathlib import Path
import sys

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.brackets import Connectivity, CoverCountQuery, count_covers, sv_series
from pillowcase.errors import OracleLimitError
from pillowcase.qmforms import recognize, saturation_check
from pillowcase.oracle import (
    MAX_DEGREE,
    brute_force_hurwitz,
    brute_force_sv,
    compose,
    conjugacy_class,
    cycle_lengths,
    inverse,
)
from pillowcase.sympart import RamificationProfile

PROFILES = [
    {"nu": [], "mus": []},
    {"nu": [1, 1], "mus": [[2]]},
    {"nu": [], "mus": [[3]]},
]

SV_PROFILES = PROFILES + [
    {"nu": [1, 1, 1, 1], "mus": []},
    {"nu": [], "mus": [[2], [2]]},
]

SMALL_PROFILES = [
    {"nu": [1, 1], "mus": [[2]]},
    {"nu": [1, 1, 1, 1], "mus": []},
    {"nu": [3, 1], "mus": []},
    {"nu": [], "mus": [[3]]},
]


class TestPermutations:
    """Tests de utilidades de permutaciones."""

    def test_compose_left_to_right(self):
        """Test de (xy)[i] = y[x[i]]."""
        x = (1, 0, 2)
        y = (0, 2, 1)
        assert compose(x, y) == (2, 0, 1)
        assert compose(x, inverse(x)) == (0, 1, 2)

    def test_cycle_lengths(self):
        """Test de tipo de ciclos."""
        assert cycle_lengths((1, 2, 0, 3)) == [3, 1]

    def test_conjugacy_class_size(self):
        """Test de |clase de (2,2)| en S_4 = 3."""
        assert len(conjugacy_class(4, (2, 2))) == 3
        assert len(conjugacy_class(4, (3, 1))) == 8


class TestBruteForce:
    """Tests de brute_force_hurwitz y brute_force_sv."""

    def test_empty_profile_degree_two(self):
        """Test de N_1(∅) = 1/2."""
        assert brute_force_hurwitz(RamificationProfile.empty(), 1) == Fraction(1, 2)

    def test_empty_profile_sv(self):
        """Test de c_1(∅) en d=1."""
        assert brute_force_sv(RamificationProfile.empty(), 1, 1) == Fraction(1, 2)

    def test_degree_limit(self):
        """Test del límite de grado."""
        with pytest.raises(OracleLimitError):
            brute_force_hurwitz(RamificationProfile.empty(), MAX_DEGREE // 2 + 1)

    @pytest.mark.parametrize("data", PROFILES)
    @pytest.mark.parametrize("connectivity", list(Connectivity))
    def test_matches_character_sum(self, data, connectivity):
        """Test de fuerza bruta contra la suma de caracteres para 2d ≤ 4."""
        profile = RamificationProfile.from_json(data)
        series = count_covers(CoverCountQuery(profile, 2, connectivity))
        for d in range(1, 3):
            assert brute_force_hurwitz(profile, d, connectivity) == series.coefficient(d)

    @pytest.mark.slow
    @pytest.mark.parametrize("data", PROFILES + [{"nu": [3, 1, 1, 1], "mus": [[2]]}])
    def test_matches_character_sum_degree_six(self, data):
        """Test de fuerza bruta contra la suma de caracteres en 2d = 6."""
        profile = RamificationProfile.from_json(data)
        for connectivity in Connectivity:
            series = count_covers(CoverCountQuery(profile, 3, connectivity))
            assert brute_force_hurwitz(profile, 3, connectivity) == series.coefficient(3)

    @pytest.mark.parametrize("p", [-1, 1])
    def test_sv_matches_character_sum(self, p):
        """Test de c_p por fuerza bruta contra la suma sobre tiras de borde."""
        profile = RamificationProfile.from_json({"nu": [1, 1], "mus": [[2]]})
        series = sv_series(profile, p, 2, Connectivity.ALL)
        for d in range(1, 3):
            assert brute_force_sv(profile, d, p) == series.coefficient(d)

    @pytest.mark.slow
    @pytest.mark.parametrize("data", SV_PROFILES)
    @pytest.mark.parametrize("p", [-1, 1, 3])
    def test_sv_matches_character_sum_on_profiles(self, data, p):
        """Test de c_p por fuerza bruta en varios perfiles y exponentes."""
        profile = RamificationProfile.from_json(data)
        series = sv_series(profile, p, 2, Connectivity.ALL)
        for d in range(1, 3):
            assert brute_force_sv(profile, d, p) == series.coefficient(d)


class TestSmallProfiles:
    """Tests de reconocimiento, saturación y oráculo en perfiles chicos."""

    @pytest.mark.slow
    @pytest.mark.parametrize("data", SMALL_PROFILES)
    def test_quasimodular_and_matches_oracle(self, data):
        """Test de N′ cuasimodular de peso ≤ wt(Π) y de acuerdo con la fuerza bruta."""
        profile = RamificationProfile.from_json(data)
        series = count_covers(CoverCountQuery(profile, 12, Connectivity.NO_UNRAMIFIED))
        form = recognize(series, "gamma02", profile.weight_bound)
        assert form.weight <= profile.weight_bound
        assert saturation_check(series, "gamma02", profile.weight_bound) == form
        for connectivity in Connectivity:
            low = count_covers(CoverCountQuery(profile, 2, connectivity))
            for d in range(1, 3):
                assert brute_force_hurwitz(profile, d, connectivity) == low.coefficient(d)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
