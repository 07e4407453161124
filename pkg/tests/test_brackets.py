"""
Tests unitarios para w-corchetes, conteos de cubrimientos y series de Siegel-Veech.
"""

import pytest
from fractions import Fraction
from pathlib import Path
import sys

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.brackets import (
    Connectivity,
    CoverCountQuery,
    balanced_partitions,
    branch_heights,
    check_sv_exponent,
    count_covers,
    partition_weight_series,
    strip_layout,
    sv_series,
    wbracket,
    weight_w,
)
from pillowcase.errors import PartitionError, ProfileError
from pillowcase.qseries import QSeries
from pillowcase.sympart import Partition, RamificationProfile


class TestWeights:
    """Tests del peso w(λ)."""

    def test_weight_of_small_partitions(self):
        """Test de w((2)) = w((1,1)) = 1/4."""
        assert weight_w(Partition((2,))) == Fraction(1, 4)
        assert weight_w(Partition((1, 1))) == Fraction(1, 4)

    def test_weight_vanishes_off_balanced(self):
        """Test de w = 0 fuera de las balanceadas."""
        assert weight_w(Partition((3, 2, 1))) == 0

    def test_odd_size(self):
        """Test de |λ| impar."""
        with pytest.raises(PartitionError):
            weight_w(Partition((2, 1)))

    def test_balanced_partitions(self):
        """Test de particiones balanceadas de tamaño 2d."""
        assert len(balanced_partitions(1)) == 2
        assert len(balanced_partitions(2)) == 5

    def test_partition_weight_series(self):
        """Test de N(Π_∅) = 1 + q/2 + 7q²/8 + ..."""
        assert partition_weight_series(2).q_coefficients() == [1, Fraction(1, 2), Fraction(7, 8)]

    def test_bracket_of_constant(self):
        """Test de ⟨1⟩_w = 1."""
        assert wbracket(lambda lam: Fraction(1), 4) == QSeries.one(4)


class TestCountCovers:
    """Tests de count_covers."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.empty = RamificationProfile.empty()

    def test_empty_all(self):
        """Test de N(∅) en d=1."""
        series = count_covers(CoverCountQuery(self.empty, 3, Connectivity.ALL))
        assert series.coefficient(0) == 1
        assert series.coefficient(1) == Fraction(1, 2)

    def test_empty_no_unramified(self):
        """Test de N′(∅) = 1."""
        series = count_covers(CoverCountQuery(self.empty, 3, Connectivity.NO_UNRAMIFIED))
        assert series == QSeries.one(3)

    def test_empty_connected(self):
        """Test de N⁰(∅) = log N(∅)."""
        series = count_covers(CoverCountQuery(self.empty, 3, "connected"))
        assert series.coefficient(0) == 0
        assert series.coefficient(1) == Fraction(1, 2)

    def test_odd_profile_vanishes_below_min_area(self):
        """Test de coeficientes nulos por debajo del área mínima."""
        profile = RamificationProfile.from_json({"nu": [3, 1, 1, 1], "mus": [[2]]})
        series = count_covers(CoverCountQuery(profile, 2, Connectivity.ALL))
        assert series.coefficient(1) == 0
        assert series.coefficient(2) == 0

    def test_negative_cutoff(self):
        """Test de d_max negativo."""
        with pytest.raises(ProfileError):
            CoverCountQuery(self.empty, -1)

    def test_unknown_connectivity(self):
        """Test de modo de conectividad inválido."""
        with pytest.raises(ValueError):
            CoverCountQuery(self.empty, 2, "partial")


class TestSiegelVeech:
    """Tests de las series con peso de Siegel-Veech."""

    def test_branch_heights(self):
        """Test de alturas (n-i)/(2(n+1))."""
        assert branch_heights(1) == [Fraction(1, 4)]
        assert branch_heights(2) == [Fraction(1, 3), Fraction(1, 6)]

    def test_strip_layout(self):
        """Test de franjas para un punto a altura 1/4."""
        strips = strip_layout([Fraction(1, 4)])
        assert strips == [(Fraction(1, 4), ()), (Fraction(1, 4), (0,))]

    def test_exponent_check(self):
        """Test de exponentes inválidos."""
        check_sv_exponent(-1)
        check_sv_exponent(3)
        with pytest.raises(ValueError, match="impar"):
            check_sv_exponent(2)
        with pytest.raises(ValueError):
            check_sv_exponent(-3)

    @pytest.mark.parametrize("p", [-1, 1, 3])
    def test_empty_profile_first_coefficient(self, p):
        """Test de c_p(∅) en d=1: dos cilindros de circunferencia 1."""
        series = sv_series(RamificationProfile.empty(), p, 2, Connectivity.ALL)
        assert series.coefficient(1) == Fraction(1, 2)
