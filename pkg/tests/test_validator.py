"""
Tests unitarios para el sistema de validación.

Este módulo contiene tests para validator.py, que revisa los documentos
de perfiles y grafos antes de construir los objetos del dominio.
"""

import pytest
from io import StringIO
from pathlib import Path
import sys

from rich.console import Console

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.validator import (
    InputValidator,
    ValidationError,
    print_validation_results,
    require_valid,
    validate_graph_data,
    validate_profile_data,
)


class TestInputValidator:
    """Tests para la clase InputValidator."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.validator = InputValidator()

    def test_init(self):
        """Test de inicialización del validador."""
        assert self.validator.errors == []
        assert self.validator.warnings == []

    def test_validate_nu_valid(self):
        """Test de ν válidos."""
        for nu in ([], [1, 1], [3, 1, 1, 1], [5, 3]):
            validator = InputValidator()
            assert validator.validate_nu(nu), f"ν={nu} debería ser válido"
            assert validator.errors == []

    def test_validate_nu_invalid(self):
        """Test de ν inválidos."""
        invalid_cases = [
            ("3,1", "no es lista"),
            ([2, 2], "partes pares"),
            ([3], "suma impar"),
            ([1, True], "booleano"),
            ([-1, 1], "parte negativa"),
        ]
        for nu, description in invalid_cases:
            validator = InputValidator()
            assert not validator.validate_nu(nu), f"ν={nu} ({description}) debería ser inválido"
            assert len(validator.errors) == 1

    def test_validate_mus(self):
        """Test de ciclos μ."""
        assert self.validator.validate_mus([[2], [3]])
        assert not self.validator.validate_mus([[2, 1]])
        assert any("único ciclo" in error for error in self.validator.errors)
        assert not self.validator.validate_mus([[1]])
        assert any("trivial" in error for error in self.validator.errors)
        assert not self.validator.validate_mus("2")

    def test_many_branch_points_warning(self):
        """Test de advertencia con muchos puntos de ramificación."""
        assert self.validator.validate_mus([[2]] * 5)
        assert any("lento" in warning for warning in self.validator.warnings)


class TestProfileValidation:
    """Tests de validate_profile_data."""

    def test_valid_profile(self):
        """Test de un perfil válido."""
        is_valid, errors, warnings = validate_profile_data({"nu": [3, 1, 1, 1], "mus": [[2]]})
        assert is_valid
        assert errors == []
        assert warnings == []

    def test_half_integer_genus(self):
        """Test de género no entero."""
        is_valid, errors, _ = validate_profile_data({"nu": [1, 1], "mus": []})
        assert not is_valid
        assert any("género" in error for error in errors)

    def test_unknown_keys(self):
        """Test de claves desconocidas."""
        is_valid, _, warnings = validate_profile_data({"nu": [], "mus": [], "genus": 0})
        assert is_valid
        assert any("genus" in warning for warning in warnings)

    def test_not_a_mapping(self):
        """Test de documento que no es objeto."""
        is_valid, errors, _ = validate_profile_data([3, 1, 1, 1])
        assert not is_valid
        assert errors == ["El perfil debe ser un objeto JSON"]

    def test_validator_is_reusable(self):
        """Test de reinicio de errores entre validaciones."""
        validator = InputValidator()
        assert not validator.validate_profile({"nu": [2]})[0]
        assert validator.validate_profile({"nu": []})[0]


class TestGraphValidation:
    """Tests de validate_graph_data."""

    def test_valid_graph(self):
        """Test de un grafo válido."""
        data = {"special": True, "n": 1, "edges": [[0, 1], [1, 1]], "Eplus": [1]}
        assert validate_graph_data(data)[0]

    def test_invalid_n(self):
        """Test de n inválido."""
        is_valid, errors, _ = validate_graph_data({"n": -1, "edges": []})
        assert not is_valid
        assert "'n'" in errors[0]

    def test_edge_out_of_range(self):
        """Test de aristas fuera de rango."""
        is_valid, errors, _ = validate_graph_data({"special": False, "n": 1, "edges": [[0, 1]]})
        assert not is_valid
        assert any("fuera del rango" in error for error in errors)

    def test_malformed_edge(self):
        """Test de aristas mal formadas."""
        is_valid, errors, _ = validate_graph_data({"n": 1, "edges": [[1, 1, 1]]})
        assert not is_valid
        assert any("par de enteros" in error for error in errors)

    def test_isolated_vertex(self):
        """Test de vértices aislados."""
        is_valid, errors, _ = validate_graph_data({"n": 2, "edges": [[0, 1]]})
        assert not is_valid
        assert errors == ["Vértices aislados no permitidos: [2]"]

    def test_eplus_touching_zero(self):
        """Test de Eplus sobre una arista del vértice especial."""
        is_valid, errors, _ = validate_graph_data({"n": 1, "edges": [[0, 1]], "Eplus": [0]})
        assert not is_valid
        assert any("vértice 0" in error for error in errors)

    def test_eplus_out_of_range(self):
        """Test de índice de Eplus fuera de rango."""
        is_valid, errors, _ = validate_graph_data({"n": 1, "edges": [[1, 1]], "Eplus": [4]})
        assert not is_valid
        assert any("fuera de rango" in error for error in errors)


class TestRequireValid:
    """Tests para require_valid y print_validation_results."""

    def test_require_valid_passes(self):
        """Test sin errores."""
        require_valid((True, [], ["aviso"]), "Perfil")

    def test_require_valid_raises(self):
        """Test con errores concatenados."""
        with pytest.raises(ValidationError, match="Perfil inválido: a; b"):
            require_valid((False, ["a", "b"], []), "Perfil")

    def test_validation_error_is_value_error(self):
        """Test de jerarquía de ValidationError."""
        assert issubclass(ValidationError, ValueError)

    def test_print_success(self):
        """Test de impresión de validación exitosa."""
        output = StringIO()
        print_validation_results(True, [], [], console=Console(file=output))
        assert "Validación exitosa" in output.getvalue()

    def test_print_errors_and_warnings(self):
        """Test de impresión de errores y advertencias."""
        output = StringIO()
        print_validation_results(False, ["error 1"], ["aviso 1"], console=Console(file=output))
        text = output.getvalue()
        assert "Advertencias" in text and "aviso 1" in text
        assert "Errores de validación" in text and "error 1" in text
        assert "exitosa" not in text


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
