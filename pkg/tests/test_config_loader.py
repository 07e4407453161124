"""
Tests unitarios para el sistema de configuración.

Este módulo contiene tests para config_loader.py, que carga y valida
los archivos JSON/YAML de la CLI.
"""

import pytest
import json
import os
import yaml
import tempfile
from pathlib import Path
from unittest.mock import patch
import sys

# Añadir src al path para importar módulos
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from pillowcase.config_loader import (
    ConfigLoader,
    create_config_template,
    load_config,
)
from pillowcase.workers import THREADS_ENV


def _write_temp(content: str, suffix: str) -> str:
    with tempfile.NamedTemporaryFile(mode='w', suffix=suffix, delete=False, encoding='utf-8') as f:
        f.write(content)
        return f.name


class TestConfigLoader:
    """Tests para la clase ConfigLoader."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.loader = ConfigLoader()

    def test_init(self):
        """Test de inicialización del ConfigLoader."""
        assert self.loader.supported_formats == ['.json', '.yaml', '.yml']
        assert set(self.loader.default_config) == {"logging", "computation", "corpus"}

    def test_default_config(self):
        """Test de configuración por defecto."""
        config = self.loader._get_default_config()
        assert config["logging"]["level"] == "WARNING"
        assert config["computation"]["cutoff_margin"] == 4
        assert config["computation"]["engine"] == "character"
        assert config["computation"]["connectivity"] == "connected"
        assert config["computation"]["wmax"] is None
        assert config["corpus"]["path"] is None

    def test_load_config_json(self):
        """Test de carga de configuración JSON."""
        config_path = _write_temp(json.dumps({"computation": {"cutoff_margin": 6}}), '.json')
        try:
            config = self.loader.load_config(config_path)
            assert config["computation"]["cutoff_margin"] == 6
            # Valores por defecto preservados
            assert config["computation"]["engine"] == "character"
            assert config["logging"]["level"] == "WARNING"
        finally:
            Path(config_path).unlink()

    def test_load_config_yaml(self):
        """Test de carga de configuración YAML."""
        data = {"logging": {"level": "DEBUG"}, "computation": {"engine": "both", "connectivity": "no-unramified"}}
        config_path = _write_temp(yaml.dump(data), '.yaml')
        try:
            config = self.loader.load_config(config_path)
            assert config["logging"]["level"] == "DEBUG"
            assert config["computation"]["engine"] == "both"
            assert config["computation"]["threads"] == 1
        finally:
            Path(config_path).unlink()

    def test_load_config_empty_yaml(self):
        """Test de YAML vacío: solo valores por defecto."""
        config_path = _write_temp("", '.yml')
        try:
            assert self.loader.load_config(config_path) == self.loader.default_config
        finally:
            Path(config_path).unlink()

    def test_load_config_file_not_found(self):
        """Test de carga con archivo inexistente."""
        with pytest.raises(FileNotFoundError):
            self.loader.load_config("archivo_inexistente.yaml")

    def test_load_config_unsupported_format(self):
        """Test de carga con formato no soportado."""
        config_path = _write_temp("cutoff = 3", '.toml')
        try:
            with pytest.raises(ValueError, match="Formato no soportado"):
                self.loader.load_config(config_path)
        finally:
            Path(config_path).unlink()

    def test_load_config_invalid_json(self):
        """Test de carga con JSON inválido."""
        config_path = _write_temp("{ invalid json }", '.json')
        try:
            with pytest.raises(ValueError, match="Error parseando JSON"):
                self.loader.load_config(config_path)
        finally:
            Path(config_path).unlink()

    def test_load_config_invalid_yaml(self):
        """Test de carga con YAML inválido."""
        config_path = _write_temp("invalid: yaml: content: [", '.yaml')
        try:
            with pytest.raises(ValueError, match="Error parseando YAML"):
                self.loader.load_config(config_path)
        finally:
            Path(config_path).unlink()

    def test_load_config_not_a_mapping(self):
        """Test de un documento que no es un mapa."""
        config_path = _write_temp("- 1\n- 2\n", '.yaml')
        try:
            with pytest.raises(ValueError, match="mapa"):
                self.loader.load_config(config_path)
        finally:
            Path(config_path).unlink()


class TestConfigValidation:
    """Tests de validación de campos."""

    def setup_method(self):
        """Configurar antes de cada test."""
        self.loader = ConfigLoader()

    def test_invalid_level(self):
        """Test de nivel de logging inválido."""
        with pytest.raises(ValueError, match="Nivel de logging"):
            self.loader._merge_with_defaults({"logging": {"level": "VERBOSE"}})

    def test_invalid_engine(self):
        """Test de motor inválido."""
        with pytest.raises(ValueError, match="Motor inválido"):
            self.loader._merge_with_defaults({"computation": {"engine": "numeric"}})

    def test_invalid_connectivity(self):
        """Test de conectividad inválida."""
        with pytest.raises(ValueError, match="Conectividad"):
            self.loader._merge_with_defaults({"computation": {"connectivity": "some"}})

    def test_negative_integers(self):
        """Test de enteros negativos o no enteros."""
        invalid_cases = [
            {"cutoff_margin": -1},
            {"brute_force_max_degree": "6"},
            {"local_direct_limit": True},
        ]
        for computation in invalid_cases:
            with pytest.raises(ValueError, match="entero no negativo"):
                self.loader._merge_with_defaults({"computation": computation})

    def test_zero_threads(self):
        """Test de cero hilos."""
        with pytest.raises(ValueError, match="al menos 1"):
            self.loader._merge_with_defaults({"computation": {"threads": 0}})

    def test_wmax(self):
        """Test de wmax."""
        config = self.loader._merge_with_defaults({"computation": {"wmax": 20}})
        assert config["computation"]["wmax"] == 20
        with pytest.raises(ValueError, match="wmax"):
            self.loader._merge_with_defaults({"computation": {"wmax": 0}})

    def test_threads_from_environment(self):
        """Test de PILLOW_THREADS sobre el archivo."""
        with patch.dict(os.environ, {THREADS_ENV: "3"}):
            config = self.loader._merge_with_defaults({"computation": {"threads": 1}})
        assert config["computation"]["threads"] == 3

    def test_threads_environment_not_integer(self):
        """Test de PILLOW_THREADS no entero: se ignora."""
        with patch.dict(os.environ, {THREADS_ENV: "muchos"}):
            config = self.loader._merge_with_defaults({})
        assert config["computation"]["threads"] == 1


class TestConvenienceFunctions:
    """Tests para funciones de conveniencia."""

    def test_load_config_defaults(self):
        """Test de load_config sin archivo explícito."""
        with patch.dict(os.environ, {}, clear=False):
            os.environ.pop(THREADS_ENV, None)
            config = load_config()
        assert config["computation"]["cutoff_margin"] == 4

    def test_create_config_template_yaml(self):
        """Test de creación de plantilla YAML."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "config.yaml"
            create_config_template(path)
            with open(path, 'r', encoding='utf-8') as f:
                template = yaml.safe_load(f)
            assert template == ConfigLoader().default_config

    def test_create_config_template_json(self):
        """Test de creación de plantilla JSON y recarga."""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "config.json"
            create_config_template(path)
            assert ConfigLoader().load_config(path)["computation"]["engine"] == "character"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
