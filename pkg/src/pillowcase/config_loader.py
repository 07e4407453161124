"""
Configuración de pillowcase.

Carga archivos JSON/YAML, los combina con los valores por defecto y
valida los campos que usa la CLI (logging, parámetros de cómputo y
ubicación del corpus).
"""

import copy
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml

from .workers import THREADS_ENV

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parents[2] / "config" / "config.yaml"
VALID_ENGINES = ("character", "graph", "both")
VALID_CONNECTIVITY = ("all", "no-unramified", "connected")
VALID_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ConfigLoader:
    """Cargador de configuraciones desde archivos JSON/YAML."""

    def __init__(self):
        self.supported_formats = ['.json', '.yaml', '.yml']
        self.default_config = self._get_default_config()

    def _get_default_config(self) -> Dict[str, Any]:
        """Obtener configuración por defecto."""
        return {
            "logging": {
                "level": "WARNING",
                "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
                "file": None,
            },
            "computation": {
                "cutoff_margin": 4,
                "engine": "character",
                "connectivity": "connected",
                "threads": 1,
                "brute_force_max_degree": 6,
                "local_direct_limit": 10,
                "wmax": None,
            },
            "corpus": {
                "path": None,
            },
        }

    def load_config(self, config_path: Union[str, Path]) -> Dict[str, Any]:
        """
        Cargar configuración desde archivo.

        Args:
            config_path: Ruta al archivo de configuración

        Returns:
            Dict con la configuración combinada y validada

        Raises:
            FileNotFoundError: Si el archivo no existe
            ValueError: Si el formato no es soportado o hay errores de parsing
        """
        config_path = Path(config_path)

        if not config_path.exists():
            raise FileNotFoundError(f"Archivo de configuración no encontrado: {config_path}")

        if config_path.suffix not in self.supported_formats:
            raise ValueError(
                f"Formato no soportado: {config_path.suffix}. "
                f"Formatos soportados: {', '.join(self.supported_formats)}"
            )

        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                if config_path.suffix == '.json':
                    config_data = json.load(f)
                else:
                    config_data = yaml.safe_load(f) or {}
        except json.JSONDecodeError as e:
            raise ValueError(f"Error parseando JSON: {e}")
        except yaml.YAMLError as e:
            raise ValueError(f"Error parseando YAML: {e}")

        if not isinstance(config_data, dict):
            raise ValueError(f"La configuración debe ser un mapa, no {type(config_data).__name__}")

        logger.info(f"Configuración cargada desde: {config_path}")
        return self._merge_with_defaults(config_data)

    def _merge_with_defaults(self, config_data: Dict[str, Any]) -> Dict[str, Any]:
        """
        Combinar configuración cargada con valores por defecto.

        Args:
            config_data: Configuración cargada del archivo

        Returns:
            Dict con configuración combinada
        """
        merged_config = copy.deepcopy(self.default_config)

        def deep_merge(default: Dict, override: Dict) -> Dict:
            for key, value in override.items():
                if key in default and isinstance(default[key], dict) and isinstance(value, dict):
                    default[key] = deep_merge(default[key], value)
                else:
                    default[key] = value
            return default

        merged_config = deep_merge(merged_config, config_data)
        self._apply_environment(merged_config)
        self._validate_config(merged_config)
        return merged_config

    def _apply_environment(self, config: Dict[str, Any]) -> None:
        raw = os.environ.get(THREADS_ENV)
        if raw:
            try:
                config["computation"]["threads"] = int(raw)
            except ValueError:
                logger.warning(f"{THREADS_ENV}={raw!r} no es un entero; se ignora")

    def _validate_config(self, config: Dict[str, Any]) -> None:
        """
        Validar configuración cargada.

        Raises:
            ValueError: Si la configuración es inválida
        """
        level = str(config["logging"].get("level", "")).upper()
        if level not in VALID_LEVELS:
            raise ValueError(f"Nivel de logging inválido: {level}. Niveles válidos: {', '.join(VALID_LEVELS)}")

        computation = config["computation"]
        if computation.get("engine") not in VALID_ENGINES:
            raise ValueError(
                f"Motor inválido: {computation.get('engine')}. "
                f"Motores válidos: {', '.join(VALID_ENGINES)}"
            )
        if computation.get("connectivity") not in VALID_CONNECTIVITY:
            raise ValueError(
                f"Conectividad inválida: {computation.get('connectivity')}. "
                f"Opciones válidas: {', '.join(VALID_CONNECTIVITY)}"
            )
        for key in ("cutoff_margin", "threads", "brute_force_max_degree", "local_direct_limit"):
            value = computation.get(key)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"computation.{key} debe ser un entero no negativo: {value!r}")
        if computation["threads"] < 1:
            raise ValueError("computation.threads debe ser al menos 1")
        wmax = computation.get("wmax")
        if wmax is not None and (not isinstance(wmax, int) or wmax < 1):
            raise ValueError(f"computation.wmax debe ser un entero positivo o null: {wmax!r}")

        logger.debug("Configuración validada exitosamente")

    def save_config_template(self, output_path: Union[str, Path]) -> None:
        """
        Guardar plantilla de configuración con los valores por defecto.

        Args:
            output_path: Ruta donde guardar la plantilla (.json, .yaml o .yml)
        """
        output_path = Path(output_path)
        template_config = copy.deepcopy(self.default_config)

        if output_path.suffix == '.json':
            with open(output_path, 'w', encoding='utf-8') as f:
                json.dump(template_config, f, indent=2, ensure_ascii=False)
        else:
            with open(output_path, 'w', encoding='utf-8') as f:
                yaml.dump(template_config, f, default_flow_style=False, allow_unicode=True, sort_keys=False)

        logger.info(f"Plantilla de configuración guardada en: {output_path}")


def load_config(config_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Función de conveniencia: archivo explícito, config/config.yaml del
    proyecto si existe, o solo los valores por defecto.
    """
    loader = ConfigLoader()
    if config_path is not None:
        return loader.load_config(config_path)
    if DEFAULT_CONFIG_PATH.exists():
        return loader.load_config(DEFAULT_CONFIG_PATH)
    return loader._merge_with_defaults({})


def create_config_template(output_path: Union[str, Path]) -> None:
    """Función de conveniencia para crear plantilla de configuración."""
    ConfigLoader().save_config_template(output_path)
