"""
Jerarquía de excepciones de pillowcase.

Todas las fallas de cómputo heredan de PillowcaseError; la CLI las traduce
al código de salida 3. Las fallas de validación de entrada (perfiles,
particiones) son además ValueError para integrarse con el código existente.
"""

from typing import Any, Optional


class PillowcaseError(Exception):
    """Error base para cualquier falla de cómputo."""
    pass


class PartitionError(PillowcaseError, ValueError):
    """Partición inválida o incompatible con la operación pedida."""
    pass


class ProfileError(PillowcaseError, ValueError):
    """Perfil de ramificación inválido."""
    pass


class SeriesError(PillowcaseError):
    """Ventana de truncamiento vacía o serie no invertible."""
    pass


class SolveError(PillowcaseError):
    """Sistema lineal singular, inconsistente o sin rango completo."""
    pass


class RecognitionError(PillowcaseError):
    """La serie no coincide con ninguna forma cuasimodular del peso pedido."""

    def __init__(self, message: str, series: Optional[Any] = None):
        super().__init__(message)
        self.series = series


class SaturationError(PillowcaseError):
    """Los coeficientes cambian al ampliar la cota de anchos."""
    pass


class OracleLimitError(PillowcaseError):
    """Fuerza bruta pedida por encima del grado máximo permitido."""
    pass


class PiecewiseFitError(PillowcaseError):
    """El ajuste cuasi-polinomial no verifica; lleva el diagnóstico por cámaras."""

    def __init__(self, message: str, diagnostic: Optional[Any] = None):
        super().__init__(message)
        self.diagnostic = diagnostic


class CorpusError(PillowcaseError):
    """Corpus de regresión ausente o mal formado."""
    pass


class EngineMismatchError(PillowcaseError):
    """Los motores de caracteres y de grafos dan series distintas."""
    pass
