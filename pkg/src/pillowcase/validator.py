"""
Validación de documentos de entrada.

Revisa perfiles de ramificación ({"nu":[...],"mus":[[...]]}) y
especificaciones de grafos ({"special":...,"n":...,"edges":...,"Eplus":...})
antes de construir los objetos del dominio, acumulando errores y
advertencias legibles.
"""

import logging
from fractions import Fraction
from typing import Any, List, Mapping, Tuple

from rich.console import Console

logger = logging.getLogger(__name__)


class ValidationError(ValueError):
    """Excepción personalizada para errores de validación."""
    pass


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


class InputValidator:
    """Validador de perfiles y grafos."""

    PROFILE_KEYS = {"nu", "mus"}
    GRAPH_KEYS = {"special", "n", "edges", "Eplus"}

    def __init__(self):
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def _reset(self) -> None:
        self.errors.clear()
        self.warnings.clear()

    def _result(self, label: str) -> Tuple[bool, List[str], List[str]]:
        is_valid = len(self.errors) == 0
        if is_valid:
            logger.debug(f"{label} validado correctamente")
        else:
            logger.error(f"Validación de {label} fallida con {len(self.errors)} errores")
        return is_valid, self.errors.copy(), self.warnings.copy()

    def validate_nu(self, nu: Any) -> bool:
        """
        Validar ν: lista de enteros impares positivos de suma par.

        Returns:
            bool: True si es válido, False en caso contrario
        """
        if not isinstance(nu, list) or not all(_is_int(x) for x in nu):
            self.errors.append("'nu' debe ser una lista de enteros")
            return False
        if any(x < 1 or x % 2 == 0 for x in nu):
            self.errors.append(f"Las partes de 'nu' deben ser impares y positivas: {nu}")
            return False
        if sum(nu) % 2:
            self.errors.append(f"La suma de 'nu' debe ser par: {sum(nu)}")
            return False
        return True

    def validate_mus(self, mus: Any) -> bool:
        """
        Validar la lista de ciclos μ_i (cada uno [k] con k ≥ 2).

        Returns:
            bool: True si es válido, False en caso contrario
        """
        if not isinstance(mus, list):
            self.errors.append("'mus' debe ser una lista de listas")
            return False
        ok = True
        for i, mu in enumerate(mus):
            if not isinstance(mu, list) or not all(_is_int(x) for x in mu):
                self.errors.append(f"'mus[{i}]' debe ser una lista de enteros")
                ok = False
            elif len(mu) != 1:
                self.errors.append(f"'mus[{i}]' debe ser un único ciclo: {mu}")
                ok = False
            elif mu[0] < 2:
                self.errors.append(f"'mus[{i}]' es un ciclo trivial: {mu}")
                ok = False
        if ok and len(mus) > 4:
            self.warnings.append(f"{len(mus)} puntos de ramificación: el cómputo puede ser muy lento")
        return ok

    def validate_profile(self, data: Any) -> Tuple[bool, List[str], List[str]]:
        """
        Validar un documento de perfil completo.

        Args:
            data: Documento JSON ya parseado

        Returns:
            Tuple[bool, List[str], List[str]]: (es_válido, errores, advertencias)
        """
        self._reset()
        if not isinstance(data, Mapping):
            self.errors.append("El perfil debe ser un objeto JSON")
            return self._result("perfil")
        unknown = set(data) - self.PROFILE_KEYS
        if unknown:
            self.warnings.append(f"Claves ignoradas en el perfil: {', '.join(sorted(unknown))}")
        nu = data.get("nu", [])
        mus = data.get("mus", [])
        if self.validate_nu(nu) and self.validate_mus(mus):
            euler = len(mus) + len(nu) - sum(m[0] for m in mus) - Fraction(sum(nu), 2)
            genus = (2 - euler) / 2
            if genus.denominator != 1 or genus < 0:
                self.errors.append(f"El perfil no tiene género entero no negativo (2-2g = {euler})")
        return self._result("perfil")

    def validate_graph(self, data: Any) -> Tuple[bool, List[str], List[str]]:
        """
        Validar un documento de grafo global.

        Returns:
            Tuple[bool, List[str], List[str]]: (es_válido, errores, advertencias)
        """
        self._reset()
        if not isinstance(data, Mapping):
            self.errors.append("El grafo debe ser un objeto JSON")
            return self._result("grafo")
        unknown = set(data) - self.GRAPH_KEYS
        if unknown:
            self.warnings.append(f"Claves ignoradas en el grafo: {', '.join(sorted(unknown))}")

        n = data.get("n")
        if not _is_int(n) or n < 0:
            self.errors.append(f"'n' debe ser un entero no negativo: {n!r}")
            return self._result("grafo")
        special = data.get("special", True)
        if not isinstance(special, bool):
            self.errors.append("'special' debe ser booleano")
            return self._result("grafo")
        low = 0 if special else 1

        edges = data.get("edges", [])
        if not isinstance(edges, list):
            self.errors.append("'edges' debe ser una lista de pares")
            return self._result("grafo")
        touched = set()
        for i, edge in enumerate(edges):
            if not isinstance(edge, list) or len(edge) != 2 or not all(_is_int(x) for x in edge):
                self.errors.append(f"'edges[{i}]' debe ser un par de enteros")
                continue
            if any(x < low or x > n for x in edge):
                self.errors.append(f"'edges[{i}]' = {edge} fuera del rango de vértices [{low}, {n}]")
                continue
            touched.update(edge)
        isolated = [v for v in range(1, n + 1) if v not in touched]
        if isolated and not self.errors:
            self.errors.append(f"Vértices aislados no permitidos: {isolated}")

        eplus = data.get("Eplus", [])
        if not isinstance(eplus, list) or not all(_is_int(x) for x in eplus):
            self.errors.append("'Eplus' debe ser una lista de índices de aristas")
        else:
            for i in eplus:
                if i < 0 or i >= len(edges):
                    self.errors.append(f"Índice de Eplus fuera de rango: {i}")
                elif special and isinstance(edges[i], list) and 0 in edges[i]:
                    self.errors.append(f"La arista {edges[i]} toca el vértice 0 y no puede estar en Eplus")
        return self._result("grafo")


def validate_profile_data(data: Any) -> Tuple[bool, List[str], List[str]]:
    """Función de conveniencia para validar un perfil."""
    return InputValidator().validate_profile(data)


def validate_graph_data(data: Any) -> Tuple[bool, List[str], List[str]]:
    """Función de conveniencia para validar un grafo."""
    return InputValidator().validate_graph(data)


def require_valid(result: Tuple[bool, List[str], List[str]], label: str) -> None:
    """
    Lanzar ValidationError si la validación falló.

    Raises:
        ValidationError: Con todos los errores concatenados
    """
    is_valid, errors, warnings = result
    for warning in warnings:
        logger.warning(warning)
    if not is_valid:
        raise ValidationError(f"{label} inválido: " + "; ".join(errors))


def print_validation_results(is_valid: bool, errors: List[str], warnings: List[str],
                             console: Console = None) -> None:
    """
    Imprimir resultados de validación de forma legible.

    Args:
        is_valid: Si la validación fue exitosa
        errors: Lista de errores
        warnings: Lista de advertencias
    """
    console = console or Console()
    if warnings:
        console.print("\n⚠️  Advertencias:", style="yellow")
        for warning in warnings:
            console.print(f"   • {warning}")

    if errors:
        console.print("\n❌ Errores de validación:", style="red")
        for error in errors:
            console.print(f"   • {error}")
    elif is_valid:
        console.print("\n✅ Validación exitosa", style="green")
