"""
Reparto de trabajo en hilos con resultados en orden de entrada.

El número de hilos se toma de PILLOW_THREADS (si está definida) o del
valor configurado; con un solo hilo todo corre secuencialmente.
"""

import concurrent.futures
import logging
import os
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "PILLOW_THREADS"
_configured_threads = 1


def configure_threads(threads: int) -> None:
    """Fijar el valor por defecto (lo usa la CLI tras cargar la configuración)."""
    global _configured_threads
    if threads < 1:
        raise ValueError(f"Número de hilos inválido: {threads}")
    _configured_threads = threads


def thread_count(threads: Optional[int] = None) -> int:
    """Hilos efectivos: argumento explícito, variable de entorno o configuración."""
    if threads is not None:
        return max(1, threads)
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning(f"{THREADS_ENV}={raw!r} no es un entero; se usa {_configured_threads}")
    return _configured_threads


def map_ordered(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Aplicar func a cada elemento, en paralelo si corresponde.

    Args:
        func: Función pura
        items: Entradas
        threads: Hilos a usar (por defecto thread_count())

    Returns:
        Resultados en el mismo orden que las entradas
    """
    items = list(items)
    workers = min(thread_count(threads), len(items))
    if workers <= 1:
        return [func(item) for item in items]

    results: List[Optional[R]] = [None] * len(items)
    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(func, item): index for index, item in enumerate(items)}
        for future in concurrent.futures.as_completed(futures):
            # la primera excepción se propaga tal cual
            results[futures[future]] = future.result()
    return results  # type: ignore[return-value]
