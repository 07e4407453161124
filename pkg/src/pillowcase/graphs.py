"""
Grafos globales de descomposiciones en cilindros.

Un grafo global tiene n vértices etiquetados 1..n (niveles de ramificación)
y opcionalmente el vértice especial 0 (nivel de las esquinas ν). Cada arista
es un cilindro horizontal; los lazos están permitidos. Una orientación
marca cada media arista como entrante o saliente; las medias aristas en el
vértice 0 siempre salen.

Alturas: el vértice v ≥ 1 está a altura y_v = (n+1-v)/(2(n+1)) y el
vértice 0 a altura 0. Para una arista con orientación fija la altura real
es H = k + Δ con Δ = Σ ±y (+ entrante, - saliente) y k entero tal que H > 0.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from math import factorial, prod
from typing import Any, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from .brackets import branch_heights

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
HalfEdgeStates = Tuple[bool, bool]


@dataclass(frozen=True)
class GlobalGraph:
    """
    Multigrafo con vértices etiquetados.

    Las aristas se guardan como pares (u, v) con u ≤ v, ordenadas, de modo
    que dos grafos iguales tienen la misma representación.
    """

    n: int
    edges: Tuple[Edge, ...] = ()
    special: bool = True

    def __post_init__(self):
        low = 0 if self.special else 1
        canonical = []
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u > v:
                u, v = v, u
            if u < low or v > self.n:
                raise ValueError(f"Arista fuera de rango: ({u}, {v}) con n={self.n}")
            canonical.append((u, v))
        object.__setattr__(self, "edges", tuple(sorted(canonical)))

    @property
    def vertices(self) -> List[int]:
        return ([0] if self.special else []) + list(range(1, self.n + 1))

    def valence(self, v: int) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges)

    def isolated(self) -> List[int]:
        """Vértices no especiales sin aristas."""
        return [v for v in range(1, self.n + 1) if self.valence(v) == 0]

    def is_loop(self, e: int) -> bool:
        u, v = self.edges[e]
        return u == v

    def zero_edges(self) -> List[int]:
        """E⁰: aristas que tocan el vértice especial (lazos en 0 incluidos)."""
        return [e for e, (u, _) in enumerate(self.edges) if u == 0]

    def automorphism_order(self) -> int:
        """|Aut(Γ)| = Π (multiplicidad de aristas paralelas)!·2^{#lazos}."""
        counts: Dict[Edge, int] = {}
        for edge in self.edges:
            counts[edge] = counts.get(edge, 0) + 1
        loops = sum(1 for u, v in self.edges if u == v)
        return prod(factorial(c) for c in counts.values()) * 2 ** loops

    def without(self, removed: Sequence[int]) -> "GlobalGraph":
        removed = set(removed)
        return GlobalGraph(
            self.n, tuple(edge for e, edge in enumerate(self.edges) if e not in removed), self.special
        )

    def factored_loops(self, eplus: FrozenSet[int]) -> List[int]:
        """Lazos en 0 y lazos marcados E⁺: se factorizan como series cerradas."""
        return [
            e for e, (u, v) in enumerate(self.edges)
            if u == v and (u == 0 or e in eplus)
        ]

    def to_json(self, eplus: Optional[FrozenSet[int]] = None) -> Dict[str, Any]:
        return {
            "special": self.special,
            "n": self.n,
            "edges": [list(edge) for edge in self.edges],
            "Eplus": sorted(eplus or ()),
        }

    def __str__(self) -> str:
        body = ", ".join(f"{u}-{v}" for u, v in self.edges) or "∅"
        return f"Γ[n={self.n}{', 0' if self.special else ''}; {body}]"


def parse_graph_spec(data: Mapping[str, Any]) -> Tuple[GlobalGraph, FrozenSet[int]]:
    """
    Leer {"special":true,"n":1,"edges":[[0,1],...],"Eplus":[2]}.

    Los índices de Eplus se refieren al orden de `edges` tal como viene en
    el documento; se traducen al orden canónico del grafo.

    Raises:
        ValueError: Si el documento es inconsistente
    """
    raw_edges = [tuple(edge) for edge in data.get("edges", [])]
    graph = GlobalGraph(int(data["n"]), tuple(raw_edges), bool(data.get("special", True)))
    marked = [int(i) for i in data.get("Eplus", [])]
    if any(i < 0 or i >= len(raw_edges) for i in marked):
        raise ValueError(f"Índice de Eplus fuera de rango: {marked}")

    # traducción estable: la k-ésima aparición de una arista conserva su marca
    order = sorted(range(len(raw_edges)), key=lambda i: tuple(sorted(raw_edges[i])))
    position = {original: canonical for canonical, original in enumerate(order)}
    eplus = frozenset(position[i] for i in marked)
    for e in eplus:
        if 0 in graph.edges[e] and graph.special:
            raise ValueError(f"La arista {graph.edges[e]} toca el vértice 0 y no puede estar en E⁺")
    return graph, eplus


def enumerate_graphs(
    n: int,
    has_special: bool = True,
    max_edges: int = 3,
    capacities: Optional[Mapping[int, int]] = None,
) -> List[GlobalGraph]:
    """
    Todos los multigrafos etiquetados sin vértices no especiales aislados.

    Args:
        n: Número de vértices no especiales
        has_special: Si existe el vértice 0 (puede quedar aislado)
        max_edges: Cota del número de aristas
        capacities: Valencia máxima por vértice (opcional)

    Returns:
        Lista determinista de grafos
    """
    vertices = ([0] if has_special else []) + list(range(1, n + 1))
    pairs = [(u, v) for i, u in enumerate(vertices) for v in vertices[i:]]
    capacities = dict(capacities or {})
    graphs: List[GlobalGraph] = []

    for size in range(0, max_edges + 1):
        for edges in combinations_with_replacement(pairs, size):
            valence: Dict[int, int] = {}
            for u, v in edges:
                valence[u] = valence.get(u, 0) + 1
                valence[v] = valence.get(v, 0) + 1
            if any(valence.get(v, 0) == 0 for v in range(1, n + 1)):
                continue
            if any(valence.get(v, 0) > cap for v, cap in capacities.items()):
                continue
            graphs.append(GlobalGraph(n, edges, has_special))

    logger.debug(f"{len(graphs)} grafos con n={n}, especial={has_special}, ≤{max_edges} aristas")
    return graphs


@dataclass(frozen=True)
class Orientation:
    """
    Estados de las medias aristas: states[e] = (entra en u, entra en v)
    para la arista (u, v) con u ≤ v.
    """

    states: Tuple[HalfEdgeStates, ...]
    multiplicity: int = 1

    def is_consistent(self, graph: GlobalGraph, e: int) -> bool:
        a, b = self.states[e]
        return a != b

    def eplus(self, graph: GlobalGraph) -> FrozenSet[int]:
        """Aristas orientadas coherentemente que no tocan el vértice 0."""
        return frozenset(
            e for e, (u, _) in enumerate(graph.edges)
            if not (graph.special and u == 0) and self.is_consistent(graph, e)
        )


def _edge_states(graph: GlobalGraph, e: int, eplus: Optional[FrozenSet[int]]) -> List[Tuple[HalfEdgeStates, int]]:
    u, v = graph.edges[e]
    if graph.special and u == 0:
        if v == 0:
            return [((False, False), 1)]
        return [((False, True), 1), ((False, False), 1)]
    inconsistent = [((True, True), 1), ((False, False), 1)]
    if u == v:
        consistent = [((True, False), 2 if eplus is None else 1)]
    else:
        consistent = [((True, False), 1), ((False, True), 1)]
    if eplus is None:
        return inconsistent + consistent
    return consistent if e in eplus else inconsistent


def enumerate_orientations(graph: GlobalGraph, eplus: Optional[FrozenSet[int]] = None) -> List[Orientation]:
    """
    Orientaciones admisibles de las medias aristas.

    Sin `eplus` se devuelven todas (los dos estados coherentes de un lazo
    se funden en uno con multiplicidad 2). Con `eplus` las aristas marcadas
    son coherentes y el resto de aristas fuera de E⁰ incoherentes; un lazo
    coherente cuenta una sola vez.

    Raises:
        ValueError: Si E⁺ contiene una arista que toca el vértice 0
    """
    if eplus is not None:
        for e in eplus:
            if graph.special and graph.edges[e][0] == 0:
                raise ValueError(f"La arista {graph.edges[e]} toca el vértice 0 y no puede estar en E⁺")
    choices = [_edge_states(graph, e, eplus) for e in range(len(graph.edges))]
    orientations = []
    for combo in product(*choices):
        states = tuple(s for s, _ in combo)
        orientations.append(Orientation(states, prod(m for _, m in combo)))
    return orientations


@dataclass(frozen=True)
class EdgeLayout:
    """Datos derivados de una arista orientada."""

    delta: Fraction
    k_min: int
    half_edges: Tuple[Tuple[int, bool], ...]

    @property
    def h_min(self) -> Fraction:
        return self.k_min + self.delta


def vertex_heights(graph: GlobalGraph) -> Dict[int, Fraction]:
    heights = {v: y for v, y in zip(range(1, graph.n + 1), branch_heights(graph.n))}
    heights[0] = Fraction(0)
    return heights


def edge_layouts(graph: GlobalGraph, orientation: Orientation) -> List[EdgeLayout]:
    """Δ, k_min y medias aristas (vértice, entrante) de cada arista."""
    heights = vertex_heights(graph)
    layouts = []
    for (u, v), (in_u, in_v) in zip(graph.edges, orientation.states):
        delta = (heights[u] if in_u else -heights[u]) + (heights[v] if in_v else -heights[v])
        k_min = 0 if delta > 0 else 1
        layouts.append(EdgeLayout(delta, k_min, ((u, in_u), (v, in_v))))
    return layouts
