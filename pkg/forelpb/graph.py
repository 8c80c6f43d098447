"""
Interaction graph checks and the root vertex / root cycle decomposition of
connected graphs where every vertex has at most one predecessor.
"""

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from dataclasses_json import dataclass_json

ROOT_VERTEX = "RootVertex"
ROOT_CYCLE = "RootCycle"


class InvalidGraph(ValueError):
    pass


class OnePredecessorViolation(ValueError):
    def __init__(self, vertices: List[int]):
        super().__init__(f"vertices with more than one predecessor: {vertices}")
        self.vertices = vertices


class Disconnected(ValueError):
    pass


@dataclass(frozen=True)
class GameGraph:
    """Simple directed graph on vertices 0..n_vertices-1."""

    n_vertices: int
    edges: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise InvalidGraph(f"n_vertices must be positive, got {self.n_vertices}")
        edges = tuple((int(a), int(b)) for a, b in self.edges)
        if len(set(edges)) != len(edges):
            raise InvalidGraph(f"duplicate edges in {edges}")
        for a, b in edges:
            if a == b:
                raise InvalidGraph(f"self-loop at vertex {a}")
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise InvalidGraph(f"edge {a}->{b} out of range")
        object.__setattr__(self, "edges", edges)

    def successors(self) -> List[List[int]]:
        res: List[List[int]] = [[] for _ in range(self.n_vertices)]
        for a, b in self.edges:
            res[a].append(b)
        return res


@dataclass_json
@dataclass
class GraphDecomposition:
    """
    ``kind`` is RootVertex or RootCycle. ``order`` lists every vertex after its
    predecessor: the root (or the cycle, in cycle order) first, then the rest by
    nondecreasing path distance, ties by ascending id.
    """

    kind: str
    root: Optional[int]
    cycle: List[int]
    order: List[int]
    distances: List[int] = field(default_factory=list)

    @property
    def is_cycle(self) -> bool:
        return self.kind == ROOT_CYCLE


def indegrees(g: GameGraph) -> np.ndarray:
    res = np.zeros(g.n_vertices, dtype=int)
    for _, b in g.edges:
        res[b] += 1
    return res


def validate_one_predecessor(g: GameGraph) -> List[int]:
    """Vertices with indegree > 1; empty list when the graph is fine."""
    return [int(v) for v in np.flatnonzero(indegrees(g) > 1)]


def weakly_connected(g: GameGraph) -> bool:
    neighbors: Dict[int, List[int]] = {v: [] for v in range(g.n_vertices)}
    for a, b in g.edges:
        neighbors[a].append(b)
        neighbors[b].append(a)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for w in neighbors[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return len(seen) == g.n_vertices


def predecessors(g: GameGraph) -> List[Optional[int]]:
    violations = validate_one_predecessor(g)
    if violations:
        raise OnePredecessorViolation(violations)
    res: List[Optional[int]] = [None] * g.n_vertices
    for a, b in g.edges:
        res[b] = a
    return res


def root_decomposition(g: GameGraph) -> GraphDecomposition:
    pred = predecessors(g)
    if not weakly_connected(g):
        raise Disconnected("graph is not weakly connected")

    roots = [v for v in range(g.n_vertices) if pred[v] is None]
    if roots:
        # connected with indegree <= 1 everywhere: edges = n - #roots >= n - 1
        assert len(roots) == 1
        sources = roots
        cycle: List[int] = []
    else:
        cycle = _find_cycle(pred)
        sources = cycle

    distances = _distances_from(g, sources)
    rest = sorted(
        (v for v in range(g.n_vertices) if v not in set(sources)),
        key=lambda v: (distances[v], v),
    )
    return GraphDecomposition(
        kind=ROOT_CYCLE if cycle else ROOT_VERTEX,
        root=None if cycle else roots[0],
        cycle=cycle,
        order=list(sources) + rest,
        distances=distances,
    )


def _find_cycle(pred: List[Optional[int]]) -> List[int]:
    """
    Walks predecessor pointers from vertex 0 until a vertex repeats. The cycle is
    returned in edge direction, rotated so that its smallest id comes first.
    """
    position: Dict[int, int] = {}
    path: List[int] = []
    v: Optional[int] = 0
    while v is not None and v not in position:
        position[v] = len(path)
        path.append(v)
        v = pred[v]
    assert v is not None, "no cycle although every vertex has a predecessor"
    cycle = list(reversed(path[position[v] :]))
    start = cycle.index(min(cycle))
    return cycle[start:] + cycle[:start]


def _distances_from(g: GameGraph, sources: List[int]) -> List[int]:
    succ = g.successors()
    dist = [-1] * g.n_vertices
    queue = deque(sources)
    for s in sources:
        dist[s] = 0
    while queue:
        v = queue.popleft()
        for w in succ[v]:
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist
