"""Face adjacency graph: shared-vertex edges plus optional proximity welds."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .mesh import TriangleMesh


@dataclass(frozen=True)
class FaceGraph:
    """Symmetric adjacency over face indices, immutable once built.

    weld_precision records the precision of the last weld pass, or None when
    only shared-vertex edges are present.
    """

    neighbors: tuple[tuple[int, ...], ...]
    weld_precision: float | None = None

    @property
    def node_count(self) -> int:
        return len(self.neighbors)

    def edge_set(self) -> set[tuple[int, int]]:
        """All edges as (low, high) pairs; convenient for comparisons."""
        return {(i, j) for i, adj in enumerate(self.neighbors) for j in adj if i < j}


def _faces_at_vertex(mesh: TriangleMesh) -> dict[int, list[int]]:
    table: dict[int, list[int]] = defaultdict(list)
    for face, corners in enumerate(np.asarray(mesh.faces)):
        for v in corners:
            v = int(v)
            if not table[v] or table[v][-1] != face:
                table[v].append(face)
    return table


def _freeze(adjacency: list[set[int]], precision: float | None) -> FaceGraph:
    return FaceGraph(tuple(tuple(sorted(s)) for s in adjacency), precision)


def build_base_graph(mesh: TriangleMesh) -> FaceGraph:
    """Link every pair of faces sharing at least one vertex index.

    Adjacency is by index identity, not positional proximity; welding is a
    separate, opt-in pass.
    """
    adjacency: list[set[int]] = [set() for _ in range(mesh.face_count)]
    for shared in _faces_at_vertex(mesh).values():
        for i, fi in enumerate(shared):
            for fj in shared[i + 1:]:
                if fi != fj:
                    adjacency[fi].add(fj)
                    adjacency[fj].add(fi)
    return _freeze(adjacency, None)


def weld_graph(mesh: TriangleMesh, base: FaceGraph, precision: float) -> FaceGraph:
    """Copy of `base` plus edges between faces whose vertices come within
    1/precision of each other.

    Candidate vertex pairs are drawn from buckets keyed by
    floor(|position| * precision); a pair within the threshold can differ by
    at most one bucket key, so testing each bucket against itself and its
    successor misses nothing. The exact Euclidean test always runs before
    linking, since equal norms say nothing about proximity. The underlying
    geometry is never merged.
    """
    if precision <= 0:
        raise ParameterError("weld precision must be positive")
    precision = float(precision)
    threshold = 1.0 / precision

    adjacency: list[set[int]] = [set(adj) for adj in base.neighbors]
    if mesh.face_count == 0:
        return _freeze(adjacency, precision)

    positions = np.asarray(mesh.vertices)
    faces_at = _faces_at_vertex(mesh)

    norms = np.linalg.norm(positions, axis=1)
    keys = np.floor(norms * precision).astype(np.int64)
    buckets: dict[int, list[int]] = defaultdict(list)
    for vertex, key in enumerate(keys):
        buckets[int(key)].append(vertex)

    threshold_sq = threshold * threshold

    def link(u: int, v: int) -> None:
        for fu in faces_at.get(u, ()):
            for fv in faces_at.get(v, ()):
                if fu != fv:
                    adjacency[fu].add(fv)
                    adjacency[fv].add(fu)

    for key, members in buckets.items():
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                d = positions[u] - positions[v]
                if float(d @ d) < threshold_sq:
                    link(u, v)
        for u in members:
            for v in buckets.get(key + 1, ()):
                d = positions[u] - positions[v]
                if float(d @ d) < threshold_sq:
                    link(u, v)

    return _freeze(adjacency, precision)


def connected_components(graph: FaceGraph) -> list[list[int]]:
    """Maximal connected face sets, ordered by their smallest face index.

    Each component is a sorted list of face indices.
    """
    seen = [False] * graph.node_count
    components: list[list[int]] = []
    for start in range(graph.node_count):
        if seen[start]:
            continue
        seen[start] = True
        queue = deque([start])
        component = []
        while queue:
            face = queue.popleft()
            component.append(face)
            for neighbor in graph.neighbors[face]:
                if not seen[neighbor]:
                    seen[neighbor] = True
                    queue.append(neighbor)
        components.append(sorted(component))
    return components
