"""Seeded segmentation predicates and their graph-traversal variants.

Two families:

* membership predicates evaluated per face against the seed (normal
  distance, coplanarity, wall clauses), optionally gated by flood fill
  through the face graph;
* step predicates evaluated between an already-admitted face and a
  candidate neighbor (curve and cylinder gradients).

Step-predicate floods are defined as the least fixed point of their
admission rule. Because each step test depends only on the two faces'
stored normals, one evaluation per directed edge suffices and the result
cannot depend on traversal order.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Callable

import numpy as np

from .errors import ParameterError
from .graph import FaceGraph
from .mesh import TriangleMesh

# A step whose normals agree within this of a full dot product counts as
# coplanar and passes through the cylinder band.
PLANAR_STEP_EPSILON = 1e-4

# Default cylinder band is [weight, 1 - CYLINDER_BAND_MARGIN]: genuinely
# coplanar steps are handled by the passthrough, not the band itself.
CYLINDER_BAND_MARGIN = 1e-3


class SegmentationMode(str, Enum):
    NORMAL = "Normal"
    SPATIAL = "Spatial"
    NORMAL_SPATIAL = "NormalAndSpatial"
    COPLANAR = "Coplanar"
    SPATIAL_COPLANAR = "SpatialCoplanar"
    WALL = "Wall"
    CURVE = "Curve"
    CYLINDER = "Cylinder"


@dataclass(frozen=True)
class Selection:
    """A set of face indices over one mesh.

    provenance names the operation that produced the set ("manual" for
    hand-built ones); status is "ok" except for documented empty results
    such as a wall seed rejected by the up clause.
    """

    faces: frozenset[int]
    face_count: int
    provenance: str = "manual"
    status: str = "ok"

    def __contains__(self, face: int) -> bool:
        return face in self.faces

    def __len__(self) -> int:
        return len(self.faces)


@dataclass(frozen=True)
class SegmentationRequest:
    """One segmentation invocation: mode, seed face, weight and extras.

    band and planar_epsilon apply to Cylinder; literal_dots applies to Wall
    and restores the raw-dot compatibility behavior.
    """

    mode: SegmentationMode
    seed_face: int
    weight: float = 0.0
    band: tuple[float, float] | None = None
    planar_epsilon: float = PLANAR_STEP_EPSILON
    literal_dots: bool = False

    def describe(self) -> str:
        extras = []
        if self.mode is SegmentationMode.CYLINDER and self.band is not None:
            extras.append(f"band={self.band[0]:g}..{self.band[1]:g}")
        if self.mode is SegmentationMode.WALL and self.literal_dots:
            extras.append("literal")
        suffix = ", ".join(extras)
        core = f"{self.mode.value}(seed={self.seed_face}, w={self.weight:g}"
        return core + (", " + suffix if suffix else "") + ")"


def _check_seed(face_count: int, seed_face: int) -> None:
    if not 0 <= seed_face < face_count:
        raise ParameterError(f"seed face {seed_face} out of range (mesh has {face_count} faces)")


def _check_weight(weight: float, low: float, high: float) -> None:
    if not low <= weight <= high:
        raise ParameterError(f"weight {weight} outside [{low}, {high}]")


def _member_flood(graph: FaceGraph, seed: int, admissible) -> frozenset[int]:
    """Faces reachable from the seed through faces flagged admissible.

    The seed itself is always in the result. admissible may be None for an
    unrestricted flood.
    """
    result = {seed}
    queue = deque([seed])
    while queue:
        face = queue.popleft()
        for neighbor in graph.neighbors[face]:
            if neighbor in result:
                continue
            if admissible is None or admissible[neighbor]:
                result.add(neighbor)
                queue.append(neighbor)
    return frozenset(result)


def _step_flood(
    graph: FaceGraph,
    normals: np.ndarray,
    seed: int,
    step_ok: Callable[[float], bool],
) -> frozenset[int]:
    """Least fixed point of: seed is in; a face joins when the dot of its
    normal with any already-admitted neighbor's normal passes step_ok."""
    admitted = {seed}
    queue = deque([seed])
    while queue:
        current = queue.popleft()
        n_current = normals[current]
        for neighbor in graph.neighbors[current]:
            if neighbor in admitted:
                continue
            if step_ok(float(n_current @ normals[neighbor])):
                admitted.add(neighbor)
                queue.append(neighbor)
    return frozenset(admitted)


def seg_normal(mesh: TriangleMesh, seed_face: int, weight: float) -> Selection:
    """All faces whose unit normal lies within `weight` (Euclidean distance)
    of the seed's; no connectivity requirement. The seed is always included,
    its distance being exactly zero."""
    _check_seed(mesh.face_count, seed_face)
    _check_weight(weight, 0.0, 2.0)
    distance = np.linalg.norm(mesh.normals - mesh.normals[seed_face], axis=1)
    faces = frozenset(int(i) for i in np.flatnonzero(distance <= weight))
    return Selection(faces, mesh.face_count, f"Normal(seed={seed_face}, w={weight:g})")


def seg_spatial(graph: FaceGraph, seed_face: int) -> Selection:
    """The connected component of the seed in the given graph (base or
    welded)."""
    _check_seed(graph.node_count, seed_face)
    faces = _member_flood(graph, seed_face, None)
    return Selection(faces, graph.node_count, f"Spatial(seed={seed_face})")


def seg_normal_spatial(mesh: TriangleMesh, graph: FaceGraph, seed_face: int, weight: float) -> Selection:
    """Flood fill from the seed admitting faces whose normal lies within
    `weight` of the seed normal; connected and similarly oriented."""
    _check_seed(mesh.face_count, seed_face)
    _check_weight(weight, 0.0, 2.0)
    admissible = np.linalg.norm(mesh.normals - mesh.normals[seed_face], axis=1) <= weight
    faces = _member_flood(graph, seed_face, admissible)
    return Selection(faces, mesh.face_count, f"NormalAndSpatial(seed={seed_face}, w={weight:g})")


def _coplanar_mask(mesh: TriangleMesh, seed_face: int, weight: float) -> np.ndarray:
    # Distance from each centroid to the seed plane, against a tolerance
    # relative to the bounding-box diagonal so the weight is unit-free.
    anchor = mesh.vertices[int(mesh.faces[seed_face, 0])]
    normal = mesh.normals[seed_face]
    offsets = np.abs((mesh.centroids - anchor) @ normal)
    return offsets <= weight * mesh.bbox_diagonal()


def seg_coplanar(mesh: TriangleMesh, seed_face: int, weight: float) -> Selection:
    """Faces whose centroid lies on the seed face's plane, within
    weight x (bounding-box diagonal); no connectivity requirement. The seed
    is always included."""
    _check_seed(mesh.face_count, seed_face)
    if weight < 0:
        raise ParameterError(f"weight {weight} must be non-negative")
    mask = _coplanar_mask(mesh, seed_face, weight)
    faces = frozenset(int(i) for i in np.flatnonzero(mask)) | {seed_face}
    return Selection(faces, mesh.face_count, f"Coplanar(seed={seed_face}, w={weight:g})")


def seg_spatial_coplanar(mesh: TriangleMesh, graph: FaceGraph, seed_face: int, weight: float) -> Selection:
    """Flood fill admitting only faces passing the coplanarity predicate:
    the connected coplanar patch containing the seed."""
    _check_seed(mesh.face_count, seed_face)
    if weight < 0:
        raise ParameterError(f"weight {weight} must be non-negative")
    faces = _member_flood(graph, seed_face, _coplanar_mask(mesh, seed_face, weight))
    return Selection(faces, mesh.face_count, f"SpatialCoplanar(seed={seed_face}, w={weight:g})")


def wall_admissible(mesh: TriangleMesh, seed_face: int, weight: float, literal_dots: bool = False) -> np.ndarray:
    """Per-face wall predicate: normal (near-)perpendicular or (near-)parallel
    to the seed normal, and clear of the up direction.

    By default both clauses take absolute dot products, excluding floor and
    roof symmetrically; literal_dots uses raw dots instead, which lets a
    floor whose normal opposes up slip past the up clause. The up clause
    rejects at equality so an exactly up-parallel normal never passes, even
    at weight 0.
    """
    dots_seed = mesh.normals @ mesh.normals[seed_face]
    dots_up = mesh.normals @ mesh.up
    if not literal_dots:
        dots_seed = np.abs(dots_seed)
        dots_up = np.abs(dots_up)
    aligned = (dots_seed <= weight) | (dots_seed >= 1.0 - weight)
    clear_of_up = dots_up < 1.0 - weight
    return aligned & clear_of_up


def seg_wall(
    mesh: TriangleMesh,
    graph: FaceGraph,
    seed_face: int,
    weight: float,
    literal_dots: bool = False,
) -> Selection:
    """Flood fill keeping faces that pass the wall predicate against the
    seed normal. A seed that itself fails the up clause yields an empty
    selection with an explanatory status rather than an error."""
    _check_seed(mesh.face_count, seed_face)
    _check_weight(weight, 0.0, 1.0)
    provenance = f"Wall(seed={seed_face}, w={weight:g}{', literal' if literal_dots else ''})"
    admissible = wall_admissible(mesh, seed_face, weight, literal_dots)
    if not admissible[seed_face]:
        return Selection(
            frozenset(), mesh.face_count, provenance,
            status="seed rejected: seed normal parallel to the up vector",
        )
    faces = _member_flood(graph, seed_face, admissible)
    return Selection(faces, mesh.face_count, provenance)


def seg_curve(mesh: TriangleMesh, graph: FaceGraph, seed_face: int, weight: float) -> Selection:
    """Flood fill where a face joins when its normal keeps a smooth gradient
    (dot >= weight) against the admitting neighbor, i.e. the previous face
    of the traversal, not the seed."""
    _check_seed(mesh.face_count, seed_face)
    _check_weight(weight, 0.0, 1.0)
    faces = _step_flood(graph, mesh.normals, seed_face, lambda d: d >= weight)
    return Selection(faces, mesh.face_count, f"Curve(seed={seed_face}, w={weight:g})")


def seg_cylinder(
    mesh: TriangleMesh,
    graph: FaceGraph,
    seed_face: int,
    weight: float,
    band: tuple[float, float] | None = None,
    planar_epsilon: float = PLANAR_STEP_EPSILON,
) -> Selection:
    """Flood fill admitting steps whose normal dot against the admitting
    neighbor falls inside [lo, hi], with practically coplanar steps
    (dot >= 1 - planar_epsilon) passing through so the quad-split facets of
    a faceted cylinder stay traversable. The band defaults to
    [weight, 1 - CYLINDER_BAND_MARGIN]."""
    _check_seed(mesh.face_count, seed_face)
    _check_weight(weight, 0.0, 1.0)
    if planar_epsilon < 0:
        raise ParameterError("planar epsilon must be non-negative")
    if band is None:
        band = (weight, 1.0 - CYLINDER_BAND_MARGIN)
    lo, hi = float(band[0]), float(band[1])
    if not 0.0 <= lo <= hi <= 1.0:
        raise ParameterError(f"cylinder band [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1")
    cutoff = 1.0 - planar_epsilon
    faces = _step_flood(
        graph, mesh.normals, seed_face,
        lambda d: (lo <= d <= hi) or d >= cutoff,
    )
    return Selection(
        faces, mesh.face_count,
        f"Cylinder(seed={seed_face}, w={weight:g}, band={lo:g}..{hi:g})",
    )


def run_segmentation(mesh: TriangleMesh, graph: FaceGraph, request: SegmentationRequest) -> Selection:
    """Dispatch a request to the matching operation."""
    mode = SegmentationMode(request.mode)
    seed, weight = request.seed_face, request.weight
    if mode is SegmentationMode.NORMAL:
        return seg_normal(mesh, seed, weight)
    if mode is SegmentationMode.SPATIAL:
        return seg_spatial(graph, seed)
    if mode is SegmentationMode.NORMAL_SPATIAL:
        return seg_normal_spatial(mesh, graph, seed, weight)
    if mode is SegmentationMode.COPLANAR:
        return seg_coplanar(mesh, seed, weight)
    if mode is SegmentationMode.SPATIAL_COPLANAR:
        return seg_spatial_coplanar(mesh, graph, seed, weight)
    if mode is SegmentationMode.WALL:
        return seg_wall(mesh, graph, seed, weight, request.literal_dots)
    if mode is SegmentationMode.CURVE:
        return seg_curve(mesh, graph, seed, weight)
    if mode is SegmentationMode.CYLINDER:
        return seg_cylinder(mesh, graph, seed, weight, request.band, request.planar_epsilon)
    raise ParameterError(f"unknown segmentation mode {request.mode!r}")
