"""Manual selection tooling: ray-cast painting and set operators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import MeshMismatchError, ParameterError
from .mesh import TriangleMesh
from .segmentation import Selection

# Hits closer than this along the ray are ignored, so re-picking from a
# point on a surface does not select the surface it sits on.
RAY_T_MIN = 1e-9

# Rays this close to parallel with a triangle's plane do not hit it.
_DET_EPSILON = 1e-12


@dataclass(frozen=True)
class PickRay:
    """World-space ray; the direction is normalized at construction."""

    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        origin = np.asarray(self.origin, dtype=float).reshape(3).copy()
        direction = np.asarray(self.direction, dtype=float).reshape(3).copy()
        length = float(np.linalg.norm(direction))
        if length == 0.0 or not np.isfinite(length):
            raise ParameterError("ray direction must be finite and nonzero")
        direction /= length
        origin.setflags(write=False)
        direction.setflags(write=False)
        object.__setattr__(self, "origin", origin)
        object.__setattr__(self, "direction", direction)


def pick_first_hit(mesh: TriangleMesh, ray: PickRay) -> int | None:
    """Index of the nearest triangle the ray passes through, or None.

    Moller-Trumbore over every face at once; both facings count (nearest
    means nearest, and closed shells make culling redundant) and edge or
    corner contact is inclusive, so a hit on a shared edge cannot slip
    between the two triangles. Ties on distance go to the smaller index.
    """
    if mesh.face_count == 0:
        return None
    v0 = mesh.vertices[mesh.faces[:, 0]]
    v1 = mesh.vertices[mesh.faces[:, 1]]
    v2 = mesh.vertices[mesh.faces[:, 2]]
    e1 = v1 - v0
    e2 = v2 - v0

    pvec = np.cross(np.broadcast_to(ray.direction, e2.shape), e2)
    det = np.einsum("ij,ij->i", e1, pvec)
    hits = np.abs(det) > _DET_EPSILON
    safe_det = np.where(hits, det, 1.0)

    tvec = ray.origin - v0
    u = np.einsum("ij,ij->i", tvec, pvec) / safe_det
    qvec = np.cross(tvec, e1)
    v = (qvec @ ray.direction) / safe_det
    t = np.einsum("ij,ij->i", qvec, e2) / safe_det

    hits &= (u >= 0.0) & (v >= 0.0) & (u + v <= 1.0) & (t > RAY_T_MIN)
    if not hits.any():
        return None
    candidates = np.flatnonzero(hits)
    return int(candidates[np.argmin(t[candidates])])


def paint_stroke(
    mesh: TriangleMesh,
    rays: Sequence[PickRay],
    erase: bool = False,
    current: Selection | None = None,
) -> Selection:
    """Fold each ray's first hit into the running selection.

    Hits are added, or removed when erasing; rays that miss contribute
    nothing. Painting the same spot twice is idempotent.
    """
    if not rays:
        raise ParameterError("paint stroke needs at least one ray")
    if current is None:
        current = Selection(frozenset(), mesh.face_count, "manual")
    if current.face_count != mesh.face_count:
        raise MeshMismatchError("selection does not belong to this mesh")
    hits = {hit for hit in (pick_first_hit(mesh, ray) for ray in rays) if hit is not None}
    faces = current.faces - hits if erase else current.faces | hits
    return Selection(frozenset(faces), mesh.face_count, "paint")


def combine(a: Selection, b: Selection, op: str) -> Selection:
    """Standard set combination of two selections over the same mesh."""
    if a.face_count != b.face_count:
        raise MeshMismatchError("selections belong to different meshes")
    if op == "union":
        faces = a.faces | b.faces
    elif op == "difference":
        faces = a.faces - b.faces
    elif op == "intersection":
        faces = a.faces & b.faces
    else:
        raise ParameterError(f"unknown combine op {op!r} (union, difference, intersection)")
    return Selection(faces, a.face_count, f"combine({op})")


def select_all(mesh: TriangleMesh) -> Selection:
    return Selection(frozenset(range(mesh.face_count)), mesh.face_count, "all")


def select_none(mesh: TriangleMesh) -> Selection:
    return Selection(frozenset(), mesh.face_count, "none")


def invert(selection: Selection) -> Selection:
    faces = frozenset(range(selection.face_count)) - selection.faces
    return Selection(faces, selection.face_count, "invert")


def selection_from_faces(mesh: TriangleMesh, faces: Iterable[int], provenance: str = "manual") -> Selection:
    """Build a selection from explicit face indices, validating range."""
    face_set = frozenset(int(f) for f in faces)
    for f in face_set:
        if not 0 <= f < mesh.face_count:
            raise ParameterError(f"face index {f} out of range")
    return Selection(face_set, mesh.face_count, provenance)
