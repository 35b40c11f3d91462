"""OBJ parsing, fan triangulation and per-face derived geometry.

The mesh is stored as flat numpy arrays (vertex positions, triangle corner
indices, per-face unit normals and centroids) and never changes after
construction, so it can be shared freely between concurrent computations.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, replace
from typing import IO

import numpy as np

from .errors import DegenerateFaceError, ObjParseError, ParameterError

log = logging.getLogger(__name__)

DEFAULT_UP = np.array([0.0, 0.0, 1.0])

# A triangle whose area falls below this fraction of the squared bounding-box
# diagonal has no usable normal; such faces are dropped at construction.
DEGENERATE_AREA_FACTOR = 1e-12


def face_normal(a, b, c) -> np.ndarray:
    """Unit normal of triangle (a, b, c), right-hand rule over the winding.

    Raises DegenerateFaceError when the corners are collinear or coincident.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    n = np.cross(b - a, c - a)
    length = float(np.linalg.norm(n))
    if length == 0.0:
        raise DegenerateFaceError("triangle corners are collinear or coincident")
    return n / length


@dataclass(frozen=True)
class TriangleFace:
    """One triangle of a mesh: corner indices plus derived normal and centroid."""

    vertex_indices: tuple[int, int, int]
    normal: np.ndarray
    centroid: np.ndarray


@dataclass(frozen=True)
class TriangleMesh:
    """Immutable indexed triangle soup.

    vertices:   (nv, 3) float positions, exactly as parsed
    faces:      (nf, 3) vertex indices per triangle
    normals:    (nf, 3) unit face normals derived from winding
    centroids:  (nf, 3) arithmetic mean of each triangle's corners
    up:         session up direction (unit), used by wall segmentation and
                class suggestion
    dropped_degenerate: triangles removed at construction for having no
                usable normal
    """

    vertices: np.ndarray
    faces: np.ndarray
    normals: np.ndarray
    centroids: np.ndarray
    up: np.ndarray = field(default_factory=lambda: DEFAULT_UP.copy())
    dropped_degenerate: int = 0

    def __post_init__(self):
        for arr in (self.vertices, self.faces, self.normals, self.centroids, self.up):
            arr.setflags(write=False)

    @property
    def vertex_count(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def face_count(self) -> int:
        return int(self.faces.shape[0])

    def face(self, index: int) -> TriangleFace:
        a, b, c = (int(v) for v in self.faces[index])
        return TriangleFace((a, b, c), self.normals[index], self.centroids[index])

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if self.vertex_count == 0:
            zero = np.zeros(3)
            return zero, zero.copy()
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def bbox_diagonal(self) -> float:
        lo, hi = self.bounds()
        return float(np.linalg.norm(hi - lo))

    def with_up(self, up) -> "TriangleMesh":
        """Same geometry with a different session up direction."""
        up = np.asarray(up, dtype=float).reshape(3).copy()
        length = float(np.linalg.norm(up))
        if length == 0.0 or not np.isfinite(length):
            raise ParameterError("up vector must be finite and nonzero")
        return replace(self, up=up / length)

    @classmethod
    def from_arrays(cls, vertices, faces, up=None, drop_degenerate: bool = True) -> "TriangleMesh":
        """Build a mesh from raw arrays, deriving normals and centroids.

        Degenerate triangles (area below DEGENERATE_AREA_FACTOR times the
        squared bounding-box diagonal, or exactly zero) are dropped and
        counted unless drop_degenerate is False, in which case they are kept
        with a zero normal so validation can report them.
        """
        vertices = np.asarray(vertices, dtype=float).reshape(-1, 3).copy()
        faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3).copy()
        if vertices.size and not np.isfinite(vertices).all():
            raise ParameterError("vertex coordinates must be finite")
        if faces.size and (faces.min() < 0 or faces.max() >= len(vertices)):
            raise ParameterError("face index out of range")

        a = vertices[faces[:, 0]] if len(faces) else np.zeros((0, 3))
        b = vertices[faces[:, 1]] if len(faces) else np.zeros((0, 3))
        c = vertices[faces[:, 2]] if len(faces) else np.zeros((0, 3))
        cross = np.cross(b - a, c - a)
        double_area = np.linalg.norm(cross, axis=1)

        span = vertices.max(axis=0) - vertices.min(axis=0) if len(vertices) else np.zeros(3)
        diag_sq = float(span @ span)
        degenerate = (double_area == 0.0) | (double_area < 2.0 * DEGENERATE_AREA_FACTOR * diag_sq)

        dropped = 0
        if drop_degenerate and degenerate.any():
            dropped = int(degenerate.sum())
            keep = ~degenerate
            faces, cross, double_area = faces[keep], cross[keep], double_area[keep]
            a, b, c = a[keep], b[keep], c[keep]

        normals = np.zeros_like(cross)
        nonzero = double_area > 0.0
        normals[nonzero] = cross[nonzero] / double_area[nonzero, None]
        centroids = (a + b + c) / 3.0

        if up is None:
            up_arr = DEFAULT_UP.copy()
        else:
            up_arr = np.asarray(up, dtype=float).reshape(3).copy()
            length = float(np.linalg.norm(up_arr))
            if length == 0.0 or not np.isfinite(length):
                raise ParameterError("up vector must be finite and nonzero")
            up_arr = up_arr / length

        return cls(vertices, faces, normals, centroids, up_arr, dropped)


def load_obj(source: IO[str] | str | os.PathLike, up=None, drop_degenerate: bool = True) -> TriangleMesh:
    """Parse OBJ text into a uniform triangle mesh.

    `source` is an open text stream or a filesystem path. Only `v` and `f`
    records contribute geometry; `vt`, `vn`, `o`, `g`, `s`, `usemtl`,
    `mtllib`, comments and any other record types are accepted and ignored.
    Polygons with more than three corners are fan-triangulated from the
    record's first corner, so a k-gon yields k-2 triangles. Face normals are
    always recomputed from the winding order; authored `vn` records are never
    trusted because smoothed vertex normals would corrupt the segmentation
    predicates.

    Raises ObjParseError, naming the offending line, for non-numeric
    coordinates, out-of-range or zero indices, faces with fewer than three
    corners, or input containing no face records. Degenerate triangles are
    dropped with a warning count (see TriangleMesh.from_arrays).
    """
    if hasattr(source, "read"):
        return _parse(source, up, drop_degenerate)
    with open(os.fspath(source), "r", encoding="utf-8") as handle:
        return _parse(handle, up, drop_degenerate)


def _resolve_index(token: str, vertex_count: int, line_number: int) -> int:
    head = token.split("/", 1)[0]
    try:
        value = int(head)
    except ValueError:
        raise ObjParseError(line_number, f"bad vertex reference {token!r}") from None
    if value > 0:
        index = value - 1
    elif value < 0:
        index = vertex_count + value
    else:
        raise ObjParseError(line_number, "vertex index 0 is not valid in OBJ")
    if not 0 <= index < vertex_count:
        raise ObjParseError(line_number, f"vertex index {value} out of range")
    return index


def _parse(stream: IO[str], up, drop_degenerate: bool) -> TriangleMesh:
    vertices: list[tuple[float, float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    saw_face = False

    for line_number, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        kind = fields[0]
        if kind == "v":
            if len(fields) < 4:
                raise ObjParseError(line_number, "vertex record needs 3 coordinates")
            try:
                xyz = (float(fields[1]), float(fields[2]), float(fields[3]))
            except ValueError:
                raise ObjParseError(line_number, f"non-numeric coordinate in {line!r}") from None
            if not all(math.isfinite(v) for v in xyz):
                raise ObjParseError(line_number, "non-finite vertex coordinate")
            vertices.append(xyz)
        elif kind == "f":
            corners = fields[1:]
            if len(corners) < 3:
                raise ObjParseError(line_number, "face with fewer than 3 vertices")
            indices = [_resolve_index(tok, len(vertices), line_number) for tok in corners]
            for i in range(1, len(indices) - 1):
                triangles.append((indices[0], indices[i], indices[i + 1]))
            saw_face = True
        # every other record type carries nothing we consume

    if not saw_face:
        raise ObjParseError(0, "input contains no face records")

    mesh = TriangleMesh.from_arrays(
        np.array(vertices, dtype=float),
        np.array(triangles, dtype=np.int64),
        up=up,
        drop_degenerate=drop_degenerate,
    )
    if mesh.dropped_degenerate:
        log.warning("dropped %d degenerate triangle(s) at load", mesh.dropped_degenerate)
    return mesh
