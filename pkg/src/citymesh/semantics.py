"""CityGML class labels, the face-to-class map, and sidecar persistence."""

from __future__ import annotations

import os
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable

import numpy as np

from .errors import MeshMismatchError, ParameterError
from .mesh import TriangleMesh
from .segmentation import Selection


class SemanticClass(str, Enum):
    WALL_SURFACE = "WallSurface"
    ROOF_SURFACE = "RoofSurface"
    GROUND_SURFACE = "GroundSurface"
    CLOSURE_SURFACE = "ClosureSurface"
    OUTER_CEILING_SURFACE = "OuterCeilingSurface"
    OUTER_FLOOR_SURFACE = "OuterFloorSurface"
    WINDOW = "Window"
    DOOR = "Door"
    BUILDING_INSTALLATION = "BuildingInstallation"
    UNCLASSIFIED = "Unclassified"


BOUNDARY_SURFACE_CLASSES = (
    SemanticClass.WALL_SURFACE,
    SemanticClass.ROOF_SURFACE,
    SemanticClass.GROUND_SURFACE,
    SemanticClass.CLOSURE_SURFACE,
    SemanticClass.OUTER_CEILING_SURFACE,
    SemanticClass.OUTER_FLOOR_SURFACE,
)

OPENING_CLASSES = (SemanticClass.WINDOW, SemanticClass.DOOR)


@dataclass(frozen=True)
class SemanticMap:
    """Total assignment of exactly one class per face.

    Faces that were never assigned stay Unclassified.
    """

    labels: tuple[SemanticClass, ...]

    @classmethod
    def unclassified(cls, face_count: int) -> "SemanticMap":
        return cls((SemanticClass.UNCLASSIFIED,) * face_count)

    @property
    def face_count(self) -> int:
        return len(self.labels)

    def __getitem__(self, face: int) -> SemanticClass:
        return self.labels[face]

    def faces_of(self, semantic_class: SemanticClass) -> list[int]:
        return [f for f, label in enumerate(self.labels) if label is semantic_class]

    def counts(self) -> dict[SemanticClass, int]:
        table: dict[SemanticClass, int] = {}
        for label in self.labels:
            table[label] = table.get(label, 0) + 1
        return table


def assign(semantic_map: SemanticMap, selection: Selection, semantic_class: SemanticClass) -> SemanticMap:
    """Set every selected face to the class; other faces keep their label.
    Reassignment overwrites (last write wins)."""
    if selection.face_count != semantic_map.face_count:
        raise MeshMismatchError("selection does not belong to this map's mesh")
    labels = list(semantic_map.labels)
    for face in selection.faces:
        labels[face] = semantic_class
    return SemanticMap(tuple(labels))


def suggest_classes(
    mesh: TriangleMesh,
    roof_tolerance_deg: float = 45.0,
    ground_tolerance_deg: float = 45.0,
    wall_tolerance_deg: float = 45.0,
) -> SemanticMap:
    """Heuristic map from each face's tilt against the up direction.

    theta is the angle between the face normal and up: near zero suggests
    RoofSurface, near 180 GroundSurface, near 90 WallSurface, anything else
    stays Unclassified. This never proposes openings, closures or
    installations; their normals carry no class signal. Tolerances are
    user-tunable; the defaults are deliberately wide placeholders.
    """
    for name, value in (
        ("roof", roof_tolerance_deg), ("ground", ground_tolerance_deg), ("wall", wall_tolerance_deg),
    ):
        if value <= 0:
            raise ParameterError(f"{name} tolerance must be positive")
    cosines = np.clip(mesh.normals @ mesh.up, -1.0, 1.0)
    theta = np.degrees(np.arccos(cosines))
    labels = []
    for angle in theta:
        if angle <= roof_tolerance_deg:
            labels.append(SemanticClass.ROOF_SURFACE)
        elif angle >= 180.0 - ground_tolerance_deg:
            labels.append(SemanticClass.GROUND_SURFACE)
        elif abs(angle - 90.0) <= wall_tolerance_deg:
            labels.append(SemanticClass.WALL_SURFACE)
        else:
            labels.append(SemanticClass.UNCLASSIFIED)
    return SemanticMap(tuple(labels))


def write_sidecar(semantic_map: SemanticMap, target: IO[str] | str | os.PathLike, header: Iterable[str] = ()) -> None:
    """Write the line-oriented class map: one `face<TAB>label` line per
    non-Unclassified face. header lines, if any, are emitted first as
    `# `-prefixed comments, which readers skip."""
    lines = [f"# {entry}" for entry in header]
    for face, label in enumerate(semantic_map.labels):
        if label is not SemanticClass.UNCLASSIFIED:
            lines.append(f"{face}\t{label.value}")
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(os.fspath(target), "w", encoding="utf-8") as handle:
            handle.write(text)


def read_sidecar(source: IO[str] | str | os.PathLike, face_count: int) -> SemanticMap:
    """Parse a sidecar back into a map over a mesh with face_count faces.

    Comment lines (leading '#') and blank lines are skipped. Raises
    ParameterError naming the face index when it is out of range, and for
    unknown labels or malformed lines.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(os.fspath(source), "r", encoding="utf-8") as handle:
            text = handle.read()

    labels = [SemanticClass.UNCLASSIFIED] * face_count
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParameterError(f"sidecar line {line_number}: expected face<TAB>label, got {raw!r}")
        face_text, label_text = parts
        try:
            face = int(face_text)
        except ValueError:
            raise ParameterError(f"sidecar line {line_number}: bad face index {face_text!r}") from None
        if not 0 <= face < face_count:
            raise ParameterError(
                f"sidecar line {line_number}: face index {face} out of range (mesh has {face_count} faces)"
            )
        try:
            label = SemanticClass(label_text)
        except ValueError:
            raise ParameterError(f"sidecar line {line_number}: unknown class {label_text!r}") from None
        labels[face] = label
    return SemanticMap(tuple(labels))


def read_sidecar_headers(source: IO[str] | str | os.PathLike) -> dict[str, str]:
    """Collect `# key value` comment lines into a dict (first wins)."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(os.fspath(source), "r", encoding="utf-8") as handle:
            text = handle.read()
    headers: dict[str, str] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line.startswith("#"):
            continue
        body = line[1:].strip()
        if not body:
            continue
        key, _, value = body.partition(" ")
        headers.setdefault(key, value.strip())
    return headers
