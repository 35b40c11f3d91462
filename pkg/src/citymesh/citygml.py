"""CityGML 2.0 LOD3 serialization and pre-export ring validation.

The document is a multi-surface model with every primitive a triangle; all
triangles of one class are grouped into a single element of that class.
Boundary surfaces hang off bldg:boundedBy, openings off bldg:opening placed
flat under the Building (an optional strict mode nests them inside the
WallSurface instead), and installation geometry, which also absorbs
unclassified faces, off bldg:outerBuildingInstallation.
"""

from __future__ import annotations

import logging
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from xml.sax.saxutils import escape

import numpy as np

from .errors import MeshMismatchError, ParameterError
from .graph import FaceGraph
from .mesh import TriangleMesh
from .semantics import BOUNDARY_SURFACE_CLASSES, OPENING_CLASSES, SemanticClass, SemanticMap

log = logging.getLogger(__name__)

# Issue codes reported by face and ring validation.
RING_NOT_CLOSED = "RING_NOT_CLOSED"
DUPLICATE_POINT = "DUPLICATE_POINT"
COLLINEAR = "COLLINEAR"

_DUPLICATE_RELATIVE_TOLERANCE = 1e-12
_COLLINEAR_AREA_FACTOR = 1e-12

CITYGML_NAMESPACE = "http://www.opengis.net/citygml/2.0"
GML_NAMESPACE = "http://www.opengis.net/gml"
BUILDING_NAMESPACE = "http://www.opengis.net/citygml/building/2.0"

# Additional prefixes declared on the root element, in emission order.
_EXTRA_NAMESPACES = (
    ("xsi", "http://www.w3.org/2001/XMLSchema-instance"),
    ("xlink", "http://www.w3.org/1999/xlink"),
    ("smil20", "http://www.w3.org/2001/SMIL20/"),
    ("frn", "http://www.opengis.net/citygml/cityfurniture/2.0"),
    ("grp", "http://www.opengis.net/citygml/cityobjectgroup/2.0"),
    ("luse", "http://www.opengis.net/citygml/landuse/2.0"),
    ("tex", "http://www.opengis.net/citygml/texturedsurface/2.0"),
    ("tun", "http://www.opengis.net/citygml/tunnel/2.0"),
    ("wtr", "http://www.opengis.net/citygml/waterbody/2.0"),
)

# Modules listed in xsi:schemaLocation. The stock emission pairs each 2.0
# namespace with the 1.0 schema file; corrected_schema_locations=True points
# the pairs at the 2.0 schema files instead.
_SCHEMA_MODULES = (
    ("relief", "relief.xsd"),
    ("landuse", "landUse.xsd"),
    ("building", "building.xsd"),
    ("cityobjectgroup", "cityObjectGroup.xsd"),
    ("cityfurniture", "cityFurniture.xsd"),
    ("appearance", "appearance.xsd"),
    ("texturedsurface", "texturedSurface.xsd"),
    ("transportation", "transportation.xsd"),
    ("waterbody", "waterBody.xsd"),
    ("vegetation", "vegetation.xsd"),
    ("generics", "generics.xsd"),
)


def format_coordinate(value: float) -> str:
    """Shortest decimal text that parses back to the same float; integral
    values print without a trailing .0 (so 12.0 prints as 12)."""
    value = float(value)
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


@dataclass(frozen=True)
class TriangleRing:
    """Closed triangle boundary: three corners with the first repeated last."""

    positions: tuple[tuple[float, float, float], ...]

    @classmethod
    def from_corners(cls, a, b, c) -> "TriangleRing":
        ta = (float(a[0]), float(a[1]), float(a[2]))
        tb = (float(b[0]), float(b[1]), float(b[2]))
        tc = (float(c[0]), float(c[1]), float(c[2]))
        return cls((ta, tb, tc, ta))

    def pos_lines(self) -> list[str]:
        return [" ".join(format_coordinate(v) for v in p) for p in self.positions]


@dataclass(frozen=True)
class GeometryGroup:
    """All triangles emitted under one class element.

    members are (face index, map label, ring); the label can differ from the
    group class only in the installation group, which absorbs Unclassified
    faces. openings holds opening groups nested under this boundary surface
    in strict nesting mode.
    """

    semantic_class: SemanticClass
    members: tuple[tuple[int, SemanticClass, TriangleRing], ...]
    openings: tuple["GeometryGroup", ...] = ()


@dataclass(frozen=True)
class CityDocument:
    """Exportable tree: one building whose geometry groups cover every mesh
    face exactly once."""

    name: str
    groups: tuple[GeometryGroup, ...]
    unclassified_count: int = 0


def validate_faces(mesh: TriangleMesh) -> list[tuple[int, str]]:
    """Per-face geometry report ahead of export; empty means clean.

    DUPLICATE_POINT: two corners coincide within 1e-12 of the bounding-box
    diagonal. COLLINEAR: zero area without coincident corners. Ring closure
    cannot fail for generated rings and is checked on re-import instead
    (validate_rings). Self-intersection across faces is not checked.
    """
    issues: list[tuple[int, str]] = []
    diagonal = mesh.bbox_diagonal()
    point_tol = _DUPLICATE_RELATIVE_TOLERANCE * diagonal
    area_tol = 2.0 * _COLLINEAR_AREA_FACTOR * diagonal * diagonal
    for face in range(mesh.face_count):
        a, b, c = mesh.vertices[mesh.faces[face]]
        gaps = (np.linalg.norm(a - b), np.linalg.norm(b - c), np.linalg.norm(a - c))
        if any(g == 0.0 or g < point_tol for g in gaps):
            issues.append((face, DUPLICATE_POINT))
            continue
        double_area = float(np.linalg.norm(np.cross(b - a, c - a)))
        if double_area == 0.0 or double_area < area_tol:
            issues.append((face, COLLINEAR))
    return issues


def _ring_for_face(mesh: TriangleMesh, face: int) -> TriangleRing:
    a, b, c = mesh.vertices[mesh.faces[face]]
    return TriangleRing.from_corners(a, b, c)


def build_city_document(
    mesh: TriangleMesh,
    semantic_map: SemanticMap,
    name: str,
    strict_opening_nesting: bool = False,
    graph: FaceGraph | None = None,
) -> CityDocument:
    """Group every face's ring by class, in a fixed canonical order.

    Unclassified faces ride along in the installation group, counted as a
    warning. Vertex order inside each ring is the mesh winding, so the ring
    normal reproduces the stored face normal.
    """
    if mesh.face_count == 0:
        raise ParameterError("cannot export an empty mesh")
    if semantic_map.face_count != mesh.face_count:
        raise MeshMismatchError("semantic map does not cover this mesh")

    by_class: dict[SemanticClass, list[tuple[int, SemanticClass, TriangleRing]]] = {}
    for face, label in enumerate(semantic_map.labels):
        by_class.setdefault(label, []).append((face, label, _ring_for_face(mesh, face)))

    boundary_groups = [
        GeometryGroup(cls, tuple(by_class[cls]))
        for cls in BOUNDARY_SURFACE_CLASSES
        if cls in by_class
    ]
    opening_groups = [
        GeometryGroup(cls, tuple(by_class[cls]))
        for cls in OPENING_CLASSES
        if cls in by_class
    ]

    installation_members = list(by_class.get(SemanticClass.BUILDING_INSTALLATION, []))
    unclassified = by_class.get(SemanticClass.UNCLASSIFIED, [])
    unclassified_count = len(unclassified)
    if unclassified_count:
        log.warning(
            "%d unclassified face(s) exported as BuildingInstallation geometry",
            unclassified_count,
        )
        installation_members.extend(unclassified)
        installation_members.sort(key=lambda entry: entry[0])
    installation_groups = (
        [GeometryGroup(SemanticClass.BUILDING_INSTALLATION, tuple(installation_members))]
        if installation_members
        else []
    )

    if strict_opening_nesting and opening_groups:
        boundary_groups, opening_groups = _nest_openings(boundary_groups, opening_groups, graph)

    groups = tuple(boundary_groups + opening_groups + installation_groups)
    return CityDocument(name, groups, unclassified_count)


def _nest_openings(
    boundary_groups: list[GeometryGroup],
    opening_groups: list[GeometryGroup],
    graph: FaceGraph | None,
) -> tuple[list[GeometryGroup], list[GeometryGroup]]:
    # Attach each opening group to the wall group sharing the most graph
    # adjacency with it; openings touching no wall stay flat under Building.
    if graph is None:
        raise ParameterError("strict opening nesting needs the face graph")
    wall_index = next(
        (i for i, g in enumerate(boundary_groups) if g.semantic_class is SemanticClass.WALL_SURFACE),
        None,
    )
    if wall_index is None:
        return boundary_groups, opening_groups
    wall_faces = {face for face, _, _ in boundary_groups[wall_index].members}

    nested, flat = [], []
    for group in opening_groups:
        contact = sum(
            1
            for face, _, _ in group.members
            for neighbor in graph.neighbors[face]
            if neighbor in wall_faces
        )
        (nested if contact > 0 else flat).append(group)
    if nested:
        wall = boundary_groups[wall_index]
        boundary_groups = list(boundary_groups)
        boundary_groups[wall_index] = GeometryGroup(
            wall.semantic_class, wall.members, wall.openings + tuple(nested)
        )
    return boundary_groups, flat


def _root_attributes(corrected_schema_locations: bool) -> list[str]:
    attrs = [f'xmlns="{CITYGML_NAMESPACE}"']
    attrs.append(f'xmlns:core="{CITYGML_NAMESPACE}"')
    attrs.append(f'xmlns:gml="{GML_NAMESPACE}"')
    attrs.append(f'xmlns:bldg="{BUILDING_NAMESPACE}"')
    for prefix, uri in _EXTRA_NAMESPACES:
        attrs.append(f'xmlns:{prefix}="{uri}"')
    schema_version = "2.0" if corrected_schema_locations else "1.0"
    pairs = []
    for module, xsd in _SCHEMA_MODULES:
        namespace = f"http://www.opengis.net/citygml/{module}/2.0"
        location = f"http://schemas.opengis.net/citygml/{module}/{schema_version}/{xsd}"
        pairs.append(f"{namespace} {location}")
    attrs.append(f'xsi:schemaLocation="{" ".join(pairs)}"')
    return attrs


def _emit_polygon(out: list[str], indent: str, face: int, label: SemanticClass, ring: TriangleRing) -> None:
    out.append(f'{indent}<gml:surfaceMember>')
    out.append(f'{indent}  <gml:Polygon gml:id="{label.value}_{face}">')
    out.append(f'{indent}    <gml:exterior>')
    out.append(f'{indent}      <gml:LinearRing>')
    for line in ring.pos_lines():
        out.append(f'{indent}        <gml:pos>{line}</gml:pos>')
    out.append(f'{indent}      </gml:LinearRing>')
    out.append(f'{indent}    </gml:exterior>')
    out.append(f'{indent}  </gml:Polygon>')
    out.append(f'{indent}</gml:surfaceMember>')


def _emit_group(out: list[str], indent: str, group: GeometryGroup) -> None:
    cls = group.semantic_class
    if cls in BOUNDARY_SURFACE_CLASSES:
        property_tag, geometry_tag = "bldg:boundedBy", "bldg:lod3MultiSurface"
    elif cls in OPENING_CLASSES:
        property_tag, geometry_tag = "bldg:opening", "bldg:lod3MultiSurface"
    else:
        property_tag, geometry_tag = "bldg:outerBuildingInstallation", "bldg:lod3Geometry"
    class_tag = f"bldg:{cls.value}"

    out.append(f"{indent}<{property_tag}>")
    out.append(f"{indent}  <{class_tag}>")
    out.append(f"{indent}    <{geometry_tag}>")
    out.append(f"{indent}      <gml:MultiSurface>")
    for face, label, ring in group.members:
        _emit_polygon(out, indent + "        ", face, label, ring)
    out.append(f"{indent}      </gml:MultiSurface>")
    out.append(f"{indent}    </{geometry_tag}>")
    for opening in group.openings:
        _emit_group(out, indent + "    ", opening)
    out.append(f"{indent}  </{class_tag}>")
    out.append(f"{indent}</{property_tag}>")


def serialize_city_document(document: CityDocument, corrected_schema_locations: bool = False) -> str:
    """Render the document as UTF-8 ready, balanced, namespaced XML text."""
    out = ['<?xml version="1.0" encoding="UTF-8"?>']
    attrs = _root_attributes(corrected_schema_locations)
    out.append("<CityModel " + "\n  ".join(attrs) + ">")
    out.append(f"  <gml:name>{escape(document.name)}</gml:name>")
    out.append("  <core:cityObjectMember>")
    out.append("    <bldg:Building>")
    for group in document.groups:
        _emit_group(out, "      ", group)
    out.append("    </bldg:Building>")
    out.append("  </core:cityObjectMember>")
    out.append("</CityModel>")
    return "\n".join(out) + "\n"


def export_city_gml(
    mesh: TriangleMesh,
    semantic_map: SemanticMap,
    doc_name: str,
    corrected_schema_locations: bool = False,
    strict_opening_nesting: bool = False,
    graph: FaceGraph | None = None,
) -> str:
    """Serialize mesh plus class map to a CityGML LOD3 document."""
    document = build_city_document(
        mesh, semantic_map, doc_name,
        strict_opening_nesting=strict_opening_nesting, graph=graph,
    )
    return serialize_city_document(document, corrected_schema_locations)


def read_rings(document_text: str) -> list[tuple[str, np.ndarray]]:
    """Parse every polygon ring back out of a document.

    Returns (gml:id, (k, 3) position array) pairs in document order; the
    round-trip oracle for export and the entry point for re-import checks.
    """
    root = ET.fromstring(document_text)
    ns = {"gml": GML_NAMESPACE}
    rings = []
    for polygon in root.iter(f"{{{GML_NAMESPACE}}}Polygon"):
        ring_id = polygon.get(f"{{{GML_NAMESPACE}}}id", "")
        ring = polygon.find("gml:exterior/gml:LinearRing", ns)
        if ring is None:
            rings.append((ring_id, np.zeros((0, 3))))
            continue
        positions = [[float(x) for x in pos.text.split()] for pos in ring.findall("gml:pos", ns)]
        rings.append((ring_id, np.array(positions, dtype=float).reshape(-1, 3)))
    return rings


def validate_rings(rings: list[tuple[str, np.ndarray]]) -> list[tuple[str, str]]:
    """Re-import checks over parsed rings: closure first, then the same
    corner tests as validate_faces."""
    issues: list[tuple[str, str]] = []
    for ring_id, points in rings:
        if len(points) != 4 or not np.array_equal(points[0], points[-1]):
            issues.append((ring_id, RING_NOT_CLOSED))
            continue
        a, b, c = points[0], points[1], points[2]
        scale = max(float(np.linalg.norm(p)) for p in (a, b, c)) or 1.0
        gaps = (np.linalg.norm(a - b), np.linalg.norm(b - c), np.linalg.norm(a - c))
        if any(g == 0.0 or g < _DUPLICATE_RELATIVE_TOLERANCE * scale for g in gaps):
            issues.append((ring_id, DUPLICATE_POINT))
            continue
        if float(np.linalg.norm(np.cross(b - a, c - a))) == 0.0:
            issues.append((ring_id, COLLINEAR))
    return issues
