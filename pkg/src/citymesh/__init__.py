"""citymesh: semi-automatic conversion of OBJ building meshes to CityGML 2.0 LOD3.

Load a triangle mesh, build its face adjacency graph (optionally welding
nearly-touching parts), grow selections with seeded segmentation predicates
or paint them by ray picking, attach CityGML semantic classes, and write the
result as a CityGML LOD3 multi-surface document. A local JSON-over-HTTP
session service and a batch CLI drive the same operations.
"""

from .citygml import (
    COLLINEAR,
    DUPLICATE_POINT,
    RING_NOT_CLOSED,
    CityDocument,
    GeometryGroup,
    TriangleRing,
    build_city_document,
    export_city_gml,
    format_coordinate,
    read_rings,
    serialize_city_document,
    validate_faces,
    validate_rings,
)
from .errors import (
    CitymeshError,
    DegenerateFaceError,
    MeshMismatchError,
    ObjParseError,
    ParameterError,
)
from .graph import FaceGraph, build_base_graph, connected_components, weld_graph
from .mesh import DEFAULT_UP, TriangleFace, TriangleMesh, face_normal, load_obj
from .segmentation import (
    SegmentationMode,
    SegmentationRequest,
    Selection,
    run_segmentation,
    seg_coplanar,
    seg_curve,
    seg_cylinder,
    seg_normal,
    seg_normal_spatial,
    seg_spatial,
    seg_spatial_coplanar,
    seg_wall,
)
from .selection import (
    PickRay,
    combine,
    invert,
    paint_stroke,
    pick_first_hit,
    select_all,
    select_none,
    selection_from_faces,
)
from .semantics import (
    BOUNDARY_SURFACE_CLASSES,
    OPENING_CLASSES,
    SemanticClass,
    SemanticMap,
    assign,
    read_sidecar,
    suggest_classes,
    write_sidecar,
)
from .service import Session, SessionService, create_server

__version__ = "0.1.0"
