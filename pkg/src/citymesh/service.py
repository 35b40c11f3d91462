"""Stateful session orchestration behind a local JSON-over-HTTP service.

One service owns one session (mesh, graph, active selection, semantic map).
Every operation runs under a single lock, so mutations apply in a total
order; the revision counter increments on each mutation and every response
echoes the revision it reflects. Mutation requests may carry an
"ifRevision" field for optimistic checking and are rejected with a
stale-revision error when it does not match.

Wire format: JSON request and response bodies over HTTP on localhost. Mesh
buffers travel as plain JSON number arrays (flat positions, corner indices,
per-face normals, class codes and selection flags), which desk-scale models
keep comfortably small.
"""

from __future__ import annotations

import hashlib
import io
import json
import logging
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .citygml import export_city_gml
from .errors import CitymeshError
from .graph import FaceGraph, build_base_graph, connected_components, weld_graph
from .mesh import TriangleMesh, load_obj
from .segmentation import (
    PLANAR_STEP_EPSILON,
    SegmentationMode,
    SegmentationRequest,
    Selection,
    run_segmentation,
)
from .selection import PickRay, combine, invert, paint_stroke, pick_first_hit, select_all, select_none, selection_from_faces
from .semantics import SemanticClass, SemanticMap, assign, read_sidecar, read_sidecar_headers, suggest_classes, write_sidecar

log = logging.getLogger(__name__)

SESSION_FORMAT = "citymesh-session 1"


class RequestError(CitymeshError):
    """Structured request failure: machine code plus human message."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


@dataclass
class Session:
    """Mutable state of one editing session."""

    mesh: TriangleMesh
    base_graph: FaceGraph
    graph: FaceGraph
    selection: Selection
    semantics: SemanticMap
    revision: int = 0
    weld_precision: float | None = None
    saved_selections: dict[str, Selection] = field(default_factory=dict)
    model_path: str = ""
    model_hash: str = ""

    @classmethod
    def open(cls, model_path, weld_precision: float | None = None, up=None) -> "Session":
        data = Path(model_path).read_bytes()
        mesh = load_obj(io.StringIO(data.decode("utf-8")), up=up)
        base = build_base_graph(mesh)
        graph = weld_graph(mesh, base, weld_precision) if weld_precision else base
        return cls(
            mesh=mesh,
            base_graph=base,
            graph=graph,
            selection=select_none(mesh),
            semantics=SemanticMap.unclassified(mesh.face_count),
            weld_precision=weld_precision,
            model_path=str(model_path),
            model_hash=hashlib.sha256(data).hexdigest(),
        )


def _selection_payload(selection: Selection) -> dict:
    return {
        "faces": sorted(selection.faces),
        "size": len(selection.faces),
        "provenance": selection.provenance,
        "status": selection.status,
    }


def _parse_request(payload: dict) -> SegmentationRequest:
    try:
        mode = SegmentationMode(payload["mode"])
    except KeyError:
        raise RequestError("bad-request", "missing segmentation mode") from None
    except ValueError:
        raise RequestError(
            "parameter-error",
            f"unknown mode {payload['mode']!r} (one of {[m.value for m in SegmentationMode]})",
        ) from None
    if "seed" not in payload:
        raise RequestError("bad-request", "missing seed face")
    params = payload.get("params") or {}
    band = params.get("band")
    if band is not None:
        if not isinstance(band, (list, tuple)) or len(band) != 2:
            raise RequestError("bad-request", "band must be [lo, hi]")
        band = (float(band[0]), float(band[1]))
    try:
        return SegmentationRequest(
            mode=mode,
            seed_face=int(payload["seed"]),
            weight=float(payload.get("weight", 0.0)),
            band=band,
            planar_epsilon=float(params.get("planarEpsilon", PLANAR_STEP_EPSILON)),
            literal_dots=bool(params.get("literalDots", False)),
        )
    except (TypeError, ValueError) as exc:
        raise RequestError("bad-request", f"malformed segmentation request: {exc}") from None


def _parse_ray(payload: dict) -> PickRay:
    try:
        return PickRay(np.asarray(payload["origin"], dtype=float), np.asarray(payload["direction"], dtype=float))
    except (KeyError, TypeError, ValueError) as exc:
        raise RequestError("bad-request", f"malformed ray: {exc}") from None


class SessionService:
    """All operations over one session, serialized through one lock."""

    def __init__(self, session: Session):
        self.session = session
        self._lock = threading.RLock()

    def _check_revision(self, payload: dict) -> None:
        expected = payload.get("ifRevision")
        if expected is not None and int(expected) != self.session.revision:
            raise RequestError(
                "stale-revision",
                f"request expected revision {expected}, session is at {self.session.revision}",
            )

    def _bump(self) -> None:
        self.session.revision += 1

    # -- read operations ---------------------------------------------------

    def info(self) -> dict:
        with self._lock:
            s = self.session
            lo, hi = s.mesh.bounds()
            return {
                "revision": s.revision,
                "modelPath": s.model_path,
                "modelHash": s.model_hash,
                "vertexCount": s.mesh.vertex_count,
                "faceCount": s.mesh.face_count,
                "droppedDegenerate": s.mesh.dropped_degenerate,
                "bounds": [lo.tolist(), hi.tolist()],
                "upVector": s.mesh.up.tolist(),
                "weldPrecision": s.weld_precision,
                "savedSelections": sorted(s.saved_selections),
                "classNames": [c.value for c in SemanticClass],
            }

    def mesh_buffers(self) -> dict:
        with self._lock:
            s = self.session
            class_order = list(SemanticClass)
            class_index = {cls: i for i, cls in enumerate(class_order)}
            return {
                "revision": s.revision,
                "vertexCount": s.mesh.vertex_count,
                "faceCount": s.mesh.face_count,
                "positions": s.mesh.vertices.ravel().tolist(),
                "indices": s.mesh.faces.ravel().tolist(),
                "normals": s.mesh.normals.ravel().tolist(),
                "classNames": [c.value for c in class_order],
                "classes": [class_index[label] for label in s.semantics.labels],
                "selected": [1 if f in s.selection.faces else 0 for f in range(s.mesh.face_count)],
                "upVector": s.mesh.up.tolist(),
            }

    def components(self) -> dict:
        with self._lock:
            return {
                "revision": self.session.revision,
                "components": connected_components(self.session.graph),
            }

    def current_selection(self) -> dict:
        with self._lock:
            return {"revision": self.session.revision, "selection": _selection_payload(self.session.selection)}

    def pick(self, payload: dict) -> dict:
        ray = _parse_ray(payload)
        with self._lock:
            face = pick_first_hit(self.session.mesh, ray)
            return {"revision": self.session.revision, "face": face}

    # -- mutations ----------------------------------------------------------

    def run_segmentation_op(self, payload: dict) -> dict:
        request = _parse_request(payload)
        with self._lock:
            self._check_revision(payload)
            result = run_segmentation(self.session.mesh, self.session.graph, request)
            # a segmentation result replaces the active selection
            self.session.selection = result
            self._bump()
            return {"revision": self.session.revision, "selection": _selection_payload(result)}

    def paint(self, payload: dict) -> dict:
        rays_payload = payload.get("rays")
        if not rays_payload:
            raise RequestError("bad-request", "paint needs a non-empty ray list")
        rays = [_parse_ray(entry) for entry in rays_payload]
        erase = bool(payload.get("erase", False))
        with self._lock:
            self._check_revision(payload)
            self.session.selection = paint_stroke(self.session.mesh, rays, erase, self.session.selection)
            self._bump()
            return {"revision": self.session.revision, "selection": _selection_payload(self.session.selection)}

    def set_selection(self, payload: dict) -> dict:
        with self._lock:
            self._check_revision(payload)
            s = self.session
            mode = payload.get("mode", "faces")
            if mode == "all":
                s.selection = select_all(s.mesh)
            elif mode == "none":
                s.selection = select_none(s.mesh)
            elif mode == "invert":
                s.selection = invert(s.selection)
            elif mode == "faces":
                s.selection = selection_from_faces(s.mesh, payload.get("faces", []))
            else:
                raise RequestError("bad-request", f"unknown selection mode {mode!r}")
            self._bump()
            return {"revision": s.revision, "selection": _selection_payload(s.selection)}

    def save_selection(self, payload: dict) -> dict:
        name = payload.get("name")
        if not name:
            raise RequestError("bad-request", "selection name required")
        with self._lock:
            self._check_revision(payload)
            self.session.saved_selections[str(name)] = self.session.selection
            self._bump()
            return {"revision": self.session.revision, "saved": sorted(self.session.saved_selections)}

    def combine_op(self, payload: dict) -> dict:
        op = payload.get("op")
        name = payload.get("with")
        if not op or not name:
            raise RequestError("bad-request", "combine needs op and the saved selection name")
        with self._lock:
            self._check_revision(payload)
            saved = self.session.saved_selections.get(str(name))
            if saved is None:
                raise RequestError("not-found", f"no saved selection named {name!r}")
            self.session.selection = combine(self.session.selection, saved, str(op))
            self._bump()
            return {"revision": self.session.revision, "selection": _selection_payload(self.session.selection)}

    def set_weld_precision(self, payload: dict) -> dict:
        precision = payload.get("precision")
        with self._lock:
            self._check_revision(payload)
            s = self.session
            if precision is None:
                s.graph = s.base_graph
                s.weld_precision = None
            else:
                precision = float(precision)
                s.graph = weld_graph(s.mesh, s.base_graph, precision)
                s.weld_precision = precision
            self._bump()
            return {
                "revision": s.revision,
                "weldPrecision": s.weld_precision,
                "componentCount": len(connected_components(s.graph)),
            }

    def assign_class(self, payload: dict) -> dict:
        label_text = payload.get("class")
        try:
            label = SemanticClass(label_text)
        except ValueError:
            raise RequestError("parameter-error", f"unknown class {label_text!r}") from None
        with self._lock:
            self._check_revision(payload)
            s = self.session
            s.semantics = assign(s.semantics, s.selection, label)
            self._bump()
            return {
                "revision": s.revision,
                "counts": {cls.value: n for cls, n in s.semantics.counts().items()},
            }

    def suggest(self, payload: dict) -> dict:
        tolerances = payload.get("tolerances") or {}
        kwargs = {}
        for key, arg in (("roof", "roof_tolerance_deg"), ("ground", "ground_tolerance_deg"), ("wall", "wall_tolerance_deg")):
            if key in tolerances:
                kwargs[arg] = float(tolerances[key])
        with self._lock:
            self._check_revision(payload)
            s = self.session
            suggested = suggest_classes(s.mesh, **kwargs)
            response: dict = {"counts": {cls.value: n for cls, n in suggested.counts().items()}}
            if payload.get("apply", False):
                s.semantics = suggested
                self._bump()
            response["revision"] = s.revision
            return response

    def set_up_vector(self, payload: dict) -> dict:
        up = payload.get("up")
        if not isinstance(up, (list, tuple)) or len(up) != 3:
            raise RequestError("bad-request", "up must be [x, y, z]")
        with self._lock:
            self._check_revision(payload)
            self.session.mesh = self.session.mesh.with_up(up)
            self._bump()
            return {"revision": self.session.revision, "upVector": self.session.mesh.up.tolist()}

    def save_session(self, payload: dict) -> dict:
        path = payload.get("path")
        if not path:
            raise RequestError("bad-request", "path required")
        with self._lock:
            s = self.session
            header = [
                SESSION_FORMAT,
                f"model-sha256 {s.model_hash}",
                f"weld-precision {s.weld_precision if s.weld_precision is not None else 'none'}",
                "up-vector " + " ".join(repr(float(v)) for v in s.mesh.up),
            ]
            write_sidecar(s.semantics, path, header=header)
            return {"revision": s.revision, "path": str(path)}

    def load_session(self, payload: dict) -> dict:
        path = payload.get("path")
        if not path:
            raise RequestError("bad-request", "path required")
        with self._lock:
            self._check_revision(payload)
            s = self.session
            try:
                headers = read_sidecar_headers(path)
                semantics = read_sidecar(path, s.mesh.face_count)
            except OSError as exc:
                raise RequestError("io-error", str(exc)) from None
            stored_hash = headers.get("model-sha256")
            if stored_hash and stored_hash != s.model_hash:
                raise RequestError("model-mismatch", "session was recorded against a different model file")
            s.semantics = semantics
            precision_text = headers.get("weld-precision")
            if precision_text and precision_text != "none":
                s.weld_precision = float(precision_text)
                s.graph = weld_graph(s.mesh, s.base_graph, s.weld_precision)
            else:
                s.weld_precision = None
                s.graph = s.base_graph
            up_text = headers.get("up-vector")
            if up_text:
                s.mesh = s.mesh.with_up([float(v) for v in up_text.split()])
            s.selection = select_none(s.mesh)
            s.saved_selections.clear()
            self._bump()
            return {"revision": s.revision, "weldPrecision": s.weld_precision}

    def export_document(self, payload: dict) -> dict:
        name = payload.get("name")
        if not name:
            raise RequestError("bad-request", "document name required")
        with self._lock:
            s = self.session
            document = export_city_gml(
                s.mesh,
                s.semantics,
                str(name),
                corrected_schema_locations=bool(payload.get("correctedSchemaLocations", False)),
                strict_opening_nesting=bool(payload.get("strictOpeningNesting", False)),
                graph=s.graph,
            )
            unclassified = s.semantics.counts().get(SemanticClass.UNCLASSIFIED, 0)
            return {"revision": s.revision, "document": document, "unclassified": unclassified}


_GET_ROUTES = {
    "/api/info": "info",
    "/api/meshBuffers": "mesh_buffers",
    "/api/components": "components",
    "/api/selection": "current_selection",
}

_POST_ROUTES = {
    "/api/segment": "run_segmentation_op",
    "/api/pick": "pick",
    "/api/paint": "paint",
    "/api/selection/set": "set_selection",
    "/api/selection/save": "save_selection",
    "/api/combine": "combine_op",
    "/api/weldPrecision": "set_weld_precision",
    "/api/assign": "assign_class",
    "/api/suggest": "suggest",
    "/api/upVector": "set_up_vector",
    "/api/session/save": "save_session",
    "/api/session/load": "load_session",
    "/api/export": "export_document",
}

_ERROR_STATUS = {"not-found": 404, "stale-revision": 409, "io-error": 500}


class _Handler(BaseHTTPRequestHandler):
    service: SessionService
    static_dir: Path | None = None

    def log_message(self, fmt, *args):  # route access logs through logging
        log.debug("%s %s", self.address_string(), fmt % args)

    def _send_json(self, payload: dict, status: int = 200) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._send_cors()
        self.end_headers()
        self.wfile.write(body)

    def _send_cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _send_error_payload(self, code: str, message: str) -> None:
        status = _ERROR_STATUS.get(code, 400)
        self._send_json({"error": {"code": code, "message": message}}, status=status)

    def _dispatch(self, method_name: str, payload: dict | None = None) -> None:
        method = getattr(self.service, method_name)
        try:
            result = method(payload) if payload is not None else method()
        except RequestError as exc:
            self._send_error_payload(exc.code, exc.message)
        except CitymeshError as exc:
            self._send_error_payload("parameter-error", str(exc))
        except Exception:
            log.exception("internal error handling %s", method_name)
            self._send_json({"error": {"code": "internal", "message": "internal error"}}, status=500)
        else:
            self._send_json(result)

    def do_OPTIONS(self):
        self.send_response(204)
        self._send_cors()
        self.end_headers()

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path in _GET_ROUTES:
            self._dispatch(_GET_ROUTES[path])
            return
        if self.static_dir is not None and not path.startswith("/api/"):
            self._serve_static(path)
            return
        self._send_error_payload("not-found", f"no route for GET {path}")

    def do_POST(self):
        path = self.path.split("?", 1)[0]
        route = _POST_ROUTES.get(path)
        if route is None:
            self._send_error_payload("not-found", f"no route for POST {path}")
            return
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b"{}"
        try:
            payload = json.loads(raw.decode("utf-8")) if raw.strip() else {}
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            self._send_error_payload("bad-request", f"body is not valid JSON: {exc}")
            return
        if not isinstance(payload, dict):
            self._send_error_payload("bad-request", "body must be a JSON object")
            return
        self._dispatch(route, payload)

    def _serve_static(self, path: str) -> None:
        relative = path.lstrip("/") or "index.html"
        target = (self.static_dir / relative).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._send_error_payload("not-found", f"no file for {path}")
            return
        content_types = {
            ".html": "text/html", ".js": "text/javascript", ".mjs": "text/javascript",
            ".css": "text/css", ".json": "application/json", ".obj": "text/plain",
            ".map": "application/json",
        }
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", content_types.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self._send_cors()
        self.end_headers()
        self.wfile.write(body)


def create_server(
    model_path,
    port: int = 0,
    host: str = "127.0.0.1",
    weld_precision: float | None = None,
    static_dir=None,
) -> ThreadingHTTPServer:
    """Load the model, build its graph and return a ready HTTP server.

    Pass port 0 to let the OS choose; the bound port is available as
    server.server_address[1]. The server carries its SessionService as
    server.service.
    """
    session = Session.open(model_path, weld_precision=weld_precision)
    service = SessionService(session)

    class BoundHandler(_Handler):
        pass

    BoundHandler.service = service
    BoundHandler.static_dir = Path(static_dir) if static_dir else None

    server = ThreadingHTTPServer((host, port), BoundHandler)
    server.service = service  # type: ignore[attr-defined]
    return server
