"""Command line entry points: serve, convert, validate, info.

The CITYMESH_LOG environment variable sets the log level (DEBUG, INFO,
WARNING, ERROR); default INFO.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .citygml import export_city_gml, validate_faces
from .errors import CitymeshError
from .graph import build_base_graph, connected_components
from .mesh import load_obj
from .semantics import read_sidecar
from .service import create_server

log = logging.getLogger(__name__)


def _configure_logging() -> None:
    level_name = os.environ.get("CITYMESH_LOG", "INFO").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def cmd_serve(args) -> int:
    server = create_server(
        args.model,
        port=args.port,
        host=args.host,
        weld_precision=args.weld,
        static_dir=args.static,
    )
    host, port = server.server_address[:2]
    print(f"serving {args.model} on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def cmd_convert(args) -> int:
    mesh = load_obj(args.model)
    semantic_map = read_sidecar(args.session, mesh.face_count)
    name = args.name or Path(args.out).stem
    document = export_city_gml(
        mesh, semantic_map, name,
        corrected_schema_locations=args.corrected_schema,
    )
    Path(args.out).write_text(document, encoding="utf-8")
    print(f"wrote {args.out} ({mesh.face_count} polygons)")
    return 0


def cmd_validate(args) -> int:
    # keep degenerate faces so they show up in the report instead of
    # silently vanishing at load
    mesh = load_obj(args.model, drop_degenerate=False)
    issues = validate_faces(mesh)
    for face, code in issues:
        print(f"face {face}: {code}")
    print(f"{len(issues)} issue(s) in {mesh.face_count} face(s)")
    return 0


def cmd_info(args) -> int:
    mesh = load_obj(args.model)
    lo, hi = mesh.bounds()
    components = connected_components(build_base_graph(mesh))
    print(f"model: {args.model}")
    print(f"vertices: {mesh.vertex_count}")
    print(f"faces: {mesh.face_count}")
    print(f"dropped degenerate: {mesh.dropped_degenerate}")
    print(f"bounds: {lo.tolist()} .. {hi.tolist()}")
    print(f"components: {len(components)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citymesh",
        description="Semi-automatic conversion of OBJ building meshes to CityGML 2.0 LOD3",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the interactive session service")
    serve.add_argument("--port", type=int, default=8765, help="port to bind (0 picks a free one)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--model", required=True, help="OBJ model file")
    serve.add_argument("--weld", type=float, default=None, help="initial weld precision")
    serve.add_argument("--static", default=None, help="directory of UI files to serve at /")
    serve.set_defaults(func=cmd_serve)

    convert = sub.add_parser("convert", help="batch replay: model + session sidecar to CityGML")
    convert.add_argument("--model", required=True)
    convert.add_argument("--session", required=True, help="sidecar or saved session file")
    convert.add_argument("--out", required=True, help="output CityGML path")
    convert.add_argument("--name", default=None, help="document name (default: output stem)")
    convert.add_argument("--corrected-schema", action="store_true", dest="corrected_schema",
                         help="emit 2.0 schema locations instead of the stock 1.0 ones")
    convert.set_defaults(func=cmd_convert)

    validate = sub.add_parser("validate", help="report per-face geometry issues")
    validate.add_argument("--model", required=True)
    validate.set_defaults(func=cmd_validate)

    info = sub.add_parser("info", help="print mesh statistics")
    info.add_argument("--model", required=True)
    info.set_defaults(func=cmd_info)

    return parser


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CitymeshError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
