"""HTTP facade over the pipeline and hierarchy for the explorer client.

Endpoints (all JSON): GET /api/config, GET /api/layout?node=<id>,
GET /api/measures?node=<id>, POST /api/zoom {"node": id, "cells": [[c,r],..]}.
Errors carry {"error": code, "detail": text}.  Nodes are immutable; the
registry only grows, so concurrent reads need no locking and zooms take a
short registration lock.
"""

from __future__ import annotations

import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Optional
from urllib.parse import parse_qs, urlparse

from .bench import PipelineId, run_pipeline
from .hierarchy import HierarchyNode, build_root, zoom
from .measures import MeasureReport, report
from .model import GridSpec, LayoutError, SampleSet
from .render import palette_for


def pipeline_layout_fn(pipeline: PipelineId, lambda_mode: str | float = "adaptive"):
    def fn(samples: SampleSet, spec: GridSpec, seed: int):
        result = run_pipeline(samples, spec, pipeline, seed, lambda_mode)
        return result.layout, result.baseline

    return fn


class SessionState:
    """Root hierarchy node plus the registry of every node served so far."""

    def __init__(
        self,
        samples: SampleSet,
        spec: GridSpec,
        seed: int,
        pipeline: PipelineId = PipelineId.G_L_T,
        lambda_mode: str | float = "adaptive",
    ):
        self.spec = spec
        self.seed = seed
        self.pipeline = pipeline
        self.layout_fn = pipeline_layout_fn(pipeline, lambda_mode)
        root = build_root(samples, spec, seed, layout_fn=self.layout_fn)
        self.nodes: dict[str, HierarchyNode] = {"root": root}
        self.reports: dict[str, MeasureReport] = {
            "root": report(root.layout, root.input_layout)
        }
        self.palette = palette_for({s.cluster for s in samples.samples})
        self._lock = threading.Lock()
        self._counter = 0

    def get(self, node_id: str) -> Optional[HierarchyNode]:
        return self.nodes.get(node_id)

    def child_seed(self, node_id: str, cells: list[tuple[int, int]]) -> int:
        key = f"{self.seed}|{node_id}|{sorted(cells)}".encode()
        return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") % (2**63)

    def zoom_into(self, node_id: str, cells: list[tuple[int, int]]) -> HierarchyNode:
        node = self.nodes.get(node_id)
        if node is None:
            raise KeyError(node_id)
        child_seed = self.child_seed(node_id, cells)
        child = zoom(
            node,
            cells,
            self.spec,
            child_seed,
            layout_fn=self.layout_fn,
            node_id="pending",
        )
        with self._lock:
            self._counter += 1
            child_id = f"{node_id}/{self._counter}"
            child = HierarchyNode(
                id=child_id,
                representative_ids=child.representative_ids,
                assigned=child.assigned,
                layout=child.layout,
                input_layout=child.input_layout,
                parent=node_id,
                anchor_positions=child.anchor_positions,
                universe=child.universe,
            )
            self.nodes[child_id] = child
            self.reports[child_id] = report(child.layout, child.input_layout)
        return child

    def breadcrumb(self, node_id: str) -> list[str]:
        trail = [node_id]
        node = self.nodes.get(node_id)
        while node is not None and node.parent is not None:
            trail.append(node.parent)
            node = self.nodes.get(node.parent)
        return list(reversed(trail))

    def node_payload(self, node: HierarchyNode) -> dict:
        layout = node.layout
        spec = layout.spec
        cells = []
        for i, cell in enumerate(layout.assignment.cell_of):
            c, r = spec.cell_of_index(cell)
            s = layout.samples.samples[i]
            assigned = node.assigned.get(s.id, ())
            cells.append(
                {
                    "col": c,
                    "row": r,
                    "sample": s.id,
                    "cluster": s.cluster,
                    "meta": dict(s.meta) if s.meta else None,
                    "assigned": list(assigned),
                }
            )
        cells.sort(key=lambda rec: (rec["row"], rec["col"]))
        return {
            "node": node.id,
            "parent": node.parent,
            "grid": {"w": spec.width, "h": spec.height},
            "cells": cells,
            "breadcrumb": self.breadcrumb(node.id),
            "report": self.reports[node.id].as_dict(),
        }


class _Handler(BaseHTTPRequestHandler):
    state: SessionState
    static_dir: Optional[Path] = None

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send(self, code: int, payload: dict) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _error(self, code: int, err: str, detail: str) -> None:
        self._send(code, {"error": err, "detail": detail})

    def do_GET(self) -> None:
        url = urlparse(self.path)
        query = parse_qs(url.query)
        if url.path == "/api/config":
            self._send(
                200,
                {
                    "grid": {"w": self.state.spec.width, "h": self.state.spec.height},
                    "pipeline": self.state.pipeline.value,
                    "seed": self.state.seed,
                    "palette": self.state.palette,
                },
            )
            return
        if url.path in ("/api/layout", "/api/measures"):
            node_id = query.get("node", ["root"])[0]
            node = self.state.get(node_id)
            if node is None:
                self._error(404, "unknown_node", f"no node {node_id!r}")
                return
            if url.path == "/api/measures":
                self._send(
                    200, {"node": node_id, "report": self.state.reports[node_id].as_dict()}
                )
            else:
                self._send(200, self.state.node_payload(node))
            return
        if self.static_dir is not None:
            self._serve_static(url.path)
            return
        self._error(404, "not_found", self.path)

    def do_POST(self) -> None:
        url = urlparse(self.path)
        if url.path != "/api/zoom":
            self._error(404, "not_found", self.path)
            return
        try:
            length = int(self.headers.get("Content-Length", "0"))
            data = json.loads(self.rfile.read(length) or b"{}")
            node_id = data.get("node", "root")
            cells = [(int(c), int(r)) for c, r in data.get("cells", [])]
        except (ValueError, TypeError) as exc:
            self._error(400, "bad_request", str(exc))
            return
        try:
            child = self.state.zoom_into(node_id, cells)
        except KeyError:
            self._error(404, "unknown_node", f"no node {node_id!r}")
            return
        except LayoutError as exc:
            self._error(400, "invalid_selection", str(exc))
            return
        self._send(200, self.state.node_payload(child))

    def _serve_static(self, path: str) -> None:
        rel = path.lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        if not str(target).startswith(str(self.static_dir.resolve())) or not target.is_file():
            self._error(404, "not_found", path)
            return
        types = {
            ".html": "text/html",
            ".js": "text/javascript",
            ".css": "text/css",
            ".svg": "image/svg+xml",
            ".json": "application/json",
        }
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type", types.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


def make_server(
    state: SessionState,
    host: str = "127.0.0.1",
    port: int = 0,
    static_dir: Optional[str | Path] = None,
) -> ThreadingHTTPServer:
    handler = type(
        "SessionHandler",
        (_Handler,),
        {"state": state, "static_dir": Path(static_dir) if static_dir else None},
    )
    return ThreadingHTTPServer((host, port), handler)
