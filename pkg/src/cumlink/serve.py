"""Local HTTP endpoints backing the latent-scale explorer.

POST /forward maps cutpoints plus a latent shift and spread to category
probabilities; POST /cutpoints inverts observed proportions; GET /model
returns the loaded archive; GET /health reports liveness.  All bodies
are JSON.  The server binds to localhost unless told otherwise and
answers CORS preflights only for localhost origins, because the page it
serves is the sole intended client.
"""

from __future__ import annotations

import json
import mimetypes
import os
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

import numpy as np

from . import __version__
from .links import LINKS
from .simulate import ForwardModel, cutpoints_from_proportions, forward_probabilities

_MAX_BODY = 1 << 20

_LOCAL_ORIGIN = re.compile(
    r"^https?://(localhost|127\.0\.0\.1|\[::1\])(:\d+)?$"
)


class _FieldError(ValueError):
    """A named-field validation failure; carries the HTTP status."""

    def __init__(self, field: str, message: str, status: int = 400):
        super().__init__(message)
        self.field = field
        self.status = status


def _require_list_of_numbers(body: dict, field: str, minimum: int) -> np.ndarray:
    if field not in body:
        raise _FieldError(field, f"{field} is required")
    raw = body[field]
    if not isinstance(raw, list) or len(raw) < minimum:
        raise _FieldError(
            field, f"{field} must be a list of at least {minimum} numbers"
        )
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
        raise _FieldError(field, f"{field} must contain only numbers")
    values = np.asarray(raw, dtype=float)
    if not np.all(np.isfinite(values)):
        raise _FieldError(field, f"{field} must be finite")
    return values


def _optional_number(body: dict, field: str, default: float) -> float:
    if field not in body:
        return default
    raw = body[field]
    if not isinstance(raw, (int, float)) or isinstance(raw, bool):
        raise _FieldError(field, f"{field} must be a number")
    value = float(raw)
    if not np.isfinite(value):
        raise _FieldError(field, f"{field} must be finite")
    return value


def _link_from(body: dict):
    name = body.get("link", "probit")
    if not isinstance(name, str) or name not in LINKS:
        raise _FieldError(
            "link", f"link must be one of {sorted(LINKS)}"
        )
    return LINKS[name]


def forward_response(body: dict) -> dict:
    tau = _require_list_of_numbers(body, "tau", minimum=1)
    if np.any(np.diff(tau) <= 0):
        raise _FieldError(
            "tau", "tau must be strictly increasing", status=422
        )
    shift = _optional_number(body, "shift", 0.0)
    scale = _optional_number(body, "scale", 1.0)
    if scale <= 0:
        raise _FieldError("scale", "scale must be positive")
    link = _link_from(body)
    model = ForwardModel(cutpoints=tau, shift=shift, scale=scale, link=link)
    probs = forward_probabilities(model)
    return {"probs": [float(p) for p in probs]}


def cutpoints_response(body: dict) -> dict:
    props = _require_list_of_numbers(body, "props", minimum=2)
    link = _link_from(body)
    try:
        tau = cutpoints_from_proportions(props, link)
    except ValueError as exc:
        raise _FieldError("props", str(exc)) from exc
    return {"tau": [float(t) for t in tau]}


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = f"cumlink/{__version__}"

    # ------------------------------------------------------ plumbing

    def log_message(self, format: str, *args) -> None:  # noqa: A002
        pass  # deterministic stdout; the CLI prints the one startup line

    def _cors(self) -> list[tuple[str, str]]:
        origin = self.headers.get("Origin", "")
        if origin == "null" or _LOCAL_ORIGIN.match(origin):
            return [
                ("Access-Control-Allow-Origin", origin),
                ("Vary", "Origin"),
            ]
        return []

    def _send_json(self, status: int, doc: Any) -> None:
        payload = json.dumps(doc).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        for name, value in self._cors():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(payload)

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length <= 0:
            raise _FieldError("body", "a JSON body is required")
        if length > _MAX_BODY:
            raise _FieldError("body", "body too large")
        raw = self.rfile.read(length)
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise _FieldError("body", f"body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise _FieldError("body", "body must be a JSON object")
        return body

    # ------------------------------------------------------- routes

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Access-Control-Max-Age", "600")
        self.send_header("Content-Length", "0")
        for name, value in self._cors():
            self.send_header(name, value)
        self.end_headers()

    def do_GET(self) -> None:
        path = self.path.split("?", 1)[0]
        if path == "/health":
            self._send_json(200, {"status": "ok", "version": __version__})
            return
        if path == "/model":
            doc = self.server.model_doc  # type: ignore[attr-defined]
            if doc is None:
                self._send_json(404, {"error": "no model loaded"})
                return
            self._send_json(200, doc)
            return
        self._send_static(path)

    def do_POST(self) -> None:
        path = self.path.split("?", 1)[0]
        handlers = {"/forward": forward_response, "/cutpoints": cutpoints_response}
        handler = handlers.get(path)
        if handler is None:
            self._send_json(404, {"error": f"no such endpoint: {path}"})
            return
        try:
            body = self._read_body()
            self._send_json(200, handler(body))
        except _FieldError as exc:
            self._send_json(exc.status, {"error": str(exc), "field": exc.field})

    # -------------------------------------------------- static files

    def _send_static(self, path: str) -> None:
        root = self.server.static_dir  # type: ignore[attr-defined]
        if root is None:
            self._send_json(404, {"error": f"no such endpoint: {path}"})
            return
        relative = path.lstrip("/") or "index.html"
        full = os.path.realpath(os.path.join(root, relative))
        # realpath plus a prefix check keeps ../ and symlinks inside root
        if os.path.commonpath([full, os.path.realpath(root)]) != os.path.realpath(root):
            self._send_json(403, {"error": "path escapes the static root"})
            return
        if os.path.isdir(full):
            full = os.path.join(full, "index.html")
        if not os.path.isfile(full):
            self._send_json(404, {"error": f"no such file: {path}"})
            return
        ctype = mimetypes.guess_type(full)[0] or "application/octet-stream"
        with open(full, "rb") as fh:
            payload = fh.read()
        self.send_response(200)
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(payload)))
        for name, value in self._cors():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(payload)


def make_server(
    host: str = "127.0.0.1",
    port: int = 8000,
    model_doc: dict | None = None,
    static_dir: str | None = None,
) -> ThreadingHTTPServer:
    """A configured server; port 0 picks a free port (server_address[1])."""
    server = ThreadingHTTPServer((host, port), _Handler)
    server.model_doc = model_doc  # type: ignore[attr-defined]
    server.static_dir = static_dir  # type: ignore[attr-defined]
    return server


def run_server(
    host: str = "127.0.0.1",
    port: int = 8000,
    model_doc: dict | None = None,
    static_dir: str | None = None,
) -> None:
    server = make_server(host, port, model_doc, static_dir)
    actual = server.server_address[1]
    print(f"serving on http://{host}:{actual} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()


def serve_in_thread(
    host: str = "127.0.0.1",
    port: int = 0,
    model_doc: dict | None = None,
    static_dir: str | None = None,
) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Start a server on a background thread; caller owns shutdown."""
    server = make_server(host, port, model_doc, static_dir)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread
