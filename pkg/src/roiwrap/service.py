"""Embedded JSON-over-HTTP API backing the labeling UI.

Endpoints:

    POST /api/fetch                  {url} -> {source_ref, decoded, rendered_text}
    POST /api/preview                {source_ref|source, roi_spec} -> dry-run induction
    POST /api/templates              {source_ref, roi_spec} -> {template_id}
    GET  /api/templates              -> [template summaries]
    GET  /api/templates/{id}         -> stored template document, byte-identical
    POST /api/templates/{id}/check   {page_ref?, auto_replace?} -> change report

Static assets are served from an optional ui directory at /. The server is
an operator tool bound to localhost by default; there is no authentication.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .change_detector import recheck
from .errors import (
    AmbiguousAttribute,
    AmbiguousRegion,
    AmbiguousRoi,
    AttributeNotFound,
    DelimiterNotFound,
    HttpError,
    NetworkError,
    RegionNotFound,
    RoiLost,
    RoiNotFound,
    TemplateNotFound,
    TooLarge,
    error_code,
)
from .extractor import extract
from .fetcher import FetchOptions, fetch_page
from .page_model import DEFAULT_TAG_CLASSES, TagClassConfig, build_page
from .segmenter import RoiSpec
from .template_store import (
    induce_template,
    list_templates,
    load_template,
    save_template,
)

_MAX_BODY = 20_000_000

_STATUS = {
    RoiNotFound: 422,
    AmbiguousRoi: 422,
    AttributeNotFound: 422,
    AmbiguousAttribute: 422,
    RegionNotFound: 422,
    DelimiterNotFound: 422,
    AmbiguousRegion: 422,
    TemplateNotFound: 404,
    RoiLost: 409,
    NetworkError: 502,
    HttpError: 502,
    FileNotFoundError: 502,
    TooLarge: 413,
    ValueError: 400,
    KeyError: 400,
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _api_error(exc: BaseException) -> ApiError:
    for klass, status in _STATUS.items():
        if isinstance(exc, klass):
            msg = str(exc) or type(exc).__name__
            return ApiError(status, error_code(exc), msg)
    return ApiError(500, "internal", str(exc) or type(exc).__name__)


class TemplateService:
    """Endpoint implementations, independent of the HTTP plumbing."""

    def __init__(
        self,
        store_dir: str | Path,
        config: TagClassConfig = DEFAULT_TAG_CLASSES,
        fetch_options: FetchOptions | None = None,
    ):
        self.store_dir = Path(store_dir)
        self.config = config
        self.fetch_options = fetch_options or FetchOptions()
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._locks_guard = threading.Lock()

    def _lock_for(self, template_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks[template_id]

    def _bundle(self, payload: dict):
        if payload.get("source") is not None:
            return build_page(payload["source"], self.config, source_ref=payload.get("source_ref", "inline"))
        ref = payload.get("source_ref") or payload.get("url")
        if not ref:
            raise ValueError("need a source_ref, url, or inline source")
        return fetch_page(ref, self.config, self.fetch_options)

    # -- endpoints ---------------------------------------------------------

    def handle_fetch(self, payload: dict) -> dict:
        url = payload.get("url", "")
        if not url:
            raise ValueError("url must be non-empty")
        bundle = fetch_page(url, self.config, self.fetch_options)
        return {
            "source_ref": url,
            "decoded": bundle.source,
            "rendered_text": bundle.rendered.text,
        }

    def handle_preview(self, payload: dict) -> dict:
        roi = RoiSpec.from_json_dict(payload["roi_spec"])
        bundle = self._bundle(payload)
        template = induce_template(bundle, roi, source_ref=bundle.source_ref, config=self.config)
        record = extract(template, bundle, self.config)
        diagnostics = []
        for d in template.delimiters:
            if d.start_tag is None and d.end_tag is None:
                diagnostics.append(
                    f"attribute {d.label!r} has no boundary tags; its value is cut only by its neighbors"
                )
        return {
            "signature": template.signature.to_json_dict(),
            "delimiters": [
                {"label": d.label, "start_tag": d.start_tag, "end_tag": d.end_tag, "ordinal": d.ordinal}
                for d in template.delimiters
            ],
            "extraction": {"values": [{"label": l, "text": t} for l, t in record.values]},
            "diagnostics": diagnostics,
        }

    def handle_save(self, payload: dict) -> dict:
        roi = RoiSpec.from_json_dict(payload["roi_spec"])
        ref = payload.get("source_ref")
        if not ref:
            raise ValueError("source_ref must be non-empty")
        bundle = fetch_page(ref, self.config, self.fetch_options)
        template = induce_template(bundle, roi, source_ref=ref, config=self.config)
        with self._lock_for(template.id):
            save_template(template, self.store_dir)
        return {"template_id": template.id}

    def handle_list(self) -> list[dict]:
        out = []
        for tid in list_templates(self.store_dir):
            t = load_template(tid, self.store_dir)
            out.append({
                "id": t.id,
                "source_ref": t.source_ref,
                "created_at": t.created_at,
                "updated_at": t.updated_at,
                "symmetry": t.signature.symmetry.value,
                "labels": [d.label for d in t.delimiters],
            })
        return out

    def handle_get_bytes(self, template_id: str) -> bytes:
        path = self.store_dir / f"{template_id}.json"
        if not path.is_file():
            raise TemplateNotFound(f"no template {template_id!r}")
        return path.read_bytes()

    def handle_check(self, template_id: str, payload: dict) -> dict:
        template = load_template(template_id, self.store_dir)
        page_ref = payload.get("page_ref") or template.source_ref
        auto_replace = payload.get("auto_replace", True)
        bundle = fetch_page(page_ref, self.config, self.fetch_options)
        with self._lock_for(template_id):
            report = recheck(template, bundle, self.config,
                             auto_replace=bool(auto_replace), store_dir=self.store_dir)
        return report.to_json_dict()


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json",
    ".map": "application/json",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
}


def _make_handler(service: TemplateService, ui_dir: str | None):
    ui_root = Path(ui_dir).resolve() if ui_dir else None

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"
        server_version = "roiwrap"

        def log_message(self, fmt, *args):  # quiet; the CLI owns stderr
            pass

        def _send(self, status: int, body: bytes, content_type: str = "application/json") -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_json(self, status: int, doc) -> None:
            self._send(status, (json.dumps(doc) + "\n").encode("utf-8"))

        def _send_error_doc(self, err: ApiError) -> None:
            self._send_json(err.status, {"code": err.code, "message": err.message})

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length > _MAX_BODY:
                raise ApiError(413, "too_large", "request body too large")
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                doc = json.loads(raw.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise ApiError(400, "usage", f"bad JSON body: {exc}") from exc
            if not isinstance(doc, dict):
                raise ApiError(400, "usage", "JSON body must be an object")
            return doc

        def do_GET(self):
            try:
                path = self.path.split("?", 1)[0]
                if path == "/api/templates":
                    self._send_json(200, service.handle_list())
                    return
                if path.startswith("/api/templates/"):
                    tid = path[len("/api/templates/"):]
                    if "/" not in tid:
                        self._send(200, service.handle_get_bytes(tid))
                        return
                if path.startswith("/api/"):
                    self._send_json(404, {"code": "not_found", "message": f"no endpoint {path}"})
                    return
                self._serve_static(path)
            except ApiError as err:
                self._send_error_doc(err)
            except Exception as exc:  # noqa: BLE001 - every error becomes an API document
                self._send_error_doc(_api_error(exc))

        def do_POST(self):
            try:
                path = self.path.split("?", 1)[0]
                body = self._read_body()
                if path == "/api/fetch":
                    self._send_json(200, service.handle_fetch(body))
                elif path == "/api/preview":
                    self._send_json(200, service.handle_preview(body))
                elif path == "/api/templates":
                    self._send_json(200, service.handle_save(body))
                elif path.startswith("/api/templates/") and path.endswith("/check"):
                    tid = path[len("/api/templates/"):-len("/check")]
                    self._send_json(200, service.handle_check(tid, body))
                else:
                    self._send_json(404, {"code": "not_found", "message": f"no endpoint {path}"})
            except ApiError as err:
                self._send_error_doc(err)
            except Exception as exc:  # noqa: BLE001
                self._send_error_doc(_api_error(exc))

        def _serve_static(self, path: str) -> None:
            if ui_root is None:
                self._send_json(404, {"code": "not_found", "message": "no ui directory configured"})
                return
            rel = path.lstrip("/") or "index.html"
            target = (ui_root / rel).resolve()
            if ui_root not in target.parents and target != ui_root:
                self._send_json(404, {"code": "not_found", "message": "outside ui directory"})
                return
            if target.is_dir():
                target = target / "index.html"
            if not target.is_file():
                self._send_json(404, {"code": "not_found", "message": f"no such asset {path}"})
                return
            ctype = _CONTENT_TYPES.get(target.suffix.lower(), "application/octet-stream")
            self._send(200, target.read_bytes(), ctype)

    return Handler


def make_server(
    store_dir: str | Path,
    host: str = "127.0.0.1",
    port: int = 0,
    *,
    ui_dir: str | None = None,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
    fetch_options: FetchOptions | None = None,
) -> ThreadingHTTPServer:
    service = TemplateService(store_dir, config, fetch_options)
    handler = _make_handler(service, ui_dir)
    return ThreadingHTTPServer((host, port), handler)


def run_server(
    store_dir: str | Path,
    host: str,
    port: int,
    *,
    ui_dir: str | None = None,
    config: TagClassConfig = DEFAULT_TAG_CLASSES,
    fetch_options: FetchOptions | None = None,
) -> None:
    import sys

    server = make_server(store_dir, host, port, ui_dir=ui_dir, config=config, fetch_options=fetch_options)
    bound_host, bound_port = server.server_address[:2]
    print(f"roiwrap service listening on {bound_host}:{bound_port}", file=sys.stderr, flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
