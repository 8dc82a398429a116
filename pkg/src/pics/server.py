"""Read-only JSON API and static hosting for the browser gallery.

The service snapshots the catalog and index at startup and never mutates
them; restart after a new ingest to pick up changes.
"""

from __future__ import annotations

import json
import mimetypes
from dataclasses import asdict, dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, unquote, urlsplit

from .catalog import Catalog, catalog_digest, load_catalog, record_to_obj
from .errors import EmptyQuery, InvariantViolation, StaleIndex
from .searchcore import InvertedIndex, build_index, parse_query, search

DEFAULT_LIMIT = 20
MAX_LIMIT = 100

_IMAGE_TYPES = {
    ".jpg": "image/jpeg",
    ".jpeg": "image/jpeg",
    ".png": "image/png",
    ".gif": "image/gif",
    ".webp": "image/webp",
}


@dataclass
class ServeConfig:
    catalog_file: Path
    bind_address: str = "127.0.0.1:8080"
    static_dir: Path | None = None


class PicsRequestHandler(BaseHTTPRequestHandler):
    server_version = "pics"

    def do_GET(self):  # noqa: N802 - http.server naming
        url = urlsplit(self.path)
        path = unquote(url.path)
        if path == "/api/search":
            self._search(parse_qs(url.query))
        elif path == "/api/stats":
            self._stats()
        elif path.startswith("/api/images/"):
            rest = path[len("/api/images/"):]
            if rest.endswith("/file"):
                self._file(rest[: -len("/file")])
            else:
                self._record(rest)
        else:
            self._static(path)

    def _send_json(self, status: int, obj) -> None:
        body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _search(self, params: dict[str, list[str]]) -> None:
        raw_limit = params.get("limit", [str(DEFAULT_LIMIT)])[0]
        try:
            limit = int(raw_limit)
        except ValueError:
            self._send_json(400, {"error": "invalid_limit"})
            return
        if limit < 1:
            self._send_json(400, {"error": "invalid_limit"})
            return
        limit = min(limit, MAX_LIMIT)
        try:
            query = parse_query(params.get("q", [""])[0])
        except EmptyQuery:
            self._send_json(400, {"error": "empty_query"})
            return
        catalog: Catalog = self.server.catalog
        ranked = search(self.server.index, catalog, query, limit=len(catalog.records) or 1)
        results = []
        for result in ranked[:limit]:
            obj = asdict(result)
            obj["file_url"] = f"/api/images/{result.id}/file"
            results.append(obj)
        self._send_json(200, {"query": query.terms, "total": len(ranked), "results": results})

    def _stats(self) -> None:
        catalog: Catalog = self.server.catalog
        self._send_json(
            200,
            {
                "images": len(catalog.records),
                "terms": len(self.server.index.terms),
                "tagged": sum(1 for r in catalog.records.values() if r.tags),
            },
        )

    def _record(self, record_id: str) -> None:
        record = self.server.catalog.records.get(record_id)
        if record is None:
            self._send_json(404, {"error": "not_found"})
            return
        self._send_json(200, record_to_obj(record))

    def _file(self, record_id: str) -> None:
        catalog: Catalog = self.server.catalog
        record = catalog.records.get(record_id)
        if record is None:
            self._send_json(404, {"error": "not_found"})
            return
        file_path = (catalog.root / record.path).resolve()
        if not file_path.is_file():
            self._send_json(404, {"error": "file_missing"})
            return
        data = file_path.read_bytes()
        self.send_response(200)
        self.send_header(
            "Content-Type", _IMAGE_TYPES.get(file_path.suffix.lower(), "application/octet-stream")
        )
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _static(self, path: str) -> None:
        static_dir: Path | None = self.server.static_dir
        if static_dir is None:
            self._send_json(404, {"error": "not_found"})
            return
        rel = path.lstrip("/") or "index.html"
        root = static_dir.resolve()
        full = (root / rel).resolve()
        if root not in full.parents and full != root:
            self._send_json(404, {"error": "not_found"})
            return
        if full.is_dir():
            full = full / "index.html"
        if not full.is_file():
            self._send_json(404, {"error": "not_found"})
            return
        data = full.read_bytes()
        content_type = mimetypes.guess_type(str(full))[0] or "application/octet-stream"
        self.send_response(200)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def parse_bind_address(bind_address: str) -> tuple[str, int]:
    host, _, port = bind_address.rpartition(":")
    if not host or not port.isdigit():
        raise InvariantViolation(f"bind_address is not host:port: {bind_address!r}")
    return host, int(port)


def create_server(config: ServeConfig, index: InvertedIndex | None = None) -> ThreadingHTTPServer:
    """Load the snapshot and return a ready-to-run threading HTTP server."""
    catalog = load_catalog(config.catalog_file)
    if index is None:
        index = build_index(catalog)
    elif index.built_from != catalog_digest(catalog):
        raise StaleIndex("index does not match the catalog file; rebuild with `pics index`")
    host, port = parse_bind_address(config.bind_address)
    server = ThreadingHTTPServer((host, port), PicsRequestHandler)
    server.catalog = catalog
    server.index = index
    server.static_dir = Path(config.static_dir) if config.static_dir else None
    return server


def serve(config: ServeConfig, index: InvertedIndex | None = None) -> None:
    server = create_server(config, index)
    host, port = server.server_address[0], server.server_address[1]
    print(f"pics serving http://{host}:{port}/ ({len(server.catalog.records)} images)")
    try:
        server.serve_forever()
    finally:
        server.server_close()
