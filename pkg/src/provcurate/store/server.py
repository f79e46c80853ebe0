"""Minimal SPARQL 1.1 Protocol endpoint over a MemoryQuadStore.

Serves query (GET and form POST) and update (form POST) with JSON results,
enough for the protocol client to treat it as a real endpoint. Used by the
differential test suite and by `provcurate serve --embedded` deployments.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from ..errors import CurationError, ParseError
from .base import term_to_json
from .memory import MemoryQuadStore
from .sparql import SelectQuery, parse_query

__all__ = ["SparqlEndpointServer"]


def _results_document(rows) -> dict:
    variables = sorted({var for row in rows for var in row})
    bindings = [
        {var: term_to_json(term) for var, term in row.items()} for row in rows
    ]
    return {"head": {"vars": variables}, "results": {"bindings": bindings}}


class _Handler(BaseHTTPRequestHandler):
    store: MemoryQuadStore  # set by the server factory

    def log_message(self, *args):  # quiet: tests run hundreds of requests
        pass

    def _send(self, status: int, body: dict | str, content_type: str = "application/json"):
        payload = (json.dumps(body) if isinstance(body, dict) else body).encode()
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def _run_query(self, query: str):
        try:
            parsed = parse_query(query)
        except ParseError as exc:
            self._send(400, {"error": str(exc)})
            return
        try:
            if isinstance(parsed, SelectQuery):
                self._send(200, _results_document(self.store.select(query)))
            else:
                self._send(200, {"head": {}, "boolean": self.store.ask(query)})
        except CurationError as exc:
            self._send(500, {"error": str(exc)})

    def do_GET(self):
        parsed = urlparse(self.path)
        params = parse_qs(parsed.query)
        query = params.get("query", [None])[0]
        if query is None:
            self._send(400, {"error": "missing query parameter"})
            return
        self._run_query(query)

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length).decode()
        content_type = self.headers.get("Content-Type", "")
        if content_type.startswith("application/x-www-form-urlencoded"):
            params = parse_qs(raw)
            query = params.get("query", [None])[0]
            update = params.get("update", [None])[0]
        elif content_type.startswith("application/sparql-query"):
            query, update = raw, None
        elif content_type.startswith("application/sparql-update"):
            query, update = None, raw
        else:
            self._send(415, {"error": f"unsupported content type {content_type!r}"})
            return
        if query is not None:
            self._run_query(query)
        elif update is not None:
            try:
                self.store.update(update)
                self._send(204, "")
            except ParseError as exc:
                self._send(400, {"error": str(exc)})
            except CurationError as exc:
                self._send(500, {"error": str(exc)})
        else:
            self._send(400, {"error": "missing query or update parameter"})


class SparqlEndpointServer:
    """Threaded HTTP wrapper; start() returns the endpoint URL."""

    def __init__(self, store: MemoryQuadStore, host: str = "127.0.0.1", port: int = 0):
        handler = type("BoundHandler", (_Handler,), {"store": store})
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/sparql"

    def start(self) -> str:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self.url

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread:
            self._thread.join(timeout=5)
