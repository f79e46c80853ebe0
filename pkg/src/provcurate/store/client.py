"""SPARQL 1.1 Protocol client over HTTP.

Queries go as form-encoded POSTs asking for SPARQL JSON results; updates
as form-encoded POSTs of the rendered request. Transient failures retry
with linear backoff up to the configured attempt budget, then surface as
StoreError. Blank nodes in responses are skolemized with labels stable
within one response.
"""

from __future__ import annotations

import time
import uuid

import httpx

from ..errors import StoreError
from ..model import GraphDelta
from ..terms import BlankNode, Iri, Literal, Term
from .base import EndpointConfig, Store
from .updates import render_update

__all__ = ["SparqlClient"]

_RESULTS_JSON = "application/sparql-results+json"


class SparqlClient(Store):
    def __init__(
        self,
        config: EndpointConfig,
        base_iri: str = "http://localhost/",
        transport: httpx.BaseTransport | None = None,
    ):
        self.config = config
        self.base_iri = base_iri.rstrip("/") + "/"
        self._http = httpx.Client(timeout=config.timeout_seconds, transport=transport)

    def close(self):
        self._http.close()

    # -- protocol --------------------------------------------------------------

    def _post(self, endpoint: str, payload: dict, accept: str) -> httpx.Response:
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt:
                time.sleep(self.config.backoff_seconds * attempt)
            try:
                response = self._http.post(endpoint, data=payload, headers={"Accept": accept})
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = StoreError(
                    f"endpoint {endpoint} answered {response.status_code}: {response.text[:200]}"
                )
                continue
            if response.status_code >= 400:
                raise StoreError(
                    f"endpoint {endpoint} rejected the request "
                    f"({response.status_code}): {response.text[:500]}"
                )
            return response
        raise StoreError(
            f"endpoint {endpoint} unreachable after {self.config.max_attempts} attempt(s): {last_error}"
        )

    def _query(self, endpoint: str, query: str):
        response = self._post(endpoint, {"query": query}, _RESULTS_JSON)
        try:
            return response.json()
        except ValueError as exc:
            raise StoreError(f"endpoint {endpoint} returned non-JSON results: {exc}")

    def _rows(self, body: dict) -> list[dict[str, Term]]:
        bindings = body.get("results", {}).get("bindings")
        if bindings is None:
            raise StoreError("malformed SPARQL results document (no results.bindings)")
        skolems: dict[str, Iri] = {}
        rows: list[dict[str, Term]] = []
        for binding in bindings:
            row: dict[str, Term] = {}
            for var, cell in binding.items():
                row[var] = self._term(cell, skolems)
            rows.append(row)
        return rows

    def _term(self, cell: dict, skolems: dict[str, Iri]) -> Term:
        kind = cell.get("type")
        if kind == "uri":
            return Iri(cell["value"])
        if kind == "bnode":
            label = cell["value"]
            if label not in skolems:
                skolems[label] = Iri(f"{self.base_iri}.well-known/genid/{uuid.uuid4().hex}")
            return skolems[label]
        if kind in ("literal", "typed-literal"):
            lang = cell.get("xml:lang")
            if lang:
                return Literal(cell["value"], language=lang)
            dt = cell.get("datatype")
            if dt:
                return Literal(cell["value"], Iri(dt))
            return Literal(cell["value"])
        raise StoreError(f"unrecognized binding cell: {cell!r}")

    # -- Store primitives --------------------------------------------------------

    def select(self, query: str) -> list[dict[str, Term]]:
        return self._rows(self._query(self.config.data_endpoint, query))

    def select_prov(self, query: str) -> list[dict[str, Term]]:
        return self._rows(self._query(self.config.provenance_endpoint, query))

    def ask(self, query: str) -> bool:
        body = self._query(self.config.data_endpoint, query)
        answer = body.get("boolean")
        if not isinstance(answer, bool):
            raise StoreError("malformed ASK response (no boolean field)")
        return answer

    def apply_update(self, deltas: list[tuple[Iri | None, GraphDelta]]) -> None:
        """Named-graph deltas go to the provenance endpoint, default-graph
        deltas to the data endpoint, each batch as one request. With a
        shared endpoint everything travels in a single request."""
        shared = self.config.data_endpoint == self.config.provenance_endpoint
        batches: dict[str, list[tuple[Iri | None, GraphDelta]]] = {}
        for graph, delta in deltas:
            if delta.empty:
                continue
            if shared or graph is None:
                endpoint = self.config.data_endpoint
            else:
                endpoint = self.config.provenance_endpoint
            batches.setdefault(endpoint, []).append((graph, delta))
        for endpoint, batch in batches.items():
            text = render_update(batch)
            if text:
                self._post(endpoint, {"update": text}, "*/*")
