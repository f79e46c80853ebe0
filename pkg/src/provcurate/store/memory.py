"""Embedded in-memory quad store.

Runs the exact query strings the remote client sends, through the local
evaluator, so both backends share semantics. Updates are transactional:
all staged or none applied, with a fault hook tests use to simulate
crashes mid-commit. Blank nodes are skolemized at load time; the store
never holds one.
"""

from __future__ import annotations

import threading
import uuid
from typing import Callable

from ..errors import StoreError
from ..model import GraphDelta
from ..nquads import parse_nquads, serialize_nquads
from ..terms import BlankNode, Iri, Quad, Term, Triple
from ..turtle import parse_turtle
from .base import Store
from .sparql import Dataset, evaluate
from .updates import parse_update

__all__ = ["MemoryQuadStore"]


class _GraphData:
    __slots__ = ("triples", "by_subject", "by_object")

    def __init__(self, triples: set[Triple] | None = None):
        self.triples: set[Triple] = set()
        self.by_subject: dict[Term, set[Triple]] = {}
        self.by_object: dict[Term, set[Triple]] = {}
        for t in triples or ():
            self.add(t)

    def add(self, t: Triple):
        if t not in self.triples:
            self.triples.add(t)
            self.by_subject.setdefault(t.subject, set()).add(t)
            self.by_object.setdefault(t.object, set()).add(t)

    def match(self, s, p, o):
        if s is not None:
            candidates = self.by_subject.get(s, ())
        elif o is not None:
            candidates = self.by_object.get(o, ())
        else:
            candidates = self.triples
        for t in candidates:
            if p is not None and t.predicate != p:
                continue
            if s is not None and t.subject != s:
                continue
            if o is not None and t.object != o:
                continue
            yield t


class MemoryQuadStore(Store, Dataset):
    def __init__(self, base_iri: str = "http://localhost/"):
        self.base_iri = base_iri.rstrip("/") + "/"
        self._graphs: dict[Iri | None, _GraphData] = {None: _GraphData()}
        self._lock = threading.RLock()
        # test hook: called with the index of each staged operation before commit
        self.fault_hook: Callable[[int], None] | None = None

    # -- Dataset interface (evaluator) ----------------------------------------

    def match_default(self, s, p, o):
        return list(self._graphs[None].match(s, p, o))

    def match_graph(self, graph: Iri, s, p, o):
        data = self._graphs.get(graph)
        return list(data.match(s, p, o)) if data else []

    def graph_names(self) -> list[Iri]:
        return sorted((g for g in self._graphs if g is not None), key=lambda g: g.value)

    # -- loading ---------------------------------------------------------------

    def _skolem(self, mapping: dict[BlankNode, Iri], node):
        if isinstance(node, BlankNode):
            if node not in mapping:
                mapping[node] = Iri(f"{self.base_iri}.well-known/genid/{uuid.uuid4().hex}")
            return mapping[node]
        return node

    def load_quads(self, quads: list[Quad]):
        mapping: dict[BlankNode, Iri] = {}
        with self._lock:
            for q in quads:
                t = q.triple
                skolemized = Triple(
                    self._skolem(mapping, t.subject),
                    t.predicate,
                    self._skolem(mapping, t.object),
                )
                self._graphs.setdefault(q.graph, _GraphData()).add(skolemized)

    def load_nquads(self, text: str):
        self.load_quads(parse_nquads(text))

    def load_turtle(self, text: str, graph: Iri | None = None):
        self.load_quads([Quad(t, graph) for t in parse_turtle(text)])

    def dump_nquads(self) -> str:
        with self._lock:
            quads = [
                Quad(t, graph)
                for graph, data in self._graphs.items()
                for t in data.triples
            ]
        return serialize_nquads(quads)

    def quad_count(self, graph_suffix: str | None = None) -> int:
        with self._lock:
            total = 0
            for graph, data in self._graphs.items():
                if graph_suffix is None or (graph is not None and graph.value.endswith(graph_suffix)):
                    total += len(data.triples)
            return total

    # -- updates -----------------------------------------------------------------

    def apply_update(self, deltas: list[tuple[Iri | None, GraphDelta]]) -> None:
        ops = []
        for graph, delta in deltas:
            if delta.deletions:
                ops.append(("delete", graph, delta.deletions))
            if delta.insertions:
                ops.append(("insert", graph, delta.insertions))
        self._apply_ops(ops)

    def update(self, request_text: str) -> None:
        """SPARQL-protocol entry point: parse and apply one update request."""
        self._apply_ops(parse_update(request_text))

    def _apply_ops(self, ops):
        with self._lock:
            staged: dict[Iri | None, set[Triple]] = {}

            def graph_set(g):
                if g not in staged:
                    existing = self._graphs.get(g)
                    staged[g] = set(existing.triples) if existing else set()
                return staged[g]

            for i, (kind, graph, triples) in enumerate(ops):
                if self.fault_hook is not None:
                    self.fault_hook(i)
                target = graph_set(graph)
                if kind == "delete":
                    target -= set(triples)  # SPARQL DELETE DATA is silent on absent triples
                elif kind == "insert":
                    target |= set(triples)
                else:
                    raise StoreError(f"unknown update operation {kind!r}")
            # staging succeeded: swap in rebuilt graphs atomically
            for graph, triples in staged.items():
                if triples or graph is None:
                    self._graphs[graph] = _GraphData(triples)
                else:
                    self._graphs.pop(graph, None)

    # -- query primitives -----------------------------------------------------------

    def select(self, query: str) -> list[dict[str, Term]]:
        with self._lock:
            result = evaluate(query, self)
        if isinstance(result, bool):
            raise StoreError("expected a SELECT query")
        return result

    def ask(self, query: str) -> bool:
        with self._lock:
            result = evaluate(query, self)
        if not isinstance(result, bool):
            raise StoreError("expected an ASK query")
        return result

    def select_prov(self, query: str) -> list[dict[str, Term]]:
        # single shared instance: provenance lives in this store's named graphs
        return self.select(query)
