"""Store contract shared by the embedded quad store and the protocol client.

Entity data lives in the default graph; provenance lives in per-entity
named graphs and is routed to the provenance endpoint when the two differ.
The structured reads are implemented once, on top of `select`/`ask`, with
the query text coming from `queries` — both backends therefore run
identical SPARQL and identical post-processing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from ..model import EntityState, GraphDelta
from ..terms import BlankNode, Iri, Literal, Term, Triple
from . import queries

if TYPE_CHECKING:
    from ..display import AutocompleteRule

__all__ = ["EndpointConfig", "Store", "term_to_json", "term_from_json"]


@dataclass(frozen=True, slots=True)
class EndpointConfig:
    data_endpoint: str
    provenance_endpoint: str
    timeout_seconds: float = 30.0
    max_attempts: int = 3
    backoff_seconds: float = 0.5

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")


def term_to_json(term: Term) -> dict:
    """SPARQL-JSON-results style encoding, reused across API payloads."""
    if isinstance(term, Iri):
        return {"type": "uri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.label}
    out: dict = {"type": "literal", "value": term.lexical}
    if term.language is not None:
        out["xml:lang"] = term.language
    elif term.datatype.value != "http://www.w3.org/2001/XMLSchema#string":
        out["datatype"] = term.datatype.value
    return out


def term_from_json(obj: dict) -> Term:
    kind = obj.get("type")
    if kind == "uri":
        return Iri(obj["value"])
    if kind == "bnode":
        return BlankNode(obj["value"])
    if kind in ("literal", "typed-literal"):
        lang = obj.get("xml:lang")
        if lang:
            return Literal(obj["value"], language=lang)
        dt = obj.get("datatype")
        if dt:
            return Literal(obj["value"], Iri(dt))
        return Literal(obj["value"])
    raise ValueError(f"unrecognized term JSON: {obj!r}")


class Store:
    """Backend contract. Subclasses provide the four primitives; the
    structured reads below are shared."""

    # -- primitives -----------------------------------------------------------

    def select(self, query: str) -> list[dict[str, Term]]:
        raise NotImplementedError

    def ask(self, query: str) -> bool:
        raise NotImplementedError

    def select_prov(self, query: str) -> list[dict[str, Term]]:
        raise NotImplementedError

    def apply_update(self, deltas: list[tuple[Iri | None, GraphDelta]]) -> None:
        raise NotImplementedError

    # -- structured reads -------------------------------------------------------

    def fetch_entity_state(self, entity: Iri) -> EntityState:
        rows = self.select(queries.entity_state_query(entity))
        triples = {Triple(entity, row["p"], row["o"]) for row in rows}
        return EntityState(entity, triples)

    def fetch_inbound(self, entity: Iri) -> frozenset[Triple]:
        rows = self.select(queries.inbound_query(entity))
        return frozenset(Triple(row["s"], row["p"], entity) for row in rows)

    def discover_classes(self) -> list[tuple[Iri, int]]:
        rows = self.select(queries.classes_query())
        counted = [
            (row["class"], int(row["n"].lexical))
            for row in rows
            if isinstance(row.get("class"), Iri)
        ]
        counted.sort(key=lambda pair: (-pair[1], pair[0].value))
        return counted

    def search(
        self, target: Iri, field: Iri, q: str, rule: "AutocompleteRule"
    ) -> list[tuple[Iri, str]]:
        if len(q) < rule.min_chars:
            return []
        parent = rule.target == "parent"
        rows = self.select(queries.search_query(target, field, q, parent))
        var = "hit" if parent else "e"
        hits = set()
        for row in rows:
            subject, value = row.get(var), row.get("v")
            if isinstance(subject, Iri):
                hits.add((subject, value.lexical if isinstance(value, Literal) else str(value)))
        return sorted(hits, key=lambda pair: (pair[1], pair[0].value))

    def fetch_graph(self, graph: Iri) -> frozenset[Triple]:
        rows = self.select_prov(queries.graph_query(graph))
        return frozenset(Triple(r["s"], r["p"], r["o"]) for r in rows)

    def iri_in_use(self, iri: Iri) -> bool:
        return self.ask(queries.iri_in_use_query(iri))

    def entity_exists(self, entity: Iri) -> bool:
        """An entity exists while it has any outgoing triple."""
        return not self.fetch_entity_state(entity).empty
