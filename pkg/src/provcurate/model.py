"""Per-entity state and the invertible delta algebra behind change tracking.

A delta is a pair of disjoint ground-triple sets serialized as a restricted
SPARQL `DELETE DATA { ... }; INSERT DATA { ... }` pair. Application is
strict: deleting an absent triple or inserting a present one raises, so a
corrupted snapshot chain fails loudly instead of drifting. Blank nodes are
forbidden in deltas (skolemize first); inversion under blank-node
isomorphism would be ill-defined.

The canonical text layout is documented in docs/delta-format.md and must
stay byte-stable: provenance reproducibility tests compare serialized
deltas directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ParseError, ReplayIntegrityError, UnsupportedDeltaError
from .lexer import Token, TokenStream, tokenize
from .terms import XSD, BlankNode, Iri, Literal, Term, Triple, render_term, triple_sort_key

__all__ = [
    "EntityState",
    "GraphDelta",
    "diff",
    "apply_delta",
    "invert_delta",
    "serialize_delta",
    "parse_delta",
    "canonical_state",
]


@dataclass(frozen=True, slots=True)
class EntityState:
    """All outgoing triples of one entity; the unit of versioning."""

    entity: Iri
    triples: frozenset[Triple] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "triples", frozenset(self.triples))
        for t in self.triples:
            if t.subject != self.entity:
                raise ValueError(
                    f"state for {self.entity} contains a triple with foreign subject {t.subject}"
                )

    @property
    def empty(self) -> bool:
        return not self.triples

    def objects(self, predicate: Iri) -> set[Term]:
        return {t.object for t in self.triples if t.predicate == predicate}

    def with_triples(self, triples) -> "EntityState":
        return EntityState(self.entity, frozenset(triples))


def canonical_state(state: EntityState) -> str:
    """Sorted N-Triples rendering; byte-equal iff states are equal."""
    return "\n".join(t.render() for t in sorted(state.triples, key=triple_sort_key))


def _check_ground(triples, side: str):
    for t in triples:
        if isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode):
            raise ValueError(f"blank node in delta {side}: {t.render()} (skolemize first)")


@dataclass(frozen=True, slots=True)
class GraphDelta:
    """Disjoint deletion/insertion triple sets; invertible by swapping."""

    deletions: frozenset[Triple] = field(default_factory=frozenset)
    insertions: frozenset[Triple] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "deletions", frozenset(self.deletions))
        object.__setattr__(self, "insertions", frozenset(self.insertions))
        overlap = self.deletions & self.insertions
        if overlap:
            sample = next(iter(overlap))
            raise ValueError(f"delta deletes and inserts the same triple: {sample.render()}")
        _check_ground(self.deletions, "deletions")
        _check_ground(self.insertions, "insertions")

    @property
    def empty(self) -> bool:
        return not self.deletions and not self.insertions


def diff(before: EntityState, after: EntityState) -> GraphDelta:
    """Exact triple-level difference; apply_delta(before, diff) == after."""
    if before.entity != after.entity:
        raise ValueError(f"cannot diff states of different entities: {before.entity} vs {after.entity}")
    return GraphDelta(
        deletions=before.triples - after.triples,
        insertions=after.triples - before.triples,
    )


def apply_delta(state: EntityState, delta: GraphDelta) -> EntityState:
    """Strict replay: phantom deletions and duplicate insertions raise."""
    missing = delta.deletions - state.triples
    if missing:
        sample = next(iter(missing))
        raise ReplayIntegrityError(
            f"delta deletes a triple absent from the state of {state.entity}: {sample.render()}"
        )
    present = delta.insertions & state.triples
    if present:
        sample = next(iter(present))
        raise ReplayIntegrityError(
            f"delta inserts a triple already present on {state.entity}: {sample.render()}"
        )
    for t in delta.deletions | delta.insertions:
        if t.subject != state.entity:
            raise ReplayIntegrityError(
                f"delta for {state.entity} touches foreign subject {t.subject}"
            )
    return state.with_triples((state.triples - delta.deletions) | delta.insertions)


def invert_delta(delta: GraphDelta) -> GraphDelta:
    return GraphDelta(deletions=delta.insertions, insertions=delta.deletions)


def _render_block(keyword: str, triples: frozenset[Triple]) -> str:
    lines = [f"{keyword} {{"]
    for t in sorted(triples, key=triple_sort_key):
        lines.append(f"  {t.render()}")
    lines.append("}")
    return "\n".join(lines)


def serialize_delta(delta: GraphDelta) -> str:
    """Canonical restricted-SPARQL text; empty delta serializes to ''."""
    blocks = []
    if delta.deletions:
        blocks.append(_render_block("DELETE DATA", delta.deletions))
    if delta.insertions:
        blocks.append(_render_block("INSERT DATA", delta.insertions))
    return " ;\n".join(blocks)


_FORBIDDEN_WORDS = {
    "WHERE",
    "GRAPH",
    "WITH",
    "USING",
    "SELECT",
    "CONSTRUCT",
    "LOAD",
    "CLEAR",
    "DROP",
    "CREATE",
    "COPY",
    "MOVE",
    "ADD",
}


def _parse_data_term(ts: TokenStream, position: str) -> Term:
    tok = ts.peek()
    if tok.kind == "iri":
        ts.next()
        try:
            return Iri(tok.value)
        except ValueError as exc:
            raise ts.error(str(exc), tok)
    if tok.kind == "var":
        raise UnsupportedDeltaError(
            f"variables are not allowed in ground delta data (line {tok.line})"
        )
    if tok.kind == "blank" or tok.kind == "anon":
        raise UnsupportedDeltaError(
            f"blank nodes are not allowed in deltas (line {tok.line})"
        )
    if position == "object":
        if tok.kind == "string":
            ts.next()
            if ts.at("punct", "^^"):
                ts.next()
                dt_tok = ts.expect("iri", what="datatype IRI")
                return Literal(tok.value, Iri(dt_tok.value))
            if ts.peek().kind == "at_word":
                lang = ts.next()
                return Literal(tok.value, language=str(lang.value))
            return Literal(tok.value)
        if tok.kind == "number":
            ts.next()
            kind, lexical = tok.value
            return Literal(lexical, XSD[kind])
        if tok.kind == "boolean":
            ts.next()
            return Literal(tok.value, XSD.boolean)
    if tok.kind == "pname":
        raise ts.error("prefixed names are not allowed in delta text; use absolute IRIs", tok)
    raise ts.error(f"expected {position} term, found {tok.describe()}", tok)


def _parse_block(ts: TokenStream) -> frozenset[Triple]:
    ts.expect("punct", "{")
    triples: set[Triple] = set()
    while not ts.at("punct", "}"):
        if ts.at("eof"):
            raise ts.error("unterminated data block")
        lead = ts.peek()
        if lead.kind == "word" and str(lead.value).upper() in _FORBIDDEN_WORDS:
            raise UnsupportedDeltaError(
                f"'{lead.value}' is outside the restricted delta grammar (line {lead.line})"
            )
        subj = _parse_data_term(ts, "subject")
        pred_tok = ts.peek()
        if pred_tok.kind == "word" and str(pred_tok.value).upper() in _FORBIDDEN_WORDS:
            raise UnsupportedDeltaError(
                f"'{pred_tok.value}' is outside the restricted delta grammar (line {pred_tok.line})"
            )
        pred = _parse_data_term(ts, "predicate")
        if not isinstance(pred, Iri):
            raise ts.error("predicate must be an IRI", pred_tok)
        obj = _parse_data_term(ts, "object")
        triples.add(Triple(subj, pred, obj))
        ts.expect("punct", ".", what="'.' after triple")
    ts.next()  # '}'
    return frozenset(triples)


def parse_delta(text: str, *, _allow_empty: bool = True) -> GraphDelta:
    """Parse the restricted grammar: at most one DELETE DATA and one INSERT
    DATA block of ground triples. Variables, WHERE clauses, graph clauses,
    and blank nodes raise UnsupportedDeltaError."""
    if not text.strip():
        return GraphDelta()
    ts = TokenStream(tokenize(text))
    deletions: frozenset[Triple] | None = None
    insertions: frozenset[Triple] | None = None
    while not ts.at("eof"):
        tok = ts.peek()
        if tok.kind != "word":
            raise ts.error(f"expected DELETE DATA or INSERT DATA, found {tok.describe()}")
        word = str(tok.value).upper()
        if word in ("DELETE", "INSERT"):
            ts.next()
            follow = ts.peek()
            if not (follow.kind == "word" and str(follow.value).upper() == "DATA"):
                raise UnsupportedDeltaError(
                    f"only ground {word} DATA blocks are supported (line {tok.line})"
                )
            ts.next()
            block = _parse_block(ts)
            if word == "DELETE":
                if deletions is not None:
                    raise ts.error("more than one DELETE DATA block", tok)
                deletions = block
            else:
                if insertions is not None:
                    raise ts.error("more than one INSERT DATA block", tok)
                insertions = block
            ts.accept("punct", ";")
        elif word in _FORBIDDEN_WORDS:
            raise UnsupportedDeltaError(
                f"'{tok.value}' is outside the restricted delta grammar (line {tok.line})"
            )
        else:
            raise ts.error(f"expected DELETE DATA or INSERT DATA, found {tok.describe()}")
    try:
        return GraphDelta(deletions or frozenset(), insertions or frozenset())
    except ValueError as exc:
        raise ParseError(str(exc))
