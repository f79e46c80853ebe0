"""N-Quads read/write for the embedded store's dump and load paths.

The writer emits one quad per line, sorted, so two dumps of the same store
compare byte-for-byte (the non-destructiveness audit depends on this).
"""

from __future__ import annotations

from .lexer import TokenStream, tokenize
from .terms import XSD, BlankNode, Iri, Literal, Quad, Term, Triple

__all__ = ["parse_nquads", "serialize_nquads"]


def _term(ts: TokenStream, position: str) -> Term:
    tok = ts.peek()
    if tok.kind == "iri":
        ts.next()
        return Iri(str(tok.value))
    if tok.kind == "blank":
        ts.next()
        return BlankNode(str(tok.value))
    if position == "object" and tok.kind == "string":
        ts.next()
        if ts.accept("punct", "^^"):
            dt = ts.expect("iri", what="datatype IRI")
            return Literal(str(tok.value), Iri(str(dt.value)))
        if ts.peek().kind == "at_word":
            lang = ts.next()
            return Literal(str(tok.value), language=str(lang.value))
        return Literal(str(tok.value))
    if position == "object" and tok.kind == "number":
        ts.next()
        kind, lexical = tok.value
        return Literal(lexical, XSD[kind])
    raise ts.error(f"expected {position} term, found {tok.describe()}", tok)


def parse_nquads(text: str) -> list[Quad]:
    ts = TokenStream(tokenize(text))
    quads: list[Quad] = []
    while not ts.at("eof"):
        subj = _term(ts, "subject")
        if not isinstance(subj, (Iri, BlankNode)):
            raise ts.error("subject must be an IRI or blank node")
        pred = _term(ts, "predicate")
        if not isinstance(pred, Iri):
            raise ts.error("predicate must be an IRI")
        obj = _term(ts, "object")
        graph: Iri | None = None
        if not ts.at("punct", "."):
            g = _term(ts, "graph label")
            if not isinstance(g, Iri):
                raise ts.error("graph label must be an IRI")
            graph = g
        ts.expect("punct", ".", what="'.' terminating the quad")
        quads.append(Quad(Triple(subj, pred, obj), graph))
    return quads


def serialize_nquads(quads) -> str:
    lines = sorted(q.render() for q in quads)
    return "\n".join(lines) + ("\n" if lines else "")
