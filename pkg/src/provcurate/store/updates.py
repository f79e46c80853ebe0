"""Wire format for commits: semicolon-joined DELETE DATA / INSERT DATA
operations with GRAPH blocks for named graphs.

This is the store-level format (graph-scoped, multi-entity); the
per-snapshot delta text stored in provenance uses the stricter grammar in
`provcurate.model`, which has no graph clauses.
"""

from __future__ import annotations

from ..errors import ParseError
from ..lexer import TokenStream, tokenize
from ..model import GraphDelta
from ..terms import XSD, Iri, Literal, Term, Triple, render_term, triple_sort_key

__all__ = ["render_update", "parse_update", "UpdateOp"]

# (kind, graph, triples): kind is "delete" or "insert"
UpdateOp = tuple[str, Iri | None, frozenset[Triple]]


def _triples_block(triples, indent: str) -> list[str]:
    return [f"{indent}{t.render()}" for t in sorted(triples, key=triple_sort_key)]


def _data_block(keyword: str, graph: Iri | None, triples) -> str:
    lines = [f"{keyword} DATA {{"]
    if graph is None:
        lines += _triples_block(triples, "  ")
    else:
        lines.append(f"  GRAPH {render_term(graph)} {{")
        lines += _triples_block(triples, "    ")
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines)


def render_update(deltas: list[tuple[Iri | None, GraphDelta]]) -> str:
    """One request string; operation order follows the input list so a
    single transactional application reproduces it exactly."""
    blocks = []
    for graph, delta in deltas:
        if delta.deletions:
            blocks.append(_data_block("DELETE", graph, delta.deletions))
        if delta.insertions:
            blocks.append(_data_block("INSERT", graph, delta.insertions))
    return " ;\n".join(blocks)


def _term(ts: TokenStream, position: str) -> Term:
    tok = ts.peek()
    if tok.kind == "iri":
        ts.next()
        return Iri(str(tok.value))
    if position == "object":
        if tok.kind == "string":
            ts.next()
            if ts.accept("punct", "^^"):
                dt = ts.expect("iri", what="datatype IRI")
                return Literal(str(tok.value), Iri(str(dt.value)))
            if ts.peek().kind == "at_word":
                return Literal(str(tok.value), language=str(ts.next().value))
            return Literal(str(tok.value))
        if tok.kind == "number":
            ts.next()
            kind, lexical = tok.value
            return Literal(lexical, XSD[kind])
        if tok.kind == "boolean":
            ts.next()
            return Literal(str(tok.value), XSD.boolean)
    raise ts.error(f"expected {position} term, found {tok.describe()}", tok)


def _triples(ts: TokenStream, stop: str) -> frozenset[Triple]:
    triples = set()
    while not ts.at("punct", stop):
        if ts.at("eof"):
            raise ts.error("unterminated data block")
        s = _term(ts, "subject")
        p = _term(ts, "predicate")
        o = _term(ts, "object")
        if not isinstance(s, Iri) or not isinstance(p, Iri):
            raise ts.error("ground update data must use IRIs for subject and predicate")
        triples.add(Triple(s, p, o))
        ts.expect("punct", ".", what="'.' after triple")
    return frozenset(triples)


def parse_update(text: str) -> list[UpdateOp]:
    """Parse the wire format back into ordered operations."""
    ops: list[UpdateOp] = []
    if not text.strip():
        return ops
    ts = TokenStream(tokenize(text))
    while not ts.at("eof"):
        tok = ts.peek()
        if tok.kind != "word" or str(tok.value).upper() not in ("DELETE", "INSERT"):
            raise ts.error(f"expected DELETE DATA or INSERT DATA, found {tok.describe()}")
        kind = str(ts.next().value).lower()
        data = ts.peek()
        if not (data.kind == "word" and str(data.value).upper() == "DATA"):
            raise ts.error("only DELETE DATA / INSERT DATA requests are supported")
        ts.next()
        ts.expect("punct", "{")
        while not ts.at("punct", "}"):
            if ts.at("eof"):
                raise ts.error("unterminated data block")
            if ts.at_word("GRAPH"):
                ts.next()
                g = ts.expect("iri", what="graph IRI")
                ts.expect("punct", "{")
                triples = _triples(ts, "}")
                ts.next()  # inner '}'
                ops.append((kind, Iri(str(g.value)), triples))
            else:
                triples = _triples_until_graph_or_close(ts)
                ops.append((kind, None, triples))
        ts.next()  # outer '}'
        ts.accept("punct", ";")
    return ops


def _triples_until_graph_or_close(ts: TokenStream) -> frozenset[Triple]:
    triples = set()
    while not ts.at("punct", "}") and not ts.at_word("GRAPH"):
        if ts.at("eof"):
            raise ts.error("unterminated data block")
        s = _term(ts, "subject")
        p = _term(ts, "predicate")
        o = _term(ts, "object")
        if not isinstance(s, Iri) or not isinstance(p, Iri):
            raise ts.error("ground update data must use IRIs for subject and predicate")
        triples.add(Triple(s, p, o))
        ts.expect("punct", ".", what="'.' after triple")
    return frozenset(triples)
