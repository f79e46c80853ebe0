"""Turtle parser producing plain triples.

Covers the grammar subset real shape documents use: prefix/base directives
(both @-style and SPARQL-style), predicate-object and object lists, 'a',
blank node property lists, collections, and all literal forms. Collections
expand to rdf:first/rdf:rest chains. Errors carry line/column.
"""

from __future__ import annotations

from urllib.parse import urljoin

from .errors import ParseError
from .lexer import TokenStream, tokenize
from .terms import RDF, XSD, BlankNode, Iri, Literal, Term, Triple

__all__ = ["parse_turtle"]


class _TurtleParser:
    def __init__(self, text: str, base: str | None):
        self.ts = TokenStream(tokenize(text))
        self.base = base
        self.prefixes: dict[str, str] = {}
        self.triples: list[Triple] = []
        self._bnode_counter = 0

    def fresh_bnode(self) -> BlankNode:
        self._bnode_counter += 1
        return BlankNode(f"b{self._bnode_counter}")

    def parse(self) -> list[Triple]:
        ts = self.ts
        while not ts.at("eof"):
            tok = ts.peek()
            if tok.kind == "at_word" and tok.value in ("prefix", "base"):
                ts.next()
                self._directive(str(tok.value), dotted=True)
            elif tok.kind == "word" and str(tok.value).upper() in ("PREFIX", "BASE"):
                ts.next()
                self._directive(str(tok.value).lower(), dotted=False)
            else:
                self._triples_statement()
        return self.triples

    def _directive(self, kind: str, dotted: bool):
        ts = self.ts
        if kind == "prefix":
            tok = ts.expect("pname", what="prefix declaration like 'ex:'")
            prefix, local = tok.value
            if local:
                raise ts.error("prefix declaration must end with ':'", tok)
            iri_tok = ts.expect("iri", what="namespace IRI")
            self.prefixes[prefix] = self._resolve(str(iri_tok.value), iri_tok)
        else:
            iri_tok = ts.expect("iri", what="base IRI")
            self.base = self._resolve(str(iri_tok.value), iri_tok)
        if dotted:
            ts.expect("punct", ".", what="'.' after directive")

    def _resolve(self, value: str, tok) -> str:
        try:
            Iri(value)
            return value
        except ValueError:
            if self.base is None:
                raise self.ts.error(f"relative IRI {value!r} with no base", tok)
            return urljoin(self.base, value)

    def _triples_statement(self):
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "punct" and tok.value == "[":
            subject = self._bnode_property_list()
            if not ts.at("punct", "."):
                self._predicate_object_list(subject)
            ts.expect("punct", ".", what="'.' after statement")
            return
        subject = self._subject()
        self._predicate_object_list(subject)
        ts.expect("punct", ".", what="'.' after statement")

    def _subject(self) -> Iri | BlankNode:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "iri":
            ts.next()
            return Iri(self._resolve(str(tok.value), tok))
        if tok.kind == "pname":
            ts.next()
            return self._expand_pname(tok)
        if tok.kind == "blank":
            ts.next()
            return BlankNode(f"u{tok.value}")
        if tok.kind == "anon":
            ts.next()
            return self.fresh_bnode()
        if tok.kind == "punct" and tok.value == "(":
            return self._collection()
        raise ts.error(f"expected subject, found {tok.describe()}", tok)

    def _predicate_object_list(self, subject: Iri | BlankNode):
        ts = self.ts
        while True:
            predicate = self._verb()
            self._object_list(subject, predicate)
            if ts.accept("punct", ";"):
                # tolerate trailing semicolons before '.', ']' or another verb
                while ts.accept("punct", ";"):
                    pass
                if ts.at("punct", ".") or ts.at("punct", "]"):
                    return
                continue
            return

    def _verb(self) -> Iri:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "word" and tok.value == "a":
            ts.next()
            return RDF.type
        if tok.kind == "iri":
            ts.next()
            return Iri(self._resolve(str(tok.value), tok))
        if tok.kind == "pname":
            ts.next()
            pname = self._expand_pname(tok)
            return pname
        raise ts.error(f"expected predicate, found {tok.describe()}", tok)

    def _object_list(self, subject, predicate: Iri):
        while True:
            obj = self._object()
            self.triples.append(Triple(subject, predicate, obj))
            if not self.ts.accept("punct", ","):
                return

    def _object(self) -> Term:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "iri":
            ts.next()
            return Iri(self._resolve(str(tok.value), tok))
        if tok.kind == "pname":
            ts.next()
            return self._expand_pname(tok)
        if tok.kind == "blank":
            ts.next()
            return BlankNode(f"u{tok.value}")
        if tok.kind == "anon":
            ts.next()
            return self.fresh_bnode()
        if tok.kind == "punct" and tok.value == "[":
            return self._bnode_property_list()
        if tok.kind == "punct" and tok.value == "(":
            return self._collection()
        if tok.kind == "string":
            ts.next()
            if ts.accept("punct", "^^"):
                dt_tok = ts.peek()
                if dt_tok.kind == "iri":
                    ts.next()
                    return Literal(str(tok.value), Iri(self._resolve(str(dt_tok.value), dt_tok)))
                if dt_tok.kind == "pname":
                    ts.next()
                    return Literal(str(tok.value), self._expand_pname(dt_tok))
                raise ts.error("expected datatype IRI after '^^'", dt_tok)
            if ts.peek().kind == "at_word":
                lang = ts.next()
                return Literal(str(tok.value), language=str(lang.value))
            return Literal(str(tok.value))
        if tok.kind == "number":
            ts.next()
            kind, lexical = tok.value
            return Literal(lexical, XSD[kind])
        if tok.kind == "boolean":
            ts.next()
            return Literal(str(tok.value), XSD.boolean)
        raise ts.error(f"expected object, found {tok.describe()}", tok)

    def _bnode_property_list(self) -> BlankNode:
        ts = self.ts
        ts.expect("punct", "[")
        node = self.fresh_bnode()
        if not ts.at("punct", "]"):
            self._predicate_object_list(node)
        ts.expect("punct", "]", what="']' closing property list")
        return node

    def _collection(self) -> Iri | BlankNode:
        ts = self.ts
        ts.expect("punct", "(")
        items = []
        while not ts.at("punct", ")"):
            if ts.at("eof"):
                raise ts.error("unterminated collection")
            items.append(self._object())
        ts.next()  # ')'
        if not items:
            return RDF.nil
        head = self.fresh_bnode()
        node = head
        for i, item in enumerate(items):
            self.triples.append(Triple(node, RDF.first, item))
            if i == len(items) - 1:
                self.triples.append(Triple(node, RDF.rest, RDF.nil))
            else:
                nxt = self.fresh_bnode()
                self.triples.append(Triple(node, RDF.rest, nxt))
                node = nxt
        return head

    def _expand_pname(self, tok) -> Iri:
        prefix, local = tok.value
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise self.ts.error(f"undeclared prefix {prefix!r}", tok)
        try:
            return Iri(ns + local)
        except ValueError as exc:
            raise self.ts.error(str(exc), tok)


def parse_turtle(text: str, base: str | None = None) -> list[Triple]:
    """Parse a Turtle document into triples; raises ParseError with position."""
    try:
        return _TurtleParser(text, base).parse()
    except RecursionError:
        raise ParseError("document nests too deeply")
