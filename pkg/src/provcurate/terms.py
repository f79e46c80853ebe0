"""RDF term values: IRIs, blank nodes, literals, triples, quads.

All types are immutable and hashable. Rendering follows N-Triples rules;
the canonical form always writes an explicit datatype (including
xsd:string) so that serialized output is byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

__all__ = [
    "Iri",
    "BlankNode",
    "Literal",
    "Term",
    "Triple",
    "Quad",
    "RDF",
    "RDFS",
    "XSD",
    "SH",
    "PROV",
    "OCO",
    "DCTERMS",
    "render_term",
    "parse_term_key",
    "triple_sort_key",
]

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_BAD_IRI_CHARS = re.compile(r'[\x00-\x20<>"{}|^`\\]')


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("IRI must be non-empty")
        if not _SCHEME_RE.match(self.value):
            raise ValueError(f"IRI is not absolute (missing scheme): {self.value!r}")
        if _BAD_IRI_CHARS.search(self.value):
            raise ValueError(f"IRI contains characters illegal in N-Triples: {self.value!r}")

    def local_name(self) -> str:
        """Substring after the last '/' or '#', skipping a trailing separator."""
        trimmed = self.value.rstrip("/#")
        cut = max(trimmed.rfind("/"), trimmed.rfind("#"))
        return trimmed[cut + 1 :] if cut >= 0 else trimmed

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self):
        if not self.label:
            raise ValueError("blank node label must be non-empty")

    def __str__(self) -> str:
        return f"_:{self.label}"


class _Ns:
    """IRI factory for one namespace: NS.term -> Iri(prefix + 'term')."""

    def __init__(self, prefix: str):
        self._prefix = prefix

    def __getattr__(self, name: str) -> Iri:
        return Iri(self._prefix + name)

    def __getitem__(self, name: str) -> Iri:
        return Iri(self._prefix + name)

    @property
    def prefix(self) -> str:
        return self._prefix


RDF = _Ns("http://www.w3.org/1999/02/22-rdf-syntax-ns#")
RDFS = _Ns("http://www.w3.org/2000/01/rdf-schema#")
XSD = _Ns("http://www.w3.org/2001/XMLSchema#")
SH = _Ns("http://www.w3.org/ns/shacl#")
PROV = _Ns("http://www.w3.org/ns/prov#")
OCO = _Ns("https://w3id.org/oc/ontology/")
DCTERMS = _Ns("http://purl.org/dc/terms/")

_LANG_RE = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: Iri = field(default_factory=lambda: XSD.string)
    language: str | None = None

    def __post_init__(self):
        if self.language is not None:
            if not _LANG_RE.match(self.language):
                raise ValueError(f"malformed language tag: {self.language!r}")
            object.__setattr__(self, "language", self.language.lower())
            if self.datatype != RDF.langString:
                object.__setattr__(self, "datatype", RDF.langString)
        elif self.datatype == RDF.langString:
            raise ValueError("rdf:langString literal requires a language tag")

    def __str__(self) -> str:
        return render_term(self)


Term = Iri | BlankNode | Literal


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Iri | BlankNode
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, (Iri, BlankNode)):
            raise TypeError(f"triple subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, Iri):
            raise TypeError(f"triple predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (Iri, BlankNode, Literal)):
            raise TypeError(f"triple object must be a term, got {self.object!r}")

    def render(self) -> str:
        return f"{render_term(self.subject)} {render_term(self.predicate)} {render_term(self.object)} ."


@dataclass(frozen=True, slots=True)
class Quad:
    triple: Triple
    graph: Iri | None = None

    def render(self) -> str:
        t = self.triple
        head = f"{render_term(t.subject)} {render_term(t.predicate)} {render_term(t.object)}"
        if self.graph is None:
            return head + " ."
        return f"{head} {render_term(self.graph)} ."


_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(s: str) -> str:
    out = []
    for ch in s:
        esc = _ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def render_term(term: Term) -> str:
    """Canonical N-Triples rendering of one term."""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        quoted = f'"{escape_string(term.lexical)}"'
        if term.language is not None:
            return f"{quoted}@{term.language}"
        return f'{quoted}^^<{term.datatype.value}>'
    raise TypeError(f"not an RDF term: {term!r}")


def triple_sort_key(triple: Triple) -> tuple[str, str, str]:
    return (
        render_term(triple.subject),
        render_term(triple.predicate),
        render_term(triple.object),
    )


def parse_term_key(term: Term) -> str:
    """Stable dictionary key for a term (its canonical rendering)."""
    return render_term(term)
