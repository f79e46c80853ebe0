"""Query text builders shared by the embedded store and the remote client.

Both backends run exactly these strings (locally through the evaluator,
remotely over the wire), so their result semantics cannot drift apart.
Filters stick to portable SPARQL 1.1 (`CONTAINS(LCASE(STR(...)))`), no
vendor full-text extensions.
"""

from __future__ import annotations

from ..terms import RDF, Iri, escape_string, render_term

__all__ = [
    "entity_state_query",
    "inbound_query",
    "classes_query",
    "search_query",
    "graph_query",
    "graph_names_query",
    "iri_in_use_query",
]


def entity_state_query(entity: Iri) -> str:
    return f"SELECT ?p ?o WHERE {{ {render_term(entity)} ?p ?o }}"


def inbound_query(entity: Iri) -> str:
    return f"SELECT ?s ?p WHERE {{ ?s ?p {render_term(entity)} }}"


def classes_query() -> str:
    return (
        "SELECT ?class (COUNT(?s) AS ?n) WHERE { ?s "
        f"{render_term(RDF.type)} ?class }} GROUP BY ?class"
    )


def search_query(target_class: Iri, field: Iri, q: str, parent: bool) -> str:
    needle = escape_string(q.lower())
    core = (
        f"?e {render_term(RDF.type)} {render_term(target_class)} ; "
        f"{render_term(field)} ?v . "
        f'FILTER(CONTAINS(LCASE(STR(?v)), "{needle}"))'
    )
    if parent:
        return f"SELECT DISTINCT ?hit ?v WHERE {{ {core} ?hit ?rel ?e . }}"
    return f"SELECT DISTINCT ?e ?v WHERE {{ {core} }}"


def graph_query(graph: Iri) -> str:
    return f"SELECT ?s ?p ?o WHERE {{ GRAPH {render_term(graph)} {{ ?s ?p ?o }} }}"


def graph_names_query() -> str:
    return "SELECT DISTINCT ?g WHERE { GRAPH ?g { ?s ?p ?o } }"


def iri_in_use_query(iri: Iri) -> str:
    ref = render_term(iri)
    return f"ASK {{ {{ {ref} ?p ?o }} UNION {{ ?s ?q {ref} }} }}"
