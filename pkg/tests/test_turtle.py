"""Turtle parser coverage, including the constructs shape documents use."""

import pytest

from provcurate.errors import ParseError
from provcurate.terms import RDF, XSD, BlankNode, Iri, Literal, Triple
from provcurate.turtle import parse_turtle


def test_basic_statement():
    triples = parse_turtle('<http://ex.org/s> <http://ex.org/p> "hi" .')
    assert triples == [
        Triple(Iri("http://ex.org/s"), Iri("http://ex.org/p"), Literal("hi"))
    ]


def test_prefixes_and_a():
    doc = """
    @prefix ex: <http://ex.org/> .
    ex:s a ex:Klass ; ex:p ex:o , "two" .
    """
    triples = parse_turtle(doc)
    assert Triple(Iri("http://ex.org/s"), RDF.type, Iri("http://ex.org/Klass")) in triples
    assert Triple(Iri("http://ex.org/s"), Iri("http://ex.org/p"), Iri("http://ex.org/o")) in triples
    assert Triple(Iri("http://ex.org/s"), Iri("http://ex.org/p"), Literal("two")) in triples


def test_sparql_style_prefix():
    doc = 'PREFIX ex: <http://ex.org/>\nex:s ex:p 4 .'
    triples = parse_turtle(doc)
    assert triples[0].object == Literal("4", XSD.integer)


def test_base_resolution():
    doc = '@base <http://ex.org/dir/> . <rel> <http://ex.org/p> <#frag> .'
    [tr] = parse_turtle(doc)
    assert tr.subject == Iri("http://ex.org/dir/rel")
    assert tr.object == Iri("http://ex.org/dir/#frag")


def test_literal_forms():
    doc = """
    @prefix ex: <http://ex.org/> .
    @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
    ex:s ex:p "plain", "typed"^^xsd:date, "tagged"@en-GB, 3.5, true, "esc\\nline"@en .
    """
    objs = {t.object for t in parse_turtle(doc)}
    assert Literal("plain") in objs
    assert Literal("typed", XSD.date) in objs
    assert Literal("tagged", language="en-gb") in objs
    assert Literal("3.5", XSD.decimal) in objs
    assert Literal("true", XSD.boolean) in objs


def test_triple_quoted_string():
    doc = '<http://s> <http://p> """multi\n"line"\ntext""" .'
    [tr] = parse_turtle(doc)
    assert tr.object == Literal('multi\n"line"\ntext')


def test_blank_node_property_list():
    doc = """
    @prefix ex: <http://ex.org/> .
    ex:s ex:p [ ex:q "inner" ; ex:r ex:o ] .
    """
    triples = parse_turtle(doc)
    [link] = [t for t in triples if t.subject == Iri("http://ex.org/s")]
    bnode = link.object
    assert isinstance(bnode, BlankNode)
    inner = {(t.predicate, t.object) for t in triples if t.subject == bnode}
    assert (Iri("http://ex.org/q"), Literal("inner")) in inner
    assert (Iri("http://ex.org/r"), Iri("http://ex.org/o")) in inner


def test_collection_expands_to_list():
    doc = """
    @prefix ex: <http://ex.org/> .
    ex:s ex:p ( ex:a ex:b ) .
    """
    triples = parse_turtle(doc)
    [link] = [t for t in triples if t.subject == Iri("http://ex.org/s")]
    head = link.object
    firsts = {t.subject: t.object for t in triples if t.predicate == RDF.first}
    rests = {t.subject: t.object for t in triples if t.predicate == RDF.rest}
    assert firsts[head] == Iri("http://ex.org/a")
    second = rests[head]
    assert firsts[second] == Iri("http://ex.org/b")
    assert rests[second] == RDF.nil


def test_empty_collection_is_nil():
    doc = "<http://s> <http://p> ( ) ."
    [tr] = parse_turtle(doc)
    assert tr.object == RDF.nil


def test_anon_blank_node():
    doc = "<http://s> <http://p> [] ."
    [tr] = parse_turtle(doc)
    assert isinstance(tr.object, BlankNode)


def test_comments_ignored():
    doc = "# leading\n<http://s> <http://p> <http://o> . # trailing"
    assert len(parse_turtle(doc)) == 1


def test_undeclared_prefix_errors_with_position():
    with pytest.raises(ParseError) as exc:
        parse_turtle("ex:s ex:p ex:o .")
    assert exc.value.line == 1


def test_syntax_error_carries_line():
    doc = "<http://s> <http://p> <http://o> .\n<http://s> <http://p> .\n"
    with pytest.raises(ParseError) as exc:
        parse_turtle(doc)
    assert exc.value.line == 2


def test_listing_style_shape_parses():
    doc = """
    @prefix sh: <http://www.w3.org/ns/shacl#> .
    @prefix ex: <http://ex.org/shape/> .
    @prefix datacite: <http://purl.org/spar/datacite/> .
    ex:Shape a sh:NodeShape ;
      sh:targetClass datacite:Identifier ;
      sh:property [
        sh:path datacite:usesIdentifierScheme ;
        sh:minCount 1 ;
        sh:in ( datacite:doi ) ;
      ] .
    """
    triples = parse_turtle(doc)
    shape = Iri("http://ex.org/shape/Shape")
    assert Triple(shape, RDF.type, Iri("http://www.w3.org/ns/shacl#NodeShape")) in triples
    props = [t for t in triples if t.predicate == Iri("http://www.w3.org/ns/shacl#property")]
    assert len(props) == 1
