"""Shape parsing, constraint merging, widget selection, shape resolution."""

import pytest

from provcurate.errors import MissingShapeError, NoShapeError
from provcurate.model import EntityState
from provcurate.shacl import (
    ConditionSpec,
    PropertyConstraint,
    ValidationRule,
    WidgetKind,
    compile_shape,
    parse_shapes,
    resolve_shape,
    select_widget,
)
from provcurate.terms import RDF, XSD, Iri, Literal, Triple

DATACITE = "http://purl.org/spar/datacite/"
LITERAL = "http://www.essepuntato.it/2010/06/literalreification/"
SHAPE = Iri("http://example.org/shape/JournalArticleIdentifierShape")
SCHEME = Iri(DATACITE + "usesIdentifierScheme")
VALUE = Iri(LITERAL + "hasLiteralValue")
DOI = Iri(DATACITE + "doi")
DOI_PATTERN = r"^10\.\d{4,9}/[-._;()/:A-Z0-9]+$"


class TestParseShapes:
    def test_identifier_shape_catalog(self, identifier_shape_text):
        catalog = parse_shapes(identifier_shape_text)
        assert set(catalog.shapes) == {SHAPE}
        shape = catalog.get(SHAPE)
        assert shape.target_class == Iri(DATACITE + "Identifier")
        assert len(shape.constraints) == 3
        assert not catalog.warnings

    def test_empty_document(self):
        catalog = parse_shapes("")
        assert catalog.shapes == {}

    def test_unsupported_constraint_warns(self):
        doc = """
        @prefix sh: <http://www.w3.org/ns/shacl#> .
        @prefix ex: <http://ex.org/> .
        ex:S sh:targetClass ex:C ;
          sh:sparql [ sh:select "SELECT * WHERE {}" ] ;
          sh:property [ sh:path ex:p ; sh:uniqueLang true ] .
        """
        catalog = parse_shapes(doc)
        assert SHAPE not in catalog.shapes
        assert Iri("http://ex.org/S") in catalog.shapes
        codes = [w.code for w in catalog.warnings]
        assert codes.count("unsupported-constraint") == 2
        assert any("sparql" in w.message for w in catalog.warnings)

    def test_path_expression_skipped_with_warning(self):
        doc = """
        @prefix sh: <http://www.w3.org/ns/shacl#> .
        @prefix ex: <http://ex.org/> .
        ex:S sh:targetClass ex:C ;
          sh:property [ sh:path [ sh:inversePath ex:p ] ] .
        """
        catalog = parse_shapes(doc)
        assert catalog.get(Iri("http://ex.org/S")).constraints == ()
        assert any(w.code == "unsupported-path" for w in catalog.warnings)


class TestCompile:
    def test_identifier_shape_compiles_to_two_fields(self, identifier_shape_text):
        catalog = parse_shapes(identifier_shape_text)
        schema = compile_shape(SHAPE, catalog)
        assert schema.target_class == Iri(DATACITE + "Identifier")
        assert [f.path for f in schema.fields] == [SCHEME, VALUE]

        scheme, value = schema.fields
        assert scheme.widget == WidgetKind.DROPDOWN
        assert scheme.options == (DOI,)
        assert scheme.required and not scheme.repeatable

        assert value.widget == WidgetKind.TEXT
        assert value.required and not value.repeatable
        conditional = [r for r in value.rules if r.condition is not None]
        assert conditional == [
            ValidationRule(
                "pattern",
                condition=ConditionSpec(SCHEME, DOI),
                pattern=DOI_PATTERN,
            )
        ]
        unconditional = [r for r in value.rules if r.condition is None]
        assert unconditional == [ValidationRule("datatype", datatypes=(XSD.string,))]

    def test_compile_is_deterministic(self, identifier_shape_text):
        catalog = parse_shapes(identifier_shape_text)
        assert compile_shape(SHAPE, catalog) == compile_shape(SHAPE, catalog)

    def test_shape_with_no_constraints(self):
        doc = """
        @prefix sh: <http://www.w3.org/ns/shacl#> .
        @prefix ex: <http://ex.org/> .
        ex:S sh:targetClass ex:C .
        """
        catalog = parse_shapes(doc)
        schema = compile_shape(Iri("http://ex.org/S"), catalog)
        assert schema.fields == ()

    def test_or_of_datatypes_renders_dropdown(self):
        doc = """
        @prefix sh: <http://www.w3.org/ns/shacl#> .
        @prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
        @prefix ex: <http://ex.org/> .
        ex:S sh:targetClass ex:C ;
          sh:property [
            sh:path ex:issued ;
            sh:or ( [ sh:datatype xsd:date ] [ sh:datatype xsd:gYear ] ) ;
          ] .
        """
        catalog = parse_shapes(doc)
        [field] = compile_shape(Iri("http://ex.org/S"), catalog).fields
        assert field.widget == WidgetKind.DROPDOWN
        assert field.options == (XSD.date, XSD.gYear)
        [rule] = field.rules
        assert rule.kind == "datatype" and rule.datatypes == (XSD.date, XSD.gYear)

    def test_unresolvable_nested_shape(self):
        doc = """
        @prefix sh: <http://www.w3.org/ns/shacl#> .
        @prefix ex: <http://ex.org/> .
        ex:S sh:targetClass ex:C ;
          sh:property [ sh:path ex:id ; sh:node ex:Missing ] .
        """
        catalog = parse_shapes(doc)
        with pytest.raises(MissingShapeError):
            compile_shape(Iri("http://ex.org/S"), catalog)


class TestSelectWidget:
    def c(self, **kw):
        return PropertyConstraint(path=Iri("http://ex.org/p"), **kw)

    def test_date_maps_to_calendar(self):
        assert select_widget(self.c(datatype=XSD.date)) == WidgetKind.DATE

    def test_gyear_maps_to_year(self):
        assert select_widget(self.c(datatype=XSD.gYear)) == WidgetKind.YEAR

    def test_datetime_and_numbers(self):
        assert select_widget(self.c(datatype=XSD.dateTime)) == WidgetKind.DATETIME
        assert select_widget(self.c(datatype=XSD.integer)) == WidgetKind.NUMBER

    def test_in_values_beat_datatype(self):
        c = self.c(datatype=XSD.string, in_values=(DOI,))
        assert select_widget(c) == WidgetKind.DROPDOWN

    def test_override_wins(self):
        c = self.c(datatype=XSD.string)
        assert select_widget(c, WidgetKind.TEXTAREA) == WidgetKind.TEXTAREA

    def test_dropdown_override_without_options_falls_back(self):
        c = self.c(datatype=XSD.date)
        assert select_widget(c, WidgetKind.DROPDOWN) == WidgetKind.DATE

    def test_default_text(self):
        assert select_widget(self.c()) == WidgetKind.TEXT


ISSUE_SHAPES = """
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix ex: <http://ex.org/shape/> .
@prefix fabio: <http://purl.org/spar/fabio/> .
@prefix dcterms: <http://purl.org/dc/terms/> .
@prefix prism: <http://prismstandard.org/namespaces/basic/2.0/> .

ex:IssueShape sh:targetClass fabio:JournalIssue ;
  sh:property [ sh:path prism:issueIdentifier ; sh:maxCount 1 ] .

ex:SpecialIssueShape sh:targetClass fabio:JournalIssue ;
  sh:property [ sh:path prism:issueIdentifier ; sh:maxCount 1 ] ;
  sh:property [ sh:path dcterms:title ; sh:datatype xsd:string ; sh:maxCount 1 ] .
"""


class TestResolveShape:
    def test_entity_with_title_gets_special_issue_shape(self):
        catalog = parse_shapes(ISSUE_SHAPES)
        issue = Iri("http://ex.org/issue/1")
        state = EntityState(
            issue,
            {
                Triple(issue, RDF.type, Iri("http://purl.org/spar/fabio/JournalIssue")),
                Triple(issue, Iri("http://purl.org/dc/terms/title"), Literal("Special themes")),
            },
        )
        resolved = resolve_shape(state, catalog)
        assert resolved == Iri("http://ex.org/shape/SpecialIssueShape")

    def test_single_candidate(self, identifier_shape_text):
        catalog = parse_shapes(identifier_shape_text)
        ident = Iri("http://ex.org/id/1")
        state = EntityState(
            ident, {Triple(ident, RDF.type, Iri(DATACITE + "Identifier"))}
        )
        assert resolve_shape(state, catalog) == SHAPE

    def test_untyped_entity_raises(self, identifier_shape_text):
        catalog = parse_shapes(identifier_shape_text)
        state = EntityState(Iri("http://ex.org/x"))
        with pytest.raises(NoShapeError):
            resolve_shape(state, catalog)

    def test_tie_break_by_preference_then_iri(self):
        catalog = parse_shapes(ISSUE_SHAPES)
        issue = Iri("http://ex.org/issue/2")
        state = EntityState(
            issue, {Triple(issue, RDF.type, Iri("http://purl.org/spar/fabio/JournalIssue"))}
        )
        # both shapes validate cleanly on a bare issue: lexicographic tie-break
        assert resolve_shape(state, catalog) == Iri("http://ex.org/shape/IssueShape")
        pref = [Iri("http://ex.org/shape/SpecialIssueShape")]
        assert resolve_shape(state, catalog, pref) == Iri("http://ex.org/shape/SpecialIssueShape")
