"""Schema validation and literal coercion, anchored on the identifier shape."""

import re

import pytest

from provcurate.errors import CoercionError
from provcurate.model import EntityState
from provcurate.shacl import ConditionSpec, FormSchema, compile_shape, parse_shapes
from provcurate.terms import RDF, XSD, Iri, Literal, Triple
from provcurate.validation import check_condition, coerce_literal, validate_entity

DATACITE = "http://purl.org/spar/datacite/"
LITERAL = "http://www.essepuntato.it/2010/06/literalreification/"
SHAPE = Iri("http://example.org/shape/JournalArticleIdentifierShape")
SCHEME = Iri(DATACITE + "usesIdentifierScheme")
VALUE = Iri(LITERAL + "hasLiteralValue")
DOI = Iri(DATACITE + "doi")
ISSN = Iri(DATACITE + "issn")
ENT = Iri("http://ex.org/id/1")


@pytest.fixture(scope="module")
def schema(identifier_shape_text) -> FormSchema:
    return compile_shape(SHAPE, parse_shapes(identifier_shape_text))


def identifier_state(scheme, value):
    triples = {Triple(ENT, RDF.type, Iri(DATACITE + "Identifier"))}
    if scheme is not None:
        triples.add(Triple(ENT, SCHEME, scheme))
    if value is not None:
        triples.add(Triple(ENT, VALUE, Literal(value)))
    return EntityState(ENT, triples)


class TestConditionalValidation:
    def test_valid_doi_passes(self, schema):
        state = identifier_state(DOI, "10.1234/ABC")
        assert validate_entity(state, schema) == []

    def test_bad_doi_fails_pattern(self, schema):
        state = identifier_state(DOI, "hello")
        violations = validate_entity(state, schema)
        assert [v.kind for v in violations] == ["condition-pattern"]
        assert violations[0].path == VALUE

    def test_condition_not_met_skips_pattern(self, schema):
        # a non-doi scheme is not in the dropdown options, but the pattern
        # rule itself must stay quiet
        state = identifier_state(ISSN, "hello")
        kinds = [v.kind for v in validate_entity(state, schema)]
        assert "condition-pattern" not in kinds
        assert "pattern" not in kinds

    def test_missing_scheme(self, schema):
        state = identifier_state(None, "10.1234/ABC")
        violations = validate_entity(state, schema)
        assert [v.kind for v in violations] == ["missing-required"]
        assert violations[0].path == SCHEME

    def test_agreement_with_independent_regex(self, schema):
        pattern = re.compile(r"^10\.\d{4,9}/[-._;()/:A-Z0-9]+$")
        for candidate in ("10.1234/ABC", "10.99999/X-:9", "hello", "10.1/SHORT", "10.1234/abc"):
            state = identifier_state(DOI, candidate)
            kinds = [v.kind for v in validate_entity(state, schema)]
            if pattern.search(candidate):
                assert "condition-pattern" not in kinds
            else:
                assert "condition-pattern" in kinds


class TestCheckCondition:
    def test_true_when_triple_present(self):
        cond = ConditionSpec(SCHEME, DOI)
        assert check_condition(identifier_state(DOI, None), cond)

    def test_false_for_other_value(self):
        cond = ConditionSpec(SCHEME, DOI)
        assert not check_condition(identifier_state(ISSN, None), cond)

    def test_false_when_path_absent(self):
        cond = ConditionSpec(SCHEME, DOI)
        assert not check_condition(identifier_state(None, None), cond)


class TestCardinalityAndClosedWorld:
    def test_too_many_values(self, schema):
        state = EntityState(
            ENT,
            {
                Triple(ENT, SCHEME, DOI),
                Triple(ENT, VALUE, Literal("10.1234/A")),
                Triple(ENT, VALUE, Literal("10.1234/B")),
            },
        )
        kinds = [v.kind for v in validate_entity(state, schema)]
        assert kinds == ["too-many"]

    def test_undeclared_property_flagged(self, schema):
        state = EntityState(
            ENT,
            {
                Triple(ENT, SCHEME, DOI),
                Triple(ENT, VALUE, Literal("10.1234/A")),
                Triple(ENT, Iri("http://ex.org/sneaky"), Literal("x")),
            },
        )
        violations = validate_entity(state, schema)
        assert [v.kind for v in violations] == ["undeclared-property"]
        assert violations[0].path == Iri("http://ex.org/sneaky")

    def test_rdf_type_exempt(self, schema):
        state = identifier_state(DOI, "10.1234/A")
        assert validate_entity(state, schema) == []

    def test_empty_schema_empty_state(self):
        schema = FormSchema(Iri("http://ex.org/shape/S"), Iri("http://ex.org/C"), ())
        assert validate_entity(EntityState(Iri("http://ex.org/e")), schema) == []

    def test_wrong_datatype(self, schema):
        state = EntityState(
            ENT,
            {
                Triple(ENT, SCHEME, DOI),
                Triple(ENT, VALUE, Literal("2020", XSD.gYear)),
            },
        )
        kinds = [v.kind for v in validate_entity(state, schema)]
        assert "datatype" in kinds

    def test_not_in_options(self, schema):
        state = identifier_state(Iri(DATACITE + "pmid"), "10.1234/A")
        kinds = [v.kind for v in validate_entity(state, schema)]
        assert kinds == ["not-in-options"]

    def test_deterministic_order(self, schema):
        state = EntityState(ENT, {Triple(ENT, Iri("http://ex.org/z"), Literal("x"))})
        first = validate_entity(state, schema)
        assert first == validate_entity(state, schema)
        # field order first (scheme before value), undeclared last
        assert [v.path for v in first] == [SCHEME, VALUE, Iri("http://ex.org/z")]


class TestCoerceLiteral:
    def test_valid_date(self):
        assert coerce_literal("2024-05-02", XSD.date) == Literal("2024-05-02", XSD.date)

    def test_invalid_date_day(self):
        with pytest.raises(CoercionError):
            coerce_literal("2024-02-30", XSD.date)

    def test_gyear(self):
        assert coerce_literal("1998", XSD.gYear).datatype == XSD.gYear
        with pytest.raises(CoercionError):
            coerce_literal("abc", XSD.gYear)
        with pytest.raises(CoercionError):
            coerce_literal("98", XSD.gYear)

    def test_datetime(self):
        assert coerce_literal("2024-05-02T10:00:00Z", XSD.dateTime).datatype == XSD.dateTime
        with pytest.raises(CoercionError):
            coerce_literal("2024-05-02", XSD.dateTime)

    def test_integer_decimal_boolean(self):
        assert coerce_literal("-42", XSD.integer).lexical == "-42"
        assert coerce_literal("3.14", XSD.decimal).datatype == XSD.decimal
        assert coerce_literal("true", XSD.boolean).datatype == XSD.boolean
        with pytest.raises(CoercionError):
            coerce_literal("3.14", XSD.integer)
        with pytest.raises(CoercionError):
            coerce_literal("yes", XSD.boolean)

    def test_unknown_datatype_passes_through(self):
        dt = Iri("http://ex.org/custom")
        assert coerce_literal("anything", dt).datatype == dt

    def test_language_tagged(self):
        lit = coerce_literal("ciao", XSD.string, language="it")
        assert lit.language == "it"
