"""Delta algebra: diff/apply/invert plus the restricted serialization."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from provcurate.errors import ParseError, ReplayIntegrityError, UnsupportedDeltaError
from provcurate.model import (
    EntityState,
    GraphDelta,
    apply_delta,
    canonical_state,
    diff,
    invert_delta,
    parse_delta,
    serialize_delta,
)
from provcurate.terms import XSD, Iri, Literal, Triple

E = Iri("http://ex.org/e/1")
P = Iri("http://ex.org/p/title")
Q = Iri("http://ex.org/p/year")


def lit(s, dt=None):
    return Literal(s, dt or XSD.string)


def t(pred, obj):
    return Triple(E, pred, obj)


class TestStateAndDiff:
    def test_diff_creation_case(self):
        before = EntityState(E)
        after = EntityState(E, {t(P, lit("x"))})
        d = diff(before, after)
        assert d.deletions == frozenset()
        assert d.insertions == {t(P, lit("x"))}

    def test_diff_identity(self):
        s = EntityState(E, {t(P, lit("x"))})
        assert diff(s, s).empty

    def test_diff_entity_mismatch(self):
        other = EntityState(Iri("http://ex.org/e/2"))
        with pytest.raises(ValueError):
            diff(EntityState(E), other)

    def test_state_rejects_foreign_subject(self):
        foreign = Triple(Iri("http://ex.org/e/2"), P, lit("x"))
        with pytest.raises(ValueError):
            EntityState(E, {foreign})

    def test_apply_insert(self):
        s = apply_delta(EntityState(E), GraphDelta(insertions={t(P, lit("o"))}))
        assert s.triples == {t(P, lit("o"))}

    def test_apply_delete(self):
        s = apply_delta(
            EntityState(E, {t(P, lit("o"))}),
            GraphDelta(deletions={t(P, lit("o"))}),
        )
        assert s.empty

    def test_apply_strict_phantom_deletion(self):
        with pytest.raises(ReplayIntegrityError):
            apply_delta(
                EntityState(E, {t(P, lit("o"))}),
                GraphDelta(deletions={t(Q, lit("z"))}),
            )

    def test_apply_strict_duplicate_insertion(self):
        with pytest.raises(ReplayIntegrityError):
            apply_delta(
                EntityState(E, {t(P, lit("o"))}),
                GraphDelta(insertions={t(P, lit("o"))}),
            )

    def test_delta_rejects_overlap(self):
        with pytest.raises(ValueError):
            GraphDelta(deletions={t(P, lit("o"))}, insertions={t(P, lit("o"))})


class TestInversion:
    def test_swap(self):
        d = GraphDelta(deletions={t(P, lit("a"))}, insertions={t(Q, lit("b"))})
        inv = invert_delta(d)
        assert inv.deletions == d.insertions
        assert inv.insertions == d.deletions

    def test_empty_identity(self):
        assert invert_delta(GraphDelta()).empty


class TestSerialization:
    def test_single_triple_render(self):
        d = GraphDelta(insertions={t(P, lit("x"))})
        text = serialize_delta(d)
        assert text == (
            "INSERT DATA {\n"
            '  <http://ex.org/e/1> <http://ex.org/p/title> "x"^^<http://www.w3.org/2001/XMLSchema#string> .\n'
            "}"
        )

    def test_empty_delta_serializes_empty(self):
        assert serialize_delta(GraphDelta()) == ""
        assert parse_delta("").empty

    def test_deterministic_ordering(self):
        triples = [t(P, lit(str(i))) for i in range(10)]
        d1 = GraphDelta(insertions=triples)
        d2 = GraphDelta(insertions=list(reversed(triples)))
        assert serialize_delta(d1) == serialize_delta(d2)

    def test_escaping_round_trip(self):
        tricky = 'quote " backslash \\ newline \n tab \t'
        d = GraphDelta(insertions={t(P, lit(tricky))})
        assert parse_delta(serialize_delta(d)) == d

    def test_parse_simple_insert(self):
        d = parse_delta('INSERT DATA { <http://ex.org/e/1> <http://ex.org/p/title> "x" . }')
        assert d.insertions == {t(P, lit("x"))}

    def test_parse_rejects_where(self):
        with pytest.raises(UnsupportedDeltaError):
            parse_delta("DELETE { ?s ?p ?o } WHERE { ?s ?p ?o }")

    def test_parse_rejects_variables(self):
        with pytest.raises(UnsupportedDeltaError):
            parse_delta("INSERT DATA { ?s <http://ex.org/p> <http://ex.org/o> . }")

    def test_parse_rejects_graph_clause(self):
        with pytest.raises(UnsupportedDeltaError):
            parse_delta(
                "INSERT DATA { GRAPH <http://g> { <http://s> <http://p> <http://o> . } }"
            )

    def test_parse_rejects_blank_nodes(self):
        with pytest.raises(UnsupportedDeltaError):
            parse_delta("INSERT DATA { _:b <http://ex.org/p> <http://ex.org/o> . }")

    def test_parse_rejects_duplicate_blocks(self):
        text = "INSERT DATA { <http://s> <http://p> <http://o> . } ; INSERT DATA { }"
        with pytest.raises(ParseError):
            parse_delta(text)

    def test_parse_malformed(self):
        with pytest.raises(ParseError):
            parse_delta("INSERT DATA { <http://s> <http://p> }")


# --- randomized oracles ---------------------------------------------------

_PREDS = [Iri(f"http://ex.org/p/{i}") for i in range(6)]
_OBJECTS = (
    [Literal(w) for w in ("a", "b", "c", 'q"q', "x\\y", "line\nbreak")]
    + [Literal(str(n), XSD.integer) for n in range(3)]
    + [Literal("ciao", language="it"), Iri("http://ex.org/o/1"), Iri("http://ex.org/o/2")]
)


def random_state(rng: random.Random, max_triples: int = 20) -> EntityState:
    n = rng.randint(0, max_triples)
    triples = {Triple(E, rng.choice(_PREDS), rng.choice(_OBJECTS)) for _ in range(n)}
    return EntityState(E, triples)


def test_diff_apply_round_trip_randomized():
    rng = random.Random(7)
    for _ in range(300):
        s1, s2 = random_state(rng), random_state(rng)
        assert apply_delta(s1, diff(s1, s2)) == s2


def test_apply_then_invert_restores():
    rng = random.Random(8)
    for _ in range(300):
        s1, s2 = random_state(rng), random_state(rng)
        d = diff(s1, s2)
        assert apply_delta(apply_delta(s1, d), invert_delta(d)) == s1


def test_double_inversion_identity_fuzz():
    rng = random.Random(9)
    for _ in range(1000):
        s1, s2 = random_state(rng), random_state(rng)
        d = diff(s1, s2)
        assert invert_delta(invert_delta(d)) == d


def test_serialize_parse_round_trip_fuzz():
    rng = random.Random(10)
    for _ in range(1000):
        s1, s2 = random_state(rng), random_state(rng)
        d = diff(s1, s2)
        assert parse_delta(serialize_delta(d)) == d


_term_st = st.one_of(
    st.sampled_from(_OBJECTS),
    st.text(min_size=0, max_size=12).map(Literal),
)
_triple_st = st.builds(Triple, st.just(E), st.sampled_from(_PREDS), _term_st)
_state_st = st.frozensets(_triple_st, max_size=12).map(lambda ts: EntityState(E, ts))


@settings(max_examples=150, deadline=None)
@given(_state_st, _state_st)
def test_property_diff_apply(s1, s2):
    assert apply_delta(s1, diff(s1, s2)) == s2


@settings(max_examples=150, deadline=None)
@given(_state_st, _state_st)
def test_property_serialization_round_trip(s1, s2):
    d = diff(s1, s2)
    assert parse_delta(serialize_delta(d)) == d
    assert serialize_delta(parse_delta(serialize_delta(d))) == serialize_delta(d)


def test_canonical_state_is_sorted_and_stable():
    s = EntityState(E, {t(P, lit("b")), t(P, lit("a")), t(Q, lit("1", XSD.integer))})
    text = canonical_state(s)
    assert text.splitlines() == sorted(text.splitlines())
    assert canonical_state(s) == text
