"""Shared bibliographic fixture: shape catalog, display rules, corpus seeding.

The corpus mirrors a small scholarly-metadata collection: journal articles
with DOI identifiers, author role proxies chained for ordering, a journal
hierarchy, and two seeded duplicate persons.
"""

from datetime import datetime, timedelta, timezone

from provcurate.curation import CurationEngine, SequentialMintStrategy, UuidMintStrategy
from provcurate.diagnostics import DiagnosticLog
from provcurate.display import OrphanPolicy, load_rules
from provcurate.model import EntityState, GraphDelta
from provcurate.provenance import AgentId, ProvenanceEngine
from provcurate.shacl import parse_shapes
from provcurate.store import MemoryQuadStore
from provcurate.terms import RDF, Iri, Literal, Triple

BASE = "https://w3id.org/example"

FABIO = "http://purl.org/spar/fabio/"
DATACITE = "http://purl.org/spar/datacite/"
LITERAL = "http://www.essepuntato.it/2010/06/literalreification/"
PRO = "http://purl.org/spar/pro/"
CITO = "http://purl.org/spar/cito/"
FOAF = "http://xmlns.com/foaf/0.1/"
DCTERMS = "http://purl.org/dc/terms/"
FRBR = "http://purl.org/vocab/frbr/core#"
PRISM = "http://prismstandard.org/namespaces/basic/2.0/"
OCO = "https://w3id.org/oc/ontology/"
SHAPES = "https://w3id.org/example/shape/"

ARTICLE_SHAPE = Iri(SHAPES + "ArticleShape")
IDENTIFIER_SHAPE = Iri(SHAPES + "IdentifierShape")
ROLE_SHAPE = Iri(SHAPES + "RoleShape")
PERSON_SHAPE = Iri(SHAPES + "PersonShape")
JOURNAL_SHAPE = Iri(SHAPES + "JournalShape")
CITATION_SHAPE = Iri(SHAPES + "CitationShape")

TITLE = Iri(DCTERMS + "title")
PUB_DATE = Iri(PRISM + "publicationDate")
HAS_IDENTIFIER = Iri(DATACITE + "hasIdentifier")
USES_SCHEME = Iri(DATACITE + "usesIdentifierScheme")
LITERAL_VALUE = Iri(LITERAL + "hasLiteralValue")
DOI = Iri(DATACITE + "doi")
CONTEXT_FOR = Iri(PRO + "isDocumentContextFor")
WITH_ROLE = Iri(PRO + "withRole")
HELD_BY = Iri(PRO + "isHeldBy")
AUTHOR_ROLE = Iri(PRO + "author")
EDITOR_ROLE = Iri(PRO + "editor")
HAS_NEXT = Iri(OCO + "hasNext")
NAME = Iri(FOAF + "name")
GIVEN_NAME = Iri(FOAF + "givenName")
FAMILY_NAME = Iri(FOAF + "familyName")
PART_OF = Iri(FRBR + "partOf")
CITING = Iri(CITO + "hasCitingEntity")
CITED = Iri(CITO + "hasCitedEntity")

ARTICLE_CLASS = Iri(FABIO + "JournalArticle")
JOURNAL_CLASS = Iri(FABIO + "Journal")
IDENTIFIER_CLASS = Iri(DATACITE + "Identifier")
ROLE_CLASS = Iri(PRO + "RoleInTime")
PERSON_CLASS = Iri(FOAF + "Person")
CITATION_CLASS = Iri(CITO + "Citation")

SHAPES_TTL = f"""
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix xsd: <http://www.w3.org/2001/XMLSchema#> .
@prefix shape: <{SHAPES}> .
@prefix fabio: <{FABIO}> .
@prefix datacite: <{DATACITE}> .
@prefix literal: <{LITERAL}> .
@prefix pro: <{PRO}> .
@prefix cito: <{CITO}> .
@prefix foaf: <{FOAF}> .
@prefix dcterms: <{DCTERMS}> .
@prefix frbr: <{FRBR}> .
@prefix prism: <{PRISM}> .
@prefix oco: <{OCO}> .

shape:ArticleShape a sh:NodeShape ;
  sh:targetClass fabio:JournalArticle ;
  sh:property [ sh:path dcterms:title ; sh:datatype xsd:string ; sh:minCount 1 ; sh:maxCount 1 ] ;
  sh:property [ sh:path prism:publicationDate ; sh:datatype xsd:date ; sh:maxCount 1 ] ;
  sh:property [ sh:path datacite:hasIdentifier ; sh:node shape:IdentifierShape ] ;
  sh:property [ sh:path pro:isDocumentContextFor ; sh:node shape:RoleShape ] ;
  sh:property [ sh:path frbr:partOf ; sh:node shape:JournalShape ; sh:maxCount 1 ] .

shape:IdentifierShape a sh:NodeShape ;
  sh:targetClass datacite:Identifier ;
  sh:property [
    sh:path datacite:usesIdentifierScheme ;
    sh:minCount 1 ;
    sh:maxCount 1 ;
    sh:in ( datacite:doi ) ;
  ] ;
  sh:property [
    sh:path literal:hasLiteralValue ;
    sh:datatype xsd:string ;
    sh:minCount 1 ;
    sh:maxCount 1 ;
  ] ;
  sh:property [
    sh:path literal:hasLiteralValue ;
    sh:datatype xsd:string ;
    sh:minCount 1 ;
    sh:maxCount 1 ;
    sh:condition [
      sh:path datacite:usesIdentifierScheme ;
      sh:hasValue datacite:doi ;
    ] ;
    sh:pattern "^10\\\\.\\\\d{{4,9}}/[-._;()/:A-Z0-9]+$" ;
  ] .

shape:RoleShape a sh:NodeShape ;
  sh:targetClass pro:RoleInTime ;
  sh:property [ sh:path pro:withRole ; sh:minCount 1 ; sh:maxCount 1 ; sh:in ( pro:author pro:editor ) ] ;
  sh:property [ sh:path pro:isHeldBy ; sh:node shape:PersonShape ; sh:minCount 1 ; sh:maxCount 1 ] ;
  sh:property [ sh:path oco:hasNext ; sh:node shape:RoleShape ; sh:maxCount 1 ] .

shape:PersonShape a sh:NodeShape ;
  sh:targetClass foaf:Person ;
  sh:property [ sh:path foaf:name ; sh:datatype xsd:string ; sh:maxCount 1 ] ;
  sh:property [ sh:path foaf:givenName ; sh:datatype xsd:string ; sh:maxCount 1 ] ;
  sh:property [ sh:path foaf:familyName ; sh:datatype xsd:string ; sh:maxCount 1 ] ;
  sh:property [ sh:path datacite:hasIdentifier ; sh:node shape:IdentifierShape ] .

shape:JournalShape a sh:NodeShape ;
  sh:targetClass fabio:Journal ;
  sh:property [ sh:path dcterms:title ; sh:datatype xsd:string ; sh:minCount 1 ; sh:maxCount 1 ] .

shape:CitationShape a sh:NodeShape ;
  sh:targetClass cito:Citation ;
  sh:property [ sh:path cito:hasCitingEntity ; sh:minCount 1 ; sh:maxCount 1 ] ;
  sh:property [ sh:path cito:hasCitedEntity ; sh:minCount 1 ; sh:maxCount 1 ] .
"""

RULES_YAML = f"""
defaults:
  lock_ttl_seconds: 300
entities:
  - shape: {ARTICLE_SHAPE.value}
    label_query: |
      SELECT ?label WHERE {{ ?entity <{TITLE.value}> ?label }}
    fields:
      - path: {TITLE.value}
        display_name: Title
        order: 1
      - path: {PUB_DATE.value}
        display_name: Publication date
        order: 2
      - path: {HAS_IDENTIFIER.value}
        display_name: Identifiers
        order: 3
      - path: {CONTEXT_FOR.value}
        display_name: Authors
        order: 4
      - path: {PART_OF.value}
        display_name: Published in
        order: 5
    ordering:
      ordered_path: {CONTEXT_FOR.value}
      chain_predicate: {HAS_NEXT.value}
    virtual_properties:
      - label: cites
        target_shape: {CITATION_SHAPE.value}
        intermediate_class: {CITATION_CLASS.value}
        link_from: {CITING.value}
        link_to: {CITED.value}
  - shape: {PERSON_SHAPE.value}
    label_query: |
      SELECT ?label WHERE {{ ?entity <{NAME.value}> ?label }}
    duplicates:
      any_of:
        - all_of: [{NAME.value}]
        - all_of: [{GIVEN_NAME.value}, {FAMILY_NAME.value}]
  - shape: {IDENTIFIER_SHAPE.value}
    fields:
      - path: {USES_SCHEME.value}
        display_name: Scheme
        order: 1
      - path: {LITERAL_VALUE.value}
        display_name: Value
        order: 2
        autocomplete:
          min_chars: 4
          target: parent
"""

AGENT = AgentId("https://orcid.org/0000-0001-0000-0001")
SECOND_AGENT = AgentId("https://orcid.org/0000-0002-0000-0002")
BASELINE_AT = datetime(2022, 6, 1, tzinfo=timezone.utc)
EPOCH = datetime(2024, 3, 1, 9, 0, 0, tzinfo=timezone.utc)


def at(minutes: float) -> datetime:
    return EPOCH + timedelta(minutes=minutes)


def build_catalog():
    return parse_shapes(SHAPES_TTL)


def build_engines(
    default_policy: OrphanPolicy = OrphanPolicy.KEEP,
    mint: str = "uuid",
):
    store = MemoryQuadStore(base_iri=BASE)
    catalog = build_catalog()
    rules = load_rules(RULES_YAML, catalog)
    provenance = ProvenanceEngine(
        store,
        baseline_source="https://bibdata.example/dump/2022-06",
        baseline_created_at=BASELINE_AT,
    )
    strategy = (
        SequentialMintStrategy(BASE, store) if mint == "sequential" else UuidMintStrategy(BASE)
    )
    curation = CurationEngine(
        store,
        provenance,
        catalog,
        rules,
        strategy,
        default_orphan_policy=default_policy,
        diagnostics=DiagnosticLog(),
    )
    return store, provenance, curation


def seed_corpus(store: MemoryQuadStore, articles: int = 100):
    """Load a pre-existing collection (no provenance): `articles` journal
    articles, each with a DOI identifier and one author role, plus one
    journal and two duplicate person records."""
    triples: set[Triple] = set()

    def add(s, p, o):
        triples.add(Triple(s, p, o))

    journal = Iri(f"{BASE}/journal/1")
    add(journal, RDF.type, JOURNAL_CLASS)
    add(journal, TITLE, Literal("Journal of Examples"))

    duplicates = (Iri(f"{BASE}/person/dup-a"), Iri(f"{BASE}/person/dup-b"))
    add(duplicates[0], RDF.type, PERSON_CLASS)
    add(duplicates[0], NAME, Literal("Ada Lovelace"))
    add(duplicates[0], GIVEN_NAME, Literal("Ada"))
    add(duplicates[0], FAMILY_NAME, Literal("Lovelace"))
    add(duplicates[1], RDF.type, PERSON_CLASS)
    add(duplicates[1], NAME, Literal("Ada Lovelace"))

    entities = {"journal": journal, "duplicates": duplicates, "articles": [], "identifiers": [],
                "roles": [], "persons": []}
    for i in range(1, articles + 1):
        article = Iri(f"{BASE}/article/{i}")
        ident = Iri(f"{BASE}/identifier/{i}")
        role = Iri(f"{BASE}/role/{i}")
        person = duplicates[0] if i == 1 else (duplicates[1] if i == 2 else Iri(f"{BASE}/person/{i}"))
        add(article, RDF.type, ARTICLE_CLASS)
        add(article, TITLE, Literal(f"Findings in example science {i}"))
        add(article, HAS_IDENTIFIER, ident)
        add(article, CONTEXT_FOR, role)
        add(article, PART_OF, journal)
        add(ident, RDF.type, IDENTIFIER_CLASS)
        add(ident, USES_SCHEME, DOI)
        add(ident, LITERAL_VALUE, Literal(f"10.9999/EXAMPLE.{i}"))
        add(role, RDF.type, ROLE_CLASS)
        add(role, WITH_ROLE, AUTHOR_ROLE)
        add(role, HELD_BY, person)
        if person not in (duplicates[0], duplicates[1]):
            add(person, RDF.type, PERSON_CLASS)
            add(person, NAME, Literal(f"Author Number{i}"))
        entities["articles"].append(article)
        entities["identifiers"].append(ident)
        entities["roles"].append(role)
        entities["persons"].append(person)
    store.apply_update([(None, GraphDelta(insertions=frozenset(triples)))])
    return entities
