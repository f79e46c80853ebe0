"""Validated CRUD, merge, ordering, virtual properties, orphan handling,
duplicate detection, and IRI minting on top of the provenance engine.

Every mutating operation computes all touched entity transitions up front
and commits them in one atomic update: a failure at any sub-step leaves
the data store untouched. Callers must hold the per-entity edit locks;
enforcement lives in the API layer.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field as dc_field
from datetime import datetime, timezone

from .diagnostics import DiagnosticLog
from .display import (
    DisplayRules,
    EntityConfig,
    OrderingRule,
    OrphanPolicy,
    VirtualPropertyRule,
    build_duplicate_query,
    compute_label,
    resolve_entity_config,
)
from .errors import (
    MergeError,
    MintError,
    NoApplicableClauseError,
    NoOpError,
    NoShapeError,
    NotFoundError,
    OrderError,
    OrphanDecisionRequired,
    ValidationError,
)
from .model import EntityState, GraphDelta
from .provenance import AgentId, ChangeSpec, ProvenanceEngine, Snapshot, snapshot_iri
from .shacl import FormSchema, ShapeCatalog, compile_shape, resolve_shape
from .store.base import Store
from .terms import RDF, XSD, Iri, Literal, Term, Triple
from .validation import CoercionError, Violation, coerce_literal, validate_entity

__all__ = [
    "LiteralValue",
    "ReferenceValue",
    "NestedValue",
    "VirtualTargetValue",
    "FormSubmission",
    "MintStrategy",
    "UuidMintStrategy",
    "SequentialMintStrategy",
    "mint_iri",
    "OrphanCandidate",
    "MergeReport",
    "CurationEngine",
]


# --- submissions -------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class LiteralValue:
    text: str
    datatype: Iri | None = None
    language: str | None = None


@dataclass(frozen=True, slots=True)
class ReferenceValue:
    iri: Iri


@dataclass(frozen=True, slots=True)
class NestedValue:
    submission: "FormSubmission"


@dataclass(frozen=True, slots=True)
class VirtualTargetValue:
    iri: Iri


SubmissionValue = LiteralValue | ReferenceValue | NestedValue | VirtualTargetValue


@dataclass(frozen=True, slots=True)
class FormSubmission:
    """Keys are property-path IRIs, or virtual-property labels for fields
    that expand into intermediate entities."""

    shape: Iri | None = None
    values: dict[str, list[SubmissionValue]] = dc_field(default_factory=dict)


# --- minting -----------------------------------------------------------------


class MintStrategy:
    name = "abstract"

    def mint(self, kind: Iri) -> Iri:  # pragma: no cover - interface
        raise NotImplementedError


class UuidMintStrategy(MintStrategy):
    name = "uuid"

    def __init__(self, base_iri: str):
        self.base_iri = base_iri.rstrip("/")

    def mint(self, kind: Iri) -> Iri:
        return Iri(f"{self.base_iri}/id/{uuid.uuid4().hex}")


_COUNTER_PREDICATE = Iri("urn:provcurate:counter")


class SequentialMintStrategy(MintStrategy):
    """Per-class counters persisted in a reserved provenance graph.
    Counter advances are immediate and mutex-guarded, so a rolled-back
    creation skips a number, like any database sequence."""

    name = "sequential"

    def __init__(self, base_iri: str, store: Store):
        self.base_iri = base_iri.rstrip("/")
        self.store = store
        self.counter_graph = Iri(f"{self.base_iri}/prov/counters/")
        self._cache: dict[Iri, int] = {}
        self._mutex = threading.Lock()

    def _prefix(self, kind: Iri) -> str:
        return f"{self.base_iri}/{kind.local_name().lower()}/"

    def _load(self, kind: Iri) -> int:
        rows = self.store.select_prov(
            f"SELECT ?n WHERE {{ GRAPH <{self.counter_graph.value}> "
            f"{{ <{kind.value}> <{_COUNTER_PREDICATE.value}> ?n }} }}"
        )
        values = [int(r["n"].lexical) for r in rows if isinstance(r.get("n"), Literal)]
        if values:
            return max(values)
        # no persisted counter yet: resume above any pre-existing IRIs that
        # already follow this naming scheme (imported collections)
        prefix = self._prefix(kind)
        rows = self.store.select(
            f'SELECT DISTINCT ?s WHERE {{ ?s ?p ?o . FILTER(STRSTARTS(STR(?s), "{prefix}")) }}'
        )
        highest = 0
        for row in rows:
            subject = row.get("s")
            if isinstance(subject, Iri):
                suffix = subject.value[len(prefix):]
                if suffix.isdigit():
                    highest = max(highest, int(suffix))
        return highest

    def mint(self, kind: Iri) -> Iri:
        with self._mutex:
            current = self._cache.get(kind)
            if current is None:
                current = self._load(kind)
            nxt = current + 1
            deletions = (
                {Triple(kind, _COUNTER_PREDICATE, Literal(str(current), XSD.integer))}
                if current
                else set()
            )
            self.store.apply_update(
                [
                    (
                        self.counter_graph,
                        GraphDelta(
                            deletions=frozenset(deletions),
                            insertions={
                                Triple(kind, _COUNTER_PREDICATE, Literal(str(nxt), XSD.integer))
                            },
                        ),
                    )
                ]
            )
            self._cache[kind] = nxt
        return Iri(f"{self._prefix(kind)}{nxt}")


def mint_iri(kind: Iri, strategy: MintStrategy, store: Store, attempts: int = 3) -> Iri:
    """Fresh IRI, collision-checked against the data store."""
    for _ in range(attempts):
        candidate = strategy.mint(kind)
        if not store.iri_in_use(candidate):
            return candidate
    raise MintError(f"could not mint an unused IRI for {kind} after {attempts} attempts")


# --- reports -------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class OrphanCandidate:
    entity: Iri
    reason: str  # "unreferenced" | "proxy-detached"

    def __post_init__(self):
        if self.reason not in ("unreferenced", "proxy-detached"):
            raise ValueError(f"unknown orphan reason {self.reason!r}")


@dataclass(frozen=True, slots=True)
class MergeReport:
    survivor: Iri
    absorbed: Iri
    rewritten_subjects: tuple[Iri, ...]
    incorporated: tuple[Triple, ...]
    snapshots: tuple[Snapshot, ...]


@dataclass(slots=True)
class _Transition:
    """Accumulates one entity's before/after inside a pending commit."""

    before: EntityState
    after: EntityState
    kind: str = "update"
    description: str = ""


@dataclass(slots=True)
class _Build:
    """Scratch state for one submission build."""

    creates: dict[Iri, tuple[EntityState, FormSchema | None]] = dc_field(default_factory=dict)
    violations: list[Violation] = dc_field(default_factory=list)
    path_order: dict[Iri, list[Iri]] = dc_field(default_factory=dict)


class CurationEngine:
    def __init__(
        self,
        store: Store,
        provenance: ProvenanceEngine,
        catalog: ShapeCatalog,
        rules: DisplayRules,
        mint_strategy: MintStrategy,
        default_orphan_policy: OrphanPolicy = OrphanPolicy.ASK,
        diagnostics: DiagnosticLog | None = None,
        shape_preference: tuple[Iri, ...] = (),
    ):
        self.store = store
        self.provenance = provenance
        self.catalog = catalog
        self.rules = rules
        self.mint_strategy = mint_strategy
        self.default_orphan_policy = default_orphan_policy
        self.diagnostics = diagnostics or DiagnosticLog()
        self.shape_preference = shape_preference

    # -- config plumbing ---------------------------------------------------------

    def resolve_schema(self, state: EntityState, shape: Iri | None = None) -> FormSchema | None:
        if shape is not None:
            return compile_shape(shape, self.catalog)
        try:
            resolved = resolve_shape(state, self.catalog, self.shape_preference)
        except NoShapeError:
            return None
        return compile_shape(resolved, self.catalog)

    def config_for(self, state: EntityState, shape: Iri | None) -> EntityConfig | None:
        classes = sorted(
            (o for o in state.objects(RDF.type) if isinstance(o, Iri)), key=lambda c: c.value
        )
        class_iri = classes[0] if classes else None
        return resolve_entity_config(class_iri, shape, self.rules)

    def config_for_shape(self, shape: Iri) -> EntityConfig | None:
        node = self.catalog.get(shape)
        target = node.target_class if node else None
        return resolve_entity_config(target, shape, self.rules)

    def orphan_policy_for(self, config: EntityConfig | None) -> OrphanPolicy:
        if config is not None and config.orphan_policy is not None:
            return config.orphan_policy
        if self.rules.defaults.orphan_policy is not None:
            return self.rules.defaults.orphan_policy
        return self.default_orphan_policy

    def label_for(self, entity: Iri, config: EntityConfig | None = None) -> str:
        if config is None:
            state = self.store.fetch_entity_state(entity)
            schema = self.resolve_schema(state) if not state.empty else None
            config = self.config_for(state, schema.shape if schema else None)
        return compute_label(entity, config, self.store, self.diagnostics)

    # -- virtual properties ----------------------------------------------------------

    def expand_virtual_property(
        self, rule: VirtualPropertyRule, subject: Iri, target: Iri
    ) -> tuple[Iri, frozenset[Triple]]:
        if not self.store.entity_exists(target):
            raise NotFoundError(f"virtual property target {target} does not exist")
        intermediate = mint_iri(rule.intermediate_class, self.mint_strategy, self.store)
        triples = frozenset(
            {
                Triple(intermediate, RDF.type, rule.intermediate_class),
                Triple(intermediate, rule.link_from, subject),
                Triple(intermediate, rule.link_to, target),
            }
        )
        schema = compile_shape(rule.target_shape, self.catalog)
        violations = validate_entity(EntityState(intermediate, triples), schema)
        if violations:
            raise ValidationError(violations)
        return intermediate, triples

    # -- submission building ------------------------------------------------------------

    def _literal_datatype(self, schema: FormSchema | None, path: Iri) -> Iri:
        if schema is not None:
            form_field = schema.field_for(path)
            if form_field is not None:
                for rule in form_field.rules:
                    if rule.kind == "datatype" and rule.condition is None and rule.datatypes:
                        return rule.datatypes[0]
        return XSD.string

    def _build_entity(
        self,
        entity: Iri,
        submission: FormSubmission,
        schema: FormSchema | None,
        config: EntityConfig | None,
        build: _Build,
        include_type: bool,
        depth: int = 0,
    ) -> frozenset[Triple]:
        """Build the editable triples for `entity`; nested and virtual
        entities are minted and recorded in `build.creates` depth-first."""
        if depth > 12:
            raise ValidationError(
                [Violation(RDF.type, "too-many", "submission nests deeper than 12 levels")]
            )
        triples: set[Triple] = set()
        if include_type and schema is not None:
            triples.add(Triple(entity, RDF.type, schema.target_class))
        ordered_path = config.ordering.ordered_path if config and config.ordering else None

        for key, values in submission.values.items():
            virtual = config.virtual_property(key) if config is not None else None
            if virtual is not None:
                for value in values:
                    if not isinstance(value, (VirtualTargetValue, ReferenceValue)):
                        raise ValidationError(
                            [
                                Violation(
                                    virtual.link_to,
                                    "datatype",
                                    f"virtual property {key!r} takes entity references",
                                )
                            ]
                        )
                    intermediate, vtriples = self.expand_virtual_property(
                        virtual, entity, value.iri
                    )
                    build.creates[intermediate] = (
                        EntityState(intermediate, vtriples),
                        compile_shape(virtual.target_shape, self.catalog),
                    )
                continue
            path = Iri(key)
            form_field = schema.field_for(path) if schema is not None else None
            if schema is not None and form_field is None and path != RDF.type:
                build.violations.append(
                    Violation(path, "undeclared-property", "property is not declared by the shape")
                )
                continue
            for value in values:
                obj: Term | None = None
                if isinstance(value, LiteralValue):
                    datatype = value.datatype or self._literal_datatype(schema, path)
                    try:
                        obj = coerce_literal(value.text, datatype, value.language)
                    except CoercionError as exc:
                        build.violations.append(Violation(path, "datatype", str(exc)))
                        continue
                elif isinstance(value, ReferenceValue):
                    # only entity references (nested-shape fields) need an
                    # existence check; dropdown options are vocabulary IRIs
                    must_exist = form_field is not None and form_field.nested_shape is not None
                    if (
                        must_exist
                        and value.iri not in build.creates
                        and not self.store.entity_exists(value.iri)
                    ):
                        raise NotFoundError(f"referenced entity {value.iri} does not exist")
                    obj = value.iri
                elif isinstance(value, NestedValue):
                    nested_shape = value.submission.shape or (
                        form_field.nested_shape if form_field else None
                    )
                    if nested_shape is None:
                        raise ValidationError(
                            [Violation(path, "datatype", "nested value needs a shape")]
                        )
                    child_schema = compile_shape(nested_shape, self.catalog)
                    child_config = self.config_for_shape(nested_shape)
                    child = mint_iri(child_schema.target_class, self.mint_strategy, self.store)
                    child_triples = self._build_entity(
                        child, value.submission, child_schema, child_config, build, True, depth + 1
                    )
                    build.creates[child] = (EntityState(child, child_triples), child_schema)
                    obj = child
                else:
                    raise ValidationError(
                        [Violation(path, "datatype", f"{key!r} is not a virtual property")]
                    )
                triples.add(Triple(entity, path, obj))
                if path == ordered_path and isinstance(obj, Iri):
                    build.path_order.setdefault(path, [])
                    if obj not in build.path_order[path]:
                        build.path_order[path].append(obj)
        return frozenset(triples)

    # -- orphan handling -----------------------------------------------------------------

    def find_orphans(
        self,
        severed_objects: set[Iri],
        ordering: OrderingRule | None,
        removed: frozenset[Triple] = frozenset(),
        added: frozenset[Triple] = frozenset(),
    ) -> list[OrphanCandidate]:
        candidates = []
        for obj in sorted(severed_objects, key=lambda o: o.value):
            if ordering is not None and any(
                t.object == obj and t.predicate == ordering.ordered_path for t in removed
            ):
                candidates.append(OrphanCandidate(obj, "proxy-detached"))
                continue
            remaining = {
                t for t in self.store.fetch_inbound(obj) if t not in removed
            } | {t for t in added if t.object == obj}
            if not remaining:
                candidates.append(OrphanCandidate(obj, "unreferenced"))
        return candidates

    def _apply_orphan_policy(
        self,
        candidates: list[OrphanCandidate],
        policy: OrphanPolicy,
        decisions: dict[Iri, str] | None,
        transitions: dict[Iri, _Transition],
        removed: frozenset[Triple],
    ):
        if not candidates:
            return
        if policy == OrphanPolicy.KEEP:
            return
        if policy == OrphanPolicy.ASK:
            decisions = decisions or {}
            undecided = [c for c in candidates if decisions.get(c.entity) not in ("keep", "delete")]
            if undecided:
                raise OrphanDecisionRequired(candidates)
            doomed = [c.entity for c in candidates if decisions.get(c.entity) == "delete"]
        else:
            doomed = [c.entity for c in candidates]
        for orphan in doomed:
            self._stage_delete(orphan, transitions, removed, description="Deleted as orphan")

    def _stage_delete(
        self,
        entity: Iri,
        transitions: dict[Iri, _Transition],
        removed: frozenset[Triple],
        description: str,
    ):
        transition = transitions.setdefault(
            entity,
            _Transition(
                before=self.store.fetch_entity_state(entity),
                after=EntityState(entity),
            ),
        )
        transition.after = EntityState(entity)
        transition.kind = "delete"
        transition.description = description
        # drop every remaining inbound reference to the deleted entity
        for t in self.store.fetch_inbound(entity):
            if t in removed or t.subject == entity:
                continue
            subject = t.subject
            if not isinstance(subject, Iri):
                continue
            sub = transitions.setdefault(
                subject,
                _Transition(
                    before=self.store.fetch_entity_state(subject),
                    after=self.store.fetch_entity_state(subject),
                    description="Removed reference to deleted entity",
                ),
            )
            if sub.kind == "delete":
                continue
            sub.after = sub.after.with_triples(
                {x for x in sub.after.triples if x.object != entity}
            )

    # -- commit plumbing --------------------------------------------------------------------

    def _commit(
        self,
        transitions: dict[Iri, _Transition],
        agent: AgentId,
        source: str,
        at: datetime | None,
        allow_empty: frozenset[Iri] | set[Iri] = frozenset(),
        extra_derived: dict[Iri, tuple[Iri, ...]] | None = None,
    ) -> dict[Iri, Snapshot]:
        at = at or datetime.now(timezone.utc)
        changes = []
        for entity, tr in transitions.items():
            if (
                tr.kind == "update"
                and tr.before.triples == tr.after.triples
                and entity not in allow_empty
            ):
                continue  # untouched bystander
            changes.append(
                ChangeSpec(
                    entity,
                    tr.kind,
                    tr.before,
                    tr.after,
                    description=tr.description,
                    extra_derived=(extra_derived or {}).get(entity, ()),
                    allow_empty=entity in allow_empty,
                )
            )
        if not changes:
            raise NoOpError("nothing to commit")
        return self.provenance.commit(changes, agent, source, at)

    # -- operations ---------------------------------------------------------------------------

    def create_entity(
        self,
        submission: FormSubmission,
        agent: AgentId,
        source: str,
        at: datetime | None = None,
    ) -> Iri:
        schema = compile_shape(submission.shape, self.catalog) if submission.shape else None
        config = self.config_for_shape(submission.shape) if submission.shape else None
        kind = schema.target_class if schema else Iri(f"{RDF.prefix}Resource")
        root = mint_iri(kind, self.mint_strategy, self.store)
        build = _Build()
        root_triples = self._build_entity(root, submission, schema, config, build, True)
        self._chain_created_proxies(root_triples, config, build)
        build.creates[root] = (EntityState(root, root_triples), schema)

        for entity, (state, entity_schema) in build.creates.items():
            if entity_schema is not None:
                build.violations.extend(validate_entity(state, entity_schema))
        if build.violations:
            raise ValidationError(build.violations)

        transitions = {
            entity: _Transition(
                before=EntityState(entity),
                after=state,
                kind="create",
                description="Created entity",
            )
            for entity, (state, _schema) in build.creates.items()
        }
        self._commit(transitions, agent, source, at)
        return root

    def _chain_created_proxies(self, root_triples, config, build: _Build):
        """Newly created ordered proxies get next-links in submission order."""
        if config is None or config.ordering is None:
            return
        ordered = build.path_order.get(config.ordering.ordered_path, [])
        fresh = [p for p in ordered if p in build.creates]
        chain = config.ordering.chain_predicate
        for left, right in zip(fresh, fresh[1:]):
            state, child_schema = build.creates[left]
            build.creates[left] = (
                state.with_triples(state.triples | {Triple(left, chain, right)}),
                child_schema,
            )

    def update_entity(
        self,
        entity: Iri,
        submission: FormSubmission,
        agent: AgentId,
        source: str,
        at: datetime | None = None,
        orphan_decisions: dict[Iri, str] | None = None,
    ) -> Snapshot:
        before = self.store.fetch_entity_state(entity)
        if before.empty:
            raise NotFoundError(f"{entity} does not exist")
        schema = self.resolve_schema(before, submission.shape)
        config = self.config_for(before, submission.shape or (schema.shape if schema else None))

        build = _Build()
        editable = self._build_entity(entity, submission, schema, config, build, False)
        for child, (state, child_schema) in build.creates.items():
            if child_schema is not None:
                build.violations.extend(validate_entity(state, child_schema))

        type_triples = {t for t in before.triples if t.predicate == RDF.type}
        if schema is not None:
            declared = schema.paths
            legacy = {
                t
                for t in before.triples
                if t.predicate != RDF.type and t.predicate not in declared
            }
        else:
            legacy = set()
        editable_state = EntityState(entity, editable | type_triples)
        if schema is not None:
            build.violations.extend(validate_entity(editable_state, schema))
        if build.violations:
            raise ValidationError(build.violations)

        after = EntityState(entity, editable_state.triples | legacy)
        if after.triples == before.triples and not build.creates:
            raise NoOpError(f"{entity} is unchanged")

        transitions: dict[Iri, _Transition] = {
            entity: _Transition(before=before, after=after, description="Updated entity")
        }
        for child, (state, _schema) in build.creates.items():
            transitions[child] = _Transition(
                before=EntityState(child), after=state, kind="create", description="Created entity"
            )
        self._maintain_proxy_chain(entity, before, after, config, build, transitions)

        removed = frozenset(before.triples - transitions[entity].after.triples)
        added_refs = frozenset(
            t for state, _ in build.creates.values() for t in state.triples
        ) | frozenset(transitions[entity].after.triples - before.triples)
        removed_refs = {
            t.object
            for t in removed
            if isinstance(t.object, Iri) and t.predicate != RDF.type and t.object != entity
        }
        kept_refs = {
            t.object for t in transitions[entity].after.triples if t.predicate != RDF.type
        }
        severed = removed_refs - kept_refs
        ordering = config.ordering if config else None
        candidates = self.find_orphans(severed, ordering, removed, added_refs)
        policy = self.orphan_policy_for(config)
        self._apply_orphan_policy(candidates, policy, orphan_decisions, transitions, removed)

        snapshots = self._commit(transitions, agent, source, at)
        return snapshots[entity]

    def _maintain_proxy_chain(self, entity, before, after, config, build: _Build, transitions):
        """Repair next-links when the set of ordered proxies changes."""
        if config is None or config.ordering is None:
            return
        rule = config.ordering
        before_objs = {o for o in before.objects(rule.ordered_path) if isinstance(o, Iri)}
        after_objs = {o for o in after.objects(rule.ordered_path) if isinstance(o, Iri)}
        if before_objs == after_objs:
            return
        walk = self._walk_chain(entity, rule)
        kept = [p for p in walk if p in after_objs]
        submitted = build.path_order.get(rule.ordered_path, [])
        new = [p for p in submitted if p in after_objs and p not in before_objs]
        for p in sorted(after_objs - before_objs - set(new), key=lambda p: p.value):
            new.append(p)
        desired = kept + [n for n in new if n not in kept]
        self._stage_chain_links(desired, rule.chain_predicate, transitions, build.creates)

    def _stage_chain_links(self, desired_order, chain, transitions, creates=None):
        links_wanted = {
            left: {Triple(left, chain, right)}
            for left, right in zip(desired_order, desired_order[1:])
        }
        for proxy in desired_order:
            wanted = links_wanted.get(proxy, set())
            if creates is not None and proxy in creates:
                state, child_schema = creates[proxy]
                new_state = state.with_triples(
                    {t for t in state.triples if t.predicate != chain} | wanted
                )
                creates[proxy] = (new_state, child_schema)
                if proxy in transitions:
                    transitions[proxy].after = new_state
                continue
            tr = transitions.setdefault(
                proxy,
                _Transition(
                    before=self.store.fetch_entity_state(proxy),
                    after=self.store.fetch_entity_state(proxy),
                    description="Updated sequence links",
                ),
            )
            tr.after = tr.after.with_triples(
                {t for t in tr.after.triples if t.predicate != chain} | wanted
            )

    def delete_entity(
        self,
        entity: Iri,
        agent: AgentId,
        source: str,
        at: datetime | None = None,
        orphan_decisions: dict[Iri, str] | None = None,
    ) -> list[Snapshot]:
        before = self.store.fetch_entity_state(entity)
        if before.empty:
            raise NotFoundError(f"{entity} does not exist")
        config = self.config_for(before, None)

        transitions: dict[Iri, _Transition] = {
            entity: _Transition(before=before, after=EntityState(entity), kind="delete",
                                description="Deleted entity")
        }
        inbound = self.store.fetch_inbound(entity)
        for t in inbound:
            subject = t.subject
            if subject == entity or not isinstance(subject, Iri):
                continue
            tr = transitions.setdefault(
                subject,
                _Transition(
                    before=self.store.fetch_entity_state(subject),
                    after=self.store.fetch_entity_state(subject),
                    description="Removed reference to deleted entity",
                ),
            )
            tr.after = tr.after.with_triples({x for x in tr.after.triples if x.object != entity})

        removed = frozenset(before.triples) | frozenset(inbound)
        severed = {
            t.object
            for t in before.triples
            if isinstance(t.object, Iri) and t.object != entity and t.predicate != RDF.type
        }
        ordering = config.ordering if config else None
        candidates = self.find_orphans(severed, ordering, removed)
        policy = self.orphan_policy_for(config)
        self._apply_orphan_policy(candidates, policy, orphan_decisions, transitions, removed)

        snapshots = self._commit(transitions, agent, source, at)
        return [snapshots[entity]] + [
            s for e, s in sorted(snapshots.items(), key=lambda kv: kv[0].value) if e != entity
        ]

    def merge_entities(
        self,
        survivor: Iri,
        absorbed: Iri,
        agent: AgentId,
        source: str,
        at: datetime | None = None,
    ) -> MergeReport:
        if survivor == absorbed:
            raise MergeError("an entity cannot be merged with itself")
        survivor_before = self.store.fetch_entity_state(survivor)
        absorbed_before = self.store.fetch_entity_state(absorbed)
        if survivor_before.empty:
            raise MergeError(f"survivor {survivor} does not exist")
        if absorbed_before.empty:
            raise MergeError(f"absorbed entity {absorbed} does not exist")
        absorbed_chain = self.provenance.chain_or_none(absorbed)
        if absorbed_chain is not None and absorbed_chain.is_deleted:
            raise MergeError(f"{absorbed} is already deleted")
        survivor_chain = self.provenance.chain_or_none(survivor)
        if survivor_chain is not None and survivor_chain.is_deleted:
            raise MergeError(f"{survivor} is deleted")

        survivor_has_type = any(t.predicate == RDF.type for t in survivor_before.triples)
        incorporated = set()
        for t in absorbed_before.triples:
            if t.predicate == RDF.type and survivor_has_type:
                continue  # survivor wins type conflicts
            obj = survivor if t.object == absorbed else t.object
            mapped = Triple(survivor, t.predicate, obj)
            if mapped not in survivor_before.triples:
                incorporated.add(mapped)

        transitions: dict[Iri, _Transition] = {}
        rewritten: list[Iri] = []
        survivor_after_triples = set(survivor_before.triples) | incorporated
        for t in self.store.fetch_inbound(absorbed):
            subject = t.subject
            if subject == absorbed or not isinstance(subject, Iri):
                continue
            if subject == survivor:
                # the survivor referenced its duplicate; that edge becomes a
                # tautological self-loop, so it is dropped rather than kept
                survivor_after_triples.discard(t)
                continue
            tr = transitions.setdefault(
                subject,
                _Transition(
                    before=self.store.fetch_entity_state(subject),
                    after=self.store.fetch_entity_state(subject),
                    description=f"Rewrote reference from {absorbed} to {survivor}",
                ),
            )
            tr.after = tr.after.with_triples(
                {x for x in tr.after.triples if x != t} | {Triple(subject, t.predicate, survivor)}
            )
            if subject not in rewritten:
                rewritten.append(subject)

        absorbed_last = absorbed_chain.last.id if absorbed_chain else snapshot_iri(absorbed, 1)
        transitions[survivor] = _Transition(
            before=survivor_before,
            after=EntityState(survivor, survivor_after_triples),
            description=f"Merged {absorbed} into this entity",
        )
        transitions[absorbed] = _Transition(
            before=absorbed_before,
            after=EntityState(absorbed),
            kind="delete",
            description=f"Absorbed into {survivor}",
        )
        snapshots = self._commit(
            transitions,
            agent,
            source,
            at,
            allow_empty={survivor},
            extra_derived={survivor: (absorbed_last,)},
        )
        return MergeReport(
            survivor=survivor,
            absorbed=absorbed,
            rewritten_subjects=tuple(sorted(rewritten, key=lambda s: s.value)),
            incorporated=tuple(sorted(incorporated, key=lambda t: str(t.object))),
            snapshots=tuple(snapshots[e] for e in sorted(snapshots, key=lambda e: e.value)),
        )

    # -- ordering ---------------------------------------------------------------------

    def _walk_chain(self, entity: Iri, rule: OrderingRule) -> list[Iri]:
        proxies = {
            o
            for o in self.store.fetch_entity_state(entity).objects(rule.ordered_path)
            if isinstance(o, Iri)
        }
        if not proxies:
            return []
        nexts: dict[Iri, Iri] = {}
        pointed_at: set[Iri] = set()
        for proxy in proxies:
            for obj in self.store.fetch_entity_state(proxy).objects(rule.chain_predicate):
                if isinstance(obj, Iri) and obj in proxies:
                    nexts[proxy] = obj
                    pointed_at.add(obj)
        heads = sorted(proxies - pointed_at, key=lambda p: p.value)
        order: list[Iri] = []
        seen: set[Iri] = set()
        cursor = heads[0] if heads else None
        while cursor is not None and cursor not in seen:
            order.append(cursor)
            seen.add(cursor)
            cursor = nexts.get(cursor)
        for leftover in sorted(proxies - seen, key=lambda p: p.value):
            order.append(leftover)
        return order

    def reorder(
        self,
        entity: Iri,
        rule: OrderingRule,
        new_order: list[Iri],
        agent: AgentId,
        source: str,
        at: datetime | None = None,
    ) -> list[Snapshot]:
        current = self._walk_chain(entity, rule)
        if not current:
            raise OrderError(f"{entity} has no ordered values on {rule.ordered_path}")
        if sorted(new_order, key=str) != sorted(current, key=str) or len(set(new_order)) != len(
            new_order
        ):
            raise OrderError("new order is not a permutation of the current sequence")
        if new_order == current:
            raise NoOpError("sequence already in the requested order")
        transitions: dict[Iri, _Transition] = {}
        self._stage_chain_links(new_order, rule.chain_predicate, transitions)
        snapshots = self._commit(transitions, agent, source, at)
        return [snapshots[e] for e in sorted(snapshots, key=lambda e: e.value)]

    # -- duplicates --------------------------------------------------------------------

    def find_duplicates(
        self, candidate: EntityState, config: EntityConfig
    ) -> list[tuple[Iri, str]]:
        if config.duplicate_rule is None:
            raise NoApplicableClauseError("no duplicate rule configured for this entity type")
        paths = {path for clause in config.duplicate_rule.clauses for path in clause}
        values = {
            path: sorted(candidate.objects(path), key=str)
            for path in paths
            if candidate.objects(path)
        }
        query = build_duplicate_query(config.duplicate_rule, values, exclude=candidate.entity)
        rows = self.store.select(query)
        out = []
        for row in rows:
            hit = row.get("e")
            if isinstance(hit, Iri):
                out.append((hit, compute_label(hit, config, self.store, self.diagnostics)))
        out.sort(key=lambda pair: pair[0].value)
        return out
