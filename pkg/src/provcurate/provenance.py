"""Snapshot provenance: record, read, materialize, restore.

Every mutation commits one snapshot per touched entity into that entity's
named graph (<entity>/prov/), carrying generation time, agent, primary
source, derivation links, and the canonical delta text. Writes are purely
additive: the only late-bound fact is the predecessor's invalidation time,
which arrives as a new quad. Restores replay deltas backward from the
current stored state and are themselves recorded as snapshots, so history
never rewrites.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import (
    ChainError,
    MergeError,
    NoOpError,
    NotFoundError,
    ParseError,
    ReplayIntegrityError,
    RestoreError,
    UnsupportedDeltaError,
)
from .model import EntityState, GraphDelta, apply_delta, diff, invert_delta, parse_delta, serialize_delta
from .store.base import Store
from .terms import DCTERMS, OCO, PROV, RDF, XSD, Iri, Literal, Term, Triple

__all__ = [
    "AgentId",
    "Snapshot",
    "SnapshotChain",
    "ChangeSpec",
    "ProvenanceEngine",
    "prov_graph",
    "snapshot_iri",
    "format_timestamp",
    "parse_timestamp",
]

_SE_SUFFIX = re.compile(r"/prov/se/(\d+)$")


def prov_graph(entity: Iri) -> Iri:
    return Iri(entity.value + "/prov/")


def snapshot_iri(entity: Iri, index: int) -> Iri:
    return Iri(f"{entity.value}/prov/se/{index}")


def format_timestamp(at: datetime) -> str:
    if at.tzinfo is None:
        at = at.replace(tzinfo=timezone.utc)
    text = at.astimezone(timezone.utc).isoformat()
    return text.replace("+00:00", "Z")


def parse_timestamp(text: str) -> datetime:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


@dataclass(frozen=True, slots=True)
class AgentId:
    value: str

    def __post_init__(self):
        if not self.value:
            raise ValueError("agent id must be non-empty")

    def term(self) -> Term:
        try:
            return Iri(self.value)
        except ValueError:
            return Literal(self.value)


def _source_term(source: str) -> Term:
    try:
        return Iri(source)
    except ValueError:
        return Literal(source)


@dataclass(frozen=True, slots=True)
class Snapshot:
    id: Iri
    entity: Iri
    index: int
    generated_at: datetime
    attributed_to: AgentId
    primary_source: str
    delta: GraphDelta
    description: str = ""
    invalidated_at: datetime | None = None
    derived_from: tuple[Iri, ...] = ()

    def quads(self) -> set[Triple]:
        """The snapshot's own provenance triples (graph assigned by caller)."""
        se = self.id
        out = {
            Triple(se, RDF.type, PROV.Entity),
            Triple(se, PROV.specializationOf, self.entity),
            Triple(se, PROV.generatedAtTime, Literal(format_timestamp(self.generated_at), XSD.dateTime)),
            Triple(se, PROV.wasAttributedTo, self.attributed_to.term()),
            Triple(se, PROV.hadPrimarySource, _source_term(self.primary_source)),
        }
        if self.description:
            out.add(Triple(se, DCTERMS.description, Literal(self.description)))
        if not self.delta.empty:
            out.add(Triple(se, OCO.hasUpdateQuery, Literal(serialize_delta(self.delta))))
        if self.invalidated_at is not None:
            out.add(
                Triple(se, PROV.invalidatedAtTime, Literal(format_timestamp(self.invalidated_at), XSD.dateTime))
            )
        for parent in self.derived_from:
            out.add(Triple(se, PROV.wasDerivedFrom, parent))
        return out


@dataclass(frozen=True, slots=True)
class SnapshotChain:
    entity: Iri
    snapshots: tuple[Snapshot, ...]

    @property
    def last(self) -> Snapshot:
        return self.snapshots[-1]

    @property
    def is_deleted(self) -> bool:
        # only delete snapshots carry their own invalidation time while at
        # the head; supersession stamps predecessors, never the head
        return self.last.invalidated_at is not None

    def __len__(self) -> int:
        return len(self.snapshots)


@dataclass(slots=True)
class ChangeSpec:
    """One entity's transition inside a commit."""

    entity: Iri
    kind: str  # "create" | "update" | "delete"
    before: EntityState
    after: EntityState
    description: str = ""
    extra_derived: tuple[Iri, ...] = ()
    allow_revival: bool = False
    allow_empty: bool = False
    source_override: str | None = None


class ProvenanceEngine:
    def __init__(
        self,
        store: Store,
        baseline_source: str,
        baseline_created_at: datetime,
        system_agent: AgentId = AgentId("urn:provcurate:importer"),
        restore_depth_cap: int = 16,
    ):
        self.store = store
        self.baseline_source = baseline_source
        self.baseline_created_at = baseline_created_at
        self.system_agent = system_agent
        self.restore_depth_cap = restore_depth_cap

    # -- chain reading -----------------------------------------------------------

    def chain_or_none(self, entity: Iri) -> SnapshotChain | None:
        triples = self.store.fetch_graph(prov_graph(entity))
        if not triples:
            return None
        by_snapshot: dict[Iri, dict[Iri, list[Term]]] = {}
        for t in triples:
            if isinstance(t.subject, Iri) and _SE_SUFFIX.search(t.subject.value):
                by_snapshot.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)
        snapshots = []
        for se, props in by_snapshot.items():
            snapshots.append(self._build_snapshot(entity, se, props))
        snapshots.sort(key=lambda s: s.index)
        for expected, snap in enumerate(snapshots, start=1):
            if snap.index != expected:
                raise ChainError(
                    f"snapshot chain of {entity} has a gap: expected index {expected}, found {snap.index}"
                )
        for prev, nxt in zip(snapshots, snapshots[1:]):
            if nxt.generated_at < prev.generated_at:
                raise ChainError(f"snapshot chain of {entity} is not time-ordered at {nxt.id}")
            if prev.id not in nxt.derived_from:
                raise ChainError(f"snapshot {nxt.id} does not derive from its predecessor")
        if not snapshots:
            return None
        return SnapshotChain(entity, tuple(snapshots))

    def _build_snapshot(self, entity: Iri, se: Iri, props: dict[Iri, list[Term]]) -> Snapshot:
        def one(pred: Iri, required: bool = True) -> Term | None:
            values = props.get(pred, [])
            if not values:
                if required:
                    raise ChainError(f"snapshot {se} is missing {pred}")
                return None
            return sorted(values, key=str)[0]

        index = int(_SE_SUFFIX.search(se.value).group(1))
        generated = one(PROV.generatedAtTime)
        agent = one(PROV.wasAttributedTo)
        source = one(PROV.hadPrimarySource)
        delta_text = one(OCO.hasUpdateQuery, required=False)
        description = one(DCTERMS.description, required=False)
        invalidated = one(PROV.invalidatedAtTime, required=False)
        try:
            delta = parse_delta(delta_text.lexical) if isinstance(delta_text, Literal) else GraphDelta()
        except (ParseError, UnsupportedDeltaError, ValueError) as exc:
            raise ChainError(f"snapshot {se} stores a corrupted delta: {exc}")

        predecessor = snapshot_iri(entity, index - 1) if index > 1 else None
        derived = {o for o in props.get(PROV.wasDerivedFrom, []) if isinstance(o, Iri)}
        ordered: list[Iri] = []
        if predecessor is not None and predecessor in derived:
            ordered.append(predecessor)
            derived.discard(predecessor)
        ordered.extend(sorted(derived, key=lambda i: i.value))

        return Snapshot(
            id=se,
            entity=entity,
            index=index,
            generated_at=parse_timestamp(generated.lexical),
            attributed_to=AgentId(
                agent.value if isinstance(agent, Iri) else agent.lexical
            ),
            primary_source=source.value if isinstance(source, Iri) else source.lexical,
            delta=delta,
            description=description.lexical if isinstance(description, Literal) else "",
            invalidated_at=parse_timestamp(invalidated.lexical) if invalidated else None,
            derived_from=tuple(ordered),
        )

    def history(self, entity: Iri) -> SnapshotChain:
        chain = self.chain_or_none(entity)
        if chain is None:
            raise NotFoundError(f"{entity} has no snapshot chain")
        return chain

    # -- committing ---------------------------------------------------------------

    def _baseline_snapshot(self, entity: Iri, current: EntityState) -> Snapshot:
        return Snapshot(
            id=snapshot_iri(entity, 1),
            entity=entity,
            index=1,
            generated_at=self.baseline_created_at,
            attributed_to=self.system_agent,
            primary_source=self.baseline_source,
            delta=GraphDelta(insertions=current.triples),
            description="Baseline of pre-existing data",
        )

    def commit(
        self,
        changes: list[ChangeSpec],
        agent: AgentId,
        source: str,
        at: datetime,
        extra_deltas: list[tuple[Iri | None, GraphDelta]] | None = None,
    ) -> dict[Iri, Snapshot]:
        """Record every change as a snapshot and apply everything — data
        deltas, provenance quads, extras — in one atomic update request."""
        seen: set[Iri] = set()
        for change in changes:
            if change.entity in seen:
                raise ChainError(f"commit touches {change.entity} twice")
            seen.add(change.entity)

        data_deltas: list[tuple[Iri | None, GraphDelta]] = []
        prov_deltas: list[tuple[Iri | None, GraphDelta]] = []
        snapshots: dict[Iri, Snapshot] = {}

        for change in changes:
            entity = change.entity
            if change.before.entity != entity or change.after.entity != entity:
                raise ChainError(f"change for {entity} carries foreign states")
            delta = diff(change.before, change.after)
            chain = self.chain_or_none(entity)
            prov_inserts: set[Triple] = set()

            if change.kind == "create":
                if not change.before.empty:
                    raise ChainError(f"create of {entity} requires an empty before-state")
                if chain is not None and not chain.is_deleted:
                    raise ChainError(f"{entity} already has a live snapshot chain")
            elif change.kind in ("update", "delete"):
                if change.kind == "delete" and not change.after.empty:
                    raise ChainError(f"delete of {entity} requires an empty after-state")
                if change.kind == "update" and delta.empty and not change.allow_empty:
                    raise NoOpError(f"update of {entity} changes nothing")
                if chain is None:
                    if change.before.empty:
                        raise NotFoundError(f"{entity} does not exist")
                    baseline = self._baseline_snapshot(entity, change.before)
                    prov_inserts |= baseline.quads()
                    chain = SnapshotChain(entity, (baseline,))
                if chain.is_deleted and not change.allow_revival:
                    raise ChainError(f"{entity} is deleted; restore it instead of editing")
            else:
                raise ChainError(f"unknown change kind {change.kind!r}")

            prev = chain.last if chain is not None else None
            if prev is not None and at < prev.generated_at:
                raise ChainError(
                    f"commit time {format_timestamp(at)} precedes the chain head of {entity}"
                )
            index = (prev.index if prev else 0) + 1
            derived = ((prev.id,) if prev else ()) + change.extra_derived
            snapshot = Snapshot(
                id=snapshot_iri(entity, index),
                entity=entity,
                index=index,
                generated_at=at,
                attributed_to=agent,
                primary_source=change.source_override or source,
                delta=delta,
                description=change.description,
                invalidated_at=at if change.kind == "delete" else None,
                derived_from=derived,
            )
            snapshots[entity] = snapshot
            prov_inserts |= snapshot.quads()
            if prev is not None and prev.invalidated_at is None:
                prov_inserts.add(
                    Triple(prev.id, PROV.invalidatedAtTime, Literal(format_timestamp(at), XSD.dateTime))
                )
            prov_deltas.append((prov_graph(entity), GraphDelta(insertions=prov_inserts)))
            if not delta.empty:
                data_deltas.append((None, delta))

        self.store.apply_update(data_deltas + prov_deltas + list(extra_deltas or []))
        return snapshots

    # -- spec operations -------------------------------------------------------------

    def record_change(
        self,
        entity: Iri,
        kind: str,
        before: EntityState,
        after: EntityState,
        agent: AgentId,
        source: str,
        at: datetime,
        description: str = "",
    ) -> Snapshot:
        change = ChangeSpec(entity, kind, before, after, description)
        return self.commit([change], agent, source, at)[entity]

    def record_merge(
        self,
        survivor: Iri,
        absorbed: Iri,
        survivor_before: EntityState,
        survivor_after: EntityState,
        absorbed_before: EntityState,
        agent: AgentId,
        source: str,
        at: datetime,
    ) -> tuple[Snapshot, Snapshot]:
        if survivor == absorbed:
            raise MergeError("an entity cannot be merged with itself")
        if absorbed_before.empty:
            raise MergeError(f"{absorbed} does not exist")
        absorbed_chain = self.chain_or_none(absorbed)
        if absorbed_chain is not None and absorbed_chain.is_deleted:
            raise MergeError(f"{absorbed} is already deleted")
        survivor_chain = self.chain_or_none(survivor)
        if survivor_chain is not None and survivor_chain.is_deleted:
            raise MergeError(f"{survivor} is deleted")
        # the pre-merge head carried the incorporated state; a chainless
        # absorbed entity gets its baseline (se/1) inside this same commit
        absorbed_last = absorbed_chain.last.id if absorbed_chain else snapshot_iri(absorbed, 1)
        changes = [
            ChangeSpec(
                survivor,
                "update",
                survivor_before,
                survivor_after,
                description=f"Merged {absorbed} into this entity",
                extra_derived=(absorbed_last,),
                allow_empty=True,
            ),
            ChangeSpec(
                absorbed,
                "delete",
                absorbed_before,
                EntityState(absorbed),
                description=f"Absorbed into {survivor}",
            ),
        ]
        snaps = self.commit(changes, agent, source, at)
        return snaps[survivor], snaps[absorbed]

    def ensure_baseline(self, entity: Iri, current_state: EntityState) -> Snapshot:
        chain = self.chain_or_none(entity)
        if chain is not None:
            return chain.snapshots[0]
        baseline = self._baseline_snapshot(entity, current_state)
        self.store.apply_update(
            [(prov_graph(entity), GraphDelta(insertions=baseline.quads()))]
        )
        return baseline

    def snapshot_at(self, entity: Iri, at: datetime) -> Snapshot:
        """Timestamp lookup over the chain: snapshots hold for the half-open
        interval [own generation, successor generation)."""
        chain = self.history(entity)
        candidate: Snapshot | None = None
        for snapshot in chain.snapshots:
            if snapshot.generated_at <= at:
                candidate = snapshot
            else:
                break
        if candidate is None:
            raise NotFoundError(f"{entity} had no snapshot yet at {format_timestamp(at)}")
        return candidate

    def materialize(self, entity: Iri, target_index: int) -> EntityState:
        chain = self.history(entity)
        if not 1 <= target_index <= len(chain):
            raise ValueError(
                f"snapshot index {target_index} out of range 1..{len(chain)} for {entity}"
            )
        state = self.store.fetch_entity_state(entity)
        for snapshot in reversed(chain.snapshots[target_index:]):
            state = apply_delta(state, invert_delta(snapshot.delta))
        # cross-check: forward replay from empty must agree, or the stored
        # state was mutated outside the snapshot chain
        forward = EntityState(entity)
        for snapshot in chain.snapshots[:target_index]:
            forward = apply_delta(forward, snapshot.delta)
        if forward != state:
            raise ReplayIntegrityError(
                f"backward materialization of {entity}@{target_index} disagrees with "
                "forward replay; the stored state was modified outside change tracking"
            )
        return state

    def restore(self, entity: Iri, target_index: int, agent: AgentId, at: datetime) -> Snapshot:
        chain = self.history(entity)
        target = self.materialize(entity, target_index)
        current = self.store.fetch_entity_state(entity)
        if current.triples == target.triples:
            raise NoOpError(f"{entity} already matches snapshot {target_index}")
        restored_from = chain.snapshots[target_index - 1].id
        changes = [
            ChangeSpec(
                entity,
                "update",
                current,
                target,
                description=f"Restored version {target_index}",
                allow_revival=True,
                source_override=str(restored_from),
            )
        ]
        visited = {entity}
        self._collect_deleted_references(entity, target, changes, visited, depth=1)
        snaps = self.commit(changes, agent, source=str(restored_from), at=at)
        return snaps[entity]

    def _collect_deleted_references(
        self, root: Iri, state: EntityState, changes: list[ChangeSpec], visited: set[Iri], depth: int
    ):
        if depth > self.restore_depth_cap:
            raise RestoreError(
                f"restore of {root} exceeded the reference recursion cap ({self.restore_depth_cap})"
            )
        for t in sorted(state.triples, key=lambda t: str(t.object)):
            obj = t.object
            if not isinstance(obj, Iri) or obj in visited:
                continue
            visited.add(obj)
            obj_chain = self.chain_or_none(obj)
            if obj_chain is None or not obj_chain.is_deleted:
                continue
            pre_deletion = len(obj_chain) - 1
            if pre_deletion < 1:
                continue
            obj_target = self.materialize(obj, pre_deletion)
            changes.append(
                ChangeSpec(
                    obj,
                    "update",
                    self.store.fetch_entity_state(obj),
                    obj_target,
                    description=f"Restored alongside {root}",
                    allow_revival=True,
                    source_override=str(obj_chain.snapshots[pre_deletion - 1].id),
                )
            )
            self._collect_deleted_references(root, obj_target, changes, visited, depth + 1)

    def list_deleted(self) -> list[tuple[Iri, Snapshot]]:
        rows = self.store.select_prov(
            f"SELECT ?snap ?entity WHERE {{ GRAPH ?g {{ "
            f"?snap <{PROV.specializationOf.value}> ?entity }} }}"
        )
        latest: dict[Iri, int] = {}
        for row in rows:
            snap, entity = row.get("snap"), row.get("entity")
            if not isinstance(snap, Iri) or not isinstance(entity, Iri):
                continue
            match = _SE_SUFFIX.search(snap.value)
            if not match or not snap.value.startswith(entity.value):
                continue
            index = int(match.group(1))
            if index > latest.get(entity, 0):
                latest[entity] = index
        out: list[tuple[Iri, Snapshot]] = []
        for entity in sorted(latest, key=lambda e: e.value):
            chain = self.chain_or_none(entity)
            if chain is not None and chain.is_deleted:
                out.append((entity, chain.last))
        return out
