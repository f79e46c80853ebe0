"""HTTP boundary: bearer-token allowlist auth, TTL edit locks, JSON routes
over the curation and provenance engines.

The service is stateless apart from the lock store: restarting loses live
locks, never data. Exact JSON field names are frozen in openapi.yaml.
"""

from __future__ import annotations

import threading
from datetime import datetime, timezone
from typing import Callable
from urllib.parse import unquote

from fastapi import Body, FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .config import ServerConfig
from .curation import (
    CurationEngine,
    FormSubmission,
    LiteralValue,
    NestedValue,
    ReferenceValue,
    SequentialMintStrategy,
    UuidMintStrategy,
    VirtualTargetValue,
)
from .diagnostics import DiagnosticLog
from .display import DisplayRules, EntityConfig, load_rules
from .errors import (
    ChainError,
    ConfigError,
    CurationError,
    LockHeldError,
    LockRequiredError,
    LockTokenError,
    MergeError,
    MintError,
    MissingShapeError,
    NoApplicableClauseError,
    NoOpError,
    NoShapeError,
    NotFoundError,
    OrderError,
    OrphanDecisionRequired,
    ParseError,
    ReplayIntegrityError,
    RestoreError,
    StoreError,
    UnsupportedDeltaError,
    ValidationError,
)
from .locks import LockStore
from .model import EntityState, serialize_delta
from .provenance import AgentId, ProvenanceEngine, Snapshot, format_timestamp
from .shacl import FormSchema, ShapeCatalog, WidgetKind, compile_shape, parse_shapes
from .store import MemoryQuadStore, SparqlClient
from .store.base import Store, term_from_json, term_to_json
from .terms import RDF, Iri, Literal, Term, Triple, render_term, triple_sort_key

__all__ = ["create_app", "AppContext"]


# --- JSON mapping ---------------------------------------------------------------


def triple_json(t: Triple) -> dict:
    return {
        "subject": str(t.subject) if not isinstance(t.subject, Iri) else t.subject.value,
        "predicate": t.predicate.value,
        "object": term_to_json(t.object),
    }


def state_json(state: EntityState) -> list[dict]:
    return [triple_json(t) for t in sorted(state.triples, key=triple_sort_key)]


def snapshot_json(snap: Snapshot) -> dict:
    return {
        "id": snap.id.value,
        "entity": snap.entity.value,
        "index": snap.index,
        "generatedAtTime": format_timestamp(snap.generated_at),
        "invalidatedAtTime": format_timestamp(snap.invalidated_at)
        if snap.invalidated_at
        else None,
        "attributedTo": snap.attributed_to.value,
        "primarySource": snap.primary_source,
        "derivedFrom": [d.value for d in snap.derived_from],
        "description": snap.description,
        "delta": {
            "text": serialize_delta(snap.delta),
            "deletions": [triple_json(t) for t in sorted(snap.delta.deletions, key=triple_sort_key)],
            "insertions": [triple_json(t) for t in sorted(snap.delta.insertions, key=triple_sort_key)],
        },
    }


def _rule_json(rule) -> dict:
    out: dict = {"kind": rule.kind}
    if rule.condition is not None:
        out["condition"] = {
            "path": rule.condition.path.value,
            "hasValue": term_to_json(rule.condition.has_value),
        }
    else:
        out["condition"] = None
    if rule.pattern is not None:
        out["pattern"] = rule.pattern
    if rule.datatypes:
        out["datatypes"] = [d.value for d in rule.datatypes]
    if rule.values:
        out["values"] = [term_to_json(v) for v in rule.values]
    if rule.value is not None:
        out["value"] = term_to_json(rule.value)
    return out


def composed_schema_json(schema: FormSchema, config: EntityConfig | None) -> dict:
    fields = []
    for position, form_field in enumerate(schema.fields, start=1):
        field_rule = config.field_rule(form_field.path) if config else None
        widget = form_field.widget
        if field_rule is not None:
            if form_field.nested_shape is not None and field_rule.autocomplete is not None:
                widget = WidgetKind.REFERENCE
            if field_rule.widget_override is not None:
                if field_rule.widget_override != WidgetKind.DROPDOWN or form_field.options:
                    widget = field_rule.widget_override
        fields.append(
            {
                "path": form_field.path.value,
                "displayName": field_rule.display_name
                if field_rule
                else form_field.path.local_name(),
                "widget": widget.value,
                "required": form_field.required,
                "repeatable": form_field.repeatable,
                "minCount": form_field.min_count,
                "maxCount": form_field.max_count,
                "options": [term_to_json(o) for o in form_field.options]
                if form_field.options
                else None,
                "nestedShape": form_field.nested_shape.value if form_field.nested_shape else None,
                "visible": field_rule.visible if field_rule else True,
                "order": field_rule.order if field_rule else 1000 + position,
                "autocomplete": {
                    "minChars": field_rule.autocomplete.min_chars,
                    "target": field_rule.autocomplete.target,
                }
                if field_rule and field_rule.autocomplete
                else None,
                "rules": [_rule_json(r) for r in form_field.rules],
            }
        )
    fields.sort(key=lambda f: f["order"])
    virtuals = []
    if config is not None:
        for v in config.virtual_properties:
            virtuals.append(
                {
                    "label": v.label,
                    "targetShape": v.target_shape.value,
                    "intermediateClass": v.intermediate_class.value,
                    "linkFrom": v.link_from.value,
                    "linkTo": v.link_to.value,
                }
            )
    return {
        "shape": schema.shape.value,
        "targetClass": schema.target_class.value,
        "fields": fields,
        "virtualProperties": virtuals,
        "ordering": {
            "orderedPath": config.ordering.ordered_path.value,
            "chainPredicate": config.ordering.chain_predicate.value,
        }
        if config and config.ordering
        else None,
    }


def decode_submission(body: dict) -> FormSubmission:
    shape = Iri(body["shape"]) if body.get("shape") else None
    values: dict[str, list] = {}
    for key, entries in (body.get("values") or {}).items():
        if not isinstance(entries, list):
            raise ValueError(f"values for {key!r} must be a list")
        decoded = []
        for entry in entries:
            if not isinstance(entry, dict):
                raise ValueError(f"malformed value entry under {key!r}")
            if "literal" in entry:
                decoded.append(
                    LiteralValue(
                        str(entry["literal"]),
                        Iri(entry["datatype"]) if entry.get("datatype") else None,
                        entry.get("language"),
                    )
                )
            elif "reference" in entry:
                decoded.append(ReferenceValue(Iri(entry["reference"])))
            elif "nested" in entry:
                decoded.append(NestedValue(decode_submission(entry["nested"])))
            elif "target" in entry:
                decoded.append(VirtualTargetValue(Iri(entry["target"])))
            else:
                raise ValueError(
                    f"value entry under {key!r} needs literal, reference, nested, or target"
                )
        values[key] = decoded
    return FormSubmission(shape=shape, values=values)


def _decode_decisions(raw: dict | None) -> dict[Iri, str] | None:
    if not raw:
        return None
    return {Iri(k): str(v) for k, v in raw.items()}


# --- application context -----------------------------------------------------------


class AppContext:
    """Owns the wired engines; /api/admin/reload rebuilds the config-derived
    parts (catalog, rules, curation) and swaps them atomically."""

    def __init__(
        self,
        config: ServerConfig,
        store: Store | None = None,
        clock: Callable[[], datetime] | None = None,
    ):
        self.config = config
        self.diagnostics = DiagnosticLog()
        if store is not None:
            self.store = store
        elif config.embedded:
            memory = MemoryQuadStore(base_iri=config.base_iri)
            if config.seed_path is not None:
                memory.load_nquads(config.seed_path.read_text())
            self.store = memory
        else:
            self.store = SparqlClient(config.endpoints, base_iri=config.base_iri)
        self.provenance = ProvenanceEngine(
            self.store,
            baseline_source=config.baseline_source,
            baseline_created_at=config.baseline_created_at,
        )
        self.locks = LockStore(config.lock_ttl_seconds, clock=clock)
        self._reload_mutex = threading.Lock()
        self.catalog: ShapeCatalog
        self.rules: DisplayRules
        self.curation: CurationEngine
        self.reload()

    def reload(self):
        with self._reload_mutex:
            catalog = ShapeCatalog()
            for path in self.config.shape_paths:
                catalog = catalog.merged_with(parse_shapes(path.read_text()))
            rules = DisplayRules()
            for path in self.config.rule_paths:
                loaded = load_rules(path.read_text(), catalog)
                rules = DisplayRules(
                    rules.entries + loaded.entries,
                    loaded.defaults if loaded.defaults != rules.defaults else rules.defaults,
                )
            if self.config.mint_strategy == "sequential":
                strategy = SequentialMintStrategy(self.config.base_iri, self.store)
            else:
                strategy = UuidMintStrategy(self.config.base_iri)
            self.diagnostics.extend(catalog.warnings)
            curation = CurationEngine(
                self.store,
                self.provenance,
                catalog,
                rules,
                strategy,
                default_orphan_policy=self.config.default_orphan_policy,
                diagnostics=self.diagnostics,
            )
            # swap as a unit so readers never see a half-reloaded view
            self.catalog, self.rules, self.curation = catalog, rules, curation

    # -- auth ------------------------------------------------------------------

    def authenticate(self, authorization: str | None, mutating: bool) -> AgentId | None:
        if authorization is None:
            if mutating or not self.config.allow_anonymous_reads:
                raise _HttpError(401, "authentication-required", "missing bearer token")
            return None
        if not authorization.startswith("Bearer "):
            raise _HttpError(401, "bad-authorization", "expected 'Bearer <token>'")
        token = authorization[len("Bearer ") :].strip()
        agent_iri = self.config.tokens.get(token)
        if agent_iri is None:
            raise _HttpError(401, "unknown-token", "bearer token is not recognized")
        if agent_iri not in self.config.allowlist:
            raise _HttpError(403, "not-allowlisted", f"{agent_iri} may not edit this collection")
        return AgentId(agent_iri)

    def require_locks(self, entities: list[Iri], agent: AgentId, header: str | None):
        tokens = [t.strip() for t in header.split(",")] if header else []
        for entity in entities:
            if not tokens:
                raise LockRequiredError(f"no edit token presented for {entity}")
            last: Exception | None = None
            for token in tokens:
                try:
                    self.locks.require(entity, agent, token)
                    last = None
                    break
                except (LockRequiredError, LockTokenError) as exc:
                    last = exc
            if last is not None:
                raise last


class _HttpError(Exception):
    def __init__(self, status: int, code: str, message: str, extra: dict | None = None):
        self.status = status
        self.code = code
        self.message = message
        self.extra = extra or {}
        super().__init__(message)


_ERROR_MAP: list[tuple[type, int, str]] = [
    (ValidationError, 422, "validation-failed"),
    (OrphanDecisionRequired, 409, "orphan-decisions-required"),
    (LockHeldError, 409, "lock-held"),
    (LockRequiredError, 428, "lock-required"),
    (LockTokenError, 403, "lock-token-mismatch"),
    (NoOpError, 409, "no-op"),
    (MergeError, 409, "merge-rejected"),
    (OrderError, 400, "bad-order"),
    (NotFoundError, 404, "not-found"),
    (MissingShapeError, 404, "unknown-shape"),
    (NoShapeError, 404, "no-shape"),
    (NoApplicableClauseError, 400, "no-applicable-clause"),
    (UnsupportedDeltaError, 400, "unsupported-delta"),
    (ParseError, 400, "parse-error"),
    (ConfigError, 500, "config-error"),
    (MintError, 500, "mint-failed"),
    (RestoreError, 409, "restore-failed"),
    (ReplayIntegrityError, 500, "replay-integrity"),
    (ChainError, 500, "chain-error"),
    (StoreError, 502, "store-unavailable"),
]


def _error_response(exc: Exception) -> JSONResponse:
    if isinstance(exc, _HttpError):
        body = {"error": {"code": exc.code, "message": exc.message}, **exc.extra}
        return JSONResponse(body, status_code=exc.status)
    if isinstance(exc, ValidationError):
        return JSONResponse(
            {
                "error": {"code": "validation-failed", "message": str(exc)},
                "violations": [v.to_json() for v in exc.violations],
            },
            status_code=422,
        )
    if isinstance(exc, OrphanDecisionRequired):
        return JSONResponse(
            {
                "error": {"code": "orphan-decisions-required", "message": str(exc)},
                "orphans": [{"entity": c.entity.value, "reason": c.reason} for c in exc.candidates],
            },
            status_code=409,
        )
    if isinstance(exc, LockHeldError):
        return JSONResponse(
            {
                "error": {"code": "lock-held", "message": str(exc)},
                "holder": exc.owner,
                "expiresAt": format_timestamp(exc.expires_at),
            },
            status_code=409,
        )
    for klass, status, code in _ERROR_MAP:
        if isinstance(exc, klass):
            return JSONResponse(
                {"error": {"code": code, "message": str(exc)}}, status_code=status
            )
    if isinstance(exc, (ValueError, KeyError, TypeError)):
        return JSONResponse(
            {"error": {"code": "bad-request", "message": str(exc)}}, status_code=400
        )
    raise exc


# --- app factory ----------------------------------------------------------------------


def create_app(
    config: ServerConfig,
    store: Store | None = None,
    clock: Callable[[], datetime] | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    ctx = AppContext(config, store=store, clock=clock)
    app = FastAPI(title="provcurate", version="0.1.0", docs_url=None, redoc_url=None)
    app.state.ctx = ctx

    @app.exception_handler(CurationError)
    async def curation_error_handler(request: Request, exc: CurationError):
        return _error_response(exc)

    @app.exception_handler(_HttpError)
    async def http_error_handler(request: Request, exc: _HttpError):
        return _error_response(exc)

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return _error_response(exc)

    @app.exception_handler(KeyError)
    async def key_error_handler(request: Request, exc: KeyError):
        return JSONResponse(
            {"error": {"code": "bad-request", "message": f"missing field {exc}"}},
            status_code=400,
        )

    def _iri(raw: str) -> Iri:
        text = raw if "://" in raw else unquote(raw)
        return Iri(text)

    def _agent(authorization: str | None, mutating: bool = False) -> AgentId | None:
        return ctx.authenticate(authorization, mutating)

    def _resolved(entity: Iri):
        state = ctx.store.fetch_entity_state(entity)
        schema = ctx.curation.resolve_schema(state) if not state.empty else None
        config_entry = ctx.curation.config_for(state, schema.shape if schema else None)
        return state, schema, config_entry

    # -- read routes --------------------------------------------------------------

    @app.get("/api/classes")
    def classes(authorization: str | None = Header(default=None)):
        _agent(authorization)
        return {
            "classes": [
                {"iri": iri.value, "count": count}
                for iri, count in ctx.store.discover_classes()
            ]
        }

    @app.get("/api/entities")
    def entities(
        authorization: str | None = Header(default=None),
        class_iri: str | None = Query(default=None, alias="class"),
        shape: str | None = Query(default=None),
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=20, ge=1, le=200, alias="pageSize"),
    ):
        _agent(authorization)
        shape_id = _iri(shape) if shape else None
        if class_iri:
            target = _iri(class_iri)
        elif shape_id:
            node = ctx.catalog.get(shape_id)
            if node is None:
                raise MissingShapeError(f"shape {shape_id} is not in the catalog")
            target = node.target_class
        else:
            raise _HttpError(400, "bad-request", "class or shape query parameter required")
        total_rows = ctx.store.select(
            f"SELECT (COUNT(?e) AS ?n) WHERE {{ ?e <{RDF.type.value}> <{target.value}> }}"
        )
        total = int(total_rows[0]["n"].lexical) if total_rows else 0
        rows = ctx.store.select(
            f"SELECT ?e WHERE {{ ?e <{RDF.type.value}> <{target.value}> }} "
            f"ORDER BY ?e LIMIT {page_size} OFFSET {(page - 1) * page_size}"
        )
        out = []
        for row in rows:
            entity = row["e"]
            if not isinstance(entity, Iri):
                continue
            state, schema, config_entry = _resolved(entity)
            if shape_id is not None and (schema is None or schema.shape != shape_id):
                continue
            out.append(
                {
                    "iri": entity.value,
                    "label": ctx.curation.label_for(entity, config_entry),
                    "shape": schema.shape.value if schema else None,
                }
            )
        return {"entities": out, "page": page, "pageSize": page_size, "total": total}

    @app.get("/api/schema/{shape_id:path}")
    def schema_route(shape_id: str, authorization: str | None = Header(default=None)):
        _agent(authorization)
        shape = _iri(shape_id)
        compiled = compile_shape(shape, ctx.catalog)
        return composed_schema_json(compiled, ctx.curation.config_for_shape(shape))

    @app.get("/api/entity/{iri:path}/history")
    def history(iri: str, authorization: str | None = Header(default=None)):
        _agent(authorization)
        entity = _iri(iri)
        chain = ctx.provenance.history(entity)
        return {
            "entity": entity.value,
            "deleted": chain.is_deleted,
            "snapshots": [snapshot_json(s) for s in chain.snapshots],
        }

    @app.get("/api/entity/{iri:path}/version/{index}")
    def version(iri: str, index: int, authorization: str | None = Header(default=None)):
        _agent(authorization)
        entity = _iri(iri)
        try:
            state = ctx.provenance.materialize(entity, index)
        except ValueError as exc:
            raise _HttpError(404, "version-out-of-range", str(exc))
        return {"entity": entity.value, "index": index, "state": state_json(state)}

    @app.get("/api/entity/{iri:path}")
    def entity_detail(iri: str, authorization: str | None = Header(default=None)):
        _agent(authorization)
        entity = _iri(iri)
        state, schema, config_entry = _resolved(entity)
        if state.empty:
            chain = ctx.provenance.chain_or_none(entity)
            if chain is not None and chain.is_deleted:
                raise _HttpError(
                    404,
                    "entity-deleted",
                    f"{entity} is deleted; see /api/deleted",
                    extra={"deleted": True},
                )
            raise NotFoundError(f"{entity} does not exist")
        holder = ctx.locks.holder(entity)
        return {
            "entity": entity.value,
            "label": ctx.curation.label_for(entity, config_entry),
            "shape": schema.shape.value if schema else None,
            "schema": composed_schema_json(schema, config_entry) if schema else None,
            "state": state_json(state),
            "lockedBy": holder.owner.value if holder else None,
        }

    @app.get("/api/autocomplete")
    def autocomplete(
        authorization: str | None = Header(default=None),
        shape: str = Query(...),
        field: str = Query(...),
        q: str = Query(default=""),
    ):
        _agent(authorization)
        shape_id = _iri(shape)
        node = ctx.catalog.get(shape_id)
        if node is None:
            raise MissingShapeError(f"shape {shape_id} is not in the catalog")
        config_entry = ctx.curation.config_for_shape(shape_id)
        field_iri = _iri(field)
        rule = config_entry.field_rule(field_iri) if config_entry else None
        autocomplete_rule = rule.autocomplete if rule else None
        if autocomplete_rule is None:
            raise _HttpError(400, "no-autocomplete", f"field {field_iri} has no autocomplete rule")
        hits = ctx.store.search(node.target_class, field_iri, q, autocomplete_rule)
        return {
            "results": [
                {"iri": hit.value, "value": value, "label": ctx.curation.label_for(hit)}
                for hit, value in hits
            ]
        }

    @app.post("/api/duplicates")
    def duplicates(
        body: dict = Body(...), authorization: str | None = Header(default=None)
    ):
        _agent(authorization)
        shape_id = _iri(body["shape"]) if body.get("shape") else None
        if shape_id is None:
            raise _HttpError(400, "bad-request", "shape is required")
        config_entry = ctx.curation.config_for_shape(shape_id)
        if config_entry is None or config_entry.duplicate_rule is None:
            raise NoApplicableClauseError("no duplicate rule configured for this shape")
        candidate_iri = Iri(body["exclude"]) if body.get("exclude") else Iri("urn:candidate:new")
        triples = set()
        for key, entries in (body.get("values") or {}).items():
            path = _iri(key)
            for entry in entries:
                triples.add(Triple(candidate_iri, path, term_from_json(entry)))
        state = EntityState(candidate_iri, triples)
        hits = ctx.curation.find_duplicates(state, config_entry)
        return {"duplicates": [{"iri": hit.value, "label": label} for hit, label in hits]}

    @app.get("/api/deleted")
    def deleted(authorization: str | None = Header(default=None)):
        _agent(authorization)
        out = []
        for entity, snap in ctx.provenance.list_deleted():
            out.append(
                {
                    "entity": entity.value,
                    "deletedAt": format_timestamp(snap.invalidated_at),
                    "description": snap.description,
                    "snapshotCount": snap.index,
                }
            )
        return {"deleted": out}

    @app.get("/api/diagnostics")
    def diagnostics_route(authorization: str | None = Header(default=None)):
        _agent(authorization)
        return {"diagnostics": [d.to_json() for d in ctx.diagnostics.entries()]}

    # -- locks ---------------------------------------------------------------------

    @app.post("/api/lock/{iri:path}")
    def acquire_lock(iri: str, authorization: str | None = Header(default=None)):
        agent = _agent(authorization, mutating=True)
        record = ctx.locks.acquire(_iri(iri), agent)
        return {
            "entity": record.entity.value,
            "owner": record.owner.value,
            "token": record.token,
            "expiresAt": format_timestamp(record.expires_at),
        }

    @app.delete("/api/lock/{iri:path}", status_code=204)
    def release_lock(
        iri: str,
        authorization: str | None = Header(default=None),
        x_edit_token: str | None = Header(default=None, alias="X-Edit-Token"),
    ):
        _agent(authorization, mutating=True)
        if x_edit_token is None:
            raise LockTokenError("X-Edit-Token header required to release a lock")
        ctx.locks.release(_iri(iri), x_edit_token)
        return None

    # -- mutations ------------------------------------------------------------------

    @app.post("/api/entity", status_code=201)
    def create_entity(
        body: dict = Body(...), authorization: str | None = Header(default=None)
    ):
        agent = _agent(authorization, mutating=True)
        submission = decode_submission(body)
        entity = ctx.curation.create_entity(
            submission, agent, source=agent.value, at=_now(clock)
        )
        chain = ctx.provenance.history(entity)
        return {"entity": entity.value, "snapshot": snapshot_json(chain.last)}

    @app.put("/api/entity/{iri:path}")
    def update_entity(
        iri: str,
        body: dict = Body(...),
        authorization: str | None = Header(default=None),
        x_edit_token: str | None = Header(default=None, alias="X-Edit-Token"),
    ):
        agent = _agent(authorization, mutating=True)
        entity = _iri(iri)
        ctx.require_locks([entity], agent, x_edit_token)
        submission = decode_submission(body)
        snap = ctx.curation.update_entity(
            entity,
            submission,
            agent,
            source=agent.value,
            at=_now(clock),
            orphan_decisions=_decode_decisions(body.get("orphanDecisions")),
        )
        return {"snapshot": snapshot_json(snap)}

    @app.delete("/api/entity/{iri:path}")
    def delete_entity(
        iri: str,
        body: dict | None = Body(default=None),
        authorization: str | None = Header(default=None),
        x_edit_token: str | None = Header(default=None, alias="X-Edit-Token"),
    ):
        agent = _agent(authorization, mutating=True)
        entity = _iri(iri)
        ctx.require_locks([entity], agent, x_edit_token)
        snaps = ctx.curation.delete_entity(
            entity,
            agent,
            source=agent.value,
            at=_now(clock),
            orphan_decisions=_decode_decisions((body or {}).get("orphanDecisions")),
        )
        return {"snapshots": [snapshot_json(s) for s in snaps]}

    @app.post("/api/entity/{iri:path}/restore/{index}")
    def restore(
        iri: str,
        index: int,
        authorization: str | None = Header(default=None),
        x_edit_token: str | None = Header(default=None, alias="X-Edit-Token"),
    ):
        agent = _agent(authorization, mutating=True)
        entity = _iri(iri)
        ctx.require_locks([entity], agent, x_edit_token)
        try:
            snap = ctx.provenance.restore(entity, index, agent, _now(clock))
        except ValueError as exc:
            raise _HttpError(404, "version-out-of-range", str(exc))
        return {"snapshot": snapshot_json(snap)}

    @app.post("/api/entity/{iri:path}/reorder")
    def reorder(
        iri: str,
        body: dict = Body(...),
        authorization: str | None = Header(default=None),
        x_edit_token: str | None = Header(default=None, alias="X-Edit-Token"),
    ):
        agent = _agent(authorization, mutating=True)
        entity = _iri(iri)
        ctx.require_locks([entity], agent, x_edit_token)
        state, schema, config_entry = _resolved(entity)
        if config_entry is None or config_entry.ordering is None:
            raise OrderError(f"{entity} has no ordering rule configured")
        rule = config_entry.ordering
        if body.get("path") and _iri(body["path"]) != rule.ordered_path:
            raise OrderError(f"path does not match the configured ordered path {rule.ordered_path}")
        new_order = [Iri(x) for x in body.get("order", [])]
        snaps = ctx.curation.reorder(
            entity, rule, new_order, agent, source=agent.value, at=_now(clock)
        )
        return {"snapshots": [snapshot_json(s) for s in snaps]}

    @app.post("/api/merge")
    def merge(
        body: dict = Body(...),
        authorization: str | None = Header(default=None),
        x_edit_token: str | None = Header(default=None, alias="X-Edit-Token"),
    ):
        agent = _agent(authorization, mutating=True)
        survivor = Iri(body["survivor"])
        absorbed = Iri(body["absorbed"])
        ctx.require_locks([survivor, absorbed], agent, x_edit_token)
        report = ctx.curation.merge_entities(
            survivor, absorbed, agent, source=agent.value, at=_now(clock)
        )
        return {
            "survivor": report.survivor.value,
            "absorbed": report.absorbed.value,
            "rewrittenSubjects": [s.value for s in report.rewritten_subjects],
            "incorporated": [triple_json(t) for t in report.incorporated],
            "snapshots": [snapshot_json(s) for s in report.snapshots],
        }

    @app.post("/api/admin/reload")
    def reload_config(authorization: str | None = Header(default=None)):
        _agent(authorization, mutating=True)
        ctx.reload()
        return {
            "status": "reloaded",
            "shapes": len(ctx.catalog.shapes),
            "entries": len(ctx.rules.entries),
            "warnings": len(ctx.catalog.warnings),
        }

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _now(clock: Callable[[], datetime] | None) -> datetime:
    return clock() if clock is not None else datetime.now(timezone.utc)
