"""YAML display rules: bindings, labels, field presentation, duplicates,
virtual properties, ordering, orphan policy.

Loading is fail-fast with positioned diagnostics: unknown keys, dangling
shape references, and malformed label queries abort startup instead of
crashing later. The exact key vocabulary is documented in
docs/display-rules.md.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import yaml

from .diagnostics import DiagnosticLog
from .errors import ConfigError, CurationError, NoApplicableClauseError
from .shacl import ShapeCatalog, WidgetKind
from .store.base import Store
from .terms import Iri, Literal, Term, render_term

__all__ = [
    "AutocompleteRule",
    "FieldRule",
    "DuplicateRule",
    "VirtualPropertyRule",
    "OrderingRule",
    "OrphanPolicy",
    "ClassBinding",
    "ShapeBinding",
    "EntityConfig",
    "Defaults",
    "DisplayRules",
    "load_rules",
    "dump_rules",
    "resolve_entity_config",
    "compute_label",
    "build_duplicate_query",
    "inject_binding",
]


class OrphanPolicy(str, Enum):
    ASK = "ask"
    DELETE = "delete"
    KEEP = "keep"


@dataclass(frozen=True, slots=True)
class AutocompleteRule:
    min_chars: int
    target: str  # "same-type" | "parent"

    def __post_init__(self):
        if self.min_chars < 1:
            raise ValueError("autocomplete min_chars must be >= 1")
        if self.target not in ("same-type", "parent"):
            raise ValueError(f"autocomplete target must be same-type or parent, got {self.target!r}")


@dataclass(frozen=True, slots=True)
class FieldRule:
    path: Iri
    display_name: str
    visible: bool = True
    order: int = 0
    widget_override: WidgetKind | None = None
    autocomplete: AutocompleteRule | None = None


@dataclass(frozen=True, slots=True)
class DuplicateRule:
    """Disjunction of conjunctions of property paths (DNF over equality)."""

    clauses: tuple[tuple[Iri, ...], ...]

    def __post_init__(self):
        if not self.clauses or any(not clause for clause in self.clauses):
            raise ValueError("duplicate rule needs at least one non-empty clause")


@dataclass(frozen=True, slots=True)
class VirtualPropertyRule:
    label: str
    target_shape: Iri
    intermediate_class: Iri
    link_from: Iri
    link_to: Iri


@dataclass(frozen=True, slots=True)
class OrderingRule:
    ordered_path: Iri
    chain_predicate: Iri


@dataclass(frozen=True, slots=True)
class ClassBinding:
    iri: Iri


@dataclass(frozen=True, slots=True)
class ShapeBinding:
    shape: Iri


@dataclass(frozen=True, slots=True)
class EntityConfig:
    binding: ClassBinding | ShapeBinding
    label_query: str | None = None
    field_rules: tuple[FieldRule, ...] = ()
    duplicate_rule: DuplicateRule | None = None
    virtual_properties: tuple[VirtualPropertyRule, ...] = ()
    ordering: OrderingRule | None = None
    orphan_policy: OrphanPolicy | None = None

    def field_rule(self, path: Iri) -> FieldRule | None:
        for rule in self.field_rules:
            if rule.path == path:
                return rule
        return None

    def virtual_property(self, label: str) -> VirtualPropertyRule | None:
        for rule in self.virtual_properties:
            if rule.label == label:
                return rule
        return None


@dataclass(frozen=True, slots=True)
class Defaults:
    orphan_policy: OrphanPolicy | None = None
    lock_ttl_seconds: int | None = None


@dataclass(frozen=True, slots=True)
class DisplayRules:
    entries: tuple[EntityConfig, ...] = ()
    defaults: Defaults = field(default_factory=Defaults)


# --- YAML loading with positions ---------------------------------------------


class _Node:
    """yaml.compose node wrapper that tracks its document path for errors."""

    def __init__(self, node, path: str):
        self.node = node
        self.path = path

    @property
    def line(self) -> int:
        return self.node.start_mark.line + 1

    def fail(self, message: str):
        raise ConfigError(message, path=self.path, line=self.line)

    def as_map(self, allowed: set[str]) -> dict[str, "_Node"]:
        if not isinstance(self.node, yaml.MappingNode):
            self.fail("expected a mapping")
        out = {}
        for key_node, value_node in self.node.value:
            key = key_node.value
            if key not in allowed:
                raise ConfigError(
                    f"unknown key {key!r} (expected one of: {', '.join(sorted(allowed))})",
                    path=self.path,
                    line=key_node.start_mark.line + 1,
                )
            if key in out:
                raise ConfigError(f"duplicate key {key!r}", self.path, key_node.start_mark.line + 1)
            out[key] = _Node(value_node, f"{self.path}.{key}")
        return out

    def as_list(self) -> list["_Node"]:
        if not isinstance(self.node, yaml.SequenceNode):
            self.fail("expected a list")
        return [_Node(v, f"{self.path}[{i}]") for i, v in enumerate(self.node.value)]

    def as_str(self) -> str:
        if not isinstance(self.node, yaml.ScalarNode) or not isinstance(self.node.value, str):
            self.fail("expected a string")
        return self.node.value

    def as_iri(self) -> Iri:
        try:
            return Iri(self.as_str())
        except ValueError as exc:
            self.fail(str(exc))

    def as_int(self) -> int:
        text = self.as_str()
        try:
            return int(text)
        except ValueError:
            self.fail(f"expected an integer, got {text!r}")

    def as_bool(self) -> bool:
        text = self.as_str().lower()
        if text in ("true", "yes", "on"):
            return True
        if text in ("false", "no", "off"):
            return False
        self.fail(f"expected a boolean, got {text!r}")


_ENTRY_KEYS = {
    "class",
    "shape",
    "label_query",
    "fields",
    "duplicates",
    "virtual_properties",
    "ordering",
    "orphan_policy",
}
_FIELD_KEYS = {"path", "display_name", "visible", "order", "widget", "autocomplete"}


def _parse_orphan_policy(node: _Node) -> OrphanPolicy:
    text = node.as_str()
    try:
        return OrphanPolicy(text)
    except ValueError:
        node.fail(f"orphan policy must be ask, delete, or keep; got {text!r}")


def _parse_widget(node: _Node) -> WidgetKind:
    text = node.as_str()
    try:
        return WidgetKind(text)
    except ValueError:
        node.fail(f"unknown widget kind {text!r}")


def _parse_autocomplete(node: _Node) -> AutocompleteRule:
    fields = node.as_map({"min_chars", "target"})
    if "min_chars" not in fields or "target" not in fields:
        node.fail("autocomplete needs min_chars and target")
    try:
        return AutocompleteRule(fields["min_chars"].as_int(), fields["target"].as_str())
    except ValueError as exc:
        node.fail(str(exc))


def _parse_field(node: _Node, position: int) -> FieldRule:
    fields = node.as_map(_FIELD_KEYS)
    if "path" not in fields:
        node.fail("field rule needs a path")
    path = fields["path"].as_iri()
    display = fields["display_name"].as_str() if "display_name" in fields else path.local_name()
    return FieldRule(
        path=path,
        display_name=display,
        visible=fields["visible"].as_bool() if "visible" in fields else True,
        order=fields["order"].as_int() if "order" in fields else position,
        widget_override=_parse_widget(fields["widget"]) if "widget" in fields else None,
        autocomplete=_parse_autocomplete(fields["autocomplete"]) if "autocomplete" in fields else None,
    )


def _parse_duplicates(node: _Node) -> DuplicateRule:
    fields = node.as_map({"any_of"})
    if "any_of" not in fields:
        node.fail("duplicates needs an any_of list of clauses")
    clauses = []
    for clause_node in fields["any_of"].as_list():
        clause_fields = clause_node.as_map({"all_of"})
        if "all_of" not in clause_fields:
            clause_node.fail("duplicate clause needs an all_of list of paths")
        paths = tuple(p.as_iri() for p in clause_fields["all_of"].as_list())
        if not paths:
            clause_node.fail("duplicate clause must name at least one path")
        clauses.append(paths)
    if not clauses:
        node.fail("duplicates.any_of must not be empty")
    return DuplicateRule(tuple(clauses))


def _parse_virtual(node: _Node, catalog: ShapeCatalog) -> VirtualPropertyRule:
    keys = {"label", "target_shape", "intermediate_class", "link_from", "link_to"}
    fields = node.as_map(keys)
    missing = keys - set(fields)
    if missing:
        node.fail(f"virtual property is missing: {', '.join(sorted(missing))}")
    target_shape = fields["target_shape"].as_iri()
    if target_shape not in catalog:
        fields["target_shape"].fail(f"virtual property targets undeclared shape {target_shape}")
    return VirtualPropertyRule(
        label=fields["label"].as_str(),
        target_shape=target_shape,
        intermediate_class=fields["intermediate_class"].as_iri(),
        link_from=fields["link_from"].as_iri(),
        link_to=fields["link_to"].as_iri(),
    )


def _parse_ordering(node: _Node) -> OrderingRule:
    fields = node.as_map({"ordered_path", "chain_predicate"})
    if "ordered_path" not in fields or "chain_predicate" not in fields:
        node.fail("ordering needs ordered_path and chain_predicate")
    return OrderingRule(fields["ordered_path"].as_iri(), fields["chain_predicate"].as_iri())


def _validate_label_query(text: str, node: _Node):
    from .store.sparql import SelectQuery, parse_query

    try:
        parsed = parse_query(text)
    except CurationError as exc:
        node.fail(f"label query does not parse: {exc}")
    if not isinstance(parsed, SelectQuery):
        node.fail("label query must be a SELECT query")
    if parsed.projections is None or len(parsed.projections) != 1:
        node.fail("label query must project exactly one variable")
    if "?entity" not in text and "$entity" not in text:
        node.fail("label query must use the ?entity placeholder")


def _parse_entry(node: _Node, catalog: ShapeCatalog) -> EntityConfig:
    fields = node.as_map(_ENTRY_KEYS)
    if ("class" in fields) == ("shape" in fields):
        node.fail("an entry binds either a class or a shape (exactly one)")
    if "shape" in fields:
        shape = fields["shape"].as_iri()
        if shape not in catalog:
            fields["shape"].fail(f"entry binds undeclared shape {shape}")
        binding: ClassBinding | ShapeBinding = ShapeBinding(shape)
    else:
        binding = ClassBinding(fields["class"].as_iri())

    label_query = None
    if "label_query" in fields:
        label_query = fields["label_query"].as_str()
        _validate_label_query(label_query, fields["label_query"])

    field_rules: list[FieldRule] = []
    if "fields" in fields:
        for i, fnode in enumerate(fields["fields"].as_list(), start=1):
            field_rules.append(_parse_field(fnode, i))
        orders = [f.order for f in field_rules]
        if len(set(orders)) != len(orders):
            fields["fields"].fail("field orders must be unique within an entry")
        paths = [f.path for f in field_rules]
        if len(set(paths)) != len(paths):
            fields["fields"].fail("field paths must be unique within an entry")

    return EntityConfig(
        binding=binding,
        label_query=label_query,
        field_rules=tuple(field_rules),
        duplicate_rule=_parse_duplicates(fields["duplicates"]) if "duplicates" in fields else None,
        virtual_properties=tuple(
            _parse_virtual(v, catalog) for v in fields["virtual_properties"].as_list()
        )
        if "virtual_properties" in fields
        else (),
        ordering=_parse_ordering(fields["ordering"]) if "ordering" in fields else None,
        orphan_policy=_parse_orphan_policy(fields["orphan_policy"])
        if "orphan_policy" in fields
        else None,
    )


def load_rules(document: str, catalog: ShapeCatalog) -> DisplayRules:
    """Parse and validate one display-rules document against the catalog."""
    try:
        root_node = yaml.compose(document)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(
            f"YAML syntax error: {exc}", path="$", line=(mark.line + 1) if mark else None
        )
    if root_node is None:
        return DisplayRules()
    root = _Node(root_node, "$")
    top = root.as_map({"defaults", "entities"})

    defaults = Defaults()
    if "defaults" in top:
        dmap = top["defaults"].as_map({"orphan_policy", "lock_ttl_seconds"})
        defaults = Defaults(
            orphan_policy=_parse_orphan_policy(dmap["orphan_policy"])
            if "orphan_policy" in dmap
            else None,
            lock_ttl_seconds=dmap["lock_ttl_seconds"].as_int()
            if "lock_ttl_seconds" in dmap
            else None,
        )

    entries: list[EntityConfig] = []
    if "entities" in top:
        for entry_node in top["entities"].as_list():
            entries.append(_parse_entry(entry_node, catalog))
    keys = [e.binding for e in entries]
    if len(set(keys)) != len(keys):
        root.fail("two entries share the same binding")
    return DisplayRules(tuple(entries), defaults)


def dump_rules(rules: DisplayRules) -> str:
    """Emit the documented YAML form; load(dump(load(x))) == load(x)."""

    def field_dict(f: FieldRule) -> dict:
        out: dict = {"path": f.path.value, "display_name": f.display_name,
                     "visible": "true" if f.visible else "false", "order": str(f.order)}
        if f.widget_override is not None:
            out["widget"] = f.widget_override.value
        if f.autocomplete is not None:
            out["autocomplete"] = {
                "min_chars": str(f.autocomplete.min_chars),
                "target": f.autocomplete.target,
            }
        return out

    def entry_dict(e: EntityConfig) -> dict:
        out: dict = {}
        if isinstance(e.binding, ShapeBinding):
            out["shape"] = e.binding.shape.value
        else:
            out["class"] = e.binding.iri.value
        if e.label_query is not None:
            out["label_query"] = e.label_query
        if e.field_rules:
            out["fields"] = [field_dict(f) for f in e.field_rules]
        if e.duplicate_rule is not None:
            out["duplicates"] = {
                "any_of": [{"all_of": [p.value for p in clause]} for clause in e.duplicate_rule.clauses]
            }
        if e.virtual_properties:
            out["virtual_properties"] = [
                {
                    "label": v.label,
                    "target_shape": v.target_shape.value,
                    "intermediate_class": v.intermediate_class.value,
                    "link_from": v.link_from.value,
                    "link_to": v.link_to.value,
                }
                for v in e.virtual_properties
            ]
        if e.ordering is not None:
            out["ordering"] = {
                "ordered_path": e.ordering.ordered_path.value,
                "chain_predicate": e.ordering.chain_predicate.value,
            }
        if e.orphan_policy is not None:
            out["orphan_policy"] = e.orphan_policy.value
        return out

    doc: dict = {}
    defaults: dict = {}
    if rules.defaults.orphan_policy is not None:
        defaults["orphan_policy"] = rules.defaults.orphan_policy.value
    if rules.defaults.lock_ttl_seconds is not None:
        defaults["lock_ttl_seconds"] = str(rules.defaults.lock_ttl_seconds)
    if defaults:
        doc["defaults"] = defaults
    if rules.entries:
        doc["entities"] = [entry_dict(e) for e in rules.entries]
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


# --- resolution and queries -----------------------------------------------------


def resolve_entity_config(
    class_iri: Iri | None, shape: Iri | None, rules: DisplayRules
) -> EntityConfig | None:
    """Shape binding beats class binding; no binding means free-form mode."""
    if shape is not None:
        for entry in rules.entries:
            if isinstance(entry.binding, ShapeBinding) and entry.binding.shape == shape:
                return entry
    if class_iri is not None:
        for entry in rules.entries:
            if isinstance(entry.binding, ClassBinding) and entry.binding.iri == class_iri:
                return entry
    return None


def inject_binding(query: str, var: str, term: Term) -> str:
    """Splice a VALUES block binding `var` before the WHERE group closes."""
    idx = query.rindex("}")
    return f"{query[:idx]} VALUES ?{var} {{ {render_term(term)} }} {query[idx:]}"


def compute_label(
    entity: Iri,
    config: EntityConfig | None,
    store: Store,
    diagnostics: DiagnosticLog | None = None,
) -> str:
    """Run the configured label query; fall back to the IRI local name."""
    if config is not None and config.label_query is not None:
        try:
            rows = store.select(inject_binding(config.label_query, "entity", entity))
            if rows:
                (value,) = rows[0].values()
                return value.lexical if isinstance(value, Literal) else str(value)
        except CurationError as exc:
            if diagnostics is not None:
                diagnostics.error(
                    "label-query-failed", f"label query failed for {entity}: {exc}"
                )
    return entity.local_name()


def build_duplicate_query(
    rule: DuplicateRule,
    candidate_values: dict[Iri, list[Term]],
    exclude: Iri | None = None,
) -> str:
    """UNION query over every fully-instantiable clause. Multi-valued
    properties match on any value (the clause expands over the product)."""
    branches: list[str] = []
    for clause in rule.clauses:
        value_lists = []
        for path in clause:
            values = candidate_values.get(path) or []
            if not values:
                value_lists = None
                break
            value_lists.append([(path, v) for v in values])
        if value_lists is None:
            continue
        for combo in itertools.product(*value_lists):
            patterns = " ".join(
                f"?e {render_term(path)} {render_term(value)} ." for path, value in combo
            )
            branches.append(f"{{ {patterns} }}")
    if not branches:
        raise NoApplicableClauseError(
            "no duplicate-rule clause is fully instantiable from the given values"
        )
    body = " UNION ".join(branches) if len(branches) > 1 else branches[0]
    exclusion = f" FILTER(?e != {render_term(exclude)})" if exclude is not None else ""
    return f"SELECT DISTINCT ?e WHERE {{ {body}{exclusion} }}"
