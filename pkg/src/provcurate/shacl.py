"""Compile SHACL node shapes into renderable, validatable form schemas.

Supported constraint vocabulary: sh:targetClass, sh:path (IRI paths only),
sh:datatype, sh:minCount, sh:maxCount, sh:in, sh:or, sh:pattern,
sh:hasValue, sh:node, sh:condition. Anything else is reported as a warning
diagnostic and ignored, never an error: a shape document should always
load.

Constraints sharing a path fold into a single form field. Unconditional
constraints define the field itself; constraints carrying sh:condition
contribute rules that only fire when the focus node matches the guard.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .diagnostics import Diagnostic
from .errors import MissingShapeError, NoShapeError, ParseError
from .model import EntityState
from .terms import RDF, SH, XSD, BlankNode, Iri, Literal, Term, Triple, render_term
from .turtle import parse_turtle

__all__ = [
    "ConditionSpec",
    "PropertyConstraint",
    "NodeShape",
    "ShapeCatalog",
    "WidgetKind",
    "ValidationRule",
    "FormField",
    "FormSchema",
    "parse_shapes",
    "compile_shape",
    "select_widget",
    "resolve_shape",
]


class WidgetKind(str, Enum):
    TEXT = "text"
    TEXTAREA = "textarea"
    NUMBER = "number"
    DATE = "date"
    DATETIME = "datetime"
    YEAR = "year"
    DROPDOWN = "dropdown"
    TAG = "tag"
    NESTED_ENTITY = "nested-entity"
    REFERENCE = "reference"


@dataclass(frozen=True, slots=True)
class ConditionSpec:
    """Guard: the rule applies only when (entity, path, has_value) holds."""

    path: Iri
    has_value: Term


@dataclass(frozen=True, slots=True)
class PropertyConstraint:
    path: Iri
    datatype: Iri | None = None
    min_count: int | None = None
    max_count: int | None = None
    in_values: tuple[Term, ...] | None = None
    pattern: str | None = None
    has_value: Term | None = None
    node_shape: Iri | None = None
    or_alternatives: tuple["PropertyConstraint", ...] | None = None
    condition: ConditionSpec | None = None

    def __post_init__(self):
        if self.min_count is not None and self.min_count < 0:
            raise ValueError("sh:minCount must be non-negative")
        if self.max_count is not None and self.max_count < 0:
            raise ValueError("sh:maxCount must be non-negative")
        if self.min_count is not None and self.max_count is not None:
            if self.min_count > self.max_count:
                raise ValueError("sh:minCount exceeds sh:maxCount")
        if self.pattern is not None:
            re.compile(self.pattern)  # raises re.error on malformed patterns


@dataclass(frozen=True, slots=True)
class NodeShape:
    id: Iri
    target_class: Iri
    constraints: tuple[PropertyConstraint, ...]


@dataclass(slots=True)
class ShapeCatalog:
    shapes: dict[Iri, NodeShape] = field(default_factory=dict)
    warnings: list[Diagnostic] = field(default_factory=list)

    def __contains__(self, shape_id: Iri) -> bool:
        return shape_id in self.shapes

    def get(self, shape_id: Iri) -> NodeShape | None:
        return self.shapes.get(shape_id)

    def merged_with(self, other: "ShapeCatalog") -> "ShapeCatalog":
        merged = ShapeCatalog(dict(self.shapes), list(self.warnings))
        merged.shapes.update(other.shapes)
        merged.warnings.extend(other.warnings)
        return merged


@dataclass(frozen=True, slots=True)
class ValidationRule:
    kind: str  # "pattern" | "datatype" | "in" | "has-value"
    condition: ConditionSpec | None = None
    pattern: str | None = None
    datatypes: tuple[Iri, ...] = ()
    values: tuple[Term, ...] = ()
    value: Term | None = None


@dataclass(frozen=True, slots=True)
class FormField:
    path: Iri
    widget: WidgetKind
    required: bool
    repeatable: bool
    min_count: int | None = None
    max_count: int | None = None
    options: tuple[Term, ...] | None = None
    nested_shape: Iri | None = None
    rules: tuple[ValidationRule, ...] = ()

    def __post_init__(self):
        if self.widget == WidgetKind.DROPDOWN and not self.options:
            raise ValueError("dropdown field without options")
        nested_widgets = (WidgetKind.NESTED_ENTITY, WidgetKind.REFERENCE)
        if (self.nested_shape is not None) != (self.widget in nested_widgets):
            raise ValueError("nested_shape is set iff the widget is nested-entity or reference")


@dataclass(frozen=True, slots=True)
class FormSchema:
    shape: Iri
    target_class: Iri
    fields: tuple[FormField, ...]

    def field_for(self, path: Iri) -> FormField | None:
        for f in self.fields:
            if f.path == path:
                return f
        return None

    @property
    def paths(self) -> set[Iri]:
        return {f.path for f in self.fields}


# --- parsing ----------------------------------------------------------------

_SUPPORTED_PROPERTY_KEYS = {
    SH.path,
    SH.datatype,
    SH.minCount,
    SH.maxCount,
    SH["in"],
    SH["or"],
    SH.pattern,
    SH.hasValue,
    SH.node,
    SH.condition,
}
_IGNORED_NODE_KEYS = {RDF.type, SH.targetClass, SH.property}


class _Graph:
    """Subject-indexed triple view preserving document order."""

    def __init__(self, triples: list[Triple]):
        self.by_subject: dict[Iri | BlankNode, list[Triple]] = {}
        for t in triples:
            self.by_subject.setdefault(t.subject, []).append(t)

    def objects(self, subject, predicate: Iri) -> list[Term]:
        return [t.object for t in self.by_subject.get(subject, []) if t.predicate == predicate]

    def one(self, subject, predicate: Iri) -> Term | None:
        objs = self.objects(subject, predicate)
        return objs[0] if objs else None

    def predicates(self, subject) -> list[Iri]:
        return [t.predicate for t in self.by_subject.get(subject, [])]

    def rdf_list(self, head: Term) -> list[Term]:
        items: list[Term] = []
        seen = set()
        node = head
        while node != RDF.nil:
            if not isinstance(node, (Iri, BlankNode)) or node in seen:
                raise ParseError(f"malformed RDF list at {node}")
            seen.add(node)
            first = self.one(node, RDF.first)
            rest = self.one(node, RDF.rest)
            if first is None or rest is None:
                raise ParseError(f"malformed RDF list at {node}")
            items.append(first)
            node = rest
        return items


def _int_of(term: Term, what: str) -> int:
    if not isinstance(term, Literal):
        raise ParseError(f"{what} must be an integer literal, got {render_term(term)}")
    try:
        return int(term.lexical)
    except ValueError:
        raise ParseError(f"{what} must be an integer literal, got {term.lexical!r}")


def _parse_condition(g: _Graph, node: Term, warn) -> ConditionSpec | None:
    if not isinstance(node, (Iri, BlankNode)):
        warn("invalid-condition", "sh:condition must be a node with sh:path and sh:hasValue")
        return None
    path = g.one(node, SH.path)
    value = g.one(node, SH.hasValue)
    if not isinstance(path, Iri) or value is None:
        warn("invalid-condition", "sh:condition needs both sh:path (an IRI) and sh:hasValue")
        return None
    return ConditionSpec(path, value)


def _parse_property(g: _Graph, node: Term, shape_id: Iri, warn) -> PropertyConstraint | None:
    if not isinstance(node, (Iri, BlankNode)):
        warn("invalid-property", f"sh:property on {shape_id} must point at a property shape")
        return None
    for pred in g.predicates(node):
        if pred not in _SUPPORTED_PROPERTY_KEYS:
            warn(
                "unsupported-constraint",
                f"unsupported constraint kind {pred} ignored",
                context=str(shape_id),
            )
    path = g.one(node, SH.path)
    if path is None:
        warn("missing-path", f"property shape on {shape_id} has no sh:path; skipped")
        return None
    if not isinstance(path, Iri):
        warn(
            "unsupported-path",
            f"property path expressions are not supported; skipped one on {shape_id}",
        )
        return None

    datatype = g.one(node, SH.datatype)
    min_count = g.one(node, SH.minCount)
    max_count = g.one(node, SH.maxCount)
    in_head = g.one(node, SH["in"])
    or_head = g.one(node, SH["or"])
    pattern = g.one(node, SH.pattern)
    flags = g.one(node, SH.flags)
    has_value = g.one(node, SH.hasValue)
    node_shape = g.one(node, SH.node)
    condition_node = g.one(node, SH.condition)

    if flags is not None:
        warn("unsupported-constraint", f"sh:flags is not supported; pattern on {path} "
             "is compiled with default case-sensitive semantics", context=str(shape_id))

    in_values = None
    if in_head is not None:
        in_values = tuple(g.rdf_list(in_head))

    or_alternatives = None
    if or_head is not None:
        alts = []
        for alt_node in g.rdf_list(or_head):
            alt = _parse_property_group(g, alt_node, path, shape_id, warn)
            if alt is not None:
                alts.append(alt)
        or_alternatives = tuple(alts) if alts else None

    condition = None
    if condition_node is not None:
        condition = _parse_condition(g, condition_node, warn)
        if condition is None:
            return None  # guard unusable; dropping the rule is safer than making it unconditional

    pattern_str = None
    if pattern is not None:
        if isinstance(pattern, Literal):
            try:
                re.compile(pattern.lexical)
                pattern_str = pattern.lexical
            except re.error as exc:
                warn("invalid-pattern", f"sh:pattern on {path} does not compile ({exc}); ignored")
        else:
            warn("invalid-pattern", f"sh:pattern on {path} must be a string literal; ignored")

    try:
        return PropertyConstraint(
            path=path,
            datatype=datatype if isinstance(datatype, Iri) else None,
            min_count=_int_of(min_count, "sh:minCount") if min_count is not None else None,
            max_count=_int_of(max_count, "sh:maxCount") if max_count is not None else None,
            in_values=in_values,
            pattern=pattern_str,
            has_value=has_value,
            node_shape=node_shape if isinstance(node_shape, Iri) else None,
            or_alternatives=or_alternatives,
            condition=condition,
        )
    except (ValueError, ParseError) as exc:
        warn("invalid-property", f"property shape on {path} skipped: {exc}")
        return None


def _parse_property_group(g: _Graph, node: Term, path: Iri, shape_id: Iri, warn):
    """One sh:or alternative: a constraint group without its own path."""
    if not isinstance(node, (Iri, BlankNode)):
        warn("invalid-or", f"sh:or member on {shape_id} must be a constraint group")
        return None
    datatype = g.one(node, SH.datatype)
    in_head = g.one(node, SH["in"])
    has_value = g.one(node, SH.hasValue)
    node_shape = g.one(node, SH.node)
    try:
        return PropertyConstraint(
            path=path,
            datatype=datatype if isinstance(datatype, Iri) else None,
            in_values=tuple(g.rdf_list(in_head)) if in_head is not None else None,
            has_value=has_value,
            node_shape=node_shape if isinstance(node_shape, Iri) else None,
        )
    except (ValueError, ParseError) as exc:
        warn("invalid-or", f"sh:or member on {path} skipped: {exc}")
        return None


def parse_shapes(document: str) -> ShapeCatalog:
    """Extract every node shape carrying sh:targetClass from a Turtle document."""
    triples = parse_turtle(document)
    g = _Graph(triples)
    catalog = ShapeCatalog()

    def warn(code: str, message: str, context: str | None = None):
        catalog.warnings.append(Diagnostic("warning", code, message, context))

    seen: set[Term] = set()
    for triple in triples:
        if triple.predicate != SH.targetClass or triple.subject in seen:
            continue
        seen.add(triple.subject)
        subject = triple.subject
        if not isinstance(subject, Iri):
            warn("anonymous-shape", "node shape without an IRI skipped")
            continue
        targets = g.objects(subject, SH.targetClass)
        if len(targets) > 1:
            warn("multiple-targets", f"{subject} has several sh:targetClass values; using the first")
        target = targets[0]
        if not isinstance(target, Iri):
            warn("invalid-target", f"{subject} has a non-IRI sh:targetClass; skipped")
            continue
        for pred in g.predicates(subject):
            if pred not in _IGNORED_NODE_KEYS:
                warn(
                    "unsupported-constraint",
                    f"unsupported constraint kind {pred} ignored",
                    context=str(subject),
                )
        constraints = []
        for pnode in g.objects(subject, SH.property):
            parsed = _parse_property(g, pnode, subject, warn)
            if parsed is not None:
                constraints.append(parsed)
        catalog.shapes[subject] = NodeShape(subject, target, tuple(constraints))
    return catalog


# --- compilation ------------------------------------------------------------

_NUMERIC_DATATYPES = {
    XSD.integer,
    XSD.decimal,
    XSD.double,
    XSD.float,
    XSD.int,
    XSD.long,
    XSD.short,
    XSD.byte,
    XSD.nonNegativeInteger,
    XSD.positiveInteger,
    XSD.negativeInteger,
    XSD.nonPositiveInteger,
    XSD.unsignedInt,
    XSD.unsignedLong,
}


def select_widget(
    constraint: PropertyConstraint, override: WidgetKind | None = None
) -> WidgetKind:
    """Decision table, in priority order; always resolves."""
    if override is not None:
        if override != WidgetKind.DROPDOWN or constraint.in_values or constraint.or_alternatives:
            return override
    if constraint.in_values or constraint.or_alternatives:
        return WidgetKind.DROPDOWN
    if constraint.node_shape is not None:
        return WidgetKind.NESTED_ENTITY
    dt = constraint.datatype
    if dt == XSD.date:
        return WidgetKind.DATE
    if dt == XSD.dateTime:
        return WidgetKind.DATETIME
    if dt == XSD.gYear:
        return WidgetKind.YEAR
    if dt in _NUMERIC_DATATYPES:
        return WidgetKind.NUMBER
    return WidgetKind.TEXT


def _rules_of(constraint: PropertyConstraint) -> list[ValidationRule]:
    cond = constraint.condition
    rules = []
    if constraint.datatype is not None:
        rules.append(ValidationRule("datatype", cond, datatypes=(constraint.datatype,)))
    elif constraint.or_alternatives:
        dts = tuple(a.datatype for a in constraint.or_alternatives if a.datatype is not None)
        if dts:
            rules.append(ValidationRule("datatype", cond, datatypes=dts))
    if constraint.in_values is not None:
        rules.append(ValidationRule("in", cond, values=constraint.in_values))
    if constraint.pattern is not None:
        rules.append(ValidationRule("pattern", cond, pattern=constraint.pattern))
    if constraint.has_value is not None:
        rules.append(ValidationRule("has-value", cond, value=constraint.has_value))
    return rules


def compile_shape(shape_id: Iri, catalog: ShapeCatalog) -> FormSchema:
    """Merge the shape's constraints into one deterministic field list."""
    shape = catalog.get(shape_id)
    if shape is None:
        raise MissingShapeError(f"shape {shape_id} is not in the catalog")

    by_path: dict[Iri, list[PropertyConstraint]] = {}
    order: list[Iri] = []
    for c in shape.constraints:
        if c.path not in by_path:
            by_path[c.path] = []
            order.append(c.path)
        by_path[c.path].append(c)

    fields = []
    for path in order:
        group = by_path[path]
        unconditional = [c for c in group if c.condition is None]
        conditional = [c for c in group if c.condition is not None]

        min_counts = [c.min_count for c in unconditional if c.min_count is not None]
        max_counts = [c.max_count for c in unconditional if c.max_count is not None]
        merged = PropertyConstraint(
            path=path,
            datatype=next((c.datatype for c in unconditional if c.datatype), None),
            min_count=max(min_counts) if min_counts else None,
            max_count=min(max_counts) if max_counts else None,
            in_values=next((c.in_values for c in unconditional if c.in_values), None),
            pattern=None,
            has_value=next((c.has_value for c in unconditional if c.has_value), None),
            node_shape=next((c.node_shape for c in unconditional if c.node_shape), None),
            or_alternatives=next(
                (c.or_alternatives for c in unconditional if c.or_alternatives), None
            ),
        )
        if merged.node_shape is not None and merged.node_shape not in catalog:
            raise MissingShapeError(
                f"{shape_id} references unresolvable nested shape {merged.node_shape}"
            )

        rules: list[ValidationRule] = []
        for c in unconditional:
            for rule in _rules_of(c):
                if rule not in rules:
                    rules.append(rule)
        # conditional cardinality is not expressible as a field rule; only the
        # rule kinds pattern/datatype/in/has-value carry over
        unconditional_shadow = {
            ValidationRule(r.kind, None, r.pattern, r.datatypes, r.values, r.value): True
            for r in rules
        }
        for c in conditional:
            for rule in _rules_of(c):
                shadow = ValidationRule(
                    rule.kind, None, rule.pattern, rule.datatypes, rule.values, rule.value
                )
                if shadow in unconditional_shadow:
                    continue  # an unconditional twin already enforces it everywhere
                if rule not in rules:
                    rules.append(rule)

        options: tuple[Term, ...] | None = None
        if merged.in_values:
            options = merged.in_values
        elif merged.or_alternatives:
            options = tuple(
                a.datatype for a in merged.or_alternatives if a.datatype is not None
            ) or None

        widget = select_widget(merged)
        fields.append(
            FormField(
                path=path,
                widget=widget,
                required=(merged.min_count or 0) >= 1,
                repeatable=merged.max_count is None or merged.max_count > 1,
                min_count=merged.min_count,
                max_count=merged.max_count,
                options=options,
                nested_shape=merged.node_shape,
                rules=tuple(rules),
            )
        )
    return FormSchema(shape=shape_id, target_class=shape.target_class, fields=tuple(fields))


def resolve_shape(
    state: EntityState,
    catalog: ShapeCatalog,
    preference_order: list[Iri] | tuple[Iri, ...] = (),
) -> Iri:
    """Pick the best-fitting shape for an existing entity.

    Candidates are the shapes targeting any declared rdf:type; the one with
    the fewest validation violations wins, ties broken by preference order
    and then lexicographically.
    """
    from .validation import validate_entity  # local import: validation builds on this module

    classes = {o for o in state.objects(RDF.type) if isinstance(o, Iri)}
    candidates = [sid for sid, shape in catalog.shapes.items() if shape.target_class in classes]
    if not candidates:
        raise NoShapeError(f"no catalogued shape targets the classes of {state.entity}")

    def score(sid: Iri):
        violations = len(validate_entity(state, compile_shape(sid, catalog)))
        try:
            pref = list(preference_order).index(sid)
        except ValueError:
            pref = len(preference_order)
        return (violations, pref, sid.value)

    return min(candidates, key=score)
