"""Validate entity states and form submissions against compiled schemas.

Violations are data, not exceptions: callers decide whether to block.
Conditional rules fire only when the guard triple is present on the focus
entity. Properties the schema does not declare are violations too
(closed-world editing), with rdf:type exempt as system-managed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import date, datetime

from .errors import CoercionError
from .model import EntityState
from .shacl import ConditionSpec, FormSchema, ValidationRule
from .terms import RDF, XSD, Iri, Literal, Term, render_term

__all__ = ["Violation", "validate_entity", "check_condition", "coerce_literal"]

_KIND_ORDER = {
    "missing-required": 0,
    "too-many": 1,
    "datatype": 2,
    "pattern": 3,
    "condition-pattern": 4,
    "not-in-options": 5,
    "undeclared-property": 6,
}


@dataclass(frozen=True, slots=True)
class Violation:
    path: Iri
    kind: str
    message: str
    value: Term | None = None

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise ValueError(f"unknown violation kind {self.kind!r}")
        if not self.message:
            raise ValueError("violation message must be non-empty")

    def to_json(self) -> dict:
        return {
            "path": self.path.value,
            "kind": self.kind,
            "message": self.message,
            "value": _term_json(self.value) if self.value is not None else None,
        }


def _term_json(term: Term) -> dict:
    from .store.base import term_to_json  # deferred: avoids a module cycle

    return term_to_json(term)


def check_condition(state: EntityState, condition: ConditionSpec) -> bool:
    """True iff the state carries the guard triple (entity, path, value)."""
    return condition.has_value in state.objects(condition.path)


def _string_of(term: Term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    return str(term)


def _check_datatype(value: Term, rule: ValidationRule, path: Iri) -> Violation | None:
    if not isinstance(value, Literal):
        names = ", ".join(dt.value for dt in rule.datatypes)
        return Violation(path, "datatype", f"expected a literal of type {names}", value)
    for dt in rule.datatypes:
        if value.datatype == dt:
            try:
                coerce_literal(value.lexical, dt)
                return None
            except CoercionError as exc:
                return Violation(path, "datatype", str(exc), value)
    names = ", ".join(dt.value for dt in rule.datatypes)
    return Violation(
        path, "datatype", f"value has datatype {value.datatype}, expected {names}", value
    )


def _apply_rule(
    state: EntityState, rule: ValidationRule, path: Iri, values: list[Term]
) -> list[Violation]:
    if rule.condition is not None and not check_condition(state, rule.condition):
        return []
    out: list[Violation] = []
    if rule.kind == "datatype":
        for v in values:
            violation = _check_datatype(v, rule, path)
            if violation:
                out.append(violation)
    elif rule.kind == "in":
        allowed = set(rule.values)
        for v in values:
            if v not in allowed:
                opts = ", ".join(render_term(o) for o in rule.values)
                out.append(
                    Violation(path, "not-in-options", f"value must be one of: {opts}", v)
                )
    elif rule.kind == "pattern":
        kind = "pattern" if rule.condition is None else "condition-pattern"
        compiled = re.compile(rule.pattern)
        for v in values:
            if not compiled.search(_string_of(v)):
                out.append(
                    Violation(path, kind, f"value does not match pattern {rule.pattern!r}", v)
                )
    elif rule.kind == "has-value":
        if rule.value not in values:
            out.append(
                Violation(
                    path,
                    "missing-required",
                    f"property must include the value {render_term(rule.value)}",
                )
            )
    return out


def validate_entity(state: EntityState, schema: FormSchema) -> list[Violation]:
    """Check a state against a schema; returns violations in a stable order."""
    violations: list[Violation] = []
    for field in schema.fields:
        values = sorted(
            (t.object for t in state.triples if t.predicate == field.path), key=render_term
        )
        per_field: list[Violation] = []
        need = field.min_count if field.min_count is not None else (1 if field.required else 0)
        if len(values) < need:
            noun = "value" if need == 1 else f"{need} values"
            per_field.append(
                Violation(field.path, "missing-required", f"field requires at least {noun}")
            )
        if field.max_count is not None and len(values) > field.max_count:
            per_field.append(
                Violation(
                    field.path,
                    "too-many",
                    f"field allows at most {field.max_count} value(s), found {len(values)}",
                )
            )
        for rule in field.rules:
            per_field.extend(_apply_rule(state, rule, field.path, values))
        per_field.sort(key=lambda v: (_KIND_ORDER[v.kind], render_term(v.value) if v.value else ""))
        violations.extend(per_field)

    declared = schema.paths
    undeclared = sorted(
        {t.predicate for t in state.triples if t.predicate != RDF.type and t.predicate not in declared},
        key=lambda p: p.value,
    )
    for pred in undeclared:
        count = sum(1 for t in state.triples if t.predicate == pred)
        violations.append(
            Violation(
                pred,
                "undeclared-property",
                f"property is not declared by the shape ({count} triple(s))",
            )
        )
    return violations


# --- literal coercion -------------------------------------------------------

_DATE_RE = re.compile(r"^(-?\d{4,})-(\d{2})-(\d{2})(Z|[+-]\d{2}:\d{2})?$")
_GYEAR_RE = re.compile(r"^-?\d{4,}(Z|[+-]\d{2}:\d{2})?$")
_INTEGER_RE = re.compile(r"^[+-]?\d+$")
_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)$")
_DOUBLE_RE = re.compile(r"^([+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?|[+-]?INF|NaN)$")
_BOOLEAN = {"true", "false", "1", "0"}

_INTEGER_KINDS = {
    XSD.integer,
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


def _valid_date(lexical: str) -> bool:
    m = _DATE_RE.match(lexical)
    if not m:
        return False
    year = abs(int(m.group(1)))
    try:
        # the calendar check needs a year datetime accepts; leap-cycle-preserving
        # fold keeps February 29 validation correct for out-of-range years
        date(year if 1 <= year <= 9999 else 2000 + year % 400, int(m.group(2)), int(m.group(3)))
        return True
    except ValueError:
        return False


def _valid_datetime(lexical: str) -> bool:
    text = lexical
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    try:
        datetime.fromisoformat(text)
        return True
    except ValueError:
        return False


def coerce_literal(input: str, datatype: Iri, language: str | None = None) -> Literal:
    """Validate a form input string against a datatype and wrap it."""
    if language is not None:
        return Literal(input, language=language)
    ok = True
    if datatype == XSD.date:
        ok = _valid_date(input)
    elif datatype == XSD.dateTime:
        ok = "T" in input and _valid_datetime(input)
    elif datatype == XSD.gYear:
        ok = bool(_GYEAR_RE.match(input))
    elif datatype in _INTEGER_KINDS:
        ok = bool(_INTEGER_RE.match(input))
    elif datatype == XSD.decimal:
        ok = bool(_DECIMAL_RE.match(input))
    elif datatype in (XSD.double, XSD.float):
        ok = bool(_DOUBLE_RE.match(input))
    elif datatype == XSD.boolean:
        ok = input in _BOOLEAN
    if not ok:
        raise CoercionError(f"{input!r} is not a valid {datatype.value}")
    return Literal(input, datatype)
