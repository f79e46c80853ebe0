"""SPARQL SELECT/ASK subset: parser and evaluator for the embedded store.

Covers the query fragment this system generates plus what label queries
reasonably need: basic graph patterns with ';'/',' lists, GRAPH blocks,
OPTIONAL, UNION, FILTER, BIND, VALUES, expression projection, DISTINCT,
GROUP BY with COUNT, ORDER BY, LIMIT/OFFSET. Anything outside the subset
raises ParseError; this is deliberately not a full SPARQL engine.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ParseError
from ..lexer import Token, TokenStream, tokenize
from ..terms import RDF, XSD, Iri, Literal, Term, render_term

__all__ = ["parse_query", "evaluate", "SelectQuery", "AskQuery"]


# --- AST ---------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class Var:
    name: str


Node = Term | Var


@dataclass(frozen=True, slots=True)
class TriplePattern:
    s: Node
    p: Node
    o: Node


@dataclass(frozen=True, slots=True)
class Bgp:
    patterns: tuple[TriplePattern, ...]


@dataclass(frozen=True, slots=True)
class OptionalPattern:
    group: "Group"


@dataclass(frozen=True, slots=True)
class UnionPattern:
    branches: tuple["Group", ...]


@dataclass(frozen=True, slots=True)
class GraphScope:
    target: Node
    group: "Group"


@dataclass(frozen=True, slots=True)
class Bind:
    expr: "Expr"
    var: str


@dataclass(frozen=True, slots=True)
class Values:
    var: str
    terms: tuple[Term, ...]


@dataclass(frozen=True, slots=True)
class Group:
    elements: tuple[object, ...]
    filters: tuple["Expr", ...]


# expressions
@dataclass(frozen=True, slots=True)
class VarRef:
    name: str


@dataclass(frozen=True, slots=True)
class Const:
    term: Term


@dataclass(frozen=True, slots=True)
class BoolOp:
    op: str  # "&&" | "||"
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Compare:
    op: str  # = != < > <= >=
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    inner: "Expr"


@dataclass(frozen=True, slots=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = VarRef | Const | BoolOp | Compare | Not | Call


@dataclass(frozen=True, slots=True)
class Aggregate:
    func: str  # only COUNT
    arg: VarRef | None  # None = COUNT(*)
    distinct: bool = False


@dataclass(frozen=True, slots=True)
class Projection:
    var: str
    expr: Expr | Aggregate | None  # None = plain variable


@dataclass(slots=True)
class SelectQuery:
    projections: list[Projection] | None  # None = SELECT *
    distinct: bool
    where: Group
    group_by: list[str] = field(default_factory=list)
    order_by: list[tuple[Expr, bool]] = field(default_factory=list)  # (expr, ascending)
    limit: int | None = None
    offset: int = 0


@dataclass(slots=True)
class AskQuery:
    where: Group


_FUNCTIONS = {
    "CONTAINS",
    "LCASE",
    "UCASE",
    "STR",
    "STRSTARTS",
    "STRENDS",
    "STRLEN",
    "CONCAT",
    "REGEX",
    "BOUND",
    "COALESCE",
    "SAMETERM",
    "LANG",
    "DATATYPE",
    "ISIRI",
    "ISURI",
    "ISLITERAL",
    "ISBLANK",
}


class _QueryParser:
    def __init__(self, text: str):
        self.ts = TokenStream(tokenize(text))
        self.prefixes: dict[str, str] = {}

    # -- entry ---------------------------------------------------------------

    def parse(self) -> SelectQuery | AskQuery:
        ts = self.ts
        while ts.at_word("PREFIX") or ts.at_word("BASE"):
            self._prologue()
        if ts.at_word("SELECT"):
            query = self._select()
        elif ts.at_word("ASK"):
            query = self._ask()
        else:
            raise ts.error("only SELECT and ASK queries are supported")
        ts.expect("eof", what="end of query")
        return query

    def _prologue(self):
        ts = self.ts
        word = str(ts.next().value).upper()
        if word == "PREFIX":
            tok = ts.expect("pname", what="prefix label")
            prefix, local = tok.value
            if local:
                raise ts.error("prefix declaration must end with ':'", tok)
            iri = ts.expect("iri", what="namespace IRI")
            self.prefixes[prefix] = str(iri.value)
        else:
            ts.expect("iri", what="base IRI")  # accepted and ignored: queries use absolute IRIs

    def _select(self) -> SelectQuery:
        ts = self.ts
        ts.next()  # SELECT
        distinct = False
        if ts.at_word("DISTINCT"):
            ts.next()
            distinct = True
        elif ts.at_word("REDUCED"):
            ts.next()
        projections: list[Projection] | None = []
        if ts.at("punct", "*"):
            ts.next()
            projections = None
        else:
            while True:
                if ts.peek().kind == "var":
                    projections.append(Projection(str(ts.next().value), None))
                elif ts.at("punct", "("):
                    ts.next()
                    expr = self._expr_or_aggregate()
                    if not ts.at_word("AS"):
                        raise ts.error("expected AS in projection expression")
                    ts.next()
                    var = ts.expect("var", what="projection variable")
                    ts.expect("punct", ")")
                    projections.append(Projection(str(var.value), expr))
                else:
                    break
            if not projections:
                raise ts.error("SELECT needs at least one variable or expression")
        if ts.at_word("WHERE"):
            ts.next()
        where = self._group()
        query = SelectQuery(projections, distinct, where)
        self._modifiers(query)
        return query

    def _ask(self) -> AskQuery:
        self.ts.next()
        if self.ts.at_word("WHERE"):
            self.ts.next()
        return AskQuery(self._group())

    def _modifiers(self, query: SelectQuery):
        ts = self.ts
        while True:
            if ts.at_word("GROUP"):
                ts.next()
                if not ts.at_word("BY"):
                    raise ts.error("expected BY after GROUP")
                ts.next()
                while ts.peek().kind == "var":
                    query.group_by.append(str(ts.next().value))
                if not query.group_by:
                    raise ts.error("GROUP BY needs at least one variable")
            elif ts.at_word("ORDER"):
                ts.next()
                if not ts.at_word("BY"):
                    raise ts.error("expected BY after ORDER")
                ts.next()
                while True:
                    if ts.at_word("ASC", "DESC"):
                        asc = str(ts.next().value).upper() == "ASC"
                        ts.expect("punct", "(")
                        expr = self._expression()
                        ts.expect("punct", ")")
                        query.order_by.append((expr, asc))
                    elif ts.peek().kind == "var":
                        query.order_by.append((VarRef(str(ts.next().value)), True))
                    else:
                        break
                if not query.order_by:
                    raise ts.error("ORDER BY needs at least one sort key")
            elif ts.at_word("LIMIT"):
                ts.next()
                tok = ts.expect("number", what="LIMIT count")
                query.limit = int(tok.value[1])
            elif ts.at_word("OFFSET"):
                ts.next()
                tok = ts.expect("number", what="OFFSET count")
                query.offset = int(tok.value[1])
            else:
                return

    # -- group graph patterns --------------------------------------------------

    def _group(self) -> Group:
        ts = self.ts
        ts.expect("punct", "{", what="'{' opening a group")
        elements: list[object] = []
        filters: list[Expr] = []
        while not ts.at("punct", "}"):
            if ts.at("eof"):
                raise ts.error("unterminated group")
            if ts.at_word("FILTER"):
                ts.next()
                filters.append(self._filter_body())
            elif ts.at_word("OPTIONAL"):
                ts.next()
                elements.append(OptionalPattern(self._group()))
            elif ts.at_word("BIND"):
                ts.next()
                ts.expect("punct", "(")
                expr = self._expression()
                if not ts.at_word("AS"):
                    raise ts.error("expected AS in BIND")
                ts.next()
                var = ts.expect("var", what="BIND variable")
                ts.expect("punct", ")")
                elements.append(Bind(expr, str(var.value)))
            elif ts.at_word("VALUES"):
                ts.next()
                var = ts.expect("var", what="VALUES variable")
                ts.expect("punct", "{")
                terms = []
                while not ts.at("punct", "}"):
                    terms.append(self._term("VALUES entry"))
                ts.next()
                elements.append(Values(str(var.value), tuple(terms)))
            elif ts.at_word("GRAPH"):
                ts.next()
                target = self._node("graph name")
                elements.append(GraphScope(target, self._group()))
            elif ts.at("punct", "{"):
                branches = [self._group()]
                while ts.at_word("UNION"):
                    ts.next()
                    branches.append(self._group())
                elements.append(UnionPattern(tuple(branches)))
            elif ts.at_word("SELECT"):
                raise ts.error("subqueries are not supported")
            elif ts.at_word("MINUS", "SERVICE", "EXISTS", "NOT"):
                raise ts.error(f"{ts.peek().value} is not supported")
            else:
                elements.append(Bgp(tuple(self._triples_block())))
            ts.accept("punct", ".")
        ts.next()  # '}'
        return Group(tuple(elements), tuple(filters))

    def _filter_body(self) -> Expr:
        ts = self.ts
        if ts.at("punct", "("):
            ts.next()
            expr = self._expression()
            ts.expect("punct", ")")
            return expr
        tok = ts.peek()
        if tok.kind == "word" and str(tok.value).upper() in _FUNCTIONS:
            return self._primary()
        if tok.kind == "punct" and tok.value == "!":
            return self._expression()
        raise ts.error("FILTER expects a bracketted expression or builtin call")

    def _triples_block(self) -> list[TriplePattern]:
        ts = self.ts
        patterns: list[TriplePattern] = []
        subject = self._node("subject")
        while True:
            predicate = self._verb()
            while True:
                obj = self._node("object")
                patterns.append(TriplePattern(subject, predicate, obj))
                if not ts.accept("punct", ","):
                    break
            if ts.accept("punct", ";"):
                while ts.accept("punct", ";"):
                    pass
                if ts.at("punct", ".") or ts.at("punct", "}"):
                    break
                continue
            break
        return patterns

    def _verb(self) -> Node:
        ts = self.ts
        if ts.at("word", "a"):
            ts.next()
            return RDF.type
        return self._node("predicate")

    def _node(self, what: str) -> Node:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "var":
            ts.next()
            return Var(str(tok.value))
        return self._term(what)

    def _term(self, what: str) -> Term:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "iri":
            ts.next()
            try:
                return Iri(str(tok.value))
            except ValueError as exc:
                raise ts.error(str(exc), tok)
        if tok.kind == "pname":
            ts.next()
            prefix, local = tok.value
            ns = self.prefixes.get(prefix)
            if ns is None:
                raise ts.error(f"undeclared prefix {prefix!r}", tok)
            return Iri(ns + local)
        if tok.kind == "string":
            ts.next()
            if ts.accept("punct", "^^"):
                dt = self._term("datatype IRI")
                if not isinstance(dt, Iri):
                    raise ts.error("datatype must be an IRI")
                return Literal(str(tok.value), dt)
            if ts.peek().kind == "at_word":
                lang = ts.next()
                return Literal(str(tok.value), language=str(lang.value))
            return Literal(str(tok.value))
        if tok.kind == "number":
            ts.next()
            kind, lexical = tok.value
            return Literal(lexical, XSD[kind])
        if tok.kind == "boolean":
            ts.next()
            return Literal(str(tok.value), XSD.boolean)
        if tok.kind in ("blank", "anon"):
            raise ts.error("blank nodes are not supported in queries", tok)
        raise ts.error(f"expected {what}, found {tok.describe()}", tok)

    # -- expressions -----------------------------------------------------------

    def _expr_or_aggregate(self) -> Expr | Aggregate:
        ts = self.ts
        if ts.at_word("COUNT"):
            ts.next()
            ts.expect("punct", "(")
            distinct = False
            if ts.at_word("DISTINCT"):
                ts.next()
                distinct = True
            if ts.accept("punct", "*"):
                agg = Aggregate("COUNT", None, distinct)
            else:
                var = ts.expect("var", what="COUNT argument")
                agg = Aggregate("COUNT", VarRef(str(var.value)), distinct)
            ts.expect("punct", ")")
            return agg
        if ts.at_word("SUM", "AVG", "MIN", "MAX", "GROUP_CONCAT", "SAMPLE"):
            raise ts.error(f"aggregate {ts.peek().value} is not supported (only COUNT)")
        return self._expression()

    def _expression(self) -> Expr:
        return self._or_expr()

    def _or_expr(self) -> Expr:
        left = self._and_expr()
        while self.ts.accept("punct", "||"):
            left = BoolOp("||", left, self._and_expr())
        return left

    def _and_expr(self) -> Expr:
        left = self._relational()
        while self.ts.accept("punct", "&&"):
            left = BoolOp("&&", left, self._relational())
        return left

    def _relational(self) -> Expr:
        left = self._unary()
        for op in ("!=", "<=", ">=", "=", "<", ">"):
            if self.ts.at("punct", op):
                self.ts.next()
                return Compare(op, left, self._unary())
        if self.ts.at_word("IN"):
            raise self.ts.error("IN expressions are not supported; expand to equality + ||")
        return left

    def _unary(self) -> Expr:
        if self.ts.accept("punct", "!"):
            return Not(self._unary())
        return self._primary()

    def _primary(self) -> Expr:
        ts = self.ts
        tok = ts.peek()
        if tok.kind == "punct" and tok.value == "(":
            ts.next()
            expr = self._expression()
            ts.expect("punct", ")")
            return expr
        if tok.kind == "var":
            ts.next()
            return VarRef(str(tok.value))
        if tok.kind == "word":
            name = str(tok.value).upper()
            if name in _FUNCTIONS:
                ts.next()
                ts.expect("punct", "(")
                args: list[Expr] = []
                if not ts.at("punct", ")"):
                    args.append(self._expression())
                    while ts.accept("punct", ","):
                        args.append(self._expression())
                ts.expect("punct", ")")
                return Call(name, tuple(args))
            raise ts.error(f"unsupported function or keyword {tok.value!r}", tok)
        return Const(self._term("expression term"))


def parse_query(text: str) -> SelectQuery | AskQuery:
    return _QueryParser(text).parse()


# --- evaluation ---------------------------------------------------------------


class _EvalError(Exception):
    """Expression type error; SPARQL semantics: the filter simply fails."""


_NUMERIC = {
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
}


def _numeric_value(term: Term):
    if isinstance(term, Literal) and term.datatype in _NUMERIC:
        try:
            return float(term.lexical)
        except ValueError:
            raise _EvalError()
    return None


def _string_value(term: Term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, Iri):
        return term.value
    raise _EvalError()


def _ebv(term: Term) -> bool:
    if isinstance(term, Literal):
        if term.datatype == XSD.boolean:
            return term.lexical in ("true", "1")
        num = _numeric_value(term)
        if num is not None:
            return num != 0
        if term.datatype == XSD.string or term.language is not None:
            return len(term.lexical) > 0
    raise _EvalError()


def _bool(value: bool) -> Literal:
    return Literal("true" if value else "false", XSD.boolean)


def _eval_expr(expr: Expr, binding: dict[str, Term]) -> Term:
    if isinstance(expr, VarRef):
        if expr.name not in binding:
            raise _EvalError()
        return binding[expr.name]
    if isinstance(expr, Const):
        return expr.term
    if isinstance(expr, Not):
        try:
            return _bool(not _ebv(_eval_expr(expr.inner, binding)))
        except _EvalError:
            raise
    if isinstance(expr, BoolOp):
        # SPARQL's three-valued logic: an error on one side can still
        # short-circuit to a definite answer on the other
        left = _try_ebv(expr.left, binding)
        right = _try_ebv(expr.right, binding)
        if expr.op == "&&":
            if left is False or right is False:
                return _bool(False)
            if left is True and right is True:
                return _bool(True)
            raise _EvalError()
        if left is True or right is True:
            return _bool(True)
        if left is False and right is False:
            return _bool(False)
        raise _EvalError()
    if isinstance(expr, Compare):
        return _eval_compare(expr, binding)
    if isinstance(expr, Call):
        return _eval_call(expr, binding)
    raise _EvalError()


def _try_ebv(expr: Expr, binding) -> bool | None:
    try:
        return _ebv(_eval_expr(expr, binding))
    except _EvalError:
        return None


def _eval_compare(expr: Compare, binding) -> Literal:
    left = _eval_expr(expr.left, binding)
    right = _eval_expr(expr.right, binding)
    ln, rn = _numeric_value(left), _numeric_value(right)
    if ln is not None and rn is not None:
        table = {
            "=": ln == rn,
            "!=": ln != rn,
            "<": ln < rn,
            ">": ln > rn,
            "<=": ln <= rn,
            ">=": ln >= rn,
        }
        return _bool(table[expr.op])
    if expr.op == "=":
        return _bool(left == right)
    if expr.op == "!=":
        return _bool(left != right)
    if isinstance(left, Literal) and isinstance(right, Literal):
        ls, rs = left.lexical, right.lexical
        table = {"<": ls < rs, ">": ls > rs, "<=": ls <= rs, ">=": ls >= rs}
        return _bool(table[expr.op])
    raise _EvalError()


def _eval_call(expr: Call, binding) -> Term:
    name = expr.name
    if name == "BOUND":
        if len(expr.args) != 1 or not isinstance(expr.args[0], VarRef):
            raise _EvalError()
        return _bool(expr.args[0].name in binding)
    if name == "COALESCE":
        for arg in expr.args:
            try:
                return _eval_expr(arg, binding)
            except _EvalError:
                continue
        raise _EvalError()
    args = [_eval_expr(a, binding) for a in expr.args]
    if name == "STR":
        return Literal(_string_value(args[0]))
    if name == "LCASE":
        return Literal(_string_value(args[0]).lower())
    if name == "UCASE":
        return Literal(_string_value(args[0]).upper())
    if name == "STRLEN":
        return Literal(str(len(_string_value(args[0]))), XSD.integer)
    if name == "CONTAINS":
        return _bool(_string_value(args[1]) in _string_value(args[0]))
    if name == "STRSTARTS":
        return _bool(_string_value(args[0]).startswith(_string_value(args[1])))
    if name == "STRENDS":
        return _bool(_string_value(args[0]).endswith(_string_value(args[1])))
    if name == "CONCAT":
        return Literal("".join(_string_value(a) for a in args))
    if name == "REGEX":
        import re

        flags = 0
        if len(args) == 3 and "i" in _string_value(args[2]):
            flags = re.IGNORECASE
        return _bool(bool(re.search(_string_value(args[1]), _string_value(args[0]), flags)))
    if name == "SAMETERM":
        return _bool(args[0] == args[1])
    if name == "LANG":
        if isinstance(args[0], Literal):
            return Literal(args[0].language or "")
        raise _EvalError()
    if name == "DATATYPE":
        if isinstance(args[0], Literal):
            return args[0].datatype
        raise _EvalError()
    if name in ("ISIRI", "ISURI"):
        return _bool(isinstance(args[0], Iri))
    if name == "ISLITERAL":
        return _bool(isinstance(args[0], Literal))
    if name == "ISBLANK":
        return _bool(False)  # the store skolemizes blank nodes on ingestion
    raise _EvalError()


class Dataset:
    """Matching interface the evaluator runs against."""

    def match_default(self, s, p, o):  # pragma: no cover - interface
        raise NotImplementedError

    def match_graph(self, graph: Iri, s, p, o):  # pragma: no cover - interface
        raise NotImplementedError

    def graph_names(self) -> list[Iri]:  # pragma: no cover - interface
        raise NotImplementedError


Binding = dict[str, Term]


def _resolve(node: Node, binding: Binding):
    if isinstance(node, Var):
        return binding.get(node.name)
    return node


def _eval_bgp(bgp: Bgp, sols: list[Binding], matcher) -> list[Binding]:
    for pattern in bgp.patterns:
        out: list[Binding] = []
        for sol in sols:
            s = _resolve(pattern.s, sol)
            p = _resolve(pattern.p, sol)
            o = _resolve(pattern.o, sol)
            for triple in matcher(s, p, o):
                new = dict(sol)
                ok = True
                for node, value in ((pattern.s, triple.subject), (pattern.p, triple.predicate), (pattern.o, triple.object)):
                    if isinstance(node, Var):
                        if node.name in new and new[node.name] != value:
                            ok = False
                            break
                        new[node.name] = value
                if ok:
                    out.append(new)
        sols = out
        if not sols:
            return sols
    return sols


def _eval_group(group: Group, sols: list[Binding], dataset: Dataset, matcher) -> list[Binding]:
    for element in group.elements:
        if isinstance(element, Bgp):
            sols = _eval_bgp(element, sols, matcher)
        elif isinstance(element, OptionalPattern):
            out = []
            for sol in sols:
                extended = _eval_group(element.group, [sol], dataset, matcher)
                out.extend(extended if extended else [sol])
            sols = out
        elif isinstance(element, UnionPattern):
            out = []
            for sol in sols:
                for branch in element.branches:
                    out.extend(_eval_group(branch, [sol], dataset, matcher))
            sols = out
        elif isinstance(element, GraphScope):
            out = []
            if isinstance(element.target, Var):
                names = dataset.graph_names()
            for sol in sols:
                target = _resolve(element.target, sol)
                if target is None:
                    for g in names:
                        seeded = dict(sol)
                        seeded[element.target.name] = g
                        scoped = lambda s, p, o, _g=g: dataset.match_graph(_g, s, p, o)
                        out.extend(_eval_group(element.group, [seeded], dataset, scoped))
                elif isinstance(target, Iri):
                    scoped = lambda s, p, o, _g=target: dataset.match_graph(_g, s, p, o)
                    out.extend(_eval_group(element.group, [sol], dataset, scoped))
            sols = out
        elif isinstance(element, Bind):
            out = []
            for sol in sols:
                new = dict(sol)
                try:
                    value = _eval_expr(element.expr, sol)
                except _EvalError:
                    value = None
                if value is not None:
                    if element.var in new and new[element.var] != value:
                        continue  # incompatible rebinding drops the solution
                    new[element.var] = value
                out.append(new)
            sols = out
        elif isinstance(element, Values):
            out = []
            for sol in sols:
                for term in element.terms:
                    if element.var in sol and sol[element.var] != term:
                        continue
                    new = dict(sol)
                    new[element.var] = term
                    out.append(new)
            sols = out
        if not sols:
            break
    for f in group.filters:
        kept = []
        for sol in sols:
            try:
                if _ebv(_eval_expr(f, sol)):
                    kept.append(sol)
            except _EvalError:
                pass
        sols = kept
    return sols


def _sort_key(term: Term | None):
    if term is None:
        return (0, "")
    return (1, render_term(term))


def evaluate(
    query: SelectQuery | AskQuery | str,
    dataset: Dataset,
    initial: Binding | None = None,
) -> list[Binding] | bool:
    """Run a parsed (or textual) query; SELECT yields bindings, ASK a bool."""
    if isinstance(query, str):
        query = parse_query(query)
    seed = [dict(initial)] if initial else [{}]
    sols = _eval_group(query.where, seed, dataset, dataset.match_default)
    if isinstance(query, AskQuery):
        return bool(sols)

    if query.group_by or any(
        p.expr is not None and isinstance(p.expr, Aggregate) for p in query.projections or []
    ):
        sols = _aggregate(query, sols)
    else:
        if query.projections is not None:
            projected = []
            for sol in sols:
                row: Binding = {}
                for proj in query.projections:
                    if proj.expr is None:
                        if proj.var in sol:
                            row[proj.var] = sol[proj.var]
                    else:
                        try:
                            row[proj.var] = _eval_expr(proj.expr, sol)
                        except _EvalError:
                            pass
                projected.append(row)
            sols = projected

    for expr, asc in reversed(query.order_by if isinstance(query, SelectQuery) else []):
        def key(sol, _e=expr):
            try:
                return _sort_key(_eval_expr(_e, sol))
            except _EvalError:
                return _sort_key(None)

        sols.sort(key=key, reverse=not asc)

    if isinstance(query, SelectQuery) and query.distinct:
        seen = set()
        unique = []
        for sol in sols:
            fingerprint = frozenset((k, render_term(v)) for k, v in sol.items())
            if fingerprint not in seen:
                seen.add(fingerprint)
                unique.append(sol)
        sols = unique

    if isinstance(query, SelectQuery):
        if query.offset:
            sols = sols[query.offset :]
        if query.limit is not None:
            sols = sols[: query.limit]
    return sols


def _aggregate(query: SelectQuery, sols: list[Binding]) -> list[Binding]:
    groups: dict[tuple, list[Binding]] = {}
    for sol in sols:
        key = tuple(render_term(sol[v]) if v in sol else "" for v in query.group_by)
        groups.setdefault(key, []).append(sol)
    if not sols and not query.group_by:
        groups[()] = []
    rows: list[Binding] = []
    for _key, members in groups.items():
        row: Binding = {}
        sample = members[0] if members else {}
        for v in query.group_by:
            if v in sample:
                row[v] = sample[v]
        for proj in query.projections or []:
            if isinstance(proj.expr, Aggregate):
                agg = proj.expr
                if agg.arg is None:
                    count = len(members)
                else:
                    values = [m[agg.arg.name] for m in members if agg.arg.name in m]
                    if agg.distinct:
                        count = len({render_term(v) for v in values})
                    else:
                        count = len(values)
                row[proj.var] = Literal(str(count), XSD.integer)
            elif proj.expr is None:
                if proj.var not in query.group_by:
                    raise ParseError(f"?{proj.var} is projected but not grouped")
            else:
                try:
                    row[proj.var] = _eval_expr(proj.expr, sample)
                except _EvalError:
                    pass
        rows.append(row)
    return rows
