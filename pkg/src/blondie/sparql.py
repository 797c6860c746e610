"""A SPARQL SELECT subset: basic graph patterns, comparison FILTERs,
COUNT/SUM with GROUP BY, ORDER BY, LIMIT and OFFSET.

Rows come back in a deterministic order. Without ORDER BY they are sorted by
the projected bindings; with ORDER BY, ties fall back to the same ordering.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Iterable, Union

from .rdf import (
    DECIMAL,
    INTEGER,
    OWL,
    RDF,
    RDF_TYPE,
    RDFS,
    STRING,
    XSD,
    Iri,
    Literal,
    Term,
    Triple,
    decimal_lexical,
    term_key,
)
from .store import Snapshot, TripleStore
from .vocabulary import BLONDIE

DEFAULT_PREFIXES = {
    "blondie": BLONDIE,
    "rdf": RDF,
    "rdfs": RDFS,
    "owl": OWL,
    "xsd": XSD,
}

COMPARISON_OPS = ("=", "!=", "<", "<=", ">", ">=")


class QueryError(Exception):
    pass


class QuerySyntaxError(QueryError):
    def __init__(self, message: str, position: int, text: str = ""):
        line = text.count("\n", 0, position) + 1
        column = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"line {line}, column {column}: {message}")
        self.position = position
        self.line = line
        self.column = column


class UnsupportedFeatureError(QueryError):
    def __init__(self, feature: str, position: int | None = None, text: str = ""):
        self.feature = feature
        self.position = position
        self.line = self.column = None
        where = f" at offset {position}" if position is not None else ""
        if position is not None and text:
            self.line = text.count("\n", 0, position) + 1
            self.column = position - (text.rfind("\n", 0, position) + 1) + 1
            where = f" at line {self.line}, column {self.column}"
        super().__init__(f"unsupported SPARQL feature: {feature}{where}")


class QueryTypeError(QueryError):
    pass


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return "?" + self.name


PatternTerm = Union[Var, Iri, Literal]


@dataclass(frozen=True)
class TriplePattern:
    s: PatternTerm
    p: PatternTerm
    o: PatternTerm

    def variables(self) -> list[str]:
        return [t.name for t in (self.s, self.p, self.o) if isinstance(t, Var)]


@dataclass(frozen=True)
class Comparison:
    var: str
    op: str
    value: Term


@dataclass(frozen=True)
class Aggregate:
    func: str  # "COUNT" or "SUM"
    var: str | None  # None means COUNT(*)
    alias: str
    distinct: bool = False


SelectItem = Union[str, Aggregate]


@dataclass
class Query:
    select: list[SelectItem]
    patterns: list[TriplePattern]
    prefixes: dict[str, str] = field(default_factory=dict)
    filters: list[Comparison] = field(default_factory=list)
    group_by: str | None = None
    order_by: tuple[str, bool] | None = None  # (variable, ascending)
    limit: int | None = None
    offset: int | None = None
    distinct: bool = False
    select_all: bool = False

    @property
    def pattern_variables(self) -> list[str]:
        seen: dict[str, None] = {}
        for pat in self.patterns:
            for v in pat.variables():
                seen.setdefault(v, None)
        return list(seen)

    @property
    def output_variables(self) -> list[str]:
        if self.select_all:
            return self.pattern_variables
        return [item.alias if isinstance(item, Aggregate) else item for item in self.select]

    @property
    def aggregates(self) -> list[Aggregate]:
        return [item for item in self.select if isinstance(item, Aggregate)]


# -- tokenizer --------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("IRIREF", r"<[A-Za-z][A-Za-z0-9+.\-]*:[^<>\"{}|^`\\\x00-\x20]*>"),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"|\'(?:[^\'\\\n\r]|\\.)*\''),
    ("DATATYPE", r"\^\^"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("NUMBER", r"[+-]?(?:[0-9]+\.[0-9]+|\.[0-9]+|[0-9]+)(?![0-9.]*[eE])"),
    ("DOUBLE", r"[+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)[eE][+-]?[0-9]+"),
    ("VAR", r"[?$][A-Za-z_][A-Za-z0-9_]*"),
    ("PNAME", r"(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?"),
    ("KEYWORD", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"!=|<=|>=|&&|\|\||[=<>]"),
    ("PATH", r"[/|^!]"),
    ("PUNCT", r"[{}().;,*+?\[\]]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{rx})" for n, rx in _TOKEN_SPEC))

_UNSUPPORTED_KEYWORDS = {
    "OPTIONAL", "UNION", "MINUS", "GRAPH", "SERVICE", "BIND", "VALUES",
    "CONSTRUCT", "ASK", "DESCRIBE", "INSERT", "DELETE", "LOAD", "CLEAR",
    "DROP", "CREATE", "HAVING", "EXISTS", "NOT", "FROM", "BASE", "WITH",
    "AVG", "MIN", "MAX", "SAMPLE", "GROUP_CONCAT", "REDUCED",
}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int

    @property
    def upper(self) -> str:
        return self.text.upper()


def _tokenize(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        if m.lastgroup not in ("WS", "COMMENT"):
            out.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    return out


_STRING_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


class _QueryParser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes = dict(DEFAULT_PREFIXES)

    # token helpers
    def peek(self, offset: int = 0) -> _Tok | None:
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else None

    def error(self, message: str, tok: _Tok | None = None):
        pos = tok.pos if tok is not None else len(self.text)
        raise QuerySyntaxError(message, pos, self.text)

    def take(self, what: str) -> _Tok:
        tok = self.peek()
        if tok is None:
            self.error(f"unexpected end of query, expected {what}")
        self.check_unsupported(tok)
        self.i += 1
        return tok

    def at_keyword(self, *words: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == "KEYWORD" and tok.upper in words

    def expect_keyword(self, word: str) -> _Tok:
        tok = self.take(word)
        if tok.kind != "KEYWORD" or tok.upper != word:
            self.error(f"expected {word}, found {tok.text!r}", tok)
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.take(repr(text))
        if tok.text != text:
            self.error(f"expected {text!r}, found {tok.text!r}", tok)
        return tok

    def check_unsupported(self, tok: _Tok):
        if tok.kind == "KEYWORD" and tok.upper in _UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeatureError(tok.upper, tok.pos)
        if tok.kind == "OP" and tok.text == "||":
            raise UnsupportedFeatureError("disjunction in FILTER", tok.pos)

    # grammar
    def parse(self) -> Query:
        while self.at_keyword("PREFIX"):
            self.i += 1
            label = self.take("prefix label")
            if label.kind != "PNAME" or not label.text.endswith(":"):
                self.error("expected a prefix label ending in ':'", label)
            ns = self.take("namespace IRI")
            if ns.kind != "IRIREF":
                self.error("expected a namespace IRI", ns)
            self.prefixes[label.text[:-1]] = ns.text[1:-1]
        tok = self.peek()
        if tok is None:
            self.error("empty query")
        self.check_unsupported(tok)
        self.expect_keyword("SELECT")
        q = Query(select=[], patterns=[], prefixes=dict(self.prefixes))
        if self.at_keyword("DISTINCT"):
            self.i += 1
            q.distinct = True
        self.select_clause(q)
        if self.at_keyword("WHERE"):
            self.i += 1
        self.group_graph_pattern(q)
        self.solution_modifiers(q)
        tok = self.peek()
        if tok is not None:
            self.check_unsupported(tok)
            self.error(f"unexpected {tok.text!r} after query", tok)
        self.check_variables(q)
        return q

    def select_clause(self, q: Query):
        tok = self.peek()
        if tok is not None and tok.text == "*":
            self.i += 1
            q.select_all = True
            return
        while True:
            tok = self.peek()
            if tok is None:
                self.error("unexpected end of query in SELECT")
            if tok.kind == "VAR":
                self.i += 1
                q.select.append(tok.text[1:])
            elif tok.text == "(":
                self.i += 1
                q.select.append(self.aggregate())
            else:
                break
        if not q.select:
            self.error("SELECT needs at least one variable or aggregate", self.peek())

    def aggregate(self) -> Aggregate:
        func_tok = self.take("aggregate")
        if func_tok.kind != "KEYWORD" or func_tok.upper not in ("COUNT", "SUM"):
            self.error("expected COUNT or SUM", func_tok)
        self.expect("(")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.i += 1
            distinct = True
        arg = self.take("aggregate argument")
        if arg.text == "*":
            if func_tok.upper != "COUNT":
                self.error("only COUNT accepts *", arg)
            var = None
        elif arg.kind == "VAR":
            var = arg.text[1:]
        else:
            self.error("aggregate argument must be a variable", arg)
        self.expect(")")
        self.expect_keyword("AS")
        alias = self.take("alias variable")
        if alias.kind != "VAR":
            self.error("expected an alias variable", alias)
        self.expect(")")
        return Aggregate(func_tok.upper, var, alias.text[1:], distinct)

    def group_graph_pattern(self, q: Query):
        self.expect("{")
        while True:
            tok = self.peek()
            if tok is None:
                self.error("unterminated group pattern")
            self.check_unsupported(tok)
            if tok.text == "}":
                self.i += 1
                return
            if tok.text == "{":
                raise UnsupportedFeatureError("nested group pattern", tok.pos)
            if tok.kind == "KEYWORD" and tok.upper == "SELECT":
                raise UnsupportedFeatureError("subquery", tok.pos)
            if tok.kind == "KEYWORD" and tok.upper == "FILTER":
                self.i += 1
                q.filters.extend(self.filter())
                if self.peek() is not None and self.peek().text == ".":
                    self.i += 1
                continue
            self.triples_block(q)

    def triples_block(self, q: Query):
        subject = self.pattern_term(self.take("subject"), "subject")
        while True:
            predicate = self.predicate()
            while True:
                obj = self.pattern_term(self.take("object"), "object")
                q.patterns.append(TriplePattern(subject, predicate, obj))
                if self.peek() is not None and self.peek().text == ",":
                    self.i += 1
                    continue
                break
            tok = self.peek()
            if tok is not None and tok.text == ";":
                while self.peek() is not None and self.peek().text == ";":
                    self.i += 1
                nxt = self.peek()
                if nxt is None or nxt.text in (".", "}"):
                    break
                continue
            break
        tok = self.peek()
        if tok is not None and tok.text == ".":
            self.i += 1
        elif tok is None or (tok.text != "}" and not (tok.kind == "KEYWORD" and tok.upper == "FILTER")):
            if tok is not None:
                self.check_unsupported(tok)
            self.error("expected '.' or '}' after triple pattern", tok)

    def predicate(self) -> PatternTerm:
        tok = self.take("predicate")
        if tok.kind == "KEYWORD" and tok.text == "a":
            pred: PatternTerm = Iri(RDF_TYPE)
        elif tok.kind == "PATH" or tok.text == "(":
            raise UnsupportedFeatureError("property path", tok.pos)
        else:
            pred = self.pattern_term(tok, "predicate")
            if isinstance(pred, Literal):
                self.error("a literal cannot be a predicate", tok)
        nxt = self.peek()
        if nxt is not None and (nxt.kind == "PATH" or nxt.text in ("*", "+", "?")):
            raise UnsupportedFeatureError("property path", nxt.pos)
        return pred

    def pattern_term(self, tok: _Tok, role: str) -> PatternTerm:
        if tok.kind == "VAR":
            return Var(tok.text[1:])
        if tok.text == "[" or tok.text.startswith("_:"):
            raise UnsupportedFeatureError("blank node", tok.pos)
        if tok.text == "(":
            raise UnsupportedFeatureError("collection", tok.pos)
        term = self.constant(tok)
        if isinstance(term, Literal) and role == "subject":
            self.error("a literal cannot be a subject", tok)
        return term

    def constant(self, tok: _Tok) -> Term:
        if tok.kind == "IRIREF":
            return self.make_iri(tok.text[1:-1], tok)
        if tok.kind == "PNAME":
            label, _, local = tok.text.partition(":")
            if label not in self.prefixes:
                self.error(f"undeclared prefix {label!r}", tok)
            return self.make_iri(self.prefixes[label] + local, tok)
        if tok.kind == "NUMBER":
            return Literal(tok.text, DECIMAL if "." in tok.text else INTEGER)
        if tok.kind == "DOUBLE":
            raise UnsupportedFeatureError("xsd:double literal", tok.pos)
        if tok.kind == "STRING":
            lexical = self.unescape(tok)
            nxt = self.peek()
            if nxt is not None and nxt.kind == "LANGTAG":
                raise UnsupportedFeatureError("language-tagged literal", nxt.pos)
            if nxt is not None and nxt.kind == "DATATYPE":
                self.i += 1
                dt_tok = self.take("datatype")
                dt = self.constant(dt_tok)
                kinds = {XSD + "string": STRING, XSD + "decimal": DECIMAL, XSD + "integer": INTEGER}
                if not isinstance(dt, Iri) or dt.value not in kinds:
                    raise UnsupportedFeatureError(f"datatype {dt}", dt_tok.pos)
                try:
                    return Literal(lexical, kinds[dt.value])
                except ValueError as exc:
                    self.error(str(exc), tok)
            return Literal(lexical)
        if tok.kind == "KEYWORD" and tok.upper in ("TRUE", "FALSE"):
            raise UnsupportedFeatureError("boolean literal", tok.pos)
        self.error(f"expected a variable, IRI or literal, found {tok.text!r}", tok)

    def make_iri(self, value: str, tok: _Tok) -> Iri:
        try:
            return Iri(value)
        except ValueError as exc:
            self.error(str(exc), tok)

    def unescape(self, tok: _Tok) -> str:
        body = tok.text[1:-1]
        out, i = [], 0
        while i < len(body):
            if body[i] == "\\":
                nxt = body[i + 1]
                if nxt in _STRING_ESCAPES:
                    out.append(_STRING_ESCAPES[nxt])
                    i += 2
                    continue
                if nxt in "uU":
                    width = 4 if nxt == "u" else 8
                    out.append(chr(int(body[i + 2:i + 2 + width], 16)))
                    i += 2 + width
                    continue
                self.error(f"bad escape \\{nxt}", tok)
            out.append(body[i])
            i += 1
        return "".join(out)

    def filter(self) -> list[Comparison]:
        self.expect("(")
        comparisons = [self.comparison()]
        while self.peek() is not None and self.peek().text == "&&":
            self.i += 1
            comparisons.append(self.comparison())
        self.expect(")")
        return comparisons

    def comparison(self) -> Comparison:
        left = self.take("comparison operand")
        if left.text == "(":
            raise UnsupportedFeatureError("nested FILTER expression", left.pos)
        if left.kind == "KEYWORD" and self.peek() is not None and self.peek().text == "(":
            raise UnsupportedFeatureError(f"FILTER function {left.text}", left.pos)
        op = self.take("comparison operator")
        if op.kind != "OP" or op.text not in COMPARISON_OPS:
            self.error(f"expected a comparison operator, found {op.text!r}", op)
        right = self.take("comparison operand")
        if left.kind == "VAR" and right.kind != "VAR":
            return Comparison(left.text[1:], op.text, self.constant(right))
        if right.kind == "VAR" and left.kind != "VAR":
            flipped = {"<": ">", ">": "<", "<=": ">=", ">=": "<="}.get(op.text, op.text)
            return Comparison(right.text[1:], flipped, self.constant(left))
        if left.kind == "VAR" and right.kind == "VAR":
            raise UnsupportedFeatureError("variable-to-variable comparison", op.pos)
        self.error("a comparison needs one variable", left)

    def solution_modifiers(self, q: Query):
        if self.at_keyword("GROUP"):
            self.i += 1
            self.expect_keyword("BY")
            tok = self.take("GROUP BY variable")
            if tok.kind != "VAR":
                self.error("GROUP BY takes a single variable", tok)
            q.group_by = tok.text[1:]
            nxt = self.peek()
            if nxt is not None and nxt.kind == "VAR":
                raise UnsupportedFeatureError("multiple GROUP BY keys", nxt.pos)
        if self.at_keyword("ORDER"):
            self.i += 1
            self.expect_keyword("BY")
            tok = self.take("ORDER BY key")
            if tok.kind == "VAR":
                q.order_by = (tok.text[1:], True)
            elif tok.kind == "KEYWORD" and tok.upper in ("ASC", "DESC"):
                self.expect("(")
                var = self.take("variable")
                if var.kind != "VAR":
                    self.error("ORDER BY takes a variable", var)
                self.expect(")")
                q.order_by = (var.text[1:], tok.upper == "ASC")
            else:
                self.error("ORDER BY takes a variable, ASC(?v) or DESC(?v)", tok)
            nxt = self.peek()
            if nxt is not None and (nxt.kind == "VAR" or (nxt.kind == "KEYWORD" and nxt.upper in ("ASC", "DESC"))):
                raise UnsupportedFeatureError("multiple ORDER BY keys", nxt.pos)
        for _ in range(2):
            if self.at_keyword("LIMIT", "OFFSET"):
                word = self.take("LIMIT/OFFSET").upper
                num = self.take("non-negative integer")
                if num.kind != "NUMBER" or not num.text.isdigit():
                    self.error(f"{word} takes a non-negative integer", num)
                if word == "LIMIT":
                    if q.limit is not None:
                        self.error("duplicate LIMIT", num)
                    q.limit = int(num.text)
                else:
                    if q.offset is not None:
                        self.error("duplicate OFFSET", num)
                    q.offset = int(num.text)

    def check_variables(self, q: Query):
        in_patterns = set(q.pattern_variables)
        aliases = {a.alias for a in q.aggregates}
        for item in q.select:
            name = item if isinstance(item, str) else item.var
            if name is not None and name not in in_patterns:
                self.error(f"variable ?{name} does not occur in any pattern")
        for f in q.filters:
            if f.var not in in_patterns:
                self.error(f"FILTER variable ?{f.var} does not occur in any pattern")
        if q.order_by and q.order_by[0] not in in_patterns | aliases:
            self.error(f"ORDER BY variable ?{q.order_by[0]} does not occur in any pattern")
        if q.group_by and q.group_by not in in_patterns:
            self.error(f"GROUP BY variable ?{q.group_by} does not occur in any pattern")
        if q.select_all and (q.group_by or q.aggregates):
            self.error("SELECT * cannot be combined with grouping")
        if q.aggregates or q.group_by:
            for item in q.select:
                if isinstance(item, str) and item != q.group_by:
                    self.error(f"?{item} must be the GROUP BY variable or an aggregate")
            if q.order_by and q.order_by[0] not in aliases and q.order_by[0] != q.group_by:
                self.error("ORDER BY in a grouped query must use the group key or an aggregate alias")
        names = q.output_variables
        if len(set(names)) != len(names):
            self.error("duplicate projected variable")


def parse_query(text: str) -> Query:
    try:
        return _QueryParser(text).parse()
    except UnsupportedFeatureError as exc:
        if exc.position is None or exc.line is not None:
            raise
        # attach line/column now that the query text is at hand
        raise UnsupportedFeatureError(exc.feature, exc.position, text) from None


# -- evaluation -------------------------------------------------------------

def compare(term: Term, op: str, value: Term) -> bool:
    """Apply a FILTER comparison; raise QueryTypeError on incomparable types."""
    if isinstance(term, Iri) or isinstance(value, Iri):
        if op not in ("=", "!="):
            raise QueryTypeError(f"cannot order-compare {term} and {value}")
        same = term == value
        return same if op == "=" else not same
    if term.is_numeric and value.is_numeric:
        a, b = term.numeric_value(), value.numeric_value()
    elif not term.is_numeric and not value.is_numeric:
        a, b = term.lexical, value.lexical
    else:
        raise QueryTypeError(f"cannot compare {term.datatype} {term.lexical!r} with {value.datatype} {value.lexical!r}")
    return {
        "=": a == b, "!=": a != b, "<": a < b,
        "<=": a <= b, ">": a > b, ">=": a >= b,
    }[op]


def order_key(term: Term | None) -> tuple:
    """ORDER BY ordering: unbound, IRIs, numbers by value, then strings."""
    if term is None:
        return (0,)
    if isinstance(term, Iri):
        return (1, term.value)
    if term.is_numeric:
        return (2, term.numeric_value(), term.lexical, term.datatype)
    return (3, term.lexical)


def row_key(row: tuple) -> tuple:
    return tuple((0,) if t is None else (1, term_key(t)) for t in row)


@dataclass
class QuerySolution:
    variables: list[str]
    rows: list[tuple[Term | None, ...]]

    def __len__(self) -> int:
        return len(self.rows)

    def bindings(self) -> list[dict[str, Term | None]]:
        return [dict(zip(self.variables, row)) for row in self.rows]

    def column(self, name: str) -> list[Term | None]:
        idx = self.variables.index(name)
        return [row[idx] for row in self.rows]

    def to_tsv(self) -> str:
        lines = ["\t".join("?" + v for v in self.variables)]
        lines += ["\t".join(_tsv_cell(t) for t in row) for row in self.rows]
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        rows = [{v: _json_cell(t) for v, t in zip(self.variables, row) if t is not None} for row in self.rows]
        return json.dumps({"variables": self.variables, "rows": rows}, indent=2, sort_keys=False)


def _tsv_cell(term: Term | None) -> str:
    if term is None:
        return ""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if term.is_numeric:
        return term.lexical
    escaped = term.lexical.replace("\\", "\\\\").replace('"', '\\"').replace("\t", "\\t").replace("\n", "\\n").replace("\r", "\\r")
    return f'"{escaped}"'


def _json_cell(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "iri", "value": term.value}
    return {"type": "literal", "value": term.lexical, "datatype": term.datatype_iri}


def _substitute(t: PatternTerm, binding: dict[str, Term]) -> PatternTerm:
    if isinstance(t, Var):
        return binding.get(t.name, t)
    return t


def _plan(patterns: list[TriplePattern], snap: Snapshot) -> list[TriplePattern]:
    """Greedy order: fewest unbound positions first, then fewest index matches."""
    remaining = list(patterns)
    bound: set[str] = set()
    plan = []
    while remaining:
        def cost(pat: TriplePattern):
            free = sum(1 for t in (pat.s, pat.p, pat.o) if isinstance(t, Var) and t.name not in bound)
            consts = [None if isinstance(t, Var) else t for t in (pat.s, pat.p, pat.o)]
            return (free, snap.count(*consts))
        best = min(remaining, key=cost)
        remaining.remove(best)
        plan.append(best)
        bound.update(best.variables())
    return plan


def _extend(binding: dict[str, Term], pat: TriplePattern, snap: Snapshot) -> Iterable[dict[str, Term]]:
    s, p, o = (_substitute(t, binding) for t in (pat.s, pat.p, pat.o))
    if isinstance(s, Literal) or isinstance(p, Literal):
        return
    lookup = [None if isinstance(t, Var) else t for t in (s, p, o)]
    for triple in snap.match(*lookup):
        new = dict(binding)
        ok = True
        for pt, value in ((s, triple.subject), (p, triple.predicate), (o, triple.object)):
            if isinstance(pt, Var):
                prev = new.get(pt.name)
                if prev is None:
                    new[pt.name] = value
                elif prev != value:
                    ok = False
                    break
        if ok:
            yield new


def solve_patterns(patterns: list[TriplePattern], snap: Snapshot) -> list[dict[str, Term]]:
    solutions: list[dict[str, Term]] = [{}]
    for pat in _plan(patterns, snap):
        solutions = [ext for b in solutions for ext in _extend(b, pat, snap)]
        if not solutions:
            break
    return solutions


def _sum(values: list[Term]) -> Literal:
    total = Decimal(0)
    all_integer = True
    with localcontext() as ctx:
        ctx.prec = 200
        for v in values:
            if not isinstance(v, Literal) or not v.is_numeric:
                raise QueryTypeError(f"SUM over non-numeric value {v}")
            total += v.numeric_value()
            all_integer &= v.datatype == INTEGER
    if all_integer:
        return Literal.integer(int(total))
    return Literal(decimal_lexical(total), DECIMAL)


def _aggregate(agg: Aggregate, rows: list[dict[str, Term]]) -> Literal:
    if agg.var is None:
        values = [None] * len(rows)
    else:
        values = [r[agg.var] for r in rows if agg.var in r]
    if agg.distinct:
        values = list({v: None for v in values})
    if agg.func == "COUNT":
        return Literal.integer(len(values))
    return _sum(values)


def _group(q: Query, solutions: list[dict[str, Term]]) -> list[dict[str, Term]]:
    if q.group_by is None:
        groups = {None: solutions}
    else:
        groups: dict = {}
        for sol in solutions:
            groups.setdefault(sol[q.group_by], []).append(sol)
    out = []
    for key, members in groups.items():
        row: dict[str, Term] = {}
        if q.group_by is not None:
            row[q.group_by] = key
        for agg in q.aggregates:
            row[agg.alias] = _aggregate(agg, members)
        out.append(row)
    return out


def _order(rows: list[tuple], variables: list[str], order_by: tuple[str, bool] | None) -> list[tuple]:
    rows = sorted(rows, key=row_key)
    if order_by is not None:
        idx = variables.index(order_by[0]) if order_by[0] in variables else None
        if idx is None:
            raise QueryError(f"ORDER BY ?{order_by[0]} must be projected")
        rows.sort(key=lambda r: order_key(r[idx]), reverse=not order_by[1])
    return rows


def evaluate(store: TripleStore | Snapshot, q: Query) -> QuerySolution:
    snap = store.snapshot() if isinstance(store, TripleStore) else store
    solutions = solve_patterns(q.patterns, snap)
    for f in q.filters:
        solutions = [s for s in solutions if compare(s[f.var], f.op, f.value)]
    if q.aggregates or q.group_by is not None:
        solutions = _group(q, solutions)
    variables = q.output_variables
    order_var = q.order_by[0] if q.order_by else None
    # an unprojected ORDER BY key still orders the rows
    extra = [order_var] if order_var and order_var not in variables else []
    rows = [tuple(s.get(v) for v in variables + extra) for s in solutions]
    if q.distinct:
        rows = list(dict.fromkeys(rows))
    rows = _order(rows, variables + extra, q.order_by)
    if extra:
        rows = [r[:-1] for r in rows]
        if q.distinct:
            rows = list(dict.fromkeys(rows))
    start = q.offset or 0
    end = start + q.limit if q.limit is not None else None
    return QuerySolution(variables, rows[start:end])


def query(store: TripleStore | Snapshot, text: str) -> QuerySolution:
    return evaluate(store, parse_query(text))
