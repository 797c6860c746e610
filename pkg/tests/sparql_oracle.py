"""Random query cases and a naive nested-loop reference evaluator.

The reference works from its own case description rather than the parsed
query, scans the full triple list for every pattern in written order, and
uses Fraction arithmetic, so it shares no code paths with the engine.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from blondie.rdf import DECIMAL, INTEGER, RDF_TYPE, STRING, Iri, Literal, Triple

NS = "urn:t:"
SUBJECTS = [Iri(f"{NS}s{i}") for i in range(10)]
CLASSES = [Iri(f"{NS}C{i}") for i in range(3)]
IRI_PREDS = [Iri(NS + "p0"), Iri(NS + "p1")]
NUM_PREDS = [Iri(NS + "n0"), Iri(NS + "n1")]
STR_PREDS = [Iri(NS + "str")]
TYPE = Iri(RDF_TYPE)
ALL_PREDS = IRI_PREDS + NUM_PREDS + STR_PREDS + [TYPE]
WORDS = ["alpha", "beta", "gamma", "delta", "Beta", "a b"]


class RefTypeError(Exception):
    pass


def random_number(rng: random.Random) -> Literal:
    whole = rng.randint(-20, 60)
    if rng.random() < 0.5:
        return Literal(str(whole), INTEGER)
    frac = rng.choice(["", "0", "5", "50", "25"])
    return Literal(f"{whole}.{frac}" if frac else str(whole), DECIMAL)


def random_object(rng: random.Random, pred: Iri):
    if pred in IRI_PREDS:
        return rng.choice(SUBJECTS)
    if pred in NUM_PREDS:
        return random_number(rng)
    if pred == TYPE:
        return rng.choice(CLASSES)
    return Literal(rng.choice(WORDS))


def random_triples(rng: random.Random, max_size: int = 500) -> list[Triple]:
    out = set()
    for _ in range(rng.randint(max_size // 2, max_size)):
        p = rng.choice(ALL_PREDS)
        out.add(Triple(rng.choice(SUBJECTS), p, random_object(rng, p)))
    return sorted(out, key=lambda t: (t.subject.value, t.predicate.value, repr(t.object)))


# -- cases ------------------------------------------------------------------

@dataclass
class Case:
    patterns: list[tuple]  # each item is a str variable name or a term
    filters: list[tuple] = field(default_factory=list)  # (var, op, term)
    select: list[str] | None = None  # None means SELECT *
    aggregate: tuple | None = None  # (func, var or None, alias, distinct)
    group_by: str | None = None
    distinct: bool = False
    order_by: tuple[str, bool] | None = None
    limit: int | None = None
    offset: int | None = None

    def pattern_vars(self) -> list[str]:
        seen = {}
        for pat in self.patterns:
            for t in pat:
                if isinstance(t, str):
                    seen.setdefault(t, None)
        return list(seen)

    def output_vars(self) -> list[str]:
        if self.aggregate:
            return ([self.group_by] if self.group_by else []) + [self.aggregate[2]]
        return self.select if self.select is not None else self.pattern_vars()


def _term_text(t) -> str:
    if isinstance(t, str):
        return "?" + t
    if isinstance(t, Iri):
        return f"<{t.value}>"
    if t.datatype == STRING:
        return '"' + t.lexical.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if t.datatype == DECIMAL and "." not in t.lexical:
        # bare digits would read back as an integer
        return f'"{t.lexical}"^^<http://www.w3.org/2001/XMLSchema#decimal>'
    return t.lexical


def render(case: Case) -> str:
    parts = ["SELECT"]
    if case.distinct:
        parts.append("DISTINCT")
    if case.aggregate:
        func, var, alias, distinct = case.aggregate
        if case.group_by:
            parts.append("?" + case.group_by)
        arg = ("DISTINCT " if distinct else "") + ("*" if var is None else "?" + var)
        parts.append(f"({func}({arg}) AS ?{alias})")
    elif case.select is None:
        parts.append("*")
    else:
        parts += ["?" + v for v in case.select]
    body = [" ".join(_term_text(t) for t in pat) + " ." for pat in case.patterns]
    if case.filters:
        body.append("FILTER(" + " && ".join(f"?{v} {op} {_term_text(c)}" for v, op, c in case.filters) + ")")
    text = " ".join(parts) + " WHERE {\n  " + "\n  ".join(body) + "\n}"
    if case.group_by:
        text += f"\nGROUP BY ?{case.group_by}"
    if case.order_by:
        var, asc = case.order_by
        text += f"\nORDER BY {'ASC' if asc else 'DESC'}(?{var})"
    if case.limit is not None:
        text += f"\nLIMIT {case.limit}"
    if case.offset is not None:
        text += f"\nOFFSET {case.offset}"
    return text


VARS = ["a", "b", "c", "d"]


def random_case(rng: random.Random, triples: list[Triple] = ()) -> Case:
    """A query over the subset grammar; constants are drawn from ``triples``
    when given, so that most cases have non-empty answers."""
    by_pred: dict = {}
    for t in triples:
        by_pred.setdefault(t.predicate, []).append(t)

    def data_object(pred):
        if pred in by_pred and rng.random() < 0.8:
            return rng.choice(by_pred[pred]).object
        return random_object(rng, pred)

    values_of: dict[str, list] = {}
    patterns = []
    kinds: dict[str, str] = {}  # variable -> expected value kind
    for i in range(rng.randint(1, 3)):
        # later patterns usually join on a subject-position variable already in use
        iri_vars = [v for v, k in kinds.items() if k == "iri" and v not in ("p", "q")]
        if iri_vars and rng.random() < 0.7:
            s = rng.choice(iri_vars)
        else:
            s = rng.choice(VARS[:3]) if rng.random() < 0.85 else None
        if isinstance(s, str):
            kinds.setdefault(s, "iri")
            values_of.setdefault(s, SUBJECTS)
        if rng.random() < 0.1:
            p = rng.choice(["p", "q"])
            kinds.setdefault(p, "iri")
        else:
            p = rng.choice(ALL_PREDS)
        if s is None:
            # constant subject that has at least this predicate when possible
            pool = by_pred.get(p) if isinstance(p, Iri) else None
            s = rng.choice(pool).subject if pool and rng.random() < 0.8 else rng.choice(SUBJECTS)
        if rng.random() < 0.8:
            fresh = [v for v in VARS if v not in kinds]
            o = rng.choice(fresh) if fresh and rng.random() < 0.7 else rng.choice(VARS)
            if isinstance(p, Iri):
                kinds.setdefault(o, "num" if p in NUM_PREDS else "str" if p in STR_PREDS else "iri")
                if p in by_pred:
                    values_of.setdefault(o, [t.object for t in by_pred[p]])
            else:
                kinds.setdefault(o, "any")
        else:
            o = data_object(p if isinstance(p, Iri) else rng.choice(ALL_PREDS))
        patterns.append((s, p, o))
    case = Case(patterns)
    pvars = case.pattern_vars()
    if not pvars:
        # ground pattern list: project nothing useful, use COUNT(*)
        case.aggregate = ("COUNT", None, "n", False)
        return case

    for _ in range(rng.choice([0, 0, 1, 2])):
        v = rng.choice(pvars)
        kind = kinds.get(v, "any")
        if rng.random() < 0.05:
            kind = rng.choice(["iri", "num", "str"])  # deliberately mistyped
        pool = [x for x in values_of.get(v, []) if rng.random() < 0.5] or None
        if kind == "num":
            const = rng.choice(pool) if pool and _is_num(pool[0]) else random_number(rng)
            case.filters.append((v, rng.choice(["<", "<=", ">", ">=", "<", ">", "=", "!="]), const))
        elif kind == "str":
            case.filters.append((v, rng.choice(["<", ">", "=", "!="]), Literal(rng.choice(WORDS))))
        else:
            const = rng.choice(pool) if pool and isinstance(pool[0], Iri) else rng.choice(SUBJECTS + CLASSES)
            case.filters.append((v, rng.choice(["=", "!=", "!="]), const))

    r = rng.random()
    if r < 0.3:
        func = rng.choice(["COUNT", "COUNT", "SUM"])
        if func == "SUM":
            num_vars = [v for v in pvars if kinds.get(v) == "num"]
            target = rng.choice(num_vars) if num_vars and rng.random() < 0.9 else rng.choice(pvars)
        else:
            target = None if rng.random() < 0.3 else rng.choice(pvars)
        distinct = target is not None and rng.random() < 0.3
        case.aggregate = (func, target, "agg", distinct)
        if rng.random() < 0.6:
            case.group_by = rng.choice(pvars)
        keys = ["agg"] + ([case.group_by] if case.group_by else [])
    else:
        if rng.random() < 0.2:
            case.select = None
            keys = pvars
        else:
            case.select = rng.sample(pvars, rng.randint(1, len(pvars)))
            keys = case.select
        case.distinct = rng.random() < 0.3
    if rng.random() < 0.6:
        case.order_by = (rng.choice(keys), rng.random() < 0.6)
    if rng.random() < 0.35:
        case.limit = 0 if rng.random() < 0.05 else rng.randint(1, 12)
    if rng.random() < 0.2:
        case.offset = rng.randint(0, 5)
    return case


# -- reference evaluator ----------------------------------------------------

def _num(lit: Literal) -> Fraction:
    return Fraction(lit.lexical)


def _is_num(t) -> bool:
    return isinstance(t, Literal) and t.datatype in (INTEGER, DECIMAL)


def ref_compare(left, op, right) -> bool:
    if isinstance(left, Iri) or isinstance(right, Iri):
        if op == "=":
            return left == right
        if op == "!=":
            return left != right
        raise RefTypeError(op)
    if _is_num(left) and _is_num(right):
        a, b = _num(left), _num(right)
    elif not _is_num(left) and not _is_num(right):
        a, b = left.lexical, right.lexical
    else:
        raise RefTypeError(op)
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b


def default_key(row):
    key = []
    for t in row:
        if t is None:
            key.append((0,))
        elif isinstance(t, Iri):
            key.append((1, 0, t.value, ""))
        else:
            key.append((1, 1, t.lexical, t.datatype))
    return key


def sort_key(t):
    if t is None:
        return (0,)
    if isinstance(t, Iri):
        return (1, t.value)
    if _is_num(t):
        return (2, _num(t), t.lexical, t.datatype)
    return (3, t.lexical)


def fraction_lexical(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    k, den = 0, x.denominator
    while 10**k % den:
        k += 1
    scaled = abs(x.numerator) * (10**k // den)
    digits = str(scaled).rjust(k + 1, "0")
    whole, frac = digits[:-k], digits[-k:].rstrip("0")
    return ("-" if x < 0 else "") + whole + "." + frac


def ref_evaluate(triples: list[Triple], case: Case):
    solutions = [{}]
    for pat in case.patterns:
        nxt = []
        for sol in solutions:
            for t in triples:
                new = dict(sol)
                ok = True
                for pt, val in zip(pat, (t.subject, t.predicate, t.object)):
                    if isinstance(pt, str):
                        if pt in new and new[pt] != val:
                            ok = False
                            break
                        new[pt] = val
                    elif pt != val:
                        ok = False
                        break
                if ok:
                    nxt.append(new)
        solutions = nxt

    kept = []
    for sol in solutions:
        if all(ref_compare(sol[v], op, c) for v, op, c in case.filters):
            kept.append(sol)
    solutions = kept

    if case.aggregate:
        func, var, alias, distinct = case.aggregate
        groups: dict = {}
        if case.group_by is None:
            groups[None] = solutions
        else:
            for sol in solutions:
                groups.setdefault(sol[case.group_by], []).append(sol)
        rows = []
        for key, members in groups.items():
            values = [None if var is None else m[var] for m in members]
            if distinct:
                values = list(dict.fromkeys(values))
            if func == "COUNT":
                result = Literal(str(len(values)), INTEGER)
            else:
                if not all(_is_num(v) for v in values):
                    raise RefTypeError("SUM")
                total = sum((_num(v) for v in values), Fraction(0))
                if all(v.datatype == INTEGER for v in values):
                    result = Literal(str(total.numerator), INTEGER)
                else:
                    result = Literal(fraction_lexical(total), DECIMAL)
            rows.append(((key,) if case.group_by else ()) + (result,))
    else:
        names = case.output_vars()
        rows = [tuple(sol.get(v) for v in names) for sol in solutions]
        if case.distinct:
            rows = list(dict.fromkeys(rows))

    names = case.output_vars()
    rows.sort(key=default_key)
    if case.order_by:
        idx = names.index(case.order_by[0])
        rows.sort(key=lambda r: sort_key(r[idx]), reverse=not case.order_by[1])
    start = case.offset or 0
    end = None if case.limit is None else start + case.limit
    return names, rows[start:end]
