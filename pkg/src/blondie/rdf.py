"""RDF data model plus N-Triples and Turtle reading/writing.

Only the blank-node-free subset is supported: every resource is an IRI and
literals carry one of three datatypes (string, decimal, integer).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from typing import Iterable, Iterator, Mapping

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"

XSD_STRING = XSD + "string"
XSD_DECIMAL = XSD + "decimal"
XSD_INTEGER = XSD + "integer"
RDF_TYPE = RDF + "type"

STRING = "string"
DECIMAL = "decimal"
INTEGER = "integer"

_DATATYPE_IRIS = {STRING: XSD_STRING, DECIMAL: XSD_DECIMAL, INTEGER: XSD_INTEGER}
_IRI_DATATYPES = {v: k for k, v in _DATATYPE_IRIS.items()}

_SCHEME = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_IRI_FORBIDDEN = re.compile(r'[\x00-\x20<>"{}|^`\\\x7f]')
_INTEGER_LEX = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_LEX = re.compile(r"^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)$")


class RDFSyntaxError(ValueError):
    """Raised by the parsers; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True, order=True)
class Iri:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not self.value:
            raise ValueError("IRI must be a non-empty string")
        if not _SCHEME.match(self.value):
            raise ValueError(f"IRI has no scheme: {self.value!r}")
        if _IRI_FORBIDDEN.search(self.value):
            raise ValueError(f"IRI contains whitespace or a forbidden character: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Literal:
    lexical: str
    datatype: str = STRING

    def __post_init__(self):
        if self.datatype not in _DATATYPE_IRIS:
            raise ValueError(f"unsupported literal datatype {self.datatype!r}")
        if self.datatype == INTEGER and not _INTEGER_LEX.match(self.lexical):
            raise ValueError(f"invalid xsd:integer lexical form {self.lexical!r}")
        if self.datatype == DECIMAL and not _DECIMAL_LEX.match(self.lexical):
            raise ValueError(f"invalid xsd:decimal lexical form {self.lexical!r}")

    @classmethod
    def decimal(cls, value: int | Decimal) -> "Literal":
        return cls(decimal_lexical(value), DECIMAL)

    @classmethod
    def integer(cls, value: int) -> "Literal":
        return cls(str(int(value)), INTEGER)

    @property
    def datatype_iri(self) -> str:
        return _DATATYPE_IRIS[self.datatype]

    @property
    def is_numeric(self) -> bool:
        return self.datatype != STRING

    def numeric_value(self) -> Decimal:
        if not self.is_numeric:
            raise TypeError(f"literal {self.lexical!r} is not numeric")
        return Decimal(self.lexical)

    def __str__(self) -> str:
        return self.lexical


Term = Iri | Literal


def decimal_lexical(value: int | Decimal) -> str:
    """Plain (exponent-free) decimal text; integral values carry no fraction."""
    if isinstance(value, int):
        return str(value)
    # format() is exact; normalize() would round to the context precision
    text = format(value, "f")
    if "." in text:
        text = text.rstrip("0").rstrip(".")
    if text in ("-0", "+0", ""):
        text = "0"
    return text


@dataclass(frozen=True)
class Triple:
    subject: Iri
    predicate: Iri
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, Iri):
            raise TypeError("triple subject must be an IRI")
        if not isinstance(self.predicate, Iri):
            raise TypeError("triple predicate must be an IRI")
        if not isinstance(self.object, (Iri, Literal)):
            raise TypeError("triple object must be an IRI or a literal")
        # triples live in sets and index keys; hash once
        object.__setattr__(self, "_hash", hash((self.subject, self.predicate, self.object)))

    def __hash__(self) -> int:
        return self._hash


def term_key(term: Term) -> tuple:
    """Total order over terms: IRIs first, then literals by datatype and text."""
    if isinstance(term, Iri):
        return (0, term.value, "")
    return (1, term.lexical, term.datatype)


class Graph:
    """An immutable set of triples."""

    __slots__ = ("_triples",)

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = frozenset(triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __hash__(self) -> int:
        return hash(self._triples)

    def __or__(self, other: "Graph") -> "Graph":
        return Graph(self._triples | other._triples)

    def __repr__(self) -> str:
        return f"Graph(<{len(self)} triples>)"

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    def union(self, *others: "Graph") -> "Graph":
        merged = set(self._triples)
        for g in others:
            merged.update(g._triples)
        return Graph(merged)

    def subjects(self) -> set[Iri]:
        return {t.subject for t in self._triples}

    def match(self, subject=None, predicate=None, obj=None) -> Iterator[Triple]:
        for t in self._triples:
            if subject is not None and t.subject != subject:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            if obj is not None and t.object != obj:
                continue
            yield t

    def objects(self, subject: Iri, predicate: Iri) -> list[Term]:
        return sorted((t.object for t in self.match(subject, predicate)), key=term_key)

    def sorted(self) -> list[Triple]:
        return sorted(self._triples, key=_triple_key)


def _triple_key(t: Triple) -> tuple:
    return (term_key(t.subject), term_key(t.predicate), term_key(t.object))


# -- serialization ----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPES:
            out.append(_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _nt_term(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.value}>"
    quoted = f'"{_escape_string(term.lexical)}"'
    if term.datatype == STRING:
        return quoted
    return f"{quoted}^^<{term.datatype_iri}>"


def serialize_ntriples(graph: Graph) -> str:
    lines = [
        f"{_nt_term(t.subject)} {_nt_term(t.predicate)} {_nt_term(t.object)} .\n"
        for t in graph.sorted()
    ]
    return "".join(lines)


_PN_LOCAL = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_PN_PREFIX = re.compile(r"^([A-Za-z][A-Za-z0-9_\-]*)?$")


class _Abbreviator:
    def __init__(self, prefixes: Mapping[str, Iri | str]):
        self.prefixes: dict[str, str] = {}
        for label, ns in prefixes.items():
            if not _PN_PREFIX.match(label):
                raise ValueError(f"invalid prefix label {label!r}")
            self.prefixes[label] = str(Iri(str(ns)))
        # longest namespace wins when several match
        self._ordered = sorted(self.prefixes.items(), key=lambda kv: (-len(kv[1]), kv[0]))

    def iri(self, value: str) -> str:
        for label, ns in self._ordered:
            if value.startswith(ns):
                local = value[len(ns):]
                if _PN_LOCAL.match(local):
                    return f"{label}:{local}"
        return f"<{value}>"

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term.value)
        quoted = f'"{_escape_string(term.lexical)}"'
        if term.datatype == STRING:
            return quoted
        return f"{quoted}^^{self.iri(term.datatype_iri)}"


def serialize_turtle(graph: Graph, prefixes: Mapping[str, Iri | str] | None = None) -> str:
    abbrev = _Abbreviator(prefixes or {})
    out = [f"@prefix {label}: <{ns}> .\n" for label, ns in sorted(abbrev.prefixes.items())]
    if out:
        out.append("\n")

    by_subject: dict[Iri, dict[Iri, list[Term]]] = {}
    for t in graph.sorted():
        by_subject.setdefault(t.subject, {}).setdefault(t.predicate, []).append(t.object)

    for subject, preds in by_subject.items():
        # rdf:type first, written as "a"
        ordered = sorted(preds, key=lambda p: (p.value != RDF_TYPE, p.value))
        chunks = []
        for pred in ordered:
            verb = "a" if pred.value == RDF_TYPE else abbrev.iri(pred.value)
            objs = ", ".join(abbrev.term(o) for o in preds[pred])
            chunks.append(f"{verb} {objs}")
        out.append(abbrev.iri(subject.value) + " " + " ;\n    ".join(chunks) + " .\n\n")
    text = "".join(out)
    return text.rstrip("\n") + "\n" if text else ""


# -- parsing ----------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("COMMENT", r"#[^\n]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*(?:\\[uU][0-9A-Fa-f]+[^<>\"{}|^`\\\x00-\x20]*)*>"),
    ("LONG_STRING", r'"""(?:[^"\\]|\\.|"(?!""))*"""|\'\'\'(?:[^\'\\]|\\.|\'(?!\'\'))*\'\'\''),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"|\'(?:[^\'\\\n\r]|\\.)*\''),
    ("DATATYPE", r"\^\^"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DOUBLE", r"[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.?[0-9]+[eE][+-]?[0-9]+)"),
    ("DECIMAL", r"[+-]?[0-9]*\.[0-9]+"),
    ("INTEGER", r"[+-]?[0-9]+"),
    ("BNODE", r"_:[^\s]*|\[|\]"),
    ("COLLECTION", r"[()]"),
    ("PNAME", r"(?:[A-Za-z][A-Za-z0-9_\-]*)?:(?:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?)?"),
    ("KEYWORD", r"[A-Za-z]+"),
    ("PUNCT", r"[.;,]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))

_STRING_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise RDFSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        tok_text = m.group()
        if kind not in ("WS", "COMMENT"):
            tokens.append(_Token(kind, tok_text, line, pos - line_start + 1))
        newlines = tok_text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + tok_text.rindex("\n") + 1
        pos = m.end()
    return tokens


def _unescape(body: str, tok: _Token, allow_char_escapes: bool = True) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1] if i + 1 < len(body) else ""
        if nxt in ("u", "U"):
            width = 4 if nxt == "u" else 8
            digits = body[i + 2:i + 2 + width]
            if len(digits) != width or not re.fullmatch(r"[0-9A-Fa-f]+", digits):
                raise RDFSyntaxError("bad unicode escape", tok.line, tok.column)
            out.append(chr(int(digits, 16)))
            i += 2 + width
        elif allow_char_escapes and nxt in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[nxt])
            i += 2
        else:
            raise RDFSyntaxError(f"bad escape sequence \\{nxt}", tok.line, tok.column)
    return "".join(out)


class _Parser:
    def __init__(self, text: str, turtle: bool):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.turtle = turtle
        self.prefixes: dict[str, str] = {}
        self.triples: set[Triple] = set()

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self, what: str) -> _Token:
        tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise RDFSyntaxError(f"unexpected end of input, expected {what}", last.line, last.column + len(last.text))
        self.pos += 1
        return tok

    def fail(self, tok: _Token, message: str):
        raise RDFSyntaxError(message, tok.line, tok.column)

    def expect_punct(self, ch: str, after: _Token) -> _Token:
        tok = self.peek()
        if tok is None:
            raise RDFSyntaxError(f"expected '{ch}'", after.line, after.column + len(after.text))
        if tok.kind != "PUNCT" or tok.text != ch:
            self.fail(tok, f"expected '{ch}', found {tok.text!r}")
        self.pos += 1
        return tok

    def _unsupported(self, tok: _Token):
        if tok.kind == "BNODE":
            self.fail(tok, "blank nodes are not supported")
        if tok.kind == "COLLECTION":
            self.fail(tok, "collections are not supported")
        if tok.kind == "LANGTAG":
            self.fail(tok, "language tags are not supported")
        if tok.kind == "DOUBLE":
            self.fail(tok, "xsd:double literals are not supported")

    def iri(self, tok: _Token) -> Iri:
        if tok.kind == "IRIREF":
            value = _unescape(tok.text[1:-1], tok, allow_char_escapes=False)
        elif tok.kind == "PNAME" and self.turtle:
            label, _, local = tok.text.partition(":")
            if label not in self.prefixes:
                self.fail(tok, f"undeclared prefix {label!r}")
            value = self.prefixes[label] + local
        else:
            self._unsupported(tok)
            self.fail(tok, f"expected an IRI, found {tok.text!r}")
        try:
            return Iri(value)
        except ValueError as exc:
            self.fail(tok, str(exc))

    def literal(self, tok: _Token) -> Literal:
        if tok.kind in ("STRING", "LONG_STRING"):
            if tok.kind == "LONG_STRING" or tok.text.startswith("'"):
                if not self.turtle:
                    self.fail(tok, "only double-quoted strings are allowed in N-Triples")
            quote = 3 if tok.kind == "LONG_STRING" else 1
            lexical = _unescape(tok.text[quote:-quote], tok)
            datatype = STRING
            nxt = self.peek()
            if nxt is not None and nxt.kind == "LANGTAG":
                self._unsupported(nxt)
            if nxt is not None and nxt.kind == "DATATYPE":
                self.pos += 1
                dt_tok = self.next("datatype IRI")
                dt_iri = self.iri(dt_tok).value
                if dt_iri not in _IRI_DATATYPES:
                    self.fail(dt_tok, f"unsupported datatype <{dt_iri}>")
                datatype = _IRI_DATATYPES[dt_iri]
            try:
                return Literal(lexical, datatype)
            except ValueError as exc:
                self.fail(tok, str(exc))
        if self.turtle and tok.kind == "INTEGER":
            return Literal(tok.text, INTEGER)
        if self.turtle and tok.kind == "DECIMAL":
            return Literal(tok.text, DECIMAL)
        self._unsupported(tok)
        self.fail(tok, f"expected a literal, found {tok.text!r}")

    def object_term(self) -> Term:
        tok = self.next("object")
        if tok.kind == "IRIREF" or (tok.kind == "PNAME" and self.turtle):
            return self.iri(tok)
        return self.literal(tok)

    def parse(self) -> Graph:
        while self.peek() is not None:
            if self.turtle:
                self.turtle_statement()
            else:
                self.ntriples_statement()
        return Graph(self.triples)

    def ntriples_statement(self):
        s_tok = self.next("subject")
        subject = self.iri(s_tok)
        p_tok = self.next("predicate")
        predicate = self.iri(p_tok)
        obj = self.object_term()
        last = self.tokens[self.pos - 1]
        dot = self.peek()
        if dot is None or dot.text != "." or dot.line != s_tok.line:
            raise RDFSyntaxError("triple is not terminated by '.'", s_tok.line, last.column + len(last.text))
        self.pos += 1
        self.triples.add(Triple(subject, predicate, obj))

    def turtle_statement(self):
        tok = self.peek()
        if tok.kind == "KEYWORD" and tok.text.upper() in ("PREFIX", "BASE") or tok.text in ("@prefix", "@base"):
            self.directive()
            return
        if tok.kind == "LANGTAG" and tok.text in ("@prefix", "@base"):
            self.directive()
            return
        subject = self.iri(self.next("subject"))
        self.predicate_object_list(subject)
        self.expect_punct(".", self.tokens[self.pos - 1])

    def directive(self):
        tok = self.next("directive")
        sparql_style = tok.kind == "KEYWORD"
        name = tok.text.lstrip("@").lower()
        if name == "base":
            self.fail(tok, "base IRIs are not supported; use absolute IRIs")
        label_tok = self.next("prefix label")
        if label_tok.kind != "PNAME" or not label_tok.text.endswith(":"):
            self.fail(label_tok, "expected a prefix label ending in ':'")
        ns_tok = self.next("namespace IRI")
        if ns_tok.kind != "IRIREF":
            self.fail(ns_tok, "expected a namespace IRI")
        self.prefixes[label_tok.text[:-1]] = self.iri(ns_tok).value
        if not sparql_style:
            self.expect_punct(".", ns_tok)

    def predicate_object_list(self, subject: Iri):
        while True:
            verb_tok = self.next("predicate")
            if verb_tok.kind == "KEYWORD" and verb_tok.text == "a":
                predicate = Iri(RDF_TYPE)
            else:
                predicate = self.iri(verb_tok)
            while True:
                self.triples.add(Triple(subject, predicate, self.object_term()))
                tok = self.peek()
                if tok is not None and tok.text == ",":
                    self.pos += 1
                    continue
                break
            tok = self.peek()
            if tok is not None and tok.text == ";":
                while tok is not None and tok.text == ";":
                    self.pos += 1
                    tok = self.peek()
                if tok is None or tok.text == ".":
                    return
                continue
            return


def parse_ntriples(text: str) -> Graph:
    return _Parser(text, turtle=False).parse()


def parse_turtle(text: str) -> Graph:
    return _Parser(text, turtle=True).parse()
