"""Closed-world conformance checks of an instance graph against a vocabulary."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .rdf import DECIMAL, INTEGER, RDF_TYPE, STRING, Graph, Iri, Literal
from .vocabulary import (
    DataPropertyTerm,
    ObjectPropertyTerm,
    Vocabulary,
    are_disjoint,
    builtin_vocabulary,
)

KINDS = ("disjointness", "domain", "range", "datatype", "undeclared-term")

_ACCEPTED_DATATYPES = {DECIMAL: {DECIMAL, INTEGER}, STRING: {STRING}}


@dataclass(frozen=True, order=True)
class Violation:
    subject: Iri
    kind: str
    detail: str

    def to_tsv(self) -> str:
        return f"{self.kind}\t{self.subject.value}\t{self.detail}"

    def __str__(self) -> str:
        return f"[{self.kind}] <{self.subject.value}>: {self.detail}"


def _conforms(voc: Vocabulary, types: set[Iri], required: Iri) -> bool:
    return any(voc.has_class(t) and required in voc.ancestors(t) for t in types)


def validate(graph: Graph, voc: Vocabulary | None = None) -> list[Violation]:
    voc = voc or builtin_vocabulary()
    rdf_type = Iri(RDF_TYPE)
    types: dict[Iri, set[Iri]] = {}
    for t in graph.match(predicate=rdf_type):
        if isinstance(t.object, Iri):
            types.setdefault(t.subject, set()).add(t.object)

    out: set[Violation] = set()

    for subject, classes in types.items():
        declared = sorted(c for c in classes if voc.has_class(c))
        for cls in sorted(classes - set(declared)):
            out.add(Violation(subject, "undeclared-term", f"rdf:type <{cls.value}> is not a declared class"))
        for a, b in combinations(declared, 2):
            if are_disjoint(voc, a, b):
                out.add(Violation(
                    subject, "disjointness",
                    f"typed both <{a.value}> and <{b.value}>, which are disjoint",
                ))

    for t in graph:
        if t.predicate == rdf_type:
            if isinstance(t.object, Literal):
                out.add(Violation(t.subject, "range", f"rdf:type object {t.object.lexical!r} is a literal"))
            continue
        prop = voc.get_property(t.predicate)
        if prop is None:
            out.add(Violation(t.subject, "undeclared-term", f"predicate <{t.predicate.value}> is not declared"))
            continue
        subject_types = types.get(t.subject, set())
        if not _conforms(voc, subject_types, prop.domain):
            found = ", ".join(f"<{c.value}>" for c in sorted(subject_types)) or "no type"
            out.add(Violation(
                t.subject, "domain",
                f"<{prop.iri.value}> requires subject of type <{prop.domain.value}>; found {found}",
            ))
        if isinstance(prop, ObjectPropertyTerm):
            if isinstance(t.object, Literal):
                out.add(Violation(
                    t.subject, "range",
                    f"<{prop.iri.value}> requires an IRI of type <{prop.range.value}>, got literal {t.object.lexical!r}",
                ))
            elif not _conforms(voc, types.get(t.object, set()), prop.range):
                out.add(Violation(
                    t.subject, "range",
                    f"<{prop.iri.value}> object <{t.object.value}> is not typed <{prop.range.value}>",
                ))
        elif isinstance(prop, DataPropertyTerm):
            if isinstance(t.object, Iri):
                out.add(Violation(
                    t.subject, "datatype",
                    f"<{prop.iri.value}> requires a {prop.datatype} literal, got IRI <{t.object.value}>",
                ))
            elif t.object.datatype not in _ACCEPTED_DATATYPES[prop.datatype]:
                out.add(Violation(
                    t.subject, "datatype",
                    f"<{prop.iri.value}> requires a {prop.datatype} literal, got {t.object.datatype} {t.object.lexical!r}",
                ))

    return sorted(out, key=lambda v: (v.subject, KINDS.index(v.kind), v.detail))


def report_text(violations: list[Violation]) -> str:
    lines = [str(v) for v in violations]
    lines.append(f"{len(violations)} violation{'s' if len(violations) != 1 else ''}")
    return "\n".join(lines) + "\n"


def report_tsv(violations: list[Violation]) -> str:
    return "".join(["kind\tsubject\tdetail\n"] + [v.to_tsv() + "\n" for v in violations])
