"""In-memory triple store with subject-, predicate- and object-first indexes.

Inserts are copy-on-write: a batch builds fresh index containers along the
touched paths, then swaps them in atomically. Readers that grabbed a
snapshot earlier keep a consistent view.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

from .rdf import Graph, Iri, Term, Triple

_Index = dict  # first -> second -> set(third)


@dataclass(frozen=True)
class Snapshot:
    spo: _Index
    pos: _Index
    osp: _Index
    size: int

    def match(self, s: Iri | None = None, p: Iri | None = None, o: Term | None = None) -> Iterator[Triple]:
        if s is not None:
            by_p = self.spo.get(s)
            if not by_p:
                return
            if p is not None:
                objs = by_p.get(p, ())
                if o is not None:
                    if o in objs:
                        yield Triple(s, p, o)
                    return
                for obj in objs:
                    yield Triple(s, p, obj)
                return
            if o is not None:
                for pred in self.osp.get(o, {}).get(s, ()):
                    yield Triple(s, pred, o)
                return
            for pred, objs in by_p.items():
                for obj in objs:
                    yield Triple(s, pred, obj)
            return
        if p is not None:
            by_o = self.pos.get(p)
            if not by_o:
                return
            if o is not None:
                for subj in by_o.get(o, ()):
                    yield Triple(subj, p, o)
                return
            for obj, subjs in by_o.items():
                for subj in subjs:
                    yield Triple(subj, p, obj)
            return
        if o is not None:
            for subj, preds in self.osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
            return
        for subj, by_p in self.spo.items():
            for pred, objs in by_p.items():
                for obj in objs:
                    yield Triple(subj, pred, obj)

    def count(self, s: Iri | None = None, p: Iri | None = None, o: Term | None = None) -> int:
        """Exact match count, computed from index sizes where possible."""
        if s is not None and p is not None:
            objs = self.spo.get(s, {}).get(p, ())
            return (1 if o in objs else 0) if o is not None else len(objs)
        if p is not None and o is not None:
            return len(self.pos.get(p, {}).get(o, ()))
        if s is not None and o is not None:
            return len(self.osp.get(o, {}).get(s, ()))
        if s is not None:
            return sum(len(v) for v in self.spo.get(s, {}).values())
        if p is not None:
            return sum(len(v) for v in self.pos.get(p, {}).values())
        if o is not None:
            return sum(len(v) for v in self.osp.get(o, {}).values())
        return self.size


class TripleStore:
    def __init__(self, triples: Iterable[Triple] = ()):
        self._lock = threading.Lock()
        self._snapshot = Snapshot({}, {}, {}, 0)
        self.insert(triples)

    @classmethod
    def from_graph(cls, graph: Graph) -> "TripleStore":
        return cls(graph)

    def snapshot(self) -> Snapshot:
        return self._snapshot

    def __len__(self) -> int:
        return self._snapshot.size

    def size(self) -> int:
        return self._snapshot.size

    def __contains__(self, triple: Triple) -> bool:
        return self._snapshot.count(triple.subject, triple.predicate, triple.object) == 1

    def __iter__(self) -> Iterator[Triple]:
        return self._snapshot.match()

    def match(self, s=None, p=None, o=None) -> Iterator[Triple]:
        return self._snapshot.match(s, p, o)

    def count(self, s=None, p=None, o=None) -> int:
        return self._snapshot.count(s, p, o)

    def insert(self, triples: Iterable[Triple]) -> "TripleStore":
        with self._lock:
            old = self._snapshot
            spo, pos, osp = dict(old.spo), dict(old.pos), dict(old.osp)
            copied: set[tuple[int, object]] = set()
            copied_sets: set[tuple[int, object, object]] = set()
            size = old.size

            def leaf(index: dict, tag: int, a, b) -> set:
                if (tag, a) not in copied:
                    index[a] = dict(index.get(a, {}))
                    copied.add((tag, a))
                inner = index[a]
                if (tag, a, b) not in copied_sets:
                    inner[b] = set(inner.get(b, ()))
                    copied_sets.add((tag, a, b))
                return inner[b]

            for t in triples:
                if not isinstance(t, Triple):
                    raise TypeError(f"expected Triple, got {type(t).__name__}")
                objs = spo.get(t.subject, {}).get(t.predicate, ())
                if t.object in objs:
                    continue
                leaf(spo, 0, t.subject, t.predicate).add(t.object)
                leaf(pos, 1, t.predicate, t.object).add(t.subject)
                leaf(osp, 2, t.object, t.subject).add(t.predicate)
                size += 1
            self._snapshot = Snapshot(spo, pos, osp, size)
        return self

    def to_graph(self) -> Graph:
        return Graph(self._snapshot.match())
