"""``blondie`` command line: ingest, query, validate, vocab, fetch.

Exit codes: 0 success, 1 validation violations, 2 decode/ingest error,
3 query error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import source
from .mapper import map_records
from .queries import COMPETENCY_QUERIES
from .rdf import XSD, Graph, RDFSyntaxError, parse_ntriples, parse_turtle, serialize_ntriples, serialize_turtle
from .sparql import QueryError, evaluate, parse_query
from .store import TripleStore
from .validator import report_text, report_tsv, validate
from .vocabulary import BLONDIE, builtin_vocabulary, export_ontology

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_DECODE = 2
EXIT_QUERY = 3

INSTANCE_PREFIXES = {"blondie": BLONDIE, "xsd": XSD}


def _err(message: str):
    print(f"blondie: {message}", file=sys.stderr)


def read_graph(path: str | Path) -> Graph:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".nt":
        return parse_ntriples(text)
    return parse_turtle(text)


def read_graphs(paths: list[str]) -> Graph:
    return Graph().union(*(read_graph(p) for p in paths))


def cmd_ingest(args) -> int:
    if args.chain == "bitcoin" and args.height is None and not args.mempool:
        _err("--height is required for bitcoin blocks")
        return EXIT_DECODE
    try:
        loaded = []
        for path in args.input:
            # each further bitcoin file continues the height sequence
            height = None if args.height is None else args.height + len(loaded)
            loaded += source.load_fixture(path, args.chain, height=height, mempool=args.mempool)
    except OSError as exc:
        _err(f"cannot read input: {exc}")
        return EXIT_DECODE
    except source.FixtureDecodeError as exc:
        _err(f"decode error: {exc}")
        return EXIT_DECODE

    graph, report = map_records(s.record for s in loaded)
    if args.format == "ntriples":
        text = serialize_ntriples(graph)
    else:
        text = serialize_turtle(graph, INSTANCE_PREFIXES)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"records: {len(loaded)}")
    print(report.summary())
    return EXIT_OK


def cmd_query(args) -> int:
    try:
        graph = read_graphs(args.graph)
    except (OSError, RDFSyntaxError) as exc:
        _err(f"cannot load graph: {exc}")
        return EXIT_QUERY
    try:
        if args.cq:
            text = COMPETENCY_QUERIES[args.cq.upper()]
        else:
            text = Path(args.sparql).read_text(encoding="utf-8")
        solution = evaluate(TripleStore(graph), parse_query(text))
    except OSError as exc:
        _err(f"cannot read query: {exc}")
        return EXIT_QUERY
    except QueryError as exc:
        _err(f"query error: {exc}")
        return EXIT_QUERY
    sys.stdout.write(solution.to_json() + "\n" if args.json else solution.to_tsv())
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        graph = read_graphs(args.graph)
    except (OSError, RDFSyntaxError) as exc:
        _err(f"cannot load graph: {exc}")
        return EXIT_DECODE
    violations = validate(graph, builtin_vocabulary())
    sys.stdout.write(report_tsv(violations) if args.tsv else report_text(violations))
    return EXIT_VIOLATIONS if violations else EXIT_OK


def cmd_vocab(args) -> int:
    voc = builtin_vocabulary()
    if args.export:
        Path(args.export).write_text(export_ontology(voc), encoding="utf-8")
        print(f"wrote {args.export}")
    if args.stats or not args.export:
        s = voc.stats()
        print(f"classes: {s['classes']}, object-properties: {s['object-properties']}, "
              f"data-properties: {s['data-properties']}")
    return EXIT_OK


def cmd_fetch(args) -> int:
    templates = source.load_templates(args.templates) if args.templates else None
    try:
        body = source.fetch_block(
            args.endpoint, args.chain, args.ref,
            templates=templates, replay_dir=args.replay_dir, record_dir=args.record_dir,
        )
    except source.FetchError as exc:
        _err(str(exc))
        return EXIT_DECODE
    Path(args.out).write_bytes(body)
    print(f"wrote {len(body)} bytes to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blondie", description="Blockchain records as BLONDiE RDF graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="decode chain data and write an RDF graph")
    p.add_argument("--chain", required=True, choices=source.CHAINS)
    p.add_argument("--input", required=True, action="append", help="input file (repeatable)")
    p.add_argument("--height", type=int, help="height of the (first) bitcoin block")
    p.add_argument("--mempool", action="store_true", help="bitcoin input holds unconfirmed transactions")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("turtle", "ntriples"), default="turtle")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("query", help="run a SPARQL query over one or more graphs")
    p.add_argument("--graph", required=True, action="append", help="Turtle or .nt file (repeatable)")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sparql", help="query file (.rq)")
    group.add_argument("--cq", choices=sorted(COMPETENCY_QUERIES), type=str.upper)
    p.add_argument("--json", action="store_true", help="JSON rows instead of TSV")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("validate", help="check a graph against the vocabulary")
    p.add_argument("--graph", required=True, action="append")
    p.add_argument("--tsv", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("vocab", help="vocabulary statistics and ontology export")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--export", metavar="PATH")
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("fetch", help="download a raw block from an explorer API")
    p.add_argument("--endpoint", required=True)
    p.add_argument("--chain", required=True, choices=source.CHAINS)
    p.add_argument("--ref", required=True, help="block height or hash")
    p.add_argument("--out", required=True)
    p.add_argument("--templates", help="JSON file of chain -> path template")
    p.add_argument("--replay-dir", help=f"serve recorded responses (default ${source.REPLAY_ENV})")
    p.add_argument("--record-dir", help="save live responses here")
    p.set_defaults(func=cmd_fetch)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
