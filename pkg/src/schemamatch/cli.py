"""Command-line driver.

Mirrors the three-step workflow: summarize, match with interactive
refinement, and post-match analysis. Every subcommand is usable in batch
without the HTTP service or UI. Exit codes: 0 success, 1 user error
(one-line diagnostic on stderr), 2 internal fault.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import analysis, export, filters
from .engine import MatchConfig, load_config
from .errors import SchemaMatchError
from .ingest import ParseReport, parse_ddl, parse_xsd, read_canonical, write_canonical
from .model import Schema
from .session import Session, load_session, save_session, suggest_concepts


def _sanitize_id(stem: str) -> str:
    cleaned = "".join(c if (c.isalnum() or c in "_-") else "_" for c in stem)
    return cleaned or "schema"


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.exists():
        raise SchemaMatchError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _load_schema_file(path: str) -> tuple[Schema, str]:
    text = _read_text(path)
    return read_canonical(text), text


def _store_path(schema_path: str, session_path: str) -> str:
    schema_abs = Path(schema_path).resolve()
    session_dir = Path(session_path).resolve().parent
    try:
        return os.path.relpath(schema_abs, session_dir)
    except ValueError:  # different drive; keep absolute
        return str(schema_abs)


def cmd_ingest(args) -> int:
    text = _read_text(args.file)
    schema_id = args.id or _sanitize_id(Path(args.file).stem)
    name = args.name or schema_id
    report = ParseReport()
    if args.format == "ddl":
        schema = parse_ddl(text, schema_id, name)
    elif args.format == "xsd":
        schema = parse_xsd(text, schema_id, name, report=report)
    else:
        schema = read_canonical(text)
    out_text = write_canonical(schema)
    Path(args.out).write_text(out_text, encoding="utf-8")
    if len(report):
        if args.report:
            Path(args.report).write_text(report.text(), encoding="utf-8")
        else:
            sys.stderr.write(report.text())
    print(f"wrote {args.out} ({schema.element_count} elements)")
    return 0


def cmd_match(args) -> int:
    config = load_config(args.config) if args.config else MatchConfig()
    left, left_text = _load_schema_file(args.left)
    right, right_text = _load_schema_file(args.right)
    if left.id == right.id:
        raise SchemaMatchError(
            f"left and right schemata share the id {left.id!r}; re-ingest with --id"
        )
    session = Session(args.id or f"{left.id}__{right.id}", config)
    session.register_schema(left, _store_path(args.left, args.out), canonical_text=left_text)
    session.register_schema(right, _store_path(args.right, args.out), canonical_text=right_text)
    session.add_matrix(left.id, right.id)
    started = time.perf_counter()
    matrix = session.matrix(left.id, right.id)
    elapsed = time.perf_counter() - started
    save_session(session, args.out)
    print(
        f"matched {left.element_count} x {right.element_count} = "
        f"{matrix.pair_count} pairs in {elapsed:.2f} s"
    )
    print(f"wrote {args.out}")
    return 0


def _load_session_arg(path: str) -> Session:
    if not Path(path).exists():
        raise SchemaMatchError(f"no such session file: {path}")
    return load_session(path)


def cmd_summarize(args) -> int:
    session = _load_session_arg(args.session)
    schema = session.schema(args.schema)
    if args.suggest:
        for s in suggest_concepts(schema):
            print(f"{s.root_id}\t{s.name}\t{s.size}")
        return 0
    if not args.assign:
        raise SchemaMatchError("summarize needs --suggest or at least one --assign")
    for spec in args.assign:
        if "=" not in spec:
            raise SchemaMatchError(f"bad --assign {spec!r}; expected NAME=id1,id2,...")
        concept_name, _, id_list = spec.partition("=")
        element_ids = [e.strip() for e in id_list.split(",") if e.strip()]
        label = session.assign_concept(args.schema, concept_name.strip(), element_ids)
        print(f"concept {label.id} {label.name!r}: {len(label.member_element_ids)} elements")
    save_session(session, args.session)
    summary = session.summary(args.schema)
    print(
        f"summary {args.schema}: {len(summary.concepts)} concepts, "
        f"{len(summary.unassigned_element_ids)} unassigned"
    )
    return 0


def cmd_review(args) -> int:
    session = _load_session_arg(args.session)
    concept = session.concept(args.concept)
    left_sid, right_sid = session.primary_pair()
    opposing = right_sid if concept.schema_id == left_sid else left_sid
    considered = len(concept.member_element_ids) * session.schema(opposing).element_count
    links = session.incremental_match(args.concept, args.min_score)
    print(f"considered {considered} pairs, {len(links)} above threshold")
    for link in links:
        print(f"{link.left_id}\t{link.right_id}\t{link.score:.6f}")
    return 0


def _split_pair(session: Session, text: str) -> tuple[str, str]:
    candidates = []
    for i, ch in enumerate(text):
        if ch != ":":
            continue
        lid, rid = text[:i], text[i + 1 :]
        if not lid or not rid:
            continue
        left_ok = any(lid in session.schema(s) for s in session.schema_ids)
        right_ok = any(rid in session.schema(s) for s in session.schema_ids)
        if left_ok and right_ok:
            candidates.append((lid, rid))
    if not candidates:
        raise SchemaMatchError(f"--pair {text!r} does not name two known elements")
    if len(candidates) > 1:
        raise SchemaMatchError(f"--pair {text!r} is ambiguous: {candidates}")
    return candidates[0]


def cmd_decide(args) -> int:
    session = _load_session_arg(args.session)
    left_id, right_id = _split_pair(session, args.pair)
    decision = session.record_decision(
        left_id,
        right_id,
        args.status,
        annotation=args.annotation,
        author=args.author,
        assignee=args.assignee,
    )
    save_session(session, args.session)
    print(f"{decision.left_id} {decision.right_id} {decision.status} ({decision.annotation})")
    return 0


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_analyze(args) -> int:
    session = _load_session_arg(args.session)
    primary = [bool(args.partition), bool(args.cluster), bool(args.search)]
    if sum(primary) > 1:
        raise SchemaMatchError("pick one of --partition / --cluster / --search")
    if sum(primary) == 0 and args.vocabulary is None:
        raise SchemaMatchError("pick one of --partition / --vocabulary / --cluster / --search")
    if args.vocabulary is not None and (args.partition or args.search):
        raise SchemaMatchError("--vocabulary extra sessions combine only with --cluster")

    if args.partition:
        report = analysis.partition(session, mode=args.mode, min_score=args.min_score)
        if args.json:
            _emit(json.dumps(export.partition_to_doc(report), indent=2) + "\n", args.out)
        else:
            _emit(export.render_partition_text(report), args.out)
        return 0

    if args.vocabulary is not None or args.cluster:
        extra = args.vocabulary or []
        sessions = [session] + [_load_session_arg(p) for p in extra]
        vocab = analysis.comprehensive_vocabulary(sessions, mode=args.mode, min_score=args.min_score)
        if args.cluster:
            dist = analysis.distance_matrix(vocab)
            result = analysis.cluster(dist, args.cutoff)
            lines = [f"CLUSTERS at cutoff {args.cutoff:g}: {len(result.clusters)}"]
            for members in result.clusters:
                lines.append("CLUSTER: " + " ".join(members))
            for m in result.merges:
                lines.append(
                    f"MERGE {'+'.join(m.first)} | {'+'.join(m.second)} @ {m.distance:.6f}"
                )
            _emit("".join(l + "\n" for l in lines), args.out)
        elif args.json:
            _emit(json.dumps(export.vocabulary_to_doc(vocab), indent=2) + "\n", args.out)
        else:
            _emit(export.render_vocabulary_text(vocab), args.out)
        return 0

    query_path, repo_dir = args.search
    query, _ = _load_schema_file(query_path)
    repo = []
    for p in sorted(Path(repo_dir).glob("*.json")):
        schema, _ = _load_schema_file(str(p))
        repo.append(schema)
    if not repo:
        raise SchemaMatchError(f"no canonical schema files (*.json) in {repo_dir}")
    results = analysis.search(query, repo, session.config, args.min_score)
    lines = [
        f"RANK {i} {r.schema_id} coverage={r.coverage:.4f} mean_best={r.mean_best:.4f}"
        for i, r in enumerate(results, start=1)
    ]
    _emit("".join(l + "\n" for l in lines), args.out)
    return 0


def cmd_export(args) -> int:
    session = _load_session_arg(args.session)
    picked = [bool(args.concepts), bool(args.elements), bool(args.matrix)]
    if sum(picked) != 1:
        raise SchemaMatchError("pick exactly one of --concepts / --elements / --matrix")
    if args.concepts:
        text = export.export_concept_sheet(session)
    elif args.elements:
        text = export.export_element_sheet(session)
    else:
        lo = session.tau if args.min_score is None else args.min_score
        matrix = session.matrix(*session.primary_pair())
        text = export.export_matrix(matrix, lo)
    Path(args.out).write_text(text, encoding="utf-8")
    print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore(args.dir)
    app = create_app(store)
    host, _, port = args.listen.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="schemamatch", description="schema matching workbench"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a schema into the canonical format")
    p.add_argument("file")
    p.add_argument("--format", choices=("ddl", "xsd", "canonical"), required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--id", help="schema id (default: sanitized file stem)")
    p.add_argument("--name", help="display name (default: schema id)")
    p.add_argument("--report", help="write parse warnings here instead of stderr")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("match", help="score the full cross product of two schemata")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("--config", help="match configuration file")
    p.add_argument("--out", required=True, help="session file to create")
    p.add_argument("--id", help="session id")
    p.set_defaults(func=cmd_match)

    p = sub.add_parser("summarize", help="label schema elements with concepts")
    p.add_argument("session")
    p.add_argument("--schema", required=True)
    p.add_argument("--suggest", action="store_true")
    p.add_argument("--assign", action="append", metavar="NAME=id1,id2,...")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("review", help="incremental match for one concept")
    p.add_argument("session")
    p.add_argument("--concept", required=True)
    p.add_argument("--min-score", type=float, default=None)
    p.set_defaults(func=cmd_review)

    p = sub.add_parser("decide", help="accept or reject a candidate pair")
    p.add_argument("session")
    p.add_argument("--pair", required=True, metavar="LEFTID:RIGHTID")
    p.add_argument("--status", choices=("accepted", "rejected"), required=True)
    p.add_argument("--annotation", default="none",
                   choices=("equivalent", "is-a", "part-of", "related", "none"))
    p.add_argument("--author", default="")
    p.add_argument("--assignee", default="")
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("analyze", help="partition, vocabulary, cluster, or search")
    p.add_argument("session")
    p.add_argument("--partition", action="store_true")
    p.add_argument("--vocabulary", nargs="*", metavar="SESSION",
                   help="comprehensive vocabulary over this session plus the listed ones")
    p.add_argument("--cluster", action="store_true")
    p.add_argument("--cutoff", type=float, default=0.5)
    p.add_argument("--search", nargs=2, metavar=("QUERY", "REPO_DIR"))
    p.add_argument("--mode", choices=("validated", "automatic"), default="validated")
    p.add_argument("--min-score", type=float, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("export", help="write concept/element/matrix CSV sheets")
    p.add_argument("session")
    p.add_argument("--concepts", action="store_true")
    p.add_argument("--elements", action="store_true")
    p.add_argument("--matrix", action="store_true")
    p.add_argument("--min-score", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="HTTP service over a directory of sessions")
    p.add_argument("dir")
    p.add_argument("--listen", default=os.environ.get("SCHEMAMATCH_LISTEN", "127.0.0.1:8400"))
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except SchemaMatchError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except Exception as exc:  # internal fault
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
