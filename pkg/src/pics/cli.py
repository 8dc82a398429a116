"""`pics` command line: ingest, index, search, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .captioner import BackendConfig
from .catalog import load_catalog
from .errors import EmptyQuery, InvariantViolation, PicsError
from .pipeline import PipelineConfig, PipelineReport, run_pipeline
from .searchcore import build_index, load_index, parse_query, save_index, search
from .server import ServeConfig, serve

READABILITY_HELP = (
    "heuristic (default) marks a name non-readable when it has no alphanumerics, "
    ">=90%% of its alphanumerics are hex digits, letters are <50%% of its characters, "
    "or it has fewer than 2 letter-runs of 3+; llm asks the caption backend and "
    "falls back to the heuristic on any backend error"
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pics", description="Caption, rename, tag, and search images.")
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="scan a directory, caption and rename, update the catalog")
    ingest.add_argument("dir", help="directory of images to ingest")
    ingest.add_argument("--catalog", required=True, help="catalog file (pics-catalog.jsonl)")
    ingest.add_argument("--captioner", required=True, choices=["mock", "command", "http"])
    ingest.add_argument("--mock-fixture", help="JSON file mapping digest or filename to caption (mock)")
    ingest.add_argument("--command-template", help="command with {image} and {prompt} placeholders")
    ingest.add_argument("--endpoint", help="chat-completions base URL (http); falls back to $PICS_ENDPOINT")
    ingest.add_argument("--model", help="model name sent to the http backend")
    ingest.add_argument("--annotations", help="CSV of image_name,tags (tags ;-separated)")
    ingest.add_argument("--name-col", default="image_name")
    ingest.add_argument("--tags-col", default="tags")
    ingest.add_argument("--readability", default="heuristic", choices=["heuristic", "llm"], help=READABILITY_HELP)
    ingest.add_argument("--dry-run", action="store_true", help="plan everything, mutate nothing")
    ingest.add_argument("--jobs", type=int, default=4, help="concurrent caption jobs")
    ingest.add_argument("--json", action="store_true", help="print the report as one JSON object")

    index = sub.add_parser("index", help="build and save the search index")
    index.add_argument("--catalog", required=True)
    index.add_argument("--out", required=True, help="index file to write (pics-index.json)")

    search_cmd = sub.add_parser("search", help="ranked keyword search over the catalog")
    search_cmd.add_argument("query")
    search_cmd.add_argument("--catalog", required=True)
    search_cmd.add_argument("--index", help="saved index file; built in memory when omitted")
    search_cmd.add_argument("--limit", type=int, default=20)
    search_cmd.add_argument("--json", action="store_true", help="print ranked results as JSON")

    serve_cmd = sub.add_parser("serve", help="serve the JSON API and web UI")
    serve_cmd.add_argument("--catalog", required=True)
    serve_cmd.add_argument("--index", help="saved index file; built at startup when omitted")
    serve_cmd.add_argument("--addr", default="127.0.0.1:8080")
    serve_cmd.add_argument("--static", help="directory of web UI assets served at /")
    return parser


def _backend_from_args(parser: argparse.ArgumentParser, args: argparse.Namespace) -> BackendConfig:
    config = BackendConfig(
        kind=args.captioner,
        mock_fixture=Path(args.mock_fixture) if args.mock_fixture else None,
        command_template=args.command_template,
        endpoint_url=args.endpoint or os.environ.get("PICS_ENDPOINT"),
        model_name=args.model,
    )
    try:
        config.validate()
    except InvariantViolation as exc:
        parser.error(str(exc))
    return config


def _print_report(report: PipelineReport, as_json: bool, dry_run: bool) -> None:
    if as_json:
        obj = {
            "scanned": report.scanned,
            "deduplicated": report.deduplicated,
            "captioned": report.captioned,
            "renamed": report.renamed,
            "tags_attached": report.tags_attached,
            "annotation_rows_unmatched": report.annotation_rows_unmatched,
            "dry_run": dry_run,
            "moves": [list(move) for move in report.plan.moves],
            "skipped": [list(item) for item in report.plan.skipped],
            "errors": [list(err) for err in report.errors],
        }
        print(json.dumps(obj, ensure_ascii=False))
        return
    print(f"scanned                   {report.scanned}")
    print(f"deduplicated              {report.deduplicated}")
    print(f"captioned                 {report.captioned}")
    print(f"renamed                   {report.renamed}")
    print(f"tags attached             {report.tags_attached}")
    print(f"annotation rows unmatched {report.annotation_rows_unmatched}")
    if report.plan.moves:
        label = "planned moves" if dry_run else "moves"
        print(f"{label}:")
        for _, src, dst in report.plan.moves:
            print(f"  {src} -> {dst}")
    if report.errors:
        print("errors:")
        for path, kind, message in report.errors:
            print(f"  {path}: {kind}: {message}")


def _cmd_ingest(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    backend = _backend_from_args(parser, args)
    config = PipelineConfig(
        dir=Path(args.dir),
        catalog_file=Path(args.catalog),
        backend=backend,
        annotations_file=Path(args.annotations) if args.annotations else None,
        name_column=args.name_col,
        tags_column=args.tags_col,
        readability_mode=args.readability,
        dry_run=args.dry_run,
        jobs=args.jobs,
    )
    report = run_pipeline(config)
    _print_report(report, args.json, args.dry_run)
    return 1 if report.errors else 0


def _cmd_index(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    save_index(build_index(catalog), args.out)
    print(f"indexed {len(catalog.records)} records -> {args.out}")
    return 0


def _cmd_search(args: argparse.Namespace) -> int:
    catalog = load_catalog(args.catalog)
    index = load_index(args.index) if args.index else build_index(catalog)
    try:
        query = parse_query(args.query)
    except EmptyQuery as exc:
        print(f"pics search: {exc}", file=sys.stderr)
        return 2
    results = search(index, catalog, query, limit=args.limit)
    if args.json:
        print(json.dumps([asdict(r) for r in results], ensure_ascii=False))
    else:
        for result in results:
            print(f"{result.score:g}\t{result.display_name}\t{','.join(result.tags)}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    config = ServeConfig(
        catalog_file=Path(args.catalog),
        bind_address=args.addr,
        static_dir=Path(args.static) if args.static else None,
    )
    index = load_index(args.index) if args.index else None
    try:
        serve(config, index)
    except KeyboardInterrupt:
        pass
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(parser, args)
        if args.command == "index":
            return _cmd_index(args)
        if args.command == "search":
            return _cmd_search(args)
        return _cmd_serve(args)
    except PicsError as exc:
        print(f"pics {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
