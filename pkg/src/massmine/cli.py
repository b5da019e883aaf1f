"""Command-line entry point.

Exit codes: 0 clean (or findings without ``--fail-on-findings``),
1 findings with ``--fail-on-findings``, 2 usage error or any input that
failed to load.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .canonical import canonical_key
from .detector import SCOPES, DetectorConfig, as_ratio
from .extract import ExtractionConfig, ResponseCodeFilter
from .loader import SpecError
from .pipeline import analyze_path
from .report import FORMATS, aggregate, export_records, render_report, render_summary

EXIT_CLEAN = 0
EXIT_FINDINGS = 1
EXIT_ERROR = 2

SPEC_SUFFIXES = (".json", ".yaml", ".yml")


@dataclass
class CliConfig:
    inputs: list[Path]
    threshold: str = "0.5"
    scope: str = "global"
    format: str = "text"
    export_path: Path | None = None
    corpus_mode: bool = False
    fail_on_findings: bool = False
    include_parameters: bool = True
    response_codes: str = "2xx"
    max_depth: int = 16
    jobs: int = 1

    def detector(self) -> DetectorConfig:
        return DetectorConfig(threshold=as_ratio(self.threshold), scope=self.scope)

    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(
            include_parameters=self.include_parameters,
            response_codes=ResponseCodeFilter(self.response_codes),
            max_depth=self.max_depth,
        )


def _threshold(text: str) -> str:
    try:
        value = as_ratio(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError("threshold must be between 0 and 1")
    return text


def _codes(text: str) -> str:
    try:
        ResponseCodeFilter(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="massmine",
        description="Mine OpenAPI 3 documents for operations and attributes prone to mass assignment.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    an = sub.add_parser("analyze", help="analyze one document, or a corpus with --corpus")
    an.add_argument("inputs", nargs="+", type=Path, help="OpenAPI file (or directories/files with --corpus)")
    an.add_argument("--threshold", type=_threshold, default="0.5", help="minimum Jaccard similarity (default 0.5)")
    an.add_argument("--scope", choices=SCOPES, default="global", help="pair across the whole document or per path")
    an.add_argument("--format", choices=FORMATS, default="text", help="stdout format (default text)")
    an.add_argument("--export", dest="export_path", type=Path, help="also write the tester worklist JSON here")
    an.add_argument("--corpus", dest="corpus_mode", action="store_true", help="summarize many documents as a table")
    an.add_argument("--fail-on-findings", action="store_true", help="exit 1 when candidates are found")
    an.add_argument(
        "--no-parameters",
        dest="include_parameters",
        action="store_false",
        help="ignore path/query/header parameters in write requests",
    )
    an.add_argument("--response-codes", type=_codes, default="2xx", help="e.g. 2xx, 200,201, default, all")
    an.add_argument("--max-depth", type=_positive, default=16, help="schema nesting limit (default 16)")
    an.add_argument("--jobs", type=_positive, default=1, help="parallel workers in corpus mode")

    st = sub.add_parser("stem", help="print the canonical key of each word")
    st.add_argument("words", nargs="+")
    return parser


def _err(message: str) -> None:
    print(f"massmine: {message}", file=sys.stderr)


def _collect(inputs: list[Path]) -> list[tuple[Path, str]]:
    """Files to analyze in corpus mode, with the name used for their row."""
    found = []
    for item in inputs:
        if item.is_dir():
            for f in sorted(p for p in item.rglob("*") if p.is_file() and p.suffix.lower() in SPEC_SUFFIXES):
                found.append((f, f.relative_to(item).as_posix()))
        else:
            found.append((item, item.name))
    return found


def _write_export(path: Path, records) -> None:
    path.write_bytes((json.dumps(records, indent=2, ensure_ascii=False) + "\n").encode("utf-8"))


def _run_single(cfg: CliConfig) -> int:
    (path,) = cfg.inputs
    if path.is_dir():
        _err(f"{path} is a directory; use --corpus to analyze every document in it")
        return EXIT_ERROR
    try:
        report = analyze_path(path, cfg.detector(), cfg.extraction())
    except (OSError, UnicodeDecodeError, SpecError) as exc:
        _err(f"{path}: {exc}")
        return EXIT_ERROR
    for w in report.warnings:
        _err(f"{path}: warning: {w.kind} at #{w.json_pointer}: {w.message}")
    sys.stdout.buffer.write(render_report(report, cfg.format))
    sys.stdout.flush()
    if cfg.export_path is not None:
        _write_export(cfg.export_path, export_records(report))
    if report.pairs and cfg.fail_on_findings:
        return EXIT_FINDINGS
    return EXIT_CLEAN


def _run_corpus(cfg: CliConfig) -> int:
    files = _collect(cfg.inputs)
    detector, extraction = cfg.detector(), cfg.extraction()

    def work(item):
        path, name = item
        try:
            return analyze_path(path, detector, extraction, source_name=name), None
        except (OSError, UnicodeDecodeError, SpecError) as exc:
            return None, f"{path}: {exc}"

    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        # map() keeps input order whatever the completion order
        results = list(pool.map(work, files))

    failed = False
    reports = []
    for report, error in results:
        if error is not None:
            failed = True
            _err(error)
        else:
            reports.append(report)
    if not files:
        _err("no .json/.yaml/.yml documents found")
        failed = True

    sys.stdout.buffer.write(render_summary(aggregate(reports), cfg.format))
    sys.stdout.flush()
    if cfg.export_path is not None:
        records = [dict(rec, source=r.source_name) for r in reports for rec in export_records(r)]
        _write_export(cfg.export_path, records)
    if failed:
        return EXIT_ERROR
    if cfg.fail_on_findings and any(r.pairs for r in reports):
        return EXIT_FINDINGS
    return EXIT_CLEAN


def run(cfg: CliConfig) -> int:
    if not cfg.inputs:
        _err("at least one input is required")
        return EXIT_ERROR
    if cfg.corpus_mode:
        return _run_corpus(cfg)
    if len(cfg.inputs) != 1:
        _err("analyze takes exactly one document unless --corpus is given")
        return EXIT_ERROR
    return _run_single(cfg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 for --help/--version
        return int(exc.code or 0)
    if args.command == "stem":
        for word in args.words:
            print(canonical_key(word))
        return EXIT_CLEAN
    cfg = CliConfig(
        inputs=args.inputs,
        threshold=args.threshold,
        scope=args.scope,
        format=args.format,
        export_path=args.export_path,
        corpus_mode=args.corpus_mode,
        fail_on_findings=args.fail_on_findings,
        include_parameters=args.include_parameters,
        response_codes=args.response_codes,
        max_depth=args.max_depth,
        jobs=args.jobs,
    )
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
