"""Batch entry point: score transcripts, run correction, render reports,
and launch the HTTP service."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import config as configmod
from . import fixtures, textproc
from ._version import __version__
from .correction import (
    HttpProvider,
    MockProvider,
    ProviderError,
    correct_one_set,
    correct_sentences,
    suggestion_to_dict,
)
from .metrics import (
    MetricsRow,
    build_report,
    kmter,
    parse_report_csv,
    score_texts,
    TermList,
)
from .textproc import Transcript

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class CliError(Exception):
    """Runtime failure (I/O, config, provider, data) → exit code 2."""

    def __init__(self, category: str, message: str):
        super().__init__(message)
        self.category = category


class _Parser(argparse.ArgumentParser):
    """argparse flags misuse as exit 2 by default; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"scribeloop: error: usage: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_input(value: str, kind: str) -> str:
    """Text of a fixture name or a file path."""
    bundled = fixtures.resolve_fixture(value)
    if bundled is not None:
        return bundled
    path = Path(value)
    if not path.is_file():
        raise CliError("io", f"{kind} file not found: {value}")
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError("io", f"cannot read {value}: {exc}") from exc


def _write_atomic(path: Path, text: str):
    tmp = path.with_name(path.name + ".tmp")
    try:
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as exc:
        raise CliError("io", f"cannot write {path}: {exc}") from exc


def _recording_id(args) -> str:
    if args.recording:
        return args.recording
    if args.hyp in fixtures.FIXTURE_FILES:
        return fixtures.RECORDING_ID
    return Path(args.hyp).stem


def _cmd_score(args) -> int:
    ref = _read_input(args.ref, "--ref")
    hyp = _read_input(args.hyp, "--hyp")
    try:
        alignment, _ = score_texts(ref, hyp)
    except ValueError as exc:
        raise CliError("data", str(exc)) from exc
    rate = None
    if args.terms:
        if fixtures.resolve_fixture(args.terms) is not None:
            terms = fixtures.term_list()
        else:
            terms_path = Path(args.terms)
            if not terms_path.is_file():
                raise CliError("io", f"--terms file not found: {args.terms}")
            terms = TermList.from_file(terms_path)
        rate = kmter(terms, textproc.tokenize(hyp)).rate
    row = MetricsRow(
        recording_id=_recording_id(args),
        method=args.method,
        s=alignment.s_count,
        d=alignment.d_count,
        i=alignment.i_count,
        n=alignment.n_ref,
        kmter=rate,
    )
    report = build_report([row])
    out = report.to_csv() if args.format == "csv" else report.to_table()
    sys.stdout.write(out)
    return EXIT_OK


def _build_provider(args):
    if args.mock:
        if fixtures.resolve_fixture(args.mock) is not None:
            return fixtures.mock_provider()
        mock_path = Path(args.mock)
        if not mock_path.is_file():
            raise CliError("io", f"--mock file not found: {args.mock}")
        return MockProvider.from_file(mock_path)
    try:
        values = configmod.load_config(args.provider)
        mock_path = configmod.mock_responses_path(values)
        if mock_path is not None:
            return MockProvider.from_file(mock_path)
        return HttpProvider(configmod.build_provider_config(values))
    except configmod.ConfigError as exc:
        raise CliError("config", str(exc)) from exc


def _cmd_correct(args) -> int:
    text = _read_input(args.infile, "--in")
    provider = _build_provider(args)
    out_path = Path(args.out) if args.out else Path(args.infile + ".corrected.txt")

    if args.mode == "one-set":
        try:
            corrected = correct_one_set(Transcript(text), provider)
        except ProviderError as exc:
            raise CliError("provider", str(exc)) from exc
        except ValueError as exc:
            raise CliError("data", str(exc)) from exc
        _write_atomic(out_path, corrected.text + "\n")
        print(f"wrote {out_path}")
        return EXIT_OK

    sentences = textproc.segment_sentences(text)
    if not sentences:
        raise CliError("data", "input has no sentences")
    try:
        suggestions = correct_sentences(sentences, provider)
    except ProviderError as exc:
        raise CliError("provider", str(exc)) from exc
    corrected_text = " ".join(s.corrected_text for s in suggestions)
    _write_atomic(out_path, corrected_text + "\n")
    sugg_path = Path(args.suggestions) if args.suggestions else Path(
        args.infile + ".suggestions.json"
    )
    _write_atomic(
        sugg_path,
        json.dumps([suggestion_to_dict(s) for s in suggestions],
                   indent=2, ensure_ascii=False) + "\n",
    )
    print(f"wrote {out_path}")
    print(f"wrote {sugg_path}")
    return EXIT_OK


def _cmd_report(args) -> int:
    text = _read_input(args.rows, "--rows")
    try:
        report = build_report(parse_report_csv(text))
    except ValueError as exc:
        raise CliError("data", str(exc)) from exc
    sys.stdout.write(report.to_table())
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import serve

    try:
        values = configmod.load_config(args.config)
        service_config = configmod.build_service_config(values)
    except configmod.ConfigError as exc:
        raise CliError("config", str(exc)) from exc
    serve(service_config)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scribeloop",
                     description="Score, correct, and review dictated transcripts.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    score = sub.add_parser("score", help="WER (and KMTER) of a hypothesis")
    score.add_argument("--ref", required=True,
                       help="reference transcript (path or fixture name)")
    score.add_argument("--hyp", required=True,
                       help="hypothesis transcript (path or fixture name)")
    score.add_argument("--terms", help="key term list (path or fixture name)")
    score.add_argument("--format", choices=("csv", "table"), default="table")
    score.add_argument("--recording", help="recording id for the output row")
    score.add_argument("--method", default=textproc.METHOD_INITIAL_ASR,
                       help="method label for the output row")
    score.set_defaults(func=_cmd_score)

    correct = sub.add_parser("correct", help="run LLM correction over a transcript")
    correct.add_argument("--mode", choices=("one-set", "sentence"), required=True)
    correct.add_argument("--in", dest="infile", required=True,
                         help="input transcript (path or fixture name)")
    correct.add_argument("--provider", help="provider config file")
    correct.add_argument("--mock",
                         help="mock responses file (or the bundled 'paper_examples')")
    correct.add_argument("--out", help="corrected transcript output path")
    correct.add_argument("--suggestions",
                         help="suggestions JSON output path (sentence mode)")
    correct.set_defaults(func=_cmd_correct)

    report = sub.add_parser("report", help="render a metrics CSV as a table")
    report.add_argument("--rows", required=True, help="metrics CSV (path)")
    report.set_defaults(func=_cmd_report)

    serve = sub.add_parser("serve", help="run the review HTTP service")
    serve.add_argument("--config", required=True, help="service config file")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "command", None):
        parser.print_usage(sys.stderr)
        print("scribeloop: error: usage: a command is required", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "correct" and not (args.provider or args.mock):
        parser.print_usage(sys.stderr)
        print("scribeloop: error: usage: correct needs --provider or --mock",
              file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"scribeloop: error: {exc.category}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
