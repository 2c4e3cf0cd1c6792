"""Command-line surface: ``derep {metrics,detect,repair,stream}``.

Thresholds come from defaults, then an optional JSON config file pointed to
by ``DEREP_CONFIG``, then flags (flags win). Exit codes: 0 all records ok,
1 fatal, 2 some records failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any, IO

from .config import Config, DEFAULT_N_VALUES
from .harness import (
    CorpusReport,
    EXIT_FATAL,
    RunOptions,
    run_detect,
    run_metrics,
    run_repair,
    run_stream,
)

_CONFIG_FLAGS = {
    "overlength": ("--overlength", int, "last-line length that triggers the fast path"),
    "cosine_threshold": ("--cosine-threshold", float, "TF-IDF cosine similarity threshold"),
    "editsim_threshold": ("--editsim-threshold", float, "edit-distance similarity threshold"),
    "l_min": ("--lmin", int, "minimum block length"),
    "l_max_ratio": ("--lmax-ratio", float, "maximum block length as a fraction of line count"),
    "min_char_repeats": ("--min-char-repeats", int, "full periods needed for in-line repetition"),
    "max_passes": ("--max-passes", int, "maximum detect+prune passes per snippet"),
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lang-default", default="plain",
                        help="language profile for records without one")
    parser.add_argument("--n", action="append", type=int, default=None, metavar="N",
                        help="n-gram size for rep-n (repeatable; default 2 3 4)")
    for _, (flag, kind, help_text) in _CONFIG_FLAGS.items():
        parser.add_argument(flag, type=kind, default=None, help=help_text)
    parser.add_argument("--eos-marker", action="append", default=None, metavar="TEXT",
                        help="end-of-sequence marker (repeatable, replaces defaults)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for batch modes")
    parser.add_argument("--format", choices=("records", "table"), default="records",
                        help="report format")
    parser.add_argument("--out", default=None, help="report destination (default stdout)")
    parser.add_argument("--token-weighted", action="store_true",
                        help="weight corpus aggregates by token count")
    parser.add_argument("--series", action="store_true",
                        help="emit mean metric per input-token bucket in the aggregate")
    parser.add_argument("--bucket-width", type=int, default=32,
                        help="token bucket width for --series")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="derep",
        description="Measure, detect, classify, and prune repetition in generated code.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_metrics = sub.add_parser("metrics", help="compute rep-n / rep-line / sim-line per record")
    p_metrics.add_argument("input", help="line-delimited JSON records")
    _add_common(p_metrics)

    p_detect = sub.add_parser("detect", help="run the detection cascade per record")
    p_detect.add_argument("input", help="line-delimited JSON records")
    _add_common(p_detect)

    p_repair = sub.add_parser("repair", help="prune repetition and write repaired records")
    p_repair.add_argument("input", help="line-delimited JSON records")
    p_repair.add_argument("output", help="destination for repaired records")
    _add_common(p_repair)

    p_stream = sub.add_parser("stream", help="repair records from stdin to stdout, one per line")
    _add_common(p_stream)
    p_stream.add_argument("--diagnostics", action="store_true",
                          help="attach pass/latency diagnostics to each output record")
    return parser


def _config_from_args(args: argparse.Namespace) -> Config:
    config = Config()
    env_path = os.environ.get("DEREP_CONFIG")
    if env_path:
        config = Config.from_file(env_path)
    overrides: dict[str, Any] = {}
    for field_name, (flag, _, _) in _CONFIG_FLAGS.items():
        value = getattr(args, flag.lstrip("-").replace("-", "_"))
        if value is not None:
            overrides[field_name] = value
    if args.eos_marker:
        overrides["eos_markers"] = tuple(args.eos_marker)
    if args.n:
        n_values = tuple(dict.fromkeys(args.n))
        if 3 not in n_values:
            n_values = n_values + (3,)
        overrides["n_values"] = n_values
    if overrides:
        config = config.replace(**overrides)
    return config


def _options_from_args(args: argparse.Namespace) -> RunOptions:
    return RunOptions(
        config=_config_from_args(args),
        default_language=args.lang_default,
        jobs=max(1, args.jobs),
        token_weighted=args.token_weighted,
        series=args.series,
        bucket_width=max(1, args.bucket_width),
        diagnostics=getattr(args, "diagnostics", False),
    )


def _format_table(report: CorpusReport) -> str:
    lines = [f"derep {report.header['mode']} report"]
    snippets = report.snippet_entries
    mode = report.header["mode"]
    if mode == "metrics":
        n_keys = sorted(
            {n for e in snippets for n in e["rep_n"]}, key=int
        ) if snippets else [str(n) for n in DEFAULT_N_VALUES]
        head = ["id"] + [f"rep-{n}" for n in n_keys] + ["rep-line", "sim-line", "rep"]
        rows = [
            [e["id"]]
            + [f"{e['rep_n'][n]:.2f}" for n in n_keys]
            + [f"{e['rep_line']:.2f}", f"{e['sim_line']:.2f}", f"{e['rep']:.2f}"]
            for e in snippets
        ]
        agg = report.aggregate
        if snippets:
            rows.append(
                ["MEAN"]
                + [f"{agg['rep_n'][n]:.2f}" for n in n_keys]
                + [f"{agg['rep_line']:.2f}", f"{agg['sim_line']:.2f}", f"{agg['rep']:.2f}"]
            )
    elif mode == "detect":
        head = ["id", "granularity", "pattern", "extent", "units"]
        rows = []
        for e in snippets:
            extent = e.get("extent")
            extent_text = (
                f"{extent['fidelity']}/{extent['termination']}" if extent else "-"
            )
            rows.append([
                e["id"],
                e.get("granularity") or "-",
                e.get("pattern") or "-",
                extent_text,
                str(len(e.get("units", []))),
            ])
    else:
        head = ["id", "passes", "chars_removed", "rep before", "rep after"]
        rows = [
            [
                e["id"],
                str(e["passes"]),
                str(e["chars_removed"]),
                f"{e['before']['rep']:.2f}",
                f"{e['after']['rep']:.2f}",
            ]
            for e in snippets
        ]
    widths = [
        max(len(head[c]), *(len(r[c]) for r in rows)) if rows else len(head[c])
        for c in range(len(head))
    ]
    lines.append("  ".join(h.ljust(w) for h, w in zip(head, widths)))
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)))
    for e in report.error_entries:
        lines.append(f"ERROR line {e['line']}: {e['message']}")
    lines.append(json.dumps(report.aggregate))
    return "\n".join(lines) + "\n"


def _write_report(report: CorpusReport, args: argparse.Namespace, stdout: IO[str]) -> None:
    if args.format == "table":
        text = _format_table(report)
    else:
        parts = [json.dumps(report.header, ensure_ascii=False)]
        parts.extend(json.dumps(e, ensure_ascii=False) for e in report.entries)
        parts.append(json.dumps(report.aggregate, ensure_ascii=False))
        text = "\n".join(parts) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        options = _options_from_args(args)
        if args.command == "metrics":
            report = run_metrics(args.input, options)
        elif args.command == "detect":
            report = run_detect(args.input, options)
        elif args.command == "repair":
            report = run_repair(args.input, args.output, options)
        else:
            return run_stream(sys.stdin, sys.stdout, options)
        _write_report(report, args, sys.stdout)
        return report.exit_code
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"derep: fatal: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
