"""Corpus ingestion and batch/stream processing around the library core.

Input is line-delimited JSON records with fields ``id``, ``language``,
``code`` and optional ``prompt``/``meta``. Every runner emits per-record
entries in input order followed by a corpus aggregate; malformed records
become error entries and flip the exit code to 2 without stopping the run.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, IO, Iterable, Iterator

from .config import Config, DEFAULT_CONFIG
from .detection import DetectionResult, detect
from .lexing import CodeSnippet, split_lines, tokenize_line
from .metrics import MetricsReport, compute_report
from .repair import RepairResult, repair

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2


class RecordError(ValueError):
    pass


@dataclass(frozen=True)
class SnippetRecord:
    id: str
    language: str
    code: str
    prompt: str | None = None
    meta: dict[str, str] | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "language": self.language, "code": self.code}
        if self.prompt is not None:
            out["prompt"] = self.prompt
        if self.meta is not None:
            out["meta"] = self.meta
        return out


@dataclass(frozen=True)
class RunOptions:
    config: Config = DEFAULT_CONFIG
    default_language: str = "plain"
    jobs: int = 1
    token_weighted: bool = False
    series: bool = False
    bucket_width: int = 32
    diagnostics: bool = False


@dataclass
class CorpusReport:
    header: dict[str, Any]
    entries: list[dict[str, Any]] = field(default_factory=list)
    aggregate: dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    @property
    def snippet_entries(self) -> list[dict[str, Any]]:
        return [e for e in self.entries if e["type"] == "snippet"]

    @property
    def error_entries(self) -> list[dict[str, Any]]:
        return [e for e in self.entries if e["type"] == "error"]


def parse_record(line: str, default_language: str = "plain") -> SnippetRecord:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise RecordError("record must be a JSON object")
    snippet_id = raw.get("id")
    if not isinstance(snippet_id, str) or not snippet_id:
        raise RecordError("record needs a non-empty string 'id'")
    code = raw.get("code")
    if not isinstance(code, str):
        raise RecordError("record needs a string 'code'")
    language = raw.get("language") or default_language
    if not isinstance(language, str):
        raise RecordError("'language' must be a string")
    prompt = raw.get("prompt")
    if prompt is not None and not isinstance(prompt, str):
        raise RecordError("'prompt' must be a string")
    meta = raw.get("meta")
    if meta is not None and not (
        isinstance(meta, dict)
        and all(isinstance(k, str) and isinstance(v, str) for k, v in meta.items())
    ):
        raise RecordError("'meta' must map strings to strings")
    return SnippetRecord(snippet_id, language, code, prompt, meta)


def _metrics_to_json(report: MetricsReport) -> dict[str, Any]:
    return {
        "rep_n": {str(n): round(v, 6) for n, v in report.rep_n.items()},
        "rep_line": round(report.rep_line, 6),
        "sim_line": round(report.sim_line, 6),
        "rep": round(report.rep_aggregate, 6),
        "token_count": report.token_count,
        "line_count": report.line_count,
    }


def _detection_to_json(result: DetectionResult) -> dict[str, Any]:
    out: dict[str, Any] = {
        "granularity": result.granularity.value if result.granularity else None,
        "pattern": result.pattern.value if result.pattern else None,
        "extent": (
            {
                "fidelity": result.extent.fidelity.value,
                "termination": result.extent.termination.value,
            }
            if result.extent
            else None
        ),
        "units": [
            {
                "start": u.span[0],
                "end": u.span[1],
                "complete": u.complete,
                "content": u.content,
            }
            for u in result.units
        ],
    }
    if result.line_index is not None:
        out["line_index"] = result.line_index
    return out


def _repair_to_json(result: RepairResult) -> dict[str, Any]:
    return {
        "passes": result.passes,
        "converged": result.converged,
        "removed_spans": [[a, b] for a, b in result.removed_spans],
        "chars_removed": sum(b - a for a, b in result.removed_spans),
        "before": _metrics_to_json(result.before),
        "after": _metrics_to_json(result.after),
    }


# --- per-record workers (top level so a process pool can pickle them) ------


def _work_metrics(args: tuple[SnippetRecord, Config]) -> dict[str, Any]:
    record, config = args
    started = time.perf_counter()
    report = compute_report(
        CodeSnippet(record.code, record.language),
        config.n_values,
        config.editsim_threshold,
    )
    elapsed = (time.perf_counter() - started) * 1000.0
    entry = {"type": "snippet", "id": record.id, "language": record.language}
    entry.update(_metrics_to_json(report))
    entry["ms"] = round(elapsed, 3)
    return entry


def _work_detect(args: tuple[SnippetRecord, Config]) -> dict[str, Any]:
    record, config = args
    started = time.perf_counter()
    result = detect(CodeSnippet(record.code, record.language), config=config)
    elapsed = (time.perf_counter() - started) * 1000.0
    entry = {"type": "snippet", "id": record.id, "language": record.language}
    entry.update(_detection_to_json(result))
    entry["ms"] = round(elapsed, 3)
    return entry


def _work_repair(args: tuple[SnippetRecord, Config]) -> dict[str, Any]:
    record, config = args
    started = time.perf_counter()
    result = repair(CodeSnippet(record.code, record.language), config=config)
    elapsed = (time.perf_counter() - started) * 1000.0
    entry = {"type": "snippet", "id": record.id, "language": record.language}
    entry.update(_repair_to_json(result))
    entry["ms"] = round(elapsed, 3)
    entry["code"] = result.repaired_code
    return entry


def _read_lines(source: "str | Path | IO[str]") -> Iterator[tuple[int, str]]:
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            for number, line in enumerate(fh, start=1):
                yield number, line
    else:
        for number, line in enumerate(source, start=1):
            yield number, line


def _percentile(values: list[float], q: float) -> float:
    if not values:
        return 0.0
    ordered = sorted(values)
    rank = max(0, min(len(ordered) - 1, round(q * (len(ordered) - 1))))
    return ordered[rank]


def _mean(values: Iterable[float]) -> float:
    values = list(values)
    return sum(values) / len(values) if values else 0.0


def _prompt_tokens(record_entry: dict[str, Any], prompt: str | None) -> int:
    if prompt:
        return sum(
            len(tokenize_line(rec.raw)) for rec in split_lines(prompt)
        )
    return int(record_entry.get("token_count", 0))


def _aggregate_metric_entries(
    entries: list[dict[str, Any]],
    options: RunOptions,
    key_prefix: str = "",
) -> dict[str, Any]:
    """Mean metrics over snippet entries; unweighted by default, optionally
    weighted by token count."""
    rows = [e for e in entries if e["type"] == "snippet"]
    if not rows:
        return {"records": 0}

    def colmap(getter: Callable[[dict[str, Any]], float]) -> list[float]:
        return [getter(e) for e in rows]

    def get(e: dict[str, Any]) -> dict[str, Any]:
        return e[key_prefix] if key_prefix else e

    weights = [float(get(e).get("token_count", 0)) for e in rows]
    if options.token_weighted and sum(weights) > 0:
        total = sum(weights)

        def agg(values: list[float]) -> float:
            return sum(v * w for v, w in zip(values, weights)) / total
    else:

        def agg(values: list[float]) -> float:
            return _mean(values)

    n_keys = sorted({n for e in rows for n in get(e)["rep_n"]}, key=int)
    out: dict[str, Any] = {
        "records": len(rows),
        "rep_n": {
            n: round(agg(colmap(lambda e, n=n: float(get(e)["rep_n"][n]))), 6)
            for n in n_keys
        },
        "rep_line": round(agg(colmap(lambda e: float(get(e)["rep_line"]))), 6),
        "sim_line": round(agg(colmap(lambda e: float(get(e)["sim_line"]))), 6),
        "rep": round(agg(colmap(lambda e: float(get(e)["rep"]))), 6),
    }
    return out


def _timing_stats(entries: list[dict[str, Any]]) -> dict[str, float]:
    times = [e["ms"] for e in entries if e["type"] == "snippet" and "ms" in e]
    return {
        "p50_ms": round(_percentile(times, 0.50), 3),
        "p95_ms": round(_percentile(times, 0.95), 3),
        "max_ms": round(max(times), 3) if times else 0.0,
    }


def _histogram(entries: list[dict[str, Any]]) -> dict[str, dict[str, int]]:
    patterns: dict[str, int] = {}
    granularities: dict[str, int] = {}
    for e in entries:
        if e["type"] != "snippet" or not e.get("pattern"):
            continue
        patterns[e["pattern"]] = patterns.get(e["pattern"], 0) + 1
        granularity = e["granularity"]
        granularities[granularity] = granularities.get(granularity, 0) + 1
    return {
        "pattern": dict(sorted(patterns.items())),
        "granularity": dict(sorted(granularities.items())),
    }


def _series(
    entries: list[dict[str, Any]],
    prompts: dict[str, str | None],
    options: RunOptions,
    value_key: str = "rep",
) -> list[dict[str, Any]]:
    """Plot-ready series: mean metric per input-token bucket."""
    buckets: dict[int, list[float]] = {}
    for e in entries:
        if e["type"] != "snippet" or value_key not in e:
            continue
        tokens = _prompt_tokens(e, prompts.get(e["id"]))
        bucket = tokens // options.bucket_width * options.bucket_width
        buckets.setdefault(bucket, []).append(float(e[value_key]))
    return [
        {"bucket_start": b, "count": len(vals), value_key: round(_mean(vals), 6)}
        for b, vals in sorted(buckets.items())
    ]


def _make_header(mode: str, options: RunOptions) -> dict[str, Any]:
    return {
        "type": "header",
        "tool": "derep",
        "mode": mode,
        "config": options.config.as_dict(),
        "default_language": options.default_language,
        "token_weighted": options.token_weighted,
    }


def _process_records(
    source: "str | Path | IO[str]",
    worker: Callable[[tuple[SnippetRecord, Config]], dict[str, Any]],
    options: RunOptions,
) -> tuple[list[dict[str, Any]], dict[str, SnippetRecord]]:
    entries: list[dict[str, Any]] = []
    by_id: dict[str, SnippetRecord] = {}
    records: list[SnippetRecord] = []
    for number, line in _read_lines(source):
        if not line.strip():
            continue
        try:
            record = parse_record(line, options.default_language)
            if record.id in by_id:
                raise RecordError(f"duplicate id {record.id!r}")
        except RecordError as exc:
            entries.append({"type": "error", "line": number, "message": str(exc)})
            continue
        by_id[record.id] = record
        records.append(record)
        entries.append({})  # placeholder, filled below in order

    placeholders = [i for i, e in enumerate(entries) if not e]
    payloads = [(record, options.config) for record in records]
    if options.jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=options.jobs) as pool:
            results = list(pool.map(worker, payloads, chunksize=8))
    else:
        results = [worker(p) for p in payloads]
    for slot, result in zip(placeholders, results):
        entries[slot] = result
    return entries, by_id


def run_metrics(
    input_path: "str | Path | IO[str]", options: RunOptions | None = None
) -> CorpusReport:
    """Compute metrics for every record; aggregate is the per-snippet mean."""
    options = options or RunOptions()
    entries, by_id = _process_records(input_path, _work_metrics, options)
    aggregate: dict[str, Any] = {"type": "aggregate"}
    aggregate.update(_aggregate_metric_entries(entries, options))
    aggregate["errors"] = sum(1 for e in entries if e["type"] == "error")
    aggregate["timing"] = _timing_stats(entries)
    if options.series:
        prompts = {rid: rec.prompt for rid, rec in by_id.items()}
        aggregate["series"] = _series(entries, prompts, options)
    report = CorpusReport(_make_header("metrics", options), entries, aggregate)
    report.exit_code = EXIT_PARTIAL if aggregate["errors"] else EXIT_OK
    return report


def run_detect(
    input_path: "str | Path | IO[str]", options: RunOptions | None = None
) -> CorpusReport:
    """Detect repetition in every record and histogram the found patterns."""
    options = options or RunOptions()
    entries, _ = _process_records(input_path, _work_detect, options)
    snippets = [e for e in entries if e["type"] == "snippet"]
    detected = [e for e in snippets if e.get("pattern")]
    aggregate: dict[str, Any] = {
        "type": "aggregate",
        "records": len(snippets),
        "detected": len(detected),
        "errors": sum(1 for e in entries if e["type"] == "error"),
        "histogram": _histogram(entries),
        "timing": _timing_stats(entries),
    }
    report = CorpusReport(_make_header("detect", options), entries, aggregate)
    report.exit_code = EXIT_PARTIAL if aggregate["errors"] else EXIT_OK
    return report


def run_repair(
    input_path: "str | Path | IO[str]",
    output_path: "str | Path | IO[str]",
    options: RunOptions | None = None,
) -> CorpusReport:
    """Repair every record, writing repaired records to ``output_path`` with
    id/language/prompt/meta preserved."""
    options = options or RunOptions()
    entries, by_id = _process_records(input_path, _work_repair, options)

    out_records: list[str] = []
    for e in entries:
        if e["type"] != "snippet":
            continue
        original = by_id[e["id"]]
        record = SnippetRecord(
            id=e["id"],
            language=e["language"],
            code=e.pop("code"),
            prompt=original.prompt,
            meta=original.meta,
        )
        out_records.append(json.dumps(record.to_json(), ensure_ascii=False))

    if isinstance(output_path, (str, Path)):
        with open(output_path, "w", encoding="utf-8") as fh:
            for line in out_records:
                fh.write(line + "\n")
    else:
        for line in out_records:
            output_path.write(line + "\n")

    snippets = [e for e in entries if e["type"] == "snippet"]
    aggregate: dict[str, Any] = {
        "type": "aggregate",
        "records": len(snippets),
        "errors": sum(1 for e in entries if e["type"] == "error"),
        "passes_mean": round(_mean([e["passes"] for e in snippets]), 3),
        "before": _aggregate_metric_entries(snippets, options, key_prefix="before"),
        "after": _aggregate_metric_entries(snippets, options, key_prefix="after"),
        "timing": _timing_stats(entries),
    }
    report = CorpusReport(_make_header("repair", options), entries, aggregate)
    report.exit_code = EXIT_PARTIAL if aggregate["errors"] else EXIT_OK
    return report


def run_stream(
    stdin: IO[str],
    stdout: IO[str],
    options: RunOptions | None = None,
) -> int:
    """Repair records one by one from a stream: each input line produces one
    output line before the next line is read. Malformed lines produce error
    records and processing continues."""
    options = options or RunOptions()
    had_errors = False
    for number, line in enumerate(stdin, start=1):
        if not line.strip():
            continue
        try:
            record = parse_record(line, options.default_language)
        except RecordError as exc:
            had_errors = True
            stdout.write(
                json.dumps({"type": "error", "line": number, "message": str(exc)})
                + "\n"
            )
            stdout.flush()
            continue
        started = time.perf_counter()
        result = repair(CodeSnippet(record.code, record.language), config=options.config)
        elapsed = (time.perf_counter() - started) * 1000.0
        out = SnippetRecord(
            record.id, record.language, result.repaired_code, record.prompt, record.meta
        ).to_json()
        if options.diagnostics:
            out["diagnostics"] = {
                "passes": result.passes,
                "converged": result.converged,
                "chars_removed": sum(b - a for a, b in result.removed_spans),
                "before_rep": round(result.before.rep_aggregate, 6),
                "after_rep": round(result.after.rep_aggregate, 6),
                "ms": round(elapsed, 3),
            }
        stdout.write(json.dumps(out, ensure_ascii=False) + "\n")
        stdout.flush()
    return EXIT_PARTIAL if had_errors else EXIT_OK
