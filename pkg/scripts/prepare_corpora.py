#!/usr/bin/env python3
"""Convert benchmark solution files into derep's record format.

The ground-truth acceptance gate needs the canonical solutions of
HumanEval-Python and MBPP as line-delimited records. This environment has
no network route to fetch them, so supply the official files yourself:

  HumanEval: data/HumanEval.jsonl.gz from the openai/human-eval repository
             (fields task_id / prompt / canonical_solution)
  MBPP:      mbpp.jsonl from the google-research/google-research mbpp
             directory (fields task_id / text / code)

Usage:
  python scripts/prepare_corpora.py humaneval /path/to/HumanEval.jsonl.gz
  python scripts/prepare_corpora.py mbpp /path/to/mbpp.jsonl

Records land in tests/data/ where tests/test_acceptance.py picks them up
(override the directory with --out-dir or DEREP_CORPUS_DIR).
"""

from __future__ import annotations

import argparse
import gzip
import json
import sys
from pathlib import Path

OUT_NAMES = {
    "humaneval": "humaneval_python_solutions.jsonl",
    "mbpp": "mbpp_solutions.jsonl",
}


def read_jsonl(path: Path):
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rt", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def convert_humaneval(row: dict) -> dict:
    return {
        "id": str(row["task_id"]),
        "language": "python",
        "code": row["canonical_solution"],
        "prompt": row.get("prompt", ""),
    }


def convert_mbpp(row: dict) -> dict:
    return {
        "id": f"mbpp/{row['task_id']}",
        "language": "python",
        "code": row["code"],
        "prompt": row.get("text", ""),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("corpus", choices=("humaneval", "mbpp"))
    parser.add_argument("source", type=Path, help="official benchmark file")
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path(__file__).resolve().parent.parent / "tests" / "data",
    )
    args = parser.parse_args()

    convert = convert_humaneval if args.corpus == "humaneval" else convert_mbpp
    args.out_dir.mkdir(parents=True, exist_ok=True)
    out_path = args.out_dir / OUT_NAMES[args.corpus]
    count = 0
    with open(out_path, "w", encoding="utf-8") as fh:
        for row in read_jsonl(args.source):
            fh.write(json.dumps(convert(row), ensure_ascii=False) + "\n")
            count += 1
    print(f"wrote {count} records to {out_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
