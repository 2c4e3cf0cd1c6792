"""Runtime configuration: every detection/repair threshold with its default.

All knobs are plain dataclass fields so they can be supplied from CLI flags
or a JSON config file (``DEREP_CONFIG``) and echoed into report headers.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

DEFAULT_EOS_MARKERS: tuple[str, ...] = ("<|endoftext|>", "<|eot_id|>", "</s>")
DEFAULT_N_VALUES: tuple[int, ...] = (2, 3, 4)


@dataclass(frozen=True)
class Config:
    """Thresholds for detection, similarity, and repair."""

    # character level
    overlength: int = 150              # line length that flags the last line
    eos_markers: tuple[str, ...] = DEFAULT_EOS_MARKERS
    min_char_repeats: int = 3          # full periods required off the fast path
    min_char_region: int = 8           # shortest periodic region worth flagging
    # statement / block level
    cosine_threshold: float = 0.65     # cosine similarity cutoff
    idf_weight: float = 0.0            # idf exponent in the similarity kernel;
                                       # 0 = plain term-frequency cosine
    min_empty_repeats: int = 3         # consecutive empty lines that count
    l_min: int = 2                     # smallest block length searched
    l_max_ratio: float = 2.0 / 3.0     # largest block length, as fraction of n
    max_block_lines: int = 2000        # skip block search beyond this size
    prefix_min_tokens: int = 1         # tokens needed for the prefix heuristic
    # metrics
    editsim_threshold: float = 0.8     # token edit-distance similarity cutoff
    n_values: tuple[int, ...] = DEFAULT_N_VALUES
    # repair
    max_passes: int = 8

    def replace(self, **changes: Any) -> "Config":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        out["eos_markers"] = list(self.eos_markers)
        out["n_values"] = list(self.n_values)
        return out

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "Config":
        """Build a config from a plain mapping, ignoring unknown keys."""
        known = {f.name for f in dataclasses.fields(cls)}
        kwargs: dict[str, Any] = {}
        for key, value in mapping.items():
            if key not in known:
                continue
            if key in ("eos_markers", "n_values"):
                value = tuple(value)
            kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"config file {path} must contain a JSON object")
        return cls.from_mapping(data)


DEFAULT_CONFIG = Config()
