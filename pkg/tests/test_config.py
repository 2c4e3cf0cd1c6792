from __future__ import annotations

import json

import pytest

from derep.config import Config, DEFAULT_CONFIG
from derep.detection import Granularity, PatternKind


def test_defaults():
    cfg = Config()
    assert cfg.overlength == 150
    assert cfg.cosine_threshold == 0.65
    assert cfg.editsim_threshold == 0.8
    assert cfg.l_min == 2
    assert cfg.l_max_ratio == pytest.approx(2 / 3)
    assert cfg.min_char_repeats == 3
    assert cfg.max_passes == 8
    assert "<|endoftext|>" in cfg.eos_markers
    assert cfg.n_values == (2, 3, 4)


def test_replace_is_functional():
    cfg = Config().replace(overlength=99)
    assert cfg.overlength == 99
    assert DEFAULT_CONFIG.overlength == 150


def test_from_mapping_ignores_unknown_keys():
    cfg = Config.from_mapping({"overlength": 42, "who_knows": 1, "n_values": [2, 3]})
    assert cfg.overlength == 42
    assert cfg.n_values == (2, 3)


def test_from_file_roundtrip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"cosine_threshold": 0.7, "eos_markers": ["<X>"]}))
    cfg = Config.from_file(path)
    assert cfg.cosine_threshold == 0.7
    assert cfg.eos_markers == ("<X>",)


def test_from_file_rejects_non_object(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text("[1, 2]")
    with pytest.raises(ValueError):
        Config.from_file(path)


def test_as_dict_is_json_serializable():
    json.dumps(Config().as_dict())


def test_pattern_taxonomy_has_twenty_members():
    assert len(PatternKind) == 20
    by_granularity = {g: 0 for g in Granularity}
    for kind in PatternKind:
        by_granularity[kind.granularity] += 1
    assert by_granularity[Granularity.CHARACTER] == 7
    assert by_granularity[Granularity.STATEMENT] == 7
    assert by_granularity[Granularity.BLOCK] == 6
