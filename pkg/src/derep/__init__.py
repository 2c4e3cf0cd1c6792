"""derep: measure, detect, classify, and prune repetition in generated code."""

from .config import Config, DEFAULT_CONFIG
from .detection import (
    DetectionResult,
    ExtentKind,
    Fidelity,
    Granularity,
    PatternKind,
    RepetitionUnit,
    Termination,
    classify_extent,
    detect,
    detect_block,
    detect_char,
    detect_statement,
    extract_char_units,
    find_all_repeats,
    identify_block_pattern,
)
from .harness import (
    CorpusReport,
    RunOptions,
    SnippetRecord,
    parse_record,
    run_detect,
    run_metrics,
    run_repair,
    run_stream,
)
from .lexing import (
    CodeSnippet,
    LanguageProfile,
    LineRecord,
    LineShape,
    PROFILES,
    Token,
    classify_line_shape,
    get_profile,
    split_lines,
    tokenize_line,
)
from .metrics import (
    MetricsReport,
    compute_report,
    line_similarity,
    rep_line,
    rep_n,
    sim_line,
    token_edit_distance,
)
from .repair import RepairFragment, RepairResult, repair, repair_once
from .similarity import (
    TfIdfContext,
    TfIdfVector,
    cosine,
    is_similar,
    is_truncated_continuation,
    vectorize,
)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "DEFAULT_CONFIG",
    "CodeSnippet",
    "CorpusReport",
    "DetectionResult",
    "ExtentKind",
    "Fidelity",
    "Granularity",
    "LanguageProfile",
    "LineRecord",
    "LineShape",
    "MetricsReport",
    "PROFILES",
    "PatternKind",
    "RepairFragment",
    "RepairResult",
    "RepetitionUnit",
    "RunOptions",
    "SnippetRecord",
    "Termination",
    "TfIdfContext",
    "TfIdfVector",
    "Token",
    "classify_extent",
    "classify_line_shape",
    "compute_report",
    "cosine",
    "detect",
    "detect_block",
    "detect_char",
    "detect_statement",
    "extract_char_units",
    "find_all_repeats",
    "get_profile",
    "identify_block_pattern",
    "is_similar",
    "is_truncated_continuation",
    "line_similarity",
    "parse_record",
    "rep_line",
    "rep_n",
    "repair",
    "repair_once",
    "run_detect",
    "run_metrics",
    "run_repair",
    "run_stream",
    "sim_line",
    "split_lines",
    "token_edit_distance",
    "tokenize_line",
    "vectorize",
]
