"""Python bindings for the iebench extraction-scoring harness."""

from ._core import (
    ConfigError,
    DocumentScores,
    Error,
    IoError,
    MatchConfig,
    __version__,
    edit_distance,
    f1,
    lev_ratio,
    read_journal,
    round_half_even,
    run_cli,
    score_tokens,
    similarity_matrix,
)

__all__ = [
    "ConfigError",
    "DocumentScores",
    "Error",
    "IoError",
    "MatchConfig",
    "__version__",
    "edit_distance",
    "f1",
    "lev_ratio",
    "read_journal",
    "round_half_even",
    "run_cli",
    "score_tokens",
    "similarity_matrix",
]
