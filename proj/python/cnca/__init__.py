"""Centrality ranking with inductive graph embeddings (C++ core)."""

from ._core import (
    Checkpoint,
    CheckpointError,
    Graph,
    NumericError,
    ParameterError,
    ParseError,
    __version__,
    betweenness,
    build_targets,
    closeness,
    degree,
    generate,
    kendall_tau,
    predict,
    rank_of,
    run_cli,
    train,
)

__all__ = [
    "Checkpoint",
    "CheckpointError",
    "Graph",
    "NumericError",
    "ParameterError",
    "ParseError",
    "__version__",
    "betweenness",
    "build_targets",
    "closeness",
    "degree",
    "generate",
    "kendall_tau",
    "predict",
    "rank_of",
    "run_cli",
    "train",
]
