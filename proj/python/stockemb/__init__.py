"""Stock embeddings from daily-return co-movement.

Thin wrapper around the compiled core: train context-prediction embeddings
where a single weight matrix is both the context lookup and the output
projection,
then score asset similarity, recover sector labels, and evaluate
least-similar hedges out-of-time.
"""

from ._core import (
    FormatError,
    NumericError,
    ParseError,
    UndefinedSimilarity,
    ValidationError,
    analogy,
    classify,
    context_sets,
    cooccurrence,
    cosine,
    hedge_experiment,
    load_returns,
    make_fixture,
    nearest,
    run_cli,
    score_matrix,
    significance,
    similarity_edges,
    smote,
    split_point,
    train,
)

__all__ = [
    "FormatError",
    "NumericError",
    "ParseError",
    "UndefinedSimilarity",
    "ValidationError",
    "analogy",
    "classify",
    "context_sets",
    "cooccurrence",
    "cosine",
    "hedge_experiment",
    "load_returns",
    "make_fixture",
    "nearest",
    "run_cli",
    "score_matrix",
    "significance",
    "similarity_edges",
    "smote",
    "split_point",
    "train",
]
