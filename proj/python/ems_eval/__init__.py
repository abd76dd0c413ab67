"""Deterministic core of the EMS long-form answer evaluator.

The compiled extension exposes the pieces that need no LLM endpoint:
tokenization, heuristic saliency-point extraction, lexical matching, the
metric algebra, ROUGE/BLEU baselines and the perturbation harness. The
LLM-backed extractor/matcher/scorer and the report tooling live in the
`ems` command-line binary.
"""

from ._ems import (
    EmsError,
    bleu,
    corrupt_numbers,
    delete_count,
    ems_f1,
    ems_metrics,
    evaluate_pair,
    extract_points,
    is_numeric_token,
    lcs_length,
    load_dataset,
    map_scores_to_answer,
    match_points,
    perturb_points,
    rouge,
    round2,
    split_points,
    token_overlap_score,
    tokenize,
)

__all__ = [
    "EmsError",
    "bleu",
    "corrupt_numbers",
    "delete_count",
    "ems_f1",
    "ems_metrics",
    "evaluate_pair",
    "extract_points",
    "is_numeric_token",
    "lcs_length",
    "load_dataset",
    "map_scores_to_answer",
    "match_points",
    "perturb_points",
    "rouge",
    "round2",
    "split_points",
    "token_overlap_score",
    "tokenize",
]

__version__ = "0.1.0"
