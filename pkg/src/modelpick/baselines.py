"""Comparison selectors: benchmark-table ranking and exhaustive brute force."""
from __future__ import annotations

import numpy as np

from .backends import Dataset, EvaluationBackend
from .core import MetricWeights, ModelPool, StaticScores, normalize_static
from .engine import static_terms
from .reporting import RankEntry, SelectionReport, compute_savings


def _rank(values: np.ndarray) -> np.ndarray:
    return np.argsort(-values, kind="stable")


def benchmark_select(
    pool: ModelPool, scores: StaticScores, weights: MetricWeights
) -> SelectionReport:
    """Rank by recorded benchmark accuracy; zero target-data evaluations.

    With no pulls at all, both savings fractions are exactly 1 for any
    dataset size.
    """
    bench = np.array([c.benchmark_accuracy for c in pool])
    values = weights.accuracy * bench + static_terms(scores, weights)
    order = _rank(values)
    ranking = tuple(
        RankEntry(
            arm=int(a),
            id=pool[int(a)].id,
            estimated_value=float(values[a]),
            accuracy=float(bench[a]),
            pulls=0,
            size_mb=pool[int(a)].size_mb,
            complexity_mmac=pool[int(a)].complexity_mmac,
        )
        for a in order
    )
    return SelectionReport(
        method="benchmark",
        config={"weights": weights.as_dict()},
        ranking=ranking,
        pulls_total=0,
        eval_savings=1.0,
        compute_savings_mmac=1.0,
    )


def brute_force(
    pool: ModelPool,
    backend: EvaluationBackend,
    weights: MetricWeights,
    dataset: Dataset | None = None,
    scores: StaticScores | None = None,
) -> SelectionReport:
    """Evaluate every arm on every sample and rank by exact composite value."""
    dataset = dataset if dataset is not None else backend.dataset
    scores = scores if scores is not None else normalize_static(pool)
    k, n_samples = len(pool), len(dataset)
    accuracies = np.empty(k)
    dense = backend.dense_bits()
    if dense is not None:
        accuracies[:] = dense.astype(np.float64).mean(axis=1)
    else:
        for arm in range(k):
            results = backend.evaluate_many(arm, dataset.sample_ids)
            accuracies[arm] = sum(r.correct for r in results) / n_samples
    values = weights.accuracy * accuracies + static_terms(scores, weights)
    order = _rank(values)
    ranking = tuple(
        RankEntry(
            arm=int(a),
            id=pool[int(a)].id,
            estimated_value=float(values[a]),
            accuracy=float(accuracies[a]),
            pulls=n_samples,
            size_mb=pool[int(a)].size_mb,
            complexity_mmac=pool[int(a)].complexity_mmac,
        )
        for a in order
    )
    eval_savings, compute_savings_mmac = compute_savings(
        np.full(k, n_samples, dtype=np.int64), pool, n_samples
    )
    return SelectionReport(
        method="brute_force",
        config={"weights": weights.as_dict()},
        ranking=ranking,
        pulls_total=k * n_samples,
        eval_savings=eval_savings,
        compute_savings_mmac=compute_savings_mmac,
    )
