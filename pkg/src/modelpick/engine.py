"""Budgeted sequential selection over model arms.

Rewards combine a Bernoulli correctness bit with the arm's static size and
complexity scores. Three strategies are offered: epsilon-greedy, UCB1 (bonus
scaled by the accuracy weight, since only the accuracy term is uncertain) and
Thompson sampling over Beta posteriors, with the static terms added outside
the posterior.

Two execution paths produce bit-identical runs: a compiled loop over a dense
bit matrix (trace/synthetic backends) and a per-pull Python loop for backends
that cannot be precomputed (remote evaluators). Both consume the PCG64 stream
in exactly the same order, which the test suite pins.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numba import njit

from .backends import Dataset, EvaluationBackend, TraceTable
from .core import ExperimentConfig, MetricWeights, ModelPool, StaticScores, normalize_static
from .reporting import (
    AggregateReport,
    RankEntry,
    ReportError,
    SelectionReport,
    aggregate,
    compute_savings,
)

PRIOR_ALPHA = 1.0
PRIOR_BETA = 1.0

_STRATEGY_CODES = {"epsilon_greedy": 0, "ucb": 1, "thompson": 2}


@dataclass(frozen=True)
class ArmState:
    """Read-only view of one arm's bookkeeping."""

    pulls: int
    successes: int
    alpha: float
    beta: float
    remaining: tuple[str, ...]
    saturated: bool


class BanditState:
    """Mutable per-experiment state: counts, posteriors, sample permutations."""

    def __init__(self, pool: ModelPool, dataset: Dataset, seed: int):
        k, n = len(pool), len(dataset)
        self.pool = pool
        self.dataset = dataset
        self.rng = np.random.Generator(np.random.PCG64(seed))
        # one seeded without-replacement permutation per arm, consumed front to back
        self.perms = np.empty((k, n), dtype=np.int64)
        for i in range(k):
            self.perms[i] = self.rng.permutation(n)
        self.ptr = np.zeros(k, dtype=np.int64)
        self.n = np.zeros(k, dtype=np.int64)
        self.s = np.zeros(k, dtype=np.int64)

    @property
    def arms(self) -> int:
        return len(self.pool)

    @property
    def total_pulls(self) -> int:
        return int(self.n.sum())

    def alphas(self) -> np.ndarray:
        return PRIOR_ALPHA + self.s.astype(np.float64)

    def betas(self) -> np.ndarray:
        return PRIOR_BETA + (self.n - self.s).astype(np.float64)

    def saturated_mask(self) -> np.ndarray:
        return self.ptr >= len(self.dataset)

    def active_indices(self) -> np.ndarray:
        return np.flatnonzero(self.ptr < len(self.dataset))

    def accuracy_estimates(self) -> np.ndarray:
        """Per-arm p-hat: empirical mean, or the prior mean before any pull."""
        est = np.full(self.arms, PRIOR_ALPHA / (PRIOR_ALPHA + PRIOR_BETA))
        pulled = self.n > 0
        est[pulled] = self.s[pulled] / self.n[pulled]
        return est

    def next_sample(self, arm: int) -> str:
        j = self.perms[arm, self.ptr[arm]]
        self.ptr[arm] += 1
        return self.dataset.sample_ids[j]

    def record(self, arm: int, correct: int) -> None:
        self.n[arm] += 1
        self.s[arm] += correct

    def arm_state(self, arm: int) -> ArmState:
        rest = self.perms[arm, self.ptr[arm] :]
        return ArmState(
            pulls=int(self.n[arm]),
            successes=int(self.s[arm]),
            alpha=PRIOR_ALPHA + float(self.s[arm]),
            beta=PRIOR_BETA + float(self.n[arm] - self.s[arm]),
            remaining=tuple(self.dataset.sample_ids[j] for j in rest),
            saturated=bool(self.ptr[arm] >= len(self.dataset)),
        )


def static_terms(scores: StaticScores, weights: MetricWeights) -> np.ndarray:
    """Weighted static contribution of every arm (constant over a run)."""
    return weights.size * np.asarray(scores.size_scores) + weights.complexity * np.asarray(
        scores.complexity_scores
    )


def composite_reward(
    correct: int, arm: int, scores: StaticScores, weights: MetricWeights
) -> float:
    """Weighted sum of the correctness bit and the arm's static scores."""
    ss, cs = scores.of(arm)
    return weights.accuracy * correct + weights.size * ss + weights.complexity * cs


def estimated_value(
    state: BanditState, arm: int, scores: StaticScores, weights: MetricWeights
) -> float:
    """Ranking statistic: composite reward with p-hat in place of the bit."""
    if state.n[arm] > 0:
        p_hat = float(state.s[arm] / state.n[arm])
    else:
        p_hat = PRIOR_ALPHA / (PRIOR_ALPHA + PRIOR_BETA)
    ss, cs = scores.of(arm)
    return weights.accuracy * p_hat + weights.size * ss + weights.complexity * cs


def estimated_values(
    state: BanditState, scores: StaticScores, weights: MetricWeights
) -> np.ndarray:
    return weights.accuracy * state.accuracy_estimates() + static_terms(scores, weights)


def _masked_argmax(values: np.ndarray, saturated: np.ndarray) -> int | None:
    if saturated.all():
        return None
    masked = np.where(saturated, -np.inf, values)
    return int(np.argmax(masked))


def select_epsilon_greedy(
    state: BanditState,
    scores: StaticScores,
    weights: MetricWeights,
    epsilon: float,
    rng: np.random.Generator | None = None,
) -> int | None:
    """Explore uniformly with probability epsilon, otherwise exploit; None when all saturated."""
    rng = rng if rng is not None else state.rng
    active = state.active_indices()
    if active.size == 0:
        return None
    # the coin is drawn unconditionally so both execution paths consume the
    # stream identically
    coin = rng.random()
    if coin < epsilon:
        u = rng.random()
        return int(active[int(u * active.size)])
    return _masked_argmax(estimated_values(state, scores, weights), state.saturated_mask())


def select_ucb(
    state: BanditState,
    scores: StaticScores,
    weights: MetricWeights,
    rng: np.random.Generator | None = None,
) -> int | None:
    """UCB1 with the exploration bonus scaled by the accuracy weight.

    Unpulled arms go first (lowest index); the static terms carry no
    uncertainty, so the bonus multiplies only the stochastic term's weight.
    """
    active = state.active_indices()
    if active.size == 0:
        return None
    unpulled = active[state.n[active] == 0]
    if unpulled.size > 0:
        return int(unpulled[0])
    t = state.total_pulls
    log_t = math.log(t)
    values = estimated_values(state, scores, weights) + weights.accuracy * np.sqrt(
        2.0 * log_t / state.n
    )
    return _masked_argmax(values, state.saturated_mask())


def select_thompson(
    state: BanditState,
    scores: StaticScores,
    weights: MetricWeights,
    rng: np.random.Generator | None = None,
) -> int | None:
    """Draw Beta posteriors and pick the best composite index among live arms."""
    rng = rng if rng is not None else state.rng
    saturated = state.saturated_mask()
    if saturated.all():
        return None
    # draw the full vector (saturated arms' draws are discarded) to keep the
    # stream aligned with the compiled path's per-arm scalar draws
    theta = rng.beta(state.alphas(), state.betas())
    values = weights.accuracy * theta + static_terms(scores, weights)
    return _masked_argmax(values, saturated)


@njit(cache=True)
def _dense_loop(
    gen,
    strategy,
    epsilon,
    w_acc,
    prior_alpha,
    prior_beta,
    static_term,
    bits,
    perms,
    ptr,
    n,
    s,
    max_steps,
):  # pragma: no cover - exercised via run_experiment
    k = n.shape[0]
    n_samples = perms.shape[1]
    n_active = 0
    for a in range(k):
        if ptr[a] < n_samples:
            n_active += 1
    steps = 0
    while steps < max_steps and n_active > 0:
        arm = -1
        if strategy == 0:
            coin = gen.random()
            if coin < epsilon:
                u = gen.random()
                target = int(u * n_active)
                count = 0
                for a in range(k):
                    if ptr[a] < n_samples:
                        if count == target:
                            arm = a
                            break
                        count += 1
            else:
                best = -np.inf
                for a in range(k):
                    if ptr[a] < n_samples:
                        if n[a] > 0:
                            p_hat = s[a] / n[a]
                        else:
                            p_hat = prior_alpha / (prior_alpha + prior_beta)
                        value = w_acc * p_hat + static_term[a]
                        if value > best:
                            best = value
                            arm = a
        elif strategy == 1:
            for a in range(k):
                if ptr[a] < n_samples and n[a] == 0:
                    arm = a
                    break
            if arm == -1:
                total = 0
                for a in range(k):
                    total += n[a]
                log_t = math.log(total)
                best = -np.inf
                for a in range(k):
                    if ptr[a] < n_samples:
                        value = (
                            w_acc * (s[a] / n[a])
                            + static_term[a]
                            + w_acc * math.sqrt(2.0 * log_t / n[a])
                        )
                        if value > best:
                            best = value
                            arm = a
        else:
            best = -np.inf
            for a in range(k):
                theta = gen.beta(prior_alpha + s[a], prior_beta + (n[a] - s[a]))
                if ptr[a] < n_samples:
                    value = w_acc * theta + static_term[a]
                    if value > best:
                        best = value
                        arm = a
        j = perms[arm, ptr[arm]]
        ptr[arm] += 1
        n[arm] += 1
        s[arm] += bits[arm, j]
        if ptr[arm] >= n_samples:
            n_active -= 1
        steps += 1
    return steps


_SELECTORS = {
    "epsilon_greedy": lambda state, scores, w, eps: select_epsilon_greedy(state, scores, w, eps),
    "ucb": lambda state, scores, w, eps: select_ucb(state, scores, w),
    "thompson": lambda state, scores, w, eps: select_thompson(state, scores, w),
}


def _ranking(
    state: BanditState, scores: StaticScores, weights: MetricWeights
) -> tuple[RankEntry, ...]:
    values = estimated_values(state, scores, weights)
    accuracies = state.accuracy_estimates()
    order = np.argsort(-values, kind="stable")  # ties fall back to pool order
    return tuple(
        RankEntry(
            arm=int(a),
            id=state.pool[int(a)].id,
            estimated_value=float(values[a]),
            accuracy=float(accuracies[a]),
            pulls=int(state.n[a]),
            size_mb=state.pool[int(a)].size_mb,
            complexity_mmac=state.pool[int(a)].complexity_mmac,
        )
        for a in order
    )


def run_experiment(
    config: ExperimentConfig,
    pool: ModelPool,
    backend: EvaluationBackend,
    dataset: Dataset | None = None,
    on_progress: Callable[[int], None] | None = None,
    progress_every: int | None = None,
    force_generic: bool = False,
) -> SelectionReport:
    """Run one budgeted experiment and rank the arms.

    Stops after `config.budget` pulls or when every arm has consumed its whole
    permutation, whichever comes first. Identical config and backend always
    produce an identical report.
    """
    dataset = dataset if dataset is not None else backend.dataset
    scores = normalize_static(pool)
    state = BanditState(pool, dataset, config.seed)
    term = static_terms(scores, weights=config.weights)

    chunk = progress_every if (progress_every and progress_every > 0) else config.budget
    dense = None if force_generic else backend.dense_bits()
    if dense is not None:
        done = 0
        while done < config.budget:
            step = _dense_loop(
                state.rng,
                _STRATEGY_CODES[config.strategy],
                float(config.epsilon),
                float(config.weights.accuracy),
                PRIOR_ALPHA,
                PRIOR_BETA,
                term,
                dense,
                state.perms,
                state.ptr,
                state.n,
                state.s,
                min(chunk, config.budget - done),
            )
            done += int(step)
            if on_progress is not None:
                on_progress(done)
            if step == 0:  # every arm saturated
                break
    else:
        select = _SELECTORS[config.strategy]
        done = 0
        while done < config.budget:
            arm = select(state, scores, config.weights, config.epsilon)
            if arm is None:
                break
            sample_id = state.next_sample(arm)
            result = backend.evaluate(arm, sample_id)
            state.record(arm, result.correct)
            done += 1
            if on_progress is not None and (done % chunk == 0 or done == config.budget):
                on_progress(done)

    eval_savings, compute_savings_mmac = compute_savings(state.n, pool, len(dataset))
    return SelectionReport(
        method="bandit",
        config=config.as_dict(),
        ranking=_ranking(state, scores, config.weights),
        pulls_total=state.total_pulls,
        eval_savings=eval_savings,
        compute_savings_mmac=compute_savings_mmac,
    )


def run_repetitions(
    config: ExperimentConfig,
    pool: ModelPool,
    backend: EvaluationBackend,
    table: TraceTable | None = None,
    dataset: Dataset | None = None,
    on_progress: Callable[[int], None] | None = None,
    on_report: Callable[[int, SelectionReport], None] | None = None,
    progress_every: int | None = None,
) -> SelectionReport | AggregateReport:
    """Run config.repetitions independent experiments (seed, seed+1, ...).

    A single repetition yields its SelectionReport; multiple repetitions are
    folded into an AggregateReport, which needs the full trace table for the
    winners' exact target accuracy.
    """
    dataset = dataset if dataset is not None else backend.dataset
    reports: list[SelectionReport] = []
    pulls_before = 0
    for i in range(config.repetitions):
        rep_config = ExperimentConfig(
            strategy=config.strategy,
            budget=config.budget,
            weights=config.weights,
            seed=config.seed + i,
            epsilon=config.epsilon,
            repetitions=1,
        )
        base = pulls_before

        def rep_progress(done: int, base=base) -> None:
            if on_progress is not None:
                on_progress(base + done)

        report = run_experiment(
            rep_config,
            pool,
            backend,
            dataset,
            on_progress=rep_progress if on_progress else None,
            progress_every=progress_every,
        )
        pulls_before += report.pulls_total
        reports.append(report)
        if on_report is not None:
            on_report(i, report)
    if config.repetitions == 1:
        return reports[0]
    if table is None:
        raise ReportError(
            "aggregating repetitions needs the full trace table for exact winner accuracy"
        )
    return aggregate(reports, table, dataset, config=config.as_dict())
