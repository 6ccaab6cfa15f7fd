"""Selection reports, savings accounting and repetition aggregation.

The serialized forms here are the package's one output contract: the CLI
prints them, the service returns them, and golden tests pin them byte for
byte.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .backends import Dataset, TraceTable
from .canonical import canonical_json
from .core import ModelPickError, ModelPool


class ReportError(ModelPickError):
    """Malformed report text or inconsistent report inputs."""


@dataclass(frozen=True)
class RankEntry:
    """One ranking row: the arm plus everything shown on a leaderboard."""

    arm: int
    id: str
    estimated_value: float
    accuracy: float
    pulls: int
    size_mb: float
    complexity_mmac: float

    def as_dict(self) -> dict:
        return {
            "arm": self.arm,
            "id": self.id,
            "estimated_value": float(self.estimated_value),
            "accuracy": float(self.accuracy),
            "pulls": self.pulls,
            "size_mb": float(self.size_mb),
            "complexity_mmac": float(self.complexity_mmac),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RankEntry":
        return cls(
            arm=int(d["arm"]),
            id=str(d["id"]),
            estimated_value=float(d["estimated_value"]),
            accuracy=float(d["accuracy"]),
            pulls=int(d["pulls"]),
            size_mb=float(d["size_mb"]),
            complexity_mmac=float(d["complexity_mmac"]),
        )


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of one selection run (bandit, brute force or benchmark)."""

    method: str  # "bandit" | "brute_force" | "benchmark"
    config: dict
    ranking: tuple[RankEntry, ...]
    pulls_total: int
    eval_savings: float
    compute_savings_mmac: float

    def __post_init__(self):
        if self.method not in ("bandit", "brute_force", "benchmark"):
            raise ReportError(f"unknown method tag {self.method!r}")
        if self.pulls_total != sum(e.pulls for e in self.ranking):
            raise ReportError("pulls_total must equal the sum of per-arm pulls")
        arms = [e.arm for e in self.ranking]
        if sorted(arms) != list(range(len(arms))):
            raise ReportError("ranking must be a permutation of the pool's arms")
        for name in ("eval_savings", "compute_savings_mmac"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ReportError(f"{name} {v} outside [0, 1]")

    @property
    def top(self) -> RankEntry:
        return self.ranking[0]

    def pulls_per_arm(self) -> list[int]:
        by_arm = sorted(self.ranking, key=lambda e: e.arm)
        return [e.pulls for e in by_arm]

    def as_dict(self) -> dict:
        return {
            "kind": "selection",
            "method": self.method,
            "config": self.config,
            "ranking": [e.as_dict() for e in self.ranking],
            "pulls_total": self.pulls_total,
            "eval_savings": float(self.eval_savings),
            "compute_savings_mmac": float(self.compute_savings_mmac),
        }


@dataclass(frozen=True)
class ArmFrequency:
    arm: int
    id: str
    frequency: float

    def as_dict(self) -> dict:
        return {"arm": self.arm, "id": self.id, "frequency": float(self.frequency)}


@dataclass(frozen=True)
class AggregateReport:
    """Cross-repetition view: who wins how often, and what the winner costs."""

    method: str
    config: dict
    repetitions: int
    selection_frequency: tuple[ArmFrequency, ...]
    top_arm_mean_accuracy: float
    top_arm_mean_size_mb: float
    top_arm_mean_complexity_mmac: float
    mean_pulls_total: float
    mean_eval_savings: float
    mean_compute_savings_mmac: float

    def __post_init__(self):
        if self.repetitions < 1:
            raise ReportError("repetitions must be >= 1")
        total = sum(f.frequency for f in self.selection_frequency)
        if abs(total - 1.0) > 1e-9:
            raise ReportError(f"selection frequencies sum to {total}, expected 1")

    def frequency_of(self, model_id: str) -> float:
        for f in self.selection_frequency:
            if f.id == model_id:
                return f.frequency
        return 0.0

    def as_dict(self) -> dict:
        return {
            "kind": "aggregate",
            "method": self.method,
            "config": self.config,
            "repetitions": self.repetitions,
            "selection_frequency": [f.as_dict() for f in self.selection_frequency],
            "top_arm_mean_accuracy": float(self.top_arm_mean_accuracy),
            "top_arm_mean_size_mb": float(self.top_arm_mean_size_mb),
            "top_arm_mean_complexity_mmac": float(self.top_arm_mean_complexity_mmac),
            "mean_pulls_total": float(self.mean_pulls_total),
            "mean_eval_savings": float(self.mean_eval_savings),
            "mean_compute_savings_mmac": float(self.mean_compute_savings_mmac),
        }


def compute_savings(
    pulls_per_arm: list[int] | np.ndarray, pool: ModelPool, n_samples: int
) -> tuple[float, float]:
    """Fractions of evaluations / MMAC-weighted evaluations avoided vs brute force."""
    if n_samples < 1:
        raise ReportError("n_samples must be >= 1")
    pulls = np.asarray(pulls_per_arm, dtype=np.int64)
    if pulls.shape != (len(pool),):
        raise ReportError("pulls_per_arm length disagrees with pool size")
    k = len(pool)
    total = int(pulls.sum())
    if total > k * n_samples:
        raise ReportError("pull counts exceed pool x dataset")
    eval_savings = 1.0 - total / (k * n_samples)
    complexities = np.array([c.complexity_mmac for c in pool])
    # same elementwise products and summation order on both sides, so a full
    # sweep cancels to exactly 0 savings
    spent = float(np.sum(pulls * complexities))
    full = float(np.sum(n_samples * complexities))
    compute_savings_mmac = 1.0 - spent / full
    return eval_savings, compute_savings_mmac


def aggregate(
    reports: list[SelectionReport],
    trace: TraceTable,
    dataset: Dataset,
    config: dict | None = None,
) -> AggregateReport:
    """Fold per-repetition reports into selection frequencies and winner means.

    Winner accuracy is the exact trace accuracy of each run's top arm, not
    the run's own estimate.
    """
    if not reports:
        raise ReportError("no reports to aggregate")
    ids0 = sorted(e.id for e in reports[0].ranking)
    for r in reports[1:]:
        if sorted(e.id for e in r.ranking) != ids0:
            raise ReportError("reports cover different pools")
    r_count = len(reports)
    wins: dict[int, int] = {}
    top_by_arm: dict[int, RankEntry] = {}
    acc_sum = size_sum = cplx_sum = 0.0
    pulls_sum = eval_sum = compute_sum = 0.0
    exact_cache: dict[str, float] = {}
    for rep in reports:
        top = rep.top
        wins[top.arm] = wins.get(top.arm, 0) + 1
        top_by_arm[top.arm] = top
        if top.id not in exact_cache:
            exact_cache[top.id] = trace.accuracy_of(top.id, dataset)
        acc_sum += exact_cache[top.id]
        size_sum += top.size_mb
        cplx_sum += top.complexity_mmac
        pulls_sum += rep.pulls_total
        eval_sum += rep.eval_savings
        compute_sum += rep.compute_savings_mmac
    freqs = tuple(
        ArmFrequency(arm=arm, id=top_by_arm[arm].id, frequency=wins[arm] / r_count)
        for arm in sorted(wins, key=lambda a: (-wins[a], a))
    )
    if config is None:
        # keep only the settings every repetition shares (per-rep seeds differ)
        config = {
            k: v
            for k, v in reports[0].config.items()
            if all(r.config.get(k) == v for r in reports)
        }
    return AggregateReport(
        method=reports[0].method,
        config=config,
        repetitions=r_count,
        selection_frequency=freqs,
        top_arm_mean_accuracy=acc_sum / r_count,
        top_arm_mean_size_mb=size_sum / r_count,
        top_arm_mean_complexity_mmac=cplx_sum / r_count,
        mean_pulls_total=pulls_sum / r_count,
        mean_eval_savings=eval_sum / r_count,
        mean_compute_savings_mmac=compute_sum / r_count,
    )


def serialize_report(report: SelectionReport | AggregateReport) -> str:
    """Canonical report text: sorted keys, 9-significant-digit reals."""
    return canonical_json(report.as_dict())


def deserialize_report(text: str) -> SelectionReport | AggregateReport:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ReportError(f"malformed report text: {exc}") from exc
    if not isinstance(raw, dict):
        raise ReportError("report text must hold an object")
    kind = raw.get("kind")
    try:
        if kind == "selection":
            return SelectionReport(
                method=str(raw["method"]),
                config=dict(raw["config"]),
                ranking=tuple(RankEntry.from_dict(e) for e in raw["ranking"]),
                pulls_total=int(raw["pulls_total"]),
                eval_savings=float(raw["eval_savings"]),
                compute_savings_mmac=float(raw["compute_savings_mmac"]),
            )
        if kind == "aggregate":
            return AggregateReport(
                method=str(raw["method"]),
                config=dict(raw["config"]),
                repetitions=int(raw["repetitions"]),
                selection_frequency=tuple(
                    ArmFrequency(arm=int(f["arm"]), id=str(f["id"]), frequency=float(f["frequency"]))
                    for f in raw["selection_frequency"]
                ),
                top_arm_mean_accuracy=float(raw["top_arm_mean_accuracy"]),
                top_arm_mean_size_mb=float(raw["top_arm_mean_size_mb"]),
                top_arm_mean_complexity_mmac=float(raw["top_arm_mean_complexity_mmac"]),
                mean_pulls_total=float(raw["mean_pulls_total"]),
                mean_eval_savings=float(raw["mean_eval_savings"]),
                mean_compute_savings_mmac=float(raw["mean_compute_savings_mmac"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ReportError(f"report text missing or malformed field: {exc}") from exc
    raise ReportError(f"unknown report kind {kind!r}")
