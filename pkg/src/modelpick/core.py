"""Domain types: candidate pool, trade-off weights, experiment configuration.

Candidates are the bandit's arms; pool order is the canonical arm index order
and the tie-break order everywhere downstream.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .canonical import canonical_json

STRATEGIES = ("epsilon_greedy", "ucb", "thompson")

POOL_CSV_HEADER = ["id", "benchmark_accuracy", "size_mb", "complexity_mmac", "source"]


class ModelPickError(Exception):
    """Base class for all errors raised by this package."""


class PoolError(ModelPickError):
    """Malformed or invalid pool file / candidate record."""


class ConfigError(ModelPickError):
    """Invalid experiment configuration; `field` names the offender."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass(frozen=True)
class ModelCandidate:
    """One selectable model: identity plus its static metrics."""

    id: str
    benchmark_accuracy: float
    size_mb: float
    complexity_mmac: float
    source: str = ""

    def __post_init__(self):
        if not self.id:
            raise PoolError("candidate id must be nonempty")
        if not 0.0 <= self.benchmark_accuracy <= 1.0:
            raise PoolError(
                f"candidate {self.id!r}: benchmark_accuracy {self.benchmark_accuracy} outside [0, 1]"
            )
        if not self.size_mb > 0:
            raise PoolError(f"candidate {self.id!r}: size_mb {self.size_mb} must be positive")
        if not self.complexity_mmac > 0:
            raise PoolError(
                f"candidate {self.id!r}: complexity_mmac {self.complexity_mmac} must be positive"
            )


@dataclass(frozen=True)
class ModelPool:
    """Ordered, immutable collection of candidates; list order is arm order."""

    candidates: tuple[ModelCandidate, ...]

    def __post_init__(self):
        if not self.candidates:
            raise PoolError("pool must contain at least one candidate")
        seen = set()
        for cand in self.candidates:
            if cand.id in seen:
                raise PoolError(f"duplicate candidate id {cand.id!r}")
            seen.add(cand.id)

    def __len__(self) -> int:
        return len(self.candidates)

    def __getitem__(self, arm: int) -> ModelCandidate:
        return self.candidates[arm]

    def __iter__(self):
        return iter(self.candidates)

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.candidates)

    def index_of(self, model_id: str) -> int:
        for i, cand in enumerate(self.candidates):
            if cand.id == model_id:
                return i
        raise PoolError(f"unknown model id {model_id!r}")


@dataclass(frozen=True)
class MetricWeights:
    """Reward weights for accuracy, size and complexity.

    Each component lives in [0, 1]; the sum is deliberately not renormalized
    (averaged proposals may legitimately sum above 1). At least one component
    must be positive or the reward is identically zero.
    """

    accuracy: float
    size: float
    complexity: float

    def __post_init__(self):
        for name in ("accuracy", "size", "complexity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError("weights", f"{name} weight {v} outside [0, 1]")
        if self.accuracy == 0.0 and self.size == 0.0 and self.complexity == 0.0:
            raise ConfigError("weights", "at least one weight must be positive")

    def as_dict(self) -> dict[str, float]:
        return {
            "accuracy": float(self.accuracy),
            "size": float(self.size),
            "complexity": float(self.complexity),
        }


@dataclass(frozen=True)
class StaticScores:
    """Per-arm normalized size/complexity scores in [0, 1]; smaller raw is better."""

    size_scores: tuple[float, ...]
    complexity_scores: tuple[float, ...]

    def __post_init__(self):
        if len(self.size_scores) != len(self.complexity_scores):
            raise ConfigError("scores", "size and complexity score lengths differ")

    def __len__(self) -> int:
        return len(self.size_scores)

    def of(self, arm: int) -> tuple[float, float]:
        return self.size_scores[arm], self.complexity_scores[arm]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment run needs besides the pool and the backend."""

    strategy: str
    budget: int
    weights: MetricWeights
    seed: int = 0
    epsilon: float = 0.1
    repetitions: int = 1

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError("strategy", f"{self.strategy!r} not one of {STRATEGIES}")
        if not isinstance(self.budget, int) or self.budget < 0:
            raise ConfigError("budget", f"{self.budget!r} must be a nonnegative integer")
        if not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon", f"{self.epsilon} outside [0, 1]")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", f"{self.seed!r} must fit in an unsigned 64-bit integer")
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise ConfigError("repetitions", f"{self.repetitions!r} must be a positive integer")
        if not isinstance(self.weights, MetricWeights):
            raise ConfigError("weights", "must be MetricWeights")

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "budget": self.budget,
            "weights": self.weights.as_dict(),
            "seed": self.seed,
            "epsilon": float(self.epsilon),
            "repetitions": self.repetitions,
        }


def _candidate_from_fields(fields: dict, where: str) -> ModelCandidate:
    required = {"id", "benchmark_accuracy", "size_mb", "complexity_mmac"}
    missing = required - set(fields)
    if missing:
        raise PoolError(f"{where}: missing field(s) {sorted(missing)}")
    unknown = set(fields) - required - {"source"}
    if unknown:
        raise PoolError(f"{where}: unknown field(s) {sorted(unknown)}")
    try:
        return ModelCandidate(
            id=str(fields["id"]),
            benchmark_accuracy=float(fields["benchmark_accuracy"]),
            size_mb=float(fields["size_mb"]),
            complexity_mmac=float(fields["complexity_mmac"]),
            source=str(fields.get("source") or ""),
        )
    except (TypeError, ValueError) as exc:
        raise PoolError(f"{where}: {exc}") from exc


def load_pool(text: str) -> ModelPool:
    """Parse pool file contents (JSON array, or CSV with the canonical header)."""
    stripped = text.lstrip()
    if not stripped:
        raise PoolError("empty pool file")
    if stripped.startswith("["):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise PoolError(f"malformed pool JSON: {exc}") from exc
        if not isinstance(raw, list):
            raise PoolError("pool JSON must be an array of candidate objects")
        candidates = []
        for i, item in enumerate(raw):
            if not isinstance(item, dict):
                raise PoolError(f"record {i}: not an object")
            candidates.append(_candidate_from_fields(item, f"record {i}"))
        return ModelPool(tuple(candidates))
    return _load_pool_csv(text)


def _load_pool_csv(text: str) -> ModelPool:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise PoolError("empty pool file") from None
    if [h.strip() for h in header] != POOL_CSV_HEADER:
        raise PoolError(
            f"pool CSV header must be {','.join(POOL_CSV_HEADER)!r}, got {','.join(header)!r}"
        )
    candidates = []
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 5:
            raise PoolError(f"line {lineno}: expected 5 fields, got {len(row)}")
        fields = dict(zip(POOL_CSV_HEADER, row))
        candidates.append(_candidate_from_fields(fields, f"line {lineno}"))
    return ModelPool(tuple(candidates))


def save_pool(pool: ModelPool) -> str:
    """Serialize a pool to its canonical JSON form (load_pool round-trips it)."""
    return canonical_json(
        [
            {
                "id": c.id,
                "benchmark_accuracy": float(c.benchmark_accuracy),
                "size_mb": float(c.size_mb),
                "complexity_mmac": float(c.complexity_mmac),
                "source": c.source,
            }
            for c in pool
        ]
    )


def _min_max_inverted(values: list[float]) -> tuple[float, ...]:
    lo, hi = min(values), max(values)
    if hi == lo:
        # non-discriminative metric: nobody gets penalized
        return tuple(1.0 for _ in values)
    span = hi - lo
    return tuple((hi - v) / span for v in values)


def normalize_static(pool: ModelPool) -> StaticScores:
    """Min-max normalize size and complexity over the pool, inverted so smaller is better."""
    return StaticScores(
        size_scores=_min_max_inverted([c.size_mb for c in pool]),
        complexity_scores=_min_max_inverted([c.complexity_mmac for c in pool]),
    )
