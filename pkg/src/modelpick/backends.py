"""Sources of per-(model, sample) correctness bits.

Three interchangeable backends feed the engine: a cached trace file, a
seeded synthetic simulator, and a remote evaluator speaking the HTTP wire
protocol. All of them price a pull at the pulled arm's raw complexity.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass
from typing import Sequence

import httpx
import numpy as np

from .core import ModelCandidate, ModelPickError, ModelPool, PoolError, load_pool

SIZE_MB_BOUNDS = (22.0, 2581.0)
COMPLEXITY_MMAC_BOUNDS = (229.0, 127750.0)

TRACE_CSV_HEADER = ["model_id", "sample_id", "correct"]


class TraceError(ModelPickError):
    """Malformed or contradictory trace file."""


class BackendError(ModelPickError):
    """Evaluation failed; aborts the experiment with the offending pair."""


@dataclass(frozen=True)
class Dataset:
    """Ordered unique sample ids of the target dataset."""

    sample_ids: tuple[str, ...]

    def __post_init__(self):
        if not self.sample_ids:
            raise TraceError("dataset must contain at least one sample")
        if len(set(self.sample_ids)) != len(self.sample_ids):
            raise TraceError("dataset sample ids must be unique")

    def __len__(self) -> int:
        return len(self.sample_ids)

    def __iter__(self):
        return iter(self.sample_ids)


@dataclass(frozen=True)
class PullResult:
    """Outcome of evaluating one arm on one sample."""

    arm: int
    sample_id: str
    correct: int
    cost_mmac: float


class TraceTable:
    """Map of (model_id, sample_id) -> correctness bit."""

    def __init__(self, bits: dict[tuple[str, str], int]):
        if not bits:
            raise TraceError("trace table is empty")
        self._bits = bits

    def __len__(self) -> int:
        return len(self._bits)

    def __contains__(self, pair: tuple[str, str]) -> bool:
        return pair in self._bits

    def lookup(self, model_id: str, sample_id: str) -> int | None:
        return self._bits.get((model_id, sample_id))

    def items(self):
        return self._bits.items()

    def accuracy_of(self, model_id: str, dataset: Dataset) -> float:
        """Exact accuracy of one model over the full dataset."""
        total = 0
        for sid in dataset:
            bit = self._bits.get((model_id, sid))
            if bit is None:
                raise TraceError(f"trace miss for (model {model_id!r}, sample {sid!r})")
            total += bit
        return total / len(dataset)

    def dense_bits(self, pool: ModelPool, dataset: Dataset) -> np.ndarray | None:
        """K x N bit matrix in pool/dataset order, or None if any pair is absent."""
        k, n = len(pool), len(dataset)
        out = np.empty((k, n), dtype=np.uint8)
        for i, cand in enumerate(pool):
            for j, sid in enumerate(dataset):
                bit = self._bits.get((cand.id, sid))
                if bit is None:
                    return None
                out[i, j] = bit
        return out


def load_trace(text: str) -> tuple[TraceTable, Dataset]:
    """Parse a trace CSV; dataset order is first appearance of each sample id."""
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise TraceError("empty trace file") from None
    if [h.strip() for h in header] != TRACE_CSV_HEADER:
        raise TraceError(
            f"trace header must be {','.join(TRACE_CSV_HEADER)!r}, got {','.join(header)!r}"
        )
    bits: dict[tuple[str, str], int] = {}
    sample_order: list[str] = []
    seen_samples = set()
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise TraceError(f"line {lineno}: expected 3 fields, got {len(row)}")
        model_id, sample_id, raw = row[0].strip(), row[1].strip(), row[2].strip()
        if raw not in ("0", "1"):
            raise TraceError(f"line {lineno}: correct must be 0 or 1, got {raw!r}")
        bit = int(raw)
        key = (model_id, sample_id)
        if key in bits and bits[key] != bit:
            raise TraceError(
                f"conflicting bits for (model {model_id!r}, sample {sample_id!r})"
            )
        bits[key] = bit
        if sample_id not in seen_samples:
            seen_samples.add(sample_id)
            sample_order.append(sample_id)
    if not bits:
        raise TraceError("trace file has no data rows")
    return TraceTable(bits), Dataset(tuple(sample_order))


def serialize_trace(table: TraceTable) -> str:
    """Canonical trace CSV: rows sorted by model_id then sample_id."""
    lines = [",".join(TRACE_CSV_HEADER)]
    for (model_id, sample_id), bit in sorted(table.items()):
        lines.append(f"{model_id},{sample_id},{bit}")
    return "\n".join(lines) + "\n"


def _hash_unit(seed: int, model_id: str, sample_id: str) -> float:
    """Deterministic uniform in [0, 1) from (seed, model, sample)."""
    msg = f"{seed}\x1f{model_id}\x1f{sample_id}".encode()
    digest = hashlib.blake2b(msg, digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def bernoulli_bit(seed: int, model_id: str, sample_id: str, p: float) -> int:
    """Replayable Bernoulli(p) draw keyed by (seed, model, sample)."""
    return 1 if _hash_unit(seed, model_id, sample_id) < p else 0


class EvaluationBackend:
    """Uniform pull interface; subclasses fill in `evaluate`."""

    pool: ModelPool
    dataset: Dataset

    def evaluate(self, arm: int, sample_id: str) -> PullResult:
        raise NotImplementedError

    def evaluate_many(self, arm: int, sample_ids: Sequence[str]) -> list[PullResult]:
        return [self.evaluate(arm, sid) for sid in sample_ids]

    def dense_bits(self) -> np.ndarray | None:
        """Full K x N bit matrix when precomputable, else None."""
        return None

    def _pull(self, arm: int, sample_id: str, bit: int) -> PullResult:
        return PullResult(
            arm=arm,
            sample_id=sample_id,
            correct=bit,
            cost_mmac=self.pool[arm].complexity_mmac,
        )


class TraceBackend(EvaluationBackend):
    """Serves bits from a loaded trace table; a missing pair aborts."""

    def __init__(self, pool: ModelPool, table: TraceTable, dataset: Dataset):
        self.pool = pool
        self.table = table
        self.dataset = dataset

    def evaluate(self, arm: int, sample_id: str) -> PullResult:
        model_id = self.pool[arm].id
        bit = self.table.lookup(model_id, sample_id)
        if bit is None:
            raise BackendError(f"trace miss for (model {model_id!r}, sample {sample_id!r})")
        return self._pull(arm, sample_id, bit)

    def dense_bits(self) -> np.ndarray | None:
        return self.table.dense_bits(self.pool, self.dataset)


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the synthetic simulator.

    `accuracies` plants each arm's true accuracy; leave it None to derive a
    size-correlated profile (bigger models score better, with noise) from the
    generated pool, which mirrors how repositories behave in practice.
    """

    n_samples: int
    seed: int
    accuracies: tuple[float, ...] | None = None
    n_arms: int | None = None

    def __post_init__(self):
        if self.n_samples < 1:
            raise TraceError("n_samples must be >= 1")
        if self.accuracies is None and self.n_arms is None:
            raise TraceError("either accuracies or n_arms is required")
        if self.accuracies is not None:
            for p in self.accuracies:
                if not 0.0 <= p <= 1.0:
                    raise TraceError(f"accuracy {p} outside [0, 1]")
            if self.n_arms is not None and self.n_arms != len(self.accuracies):
                raise TraceError("n_arms disagrees with len(accuracies)")

    @property
    def arms(self) -> int:
        return len(self.accuracies) if self.accuracies is not None else int(self.n_arms)


def _sample_ids(n: int) -> tuple[str, ...]:
    width = max(4, len(str(n - 1)))
    return tuple(f"s{i:0{width}d}" for i in range(n))


def _model_ids(k: int) -> tuple[str, ...]:
    width = max(3, len(str(k - 1)))
    return tuple(f"m{i:0{width}d}" for i in range(k))


def _synthetic_pool(spec: SyntheticSpec) -> tuple[ModelPool, tuple[float, ...]]:
    """Draw the pool (and, if not planted, the accuracy profile) from the seed."""
    k = spec.arms
    gen = np.random.Generator(np.random.PCG64(spec.seed))
    # fixed draw order: sizes, complexities, accuracy noise, benchmark lift
    sizes = np.exp(gen.uniform(math.log(SIZE_MB_BOUNDS[0]), math.log(SIZE_MB_BOUNDS[1]), k))
    complexities = np.exp(
        gen.uniform(math.log(COMPLEXITY_MMAC_BOUNDS[0]), math.log(COMPLEXITY_MMAC_BOUNDS[1]), k)
    )
    if spec.accuracies is not None:
        accuracies = np.asarray(spec.accuracies, dtype=float)
    else:
        if k == 1:
            base = np.array([0.3])
        else:
            ranks = np.argsort(np.argsort(sizes))
            base = 0.10 + 0.35 * ranks / (k - 1)
        accuracies = np.clip(base + gen.normal(0.0, 0.05, k), 0.02, 0.60)
    benchmark = np.clip(accuracies + gen.uniform(0.30, 0.55, k), 0.0, 0.98)
    ids = _model_ids(k)
    pool = ModelPool(
        tuple(
            ModelCandidate(
                id=ids[i],
                benchmark_accuracy=float(benchmark[i]),
                size_mb=float(sizes[i]),
                complexity_mmac=float(complexities[i]),
                source="synthetic",
            )
            for i in range(k)
        )
    )
    return pool, tuple(float(p) for p in accuracies)


class SyntheticBackend(EvaluationBackend):
    """Bernoulli bits keyed by a hash of (seed, model, sample).

    Pull order never changes an outcome: repeated queries for the same pair
    agree by construction, making any strategy's run replayable.
    """

    def __init__(self, pool: ModelPool, spec: SyntheticSpec, accuracies: tuple[float, ...]):
        if len(accuracies) != len(pool):
            raise TraceError("accuracies length disagrees with pool size")
        self.pool = pool
        self.spec = spec
        self.accuracies = accuracies
        self.dataset = Dataset(_sample_ids(spec.n_samples))

    def evaluate(self, arm: int, sample_id: str) -> PullResult:
        bit = bernoulli_bit(self.spec.seed, self.pool[arm].id, sample_id, self.accuracies[arm])
        return self._pull(arm, sample_id, bit)

    def dense_bits(self) -> np.ndarray | None:
        k, n = len(self.pool), len(self.dataset)
        out = np.empty((k, n), dtype=np.uint8)
        for i, cand in enumerate(self.pool):
            p = self.accuracies[i]
            for j, sid in enumerate(self.dataset.sample_ids):
                out[i, j] = 1 if _hash_unit(self.spec.seed, cand.id, sid) < p else 0
        return out


@dataclass(frozen=True)
class SyntheticFixture:
    """A fully materialized synthetic experiment fixture."""

    pool: ModelPool
    table: TraceTable
    dataset: Dataset
    accuracies: tuple[float, ...]
    spec: SyntheticSpec

    def backend(self) -> TraceBackend:
        return TraceBackend(self.pool, self.table, self.dataset)


def generate_synthetic(spec: SyntheticSpec) -> SyntheticFixture:
    """Materialize pool + complete trace table for a synthetic spec."""
    pool, accuracies = _synthetic_pool(spec)
    dataset = Dataset(_sample_ids(spec.n_samples))
    bits: dict[tuple[str, str], int] = {}
    for i, cand in enumerate(pool):
        p = accuracies[i]
        for sid in dataset:
            bits[(cand.id, sid)] = 1 if _hash_unit(spec.seed, cand.id, sid) < p else 0
    return SyntheticFixture(
        pool=pool,
        table=TraceTable(bits),
        dataset=dataset,
        accuracies=accuracies,
        spec=spec,
    )


def synthetic_backend(spec: SyntheticSpec) -> SyntheticBackend:
    """Build the on-the-fly simulator backend for a spec (no table materialized)."""
    pool, accuracies = _synthetic_pool(spec)
    return SyntheticBackend(pool, spec, accuracies)


class RemoteBackend(EvaluationBackend):
    """Client for the remote evaluator wire protocol.

    Requests are batched lists of sample ids; the engine consumes results one
    pull at a time, so single pulls travel as one-element batches. Responses
    are cached per (arm, sample) so a pair is never evaluated remotely twice.
    """

    def __init__(self, client: httpx.Client, pool: ModelPool, dataset: Dataset):
        self.client = client
        self.pool = pool
        self.dataset = dataset
        self._cache: dict[tuple[int, str], int] = {}

    @classmethod
    def connect(
        cls,
        base_url: str,
        dataset: Dataset | None = None,
        client: httpx.Client | None = None,
    ) -> "RemoteBackend":
        """Fetch the pool (and sample listing, if offered) from the evaluator."""
        client = client or httpx.Client(base_url=base_url, timeout=60.0)
        pool = fetch_remote_pool(client)
        if dataset is None:
            dataset = fetch_remote_samples(client)
            if dataset is None:
                raise BackendError(
                    "evaluator does not list samples; supply the dataset explicitly"
                )
        return cls(client, pool, dataset)

    def evaluate(self, arm: int, sample_id: str) -> PullResult:
        cached = self._cache.get((arm, sample_id))
        if cached is None:
            self._fetch(arm, [sample_id])
            cached = self._cache[(arm, sample_id)]
        return self._pull(arm, sample_id, cached)

    def evaluate_many(self, arm: int, sample_ids: Sequence[str]) -> list[PullResult]:
        missing = [sid for sid in sample_ids if (arm, sid) not in self._cache]
        for start in range(0, len(missing), 64):
            self._fetch(arm, missing[start : start + 64])
        return [self._pull(arm, sid, self._cache[(arm, sid)]) for sid in sample_ids]

    def _fetch(self, arm: int, sample_ids: list[str]) -> None:
        model_id = self.pool[arm].id
        try:
            resp = self.client.post(
                "/evaluate", json={"model_id": model_id, "sample_ids": list(sample_ids)}
            )
        except httpx.HTTPError as exc:
            raise BackendError(
                f"remote evaluation failed for (model {model_id!r}, "
                f"samples {sample_ids!r}): {exc}"
            ) from exc
        if resp.status_code == 404:
            detail = ""
            try:
                detail = resp.json().get("error", "")
            except ValueError:
                pass
            raise BackendError(
                f"remote evaluator rejected (model {model_id!r}, samples {sample_ids!r}): {detail}"
            )
        if resp.status_code != 200:
            raise BackendError(
                f"remote evaluator returned status {resp.status_code} for model {model_id!r}"
            )
        try:
            results = resp.json()["results"]
            got = {r["sample_id"]: int(r["correct"]) for r in results}
        except (ValueError, KeyError, TypeError) as exc:
            raise BackendError(f"malformed /evaluate response for model {model_id!r}") from exc
        for sid in sample_ids:
            if sid not in got:
                raise BackendError(
                    f"remote evaluator omitted (model {model_id!r}, sample {sid!r})"
                )
            if got[sid] not in (0, 1):
                raise BackendError(
                    f"remote evaluator returned non-bit for (model {model_id!r}, sample {sid!r})"
                )
            self._cache[(arm, sid)] = got[sid]


def fetch_remote_pool(client: httpx.Client) -> ModelPool:
    """GET /models and validate the records as a pool file."""
    try:
        resp = client.get("/models")
        resp.raise_for_status()
    except httpx.HTTPError as exc:
        raise BackendError(f"could not fetch remote pool: {exc}") from exc
    try:
        return load_pool(resp.text)
    except PoolError as exc:
        raise BackendError(f"remote /models records invalid: {exc}") from exc


def fetch_remote_samples(client: httpx.Client) -> Dataset | None:
    """GET /samples (optional endpoint); None when the evaluator lacks it."""
    try:
        resp = client.get("/samples")
    except httpx.HTTPError as exc:
        raise BackendError(f"could not fetch remote samples: {exc}") from exc
    if resp.status_code == 404:
        return None
    if resp.status_code != 200:
        raise BackendError(f"/samples returned status {resp.status_code}")
    try:
        ids = resp.json()["samples"]
        return Dataset(tuple(str(s) for s in ids))
    except (ValueError, KeyError, TypeError) as exc:
        raise BackendError("malformed /samples response") from exc
