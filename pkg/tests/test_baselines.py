import subprocess
import sys
from pathlib import Path

import pytest

from modelpick import (
    MetricWeights,
    ModelCandidate,
    ModelPool,
    SyntheticSpec,
    TraceBackend,
    benchmark_select,
    brute_force,
    generate_synthetic,
    load_trace,
    normalize_static,
    save_pool,
    serialize_trace,
)

ORACLE = Path(__file__).parent / "oracle_rank.py"


def small_pool():
    # maxvit_t leads on benchmark accuracy; mobilenet_v3 wins on statics
    return ModelPool(
        (
            ModelCandidate(id="maxvit_t", benchmark_accuracy=0.80, size_mb=124.5, complexity_mmac=19670.0),
            ModelCandidate(id="mobilenet_v3", benchmark_accuracy=0.74, size_mb=22.0, complexity_mmac=229.0),
            ModelCandidate(id="regnet_large", benchmark_accuracy=0.79, size_mb=2581.0, complexity_mmac=127750.0),
        )
    )


class TestBenchmarkSelect:
    def test_accuracy_only_picks_highest_benchmark(self):
        pool = small_pool()
        report = benchmark_select(pool, normalize_static(pool), MetricWeights(1, 0, 0))
        assert report.top.id == "maxvit_t"
        assert report.method == "benchmark"

    def test_combined_weights_prefer_small_model(self):
        pool = small_pool()
        report = benchmark_select(pool, normalize_static(pool), MetricWeights(0.63, 0.25, 0.21))
        assert report.top.id == "mobilenet_v3"

    def test_single_arm_pool(self):
        pool = ModelPool((ModelCandidate(id="only", benchmark_accuracy=0.5, size_mb=1.0, complexity_mmac=1.0),))
        report = benchmark_select(pool, normalize_static(pool), MetricWeights(1, 0, 0))
        assert [e.id for e in report.ranking] == ["only"]

    def test_zero_evaluations_and_full_savings(self):
        # benchmark_select takes no backend at all, so it provably performs
        # zero target-data evaluations; the report must say so
        pool = small_pool()
        report = benchmark_select(pool, normalize_static(pool), MetricWeights(1, 0, 0))
        assert report.pulls_total == 0
        assert report.eval_savings == 1.0
        assert report.compute_savings_mmac == 1.0


class TestBruteForce:
    def test_two_arm_planted_accuracies(self):
        fx = generate_synthetic(SyntheticSpec(n_samples=100, seed=8, accuracies=(0.45, 0.31)))
        report = brute_force(fx.pool, fx.backend(), MetricWeights(1, 0, 0))
        assert report.top.arm == 0
        exact0 = fx.table.accuracy_of(fx.pool[0].id, fx.dataset)
        assert report.top.estimated_value == pytest.approx(exact0)
        assert report.top.accuracy == pytest.approx(exact0)

    def test_pull_count_is_exactly_k_times_n(self):
        fx = generate_synthetic(SyntheticSpec(n_samples=37, seed=4, n_arms=5))
        report = brute_force(fx.pool, fx.backend(), MetricWeights(0.63, 0.25, 0.21))
        assert report.pulls_total == 5 * 37
        assert all(e.pulls == 37 for e in report.ranking)
        assert report.eval_savings == 0.0
        assert report.compute_savings_mmac == 0.0

    def test_size_only_weights_ignore_the_trace(self):
        fx = generate_synthetic(SyntheticSpec(n_samples=20, seed=6, n_arms=4))
        report = brute_force(fx.pool, fx.backend(), MetricWeights(0, 1, 0))
        sizes = [e.size_mb for e in report.ranking]
        assert sizes == sorted(sizes)

    def test_counting_backend_sees_every_pair_once(self):
        fx = generate_synthetic(SyntheticSpec(n_samples=15, seed=3, n_arms=3))

        class CountingBackend(TraceBackend):
            calls = 0

            def dense_bits(self):
                return None

            def evaluate(self, arm, sample_id):
                CountingBackend.calls += 1
                return super().evaluate(arm, sample_id)

        backend = CountingBackend(fx.pool, fx.table, fx.dataset)
        brute_force(fx.pool, backend, MetricWeights(1, 0, 0))
        assert CountingBackend.calls == 3 * 15


@pytest.mark.parametrize("case", range(20))
def test_brute_force_matches_standalone_oracle(case, tmp_path):
    import numpy as np

    rng = np.random.default_rng(1000 + case)
    k = int(rng.integers(2, 12))
    n = int(rng.integers(5, 40))
    weights = MetricWeights(*(rng.dirichlet([1.0, 1.0, 1.0])))
    fx = generate_synthetic(SyntheticSpec(n_samples=n, seed=2000 + case, n_arms=k))

    pool_path = tmp_path / f"pool_{case}.json"
    trace_path = tmp_path / f"trace_{case}.csv"
    pool_path.write_text(save_pool(fx.pool), encoding="utf-8")
    trace_path.write_text(serialize_trace(fx.table), encoding="utf-8")

    result = subprocess.run(
        [
            sys.executable,
            str(ORACLE),
            str(pool_path),
            str(trace_path),
            f"{weights.accuracy},{weights.size},{weights.complexity}",
        ],
        capture_output=True,
        text=True,
        check=True,
    )
    oracle_ranking = result.stdout.split()

    report = brute_force(fx.pool, fx.backend(), weights)
    assert [e.id for e in report.ranking] == oracle_ranking
