"""Command-line front door: weight proposal, experiments, baselines, fixtures, service."""
from __future__ import annotations

import hashlib
import sys
from pathlib import Path

import click

from .backends import (
    Dataset,
    RemoteBackend,
    SyntheticSpec,
    TraceBackend,
    generate_synthetic,
    load_trace,
    serialize_trace,
)
from .baselines import benchmark_select, brute_force
from .canonical import canonical_json
from .core import ExperimentConfig, MetricWeights, ModelPickError, load_pool, save_pool
from .engine import run_repetitions
from .reasoning import client_from_env, propose_weights
from .reporting import serialize_report


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _parse_weights(text: str) -> MetricWeights:
    parts = text.split(",")
    if len(parts) != 3:
        raise ModelPickError(
            f"weights must be a comma triple accuracy,size,complexity, got {text!r}"
        )
    try:
        acc, size, cplx = (float(p) for p in parts)
    except ValueError:
        raise ModelPickError(f"weights must be numeric, got {text!r}") from None
    return MetricWeights(acc, size, cplx)


def _emit(text: str, out: str | None, figures=None, figures_dir: str | None = None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    if figures is not None and figures_dir:
        from .figures import render_report_figures

        paths = render_report_figures(figures, Path(figures_dir))
        for p in paths:
            click.echo(f"wrote {p}", err=True)


def _read_dataset(dataset_path) -> Dataset:
    ids = [
        line.strip()
        for line in Path(dataset_path).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    return Dataset(tuple(ids))


def _load_backend(pool_path, trace_path, synthetic_arms, synthetic_samples, synthetic_seed, remote, dataset_path):
    """Resolve the (pool, backend, table, dataset) quartet from CLI source flags."""
    sources = sum(1 for v in (trace_path, synthetic_arms, remote) if v)
    if sources != 1:
        raise ModelPickError("exactly one of --trace, --synthetic-arms or --remote is required")
    if trace_path:
        if not pool_path:
            raise ModelPickError("--pool is required with --trace")
        pool = load_pool(Path(pool_path).read_text(encoding="utf-8"))
        table, dataset = load_trace(Path(trace_path).read_text(encoding="utf-8"))
        # a partial dump replays exactly only against the original full sample
        # list, which --dataset supplies
        if dataset_path:
            dataset = _read_dataset(dataset_path)
        return pool, TraceBackend(pool, table, dataset), table, dataset
    if synthetic_arms:
        spec = SyntheticSpec(
            n_samples=synthetic_samples, seed=synthetic_seed, n_arms=synthetic_arms
        )
        fixture = generate_synthetic(spec)
        return fixture.pool, fixture.backend(), fixture.table, fixture.dataset
    dataset = _read_dataset(dataset_path) if dataset_path else None
    backend = RemoteBackend.connect(remote, dataset=dataset)
    return backend.pool, backend, None, backend.dataset


@click.group()
def main():
    """Budget-constrained model selection over a candidate pool."""


@main.command()
@click.option("--prompt", required=True, help="Use-case description.")
@click.option("--samples", default=1, show_default=True, help="Client queries to average.")
@click.option("--offline", is_flag=True, help="Skip the LLM client; use the keyword fallback.")
@click.option("--out", default=None, help="Write the proposal here instead of stdout.")
def reason(prompt, samples, offline, out):
    """Propose trade-off weights for a use case."""
    try:
        client = None if offline else client_from_env()
        proposal = propose_weights(prompt, n_samples=samples, client=client)
        _emit(canonical_json(proposal.as_dict()), out)
    except (ModelPickError, OSError) as exc:
        _fail(str(exc))


_source_options = [
    click.option("--pool", "pool_path", default=None, help="Pool file (JSON or CSV)."),
    click.option("--trace", "trace_path", default=None, help="Trace CSV of cached bits."),
    click.option("--synthetic-arms", default=None, type=int, help="Generate a synthetic pool of this size."),
    click.option("--synthetic-samples", default=200, show_default=True, type=int),
    click.option("--synthetic-seed", default=0, show_default=True, type=int),
    click.option("--remote", default=None, help="Base URL of a remote evaluator."),
    click.option("--dataset", "dataset_path", default=None,
                 help="Sample-id list, one per line (remote runs; replaying partial trace dumps)."),
]


def _with_source_options(fn):
    for opt in reversed(_source_options):
        fn = opt(fn)
    return fn


@main.command()
@_with_source_options
@click.option("--strategy", type=click.Choice(["epsilon_greedy", "ucb", "thompson"]), default="thompson", show_default=True)
@click.option("--budget", required=True, type=int, help="Total evaluations across all arms.")
@click.option("--weights", required=True, help="Comma triple accuracy,size,complexity.")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--epsilon", default=0.1, show_default=True, type=float)
@click.option("--repetitions", default=1, show_default=True, type=int)
@click.option("--out", default=None, help="Write the report here instead of stdout.")
@click.option("--figures", "figures_dir", default=None, help="Render figures + leaderboard CSV into this directory.")
def run(pool_path, trace_path, synthetic_arms, synthetic_samples, synthetic_seed, remote,
        dataset_path, strategy, budget, weights, seed, epsilon, repetitions, out, figures_dir):
    """Run a budgeted bandit experiment (aggregated when --repetitions > 1)."""
    try:
        w = _parse_weights(weights)
        config = ExperimentConfig(
            strategy=strategy, budget=budget, weights=w, seed=seed,
            epsilon=epsilon, repetitions=repetitions,
        )
        pool, backend, table, dataset = _load_backend(
            pool_path, trace_path, synthetic_arms, synthetic_samples, synthetic_seed,
            remote, dataset_path,
        )
        if remote and repetitions != 1:
            raise ModelPickError(
                "remote runs have no full trace to aggregate; use --repetitions 1"
            )
        report = run_repetitions(config, pool, backend, table=table, dataset=dataset)
        _emit(serialize_report(report), out, figures=report, figures_dir=figures_dir)
    except (ModelPickError, OSError) as exc:
        _fail(str(exc))


@main.command("brute-force")
@_with_source_options
@click.option("--weights", required=True, help="Comma triple accuracy,size,complexity.")
@click.option("--out", default=None)
@click.option("--figures", "figures_dir", default=None)
def brute_force_cmd(pool_path, trace_path, synthetic_arms, synthetic_samples, synthetic_seed,
                    remote, dataset_path, weights, out, figures_dir):
    """Evaluate every arm on every sample, then rank."""
    try:
        w = _parse_weights(weights)
        pool, backend, _table, dataset = _load_backend(
            pool_path, trace_path, synthetic_arms, synthetic_samples, synthetic_seed,
            remote, dataset_path,
        )
        report = brute_force(pool, backend, w, dataset)
        _emit(serialize_report(report), out, figures=report, figures_dir=figures_dir)
    except (ModelPickError, OSError) as exc:
        _fail(str(exc))


@main.command("bench-select")
@click.option("--pool", "pool_path", required=True, help="Pool file (JSON or CSV).")
@click.option("--weights", required=True, help="Comma triple accuracy,size,complexity.")
@click.option("--out", default=None)
@click.option("--figures", "figures_dir", default=None)
def bench_select_cmd(pool_path, weights, out, figures_dir):
    """Rank by recorded benchmark accuracy; no target evaluations."""
    try:
        from .core import normalize_static

        w = _parse_weights(weights)
        pool = load_pool(Path(pool_path).read_text(encoding="utf-8"))
        report = benchmark_select(pool, normalize_static(pool), w)
        _emit(serialize_report(report), out, figures=report, figures_dir=figures_dir)
    except (ModelPickError, OSError) as exc:
        _fail(str(exc))


@main.command("gen-synthetic")
@click.option("--arms", required=True, type=int)
@click.option("--samples", required=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out-dir", required=True)
def gen_synthetic(arms, samples, seed, out_dir):
    """Write a synthetic pool + complete trace fixture to a directory."""
    try:
        fixture = generate_synthetic(SyntheticSpec(n_samples=samples, seed=seed, n_arms=arms))
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        pool_text = save_pool(fixture.pool)
        trace_text = serialize_trace(fixture.table)
        pool_path = out / "pool.json"
        trace_path = out / "trace.csv"
        pool_path.write_text(pool_text, encoding="utf-8")
        trace_path.write_text(trace_text, encoding="utf-8")
        manifest = {
            "kind": "synthetic_fixture",
            "arms": arms,
            "samples": samples,
            "seed": seed,
            "pool_path": str(pool_path),
            "trace_path": str(trace_path),
            "pool_sha256": hashlib.sha256(pool_text.encode()).hexdigest(),
            "trace_sha256": hashlib.sha256(trace_text.encode()).hexdigest(),
        }
        click.echo(canonical_json(manifest), nl=False)
    except (ModelPickError, OSError) as exc:
        _fail(str(exc))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8080, show_default=True, type=int)
@click.option("--fixtures-dir", default=None, help="Preload every file here as a named fixture.")
@click.option("--persist-dir", default=None, help="Write finished reports into this directory.")
@click.option("--ui-dir", default=None, help="Serve a built web UI from this directory at /.")
def serve(host, port, fixtures_dir, persist_dir, ui_dir):
    """Run the HTTP service backing the web UI."""
    import uvicorn

    from .service import create_app

    app = create_app(fixtures_dir=fixtures_dir, persist_dir=persist_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
