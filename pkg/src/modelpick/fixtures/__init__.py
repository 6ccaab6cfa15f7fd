"""Bundled synthetic fixture: 71 arms x 200 samples, generation seed 0.

Shipped so the demo workflows and the acceptance suite run out of the box;
`modelpick gen-synthetic --arms 71 --samples 200 --seed 0` reproduces the
same files bit for bit.
"""
from __future__ import annotations

from importlib import resources

from ..backends import Dataset, TraceBackend, TraceTable, load_trace
from ..core import ModelPool, load_pool

BUNDLED_SEED = 0


def bundled_paths() -> tuple[str, str]:
    base = resources.files(__package__)
    return str(base / "k71_pool.json"), str(base / "k71_trace.csv")


def bundled_fixture() -> tuple[ModelPool, TraceTable, Dataset]:
    base = resources.files(__package__)
    pool = load_pool((base / "k71_pool.json").read_text(encoding="utf-8"))
    table, dataset = load_trace((base / "k71_trace.csv").read_text(encoding="utf-8"))
    return pool, table, dataset


def bundled_backend() -> TraceBackend:
    pool, table, dataset = bundled_fixture()
    return TraceBackend(pool, table, dataset)
