"""Build the bridge's serving fixtures: images, trained weights, manifest.

Everything is seeded and single-threaded so a rebuild reproduces the same
weights, measurements and predictions bit for bit on the same platform.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .data import generate_split, load_labeled_images
from .models import ARCHITECTURES, build_model
from .profiler import count_mmacs

TRAIN_PER_CLASS = 150
BENCHMARK_PER_CLASS = 50
TARGET_PER_CLASS = 20
EPOCHS = 15
BATCH = 32


def _deterministic_torch(seed: int) -> None:
    torch.manual_seed(seed)
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)


def _train(model: nn.Module, images: np.ndarray, labels: np.ndarray, seed: int) -> None:
    x = torch.from_numpy(images)
    y = torch.from_numpy(labels)
    optimizer = torch.optim.Adam(model.parameters(), lr=1e-3)
    loss_fn = nn.CrossEntropyLoss()
    order_rng = np.random.Generator(np.random.PCG64(seed))
    model.train()
    for _ in range(EPOCHS):
        order = order_rng.permutation(len(x))
        for start in range(0, len(x), BATCH):
            idx = order[start : start + BATCH]
            optimizer.zero_grad()
            loss = loss_fn(model(x[idx]), y[idx])
            loss.backward()
            optimizer.step()
    model.eval()


def _accuracy(model: nn.Module, images: np.ndarray, labels: np.ndarray) -> float:
    with torch.no_grad():
        predictions = model(torch.from_numpy(images)).argmax(dim=1).numpy()
    return float((predictions == labels).mean())


def make_fixtures(out_dir: Path, seed: int = 0) -> Path:
    """Generate image splits, train the default zoo, write weights + manifest.

    Layout: out_dir/images/{train,benchmark,target}/<class>/*.png and
    out_dir/models/{<id>.pt, manifest.json}. Returns the model dir.
    """
    out_dir = Path(out_dir)
    images_dir = out_dir / "images"
    model_dir = out_dir / "models"
    model_dir.mkdir(parents=True, exist_ok=True)

    generate_split(images_dir / "train", TRAIN_PER_CLASS, seed=seed * 7 + 1, shifted=False, prefix="b")
    generate_split(images_dir / "benchmark", BENCHMARK_PER_CLASS, seed=seed * 7 + 2, shifted=False, prefix="b")
    generate_split(images_dir / "target", TARGET_PER_CLASS, seed=seed * 7 + 3, shifted=True, prefix="t")

    _, train_x, train_y = load_labeled_images(images_dir / "train")
    _, bench_x, bench_y = load_labeled_images(images_dir / "benchmark")

    records = []
    for i, arch in enumerate(sorted(ARCHITECTURES)):
        # seed before construction: weight init draws from the global stream
        _deterministic_torch(seed * 31 + i)
        model = build_model(arch)
        _train(model, train_x, train_y, seed=seed * 31 + i)
        weights_path = model_dir / f"{arch}.pt"
        torch.save(model.state_dict(), weights_path)
        records.append(
            {
                "id": arch,
                "benchmark_accuracy": _accuracy(model, bench_x, bench_y),
                "size_mb": weights_path.stat().st_size / 1e6,
                "complexity_mmac": count_mmacs(model),
                "source": f"evalbridge:{arch}",
            }
        )

    manifest = {"models": records, "seed": seed}
    (model_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return model_dir
