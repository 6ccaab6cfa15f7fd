"""Synthetic labeled image sets: shape classification with a shifted target split.

The benchmark split is clean; the target split adds noise, brightness jitter
and occlusion so measured target accuracy sits below benchmark accuracy,
which is the regime the selection engine is built for.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

CLASSES = ("circle", "square", "triangle", "cross")
IMAGE_SIZE = 32


def _draw_shape(draw: ImageDraw.ImageDraw, label: str, rng: np.random.Generator) -> None:
    cx = rng.uniform(10, IMAGE_SIZE - 10)
    cy = rng.uniform(10, IMAGE_SIZE - 10)
    r = rng.uniform(5, 9)
    color = tuple(int(v) for v in rng.integers(90, 256, size=3))
    if label == "circle":
        draw.ellipse([cx - r, cy - r, cx + r, cy + r], fill=color)
    elif label == "square":
        draw.rectangle([cx - r, cy - r, cx + r, cy + r], fill=color)
    elif label == "triangle":
        draw.polygon([(cx, cy - r), (cx - r, cy + r), (cx + r, cy + r)], fill=color)
    elif label == "cross":
        w = r / 2.5
        draw.rectangle([cx - r, cy - w, cx + r, cy + w], fill=color)
        draw.rectangle([cx - w, cy - r, cx + w, cy + r], fill=color)
    else:
        raise ValueError(f"unknown label {label!r}")


def _render(label: str, rng: np.random.Generator, shifted: bool) -> Image.Image:
    background = tuple(int(v) for v in rng.integers(0, 60, size=3))
    img = Image.new("RGB", (IMAGE_SIZE, IMAGE_SIZE), background)
    draw = ImageDraw.Draw(img)
    _draw_shape(draw, label, rng)
    pixels = np.asarray(img, dtype=np.float32)
    if shifted:
        # the target domain: sensor noise, exposure jitter, partial occlusion
        pixels = pixels * rng.uniform(0.5, 1.1)
        pixels = pixels + rng.normal(0.0, 35.0, size=pixels.shape)
        if rng.random() < 0.5:
            x0 = int(rng.integers(0, IMAGE_SIZE - 8))
            y0 = int(rng.integers(0, IMAGE_SIZE - 8))
            pixels[y0 : y0 + 8, x0 : x0 + 8, :] = rng.uniform(0, 255)
    pixels = np.clip(pixels, 0, 255).astype(np.uint8)
    return Image.fromarray(pixels)


def generate_split(
    out_dir: Path, per_class: int, seed: int, shifted: bool, prefix: str
) -> list[str]:
    """Write per_class images per label under out_dir/<label>/; returns sample ids."""
    out_dir = Path(out_dir)
    rng = np.random.Generator(np.random.PCG64(seed))
    sample_ids = []
    for label in CLASSES:
        label_dir = out_dir / label
        label_dir.mkdir(parents=True, exist_ok=True)
        for i in range(per_class):
            img = _render(label, rng, shifted)
            name = f"{prefix}{i:04d}.png"
            img.save(label_dir / name)
            sample_ids.append(f"{label}/{name}")
    return sorted(sample_ids)


def load_labeled_images(image_dir: Path) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Read a directory-labeled image set; returns (ids, images[N,3,H,W] in [0,1], labels)."""
    image_dir = Path(image_dir)
    ids: list[str] = []
    arrays = []
    labels = []
    for label_index, label in enumerate(CLASSES):
        label_dir = image_dir / label
        if not label_dir.is_dir():
            continue
        for path in sorted(label_dir.iterdir()):
            if path.suffix != ".png":
                continue
            img = np.asarray(Image.open(path).convert("RGB"), dtype=np.float32) / 255.0
            arrays.append(img.transpose(2, 0, 1))
            ids.append(f"{label}/{path.name}")
            labels.append(label_index)
    if not ids:
        raise FileNotFoundError(f"no labeled images under {image_dir}")
    order = np.argsort(ids)
    return (
        [ids[i] for i in order],
        np.stack([arrays[i] for i in order]),
        np.array([labels[i] for i in order]),
    )
