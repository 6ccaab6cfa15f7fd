"""Small vision architectures served by the bridge, spanning a size/cost range."""
from __future__ import annotations

import torch
from torch import nn

from .data import CLASSES, IMAGE_SIZE


class ConvNet(nn.Module):
    def __init__(self, channels: list[int], hidden: int):
        super().__init__()
        layers: list[nn.Module] = []
        previous = 3
        for ch in channels:
            layers += [nn.Conv2d(previous, ch, 3, padding=1), nn.ReLU(), nn.MaxPool2d(2)]
            previous = ch
        self.features = nn.Sequential(*layers)
        spatial = IMAGE_SIZE // (2 ** len(channels))
        self.classifier = nn.Sequential(
            nn.Flatten(),
            nn.Linear(previous * spatial * spatial, hidden),
            nn.ReLU(),
            nn.Linear(hidden, len(CLASSES)),
        )

    def forward(self, x):
        return self.classifier(self.features(x))


class PixelMlp(nn.Module):
    def __init__(self, hidden: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Flatten(),
            nn.Linear(3 * IMAGE_SIZE * IMAGE_SIZE, hidden),
            nn.ReLU(),
            nn.Linear(hidden, len(CLASSES)),
        )

    def forward(self, x):
        return self.net(x)


# default zoo: names map to constructors; kept at 4 small models on purpose
ARCHITECTURES = {
    "conv_tiny": lambda: ConvNet([8, 16], 32),
    "conv_small": lambda: ConvNet([16, 32, 32], 64),
    "conv_wide": lambda: ConvNet([32, 64, 64], 128),
    "mlp_pixel": lambda: PixelMlp(48),
}


def build_model(arch: str) -> torch.nn.Module:
    if arch not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {arch!r}")
    return ARCHITECTURES[arch]()
