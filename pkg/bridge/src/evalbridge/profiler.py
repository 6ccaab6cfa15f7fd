"""Static complexity profiler: multiply-accumulate count for one forward pass."""
from __future__ import annotations

import torch
from torch import nn

from .data import IMAGE_SIZE


def count_mmacs(model: nn.Module) -> float:
    """MACs (in millions) for a single IMAGE_SIZE input, from layer shapes."""
    totals = []
    hooks = []

    def conv_hook(module, inputs, output):
        out_elems = output.numel()
        per_elem = module.in_channels // module.groups
        per_elem *= module.kernel_size[0] * module.kernel_size[1]
        totals.append(out_elems * per_elem)

    def linear_hook(module, inputs, output):
        totals.append(module.in_features * module.out_features)

    for module in model.modules():
        if isinstance(module, nn.Conv2d):
            hooks.append(module.register_forward_hook(conv_hook))
        elif isinstance(module, nn.Linear):
            hooks.append(module.register_forward_hook(linear_hook))
    try:
        with torch.no_grad():
            model(torch.zeros(1, 3, IMAGE_SIZE, IMAGE_SIZE))
    finally:
        for hook in hooks:
            hook.remove()
    return sum(totals) / 1e6
