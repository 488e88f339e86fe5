"""Parameter initialisation."""
import math
from typing import Sequence

import numpy as np

from core.exceptions import ContractError
from numerics.tensor import Tensor


def xavier_bound(shape: Sequence[int]) -> float:
    """
    Uniform Xavier bound sqrt(6 / (fan_in + fan_out)).

    For stacks of matrices (ndim > 2) the fans come from the last two axes,
    so every slice is initialised like an independent matrix.
    """
    if len(shape) == 1:
        fan_in = fan_out = shape[0]
    else:
        fan_in, fan_out = shape[-2], shape[-1]
    return math.sqrt(6.0 / (fan_in + fan_out))


def xavier_init(shape: Sequence[int], rng_seed: int, name: str = None) -> Tensor:
    """
    Draw a trainable tensor uniformly in +-xavier_bound(shape).

    Args:
        shape: Tensor shape (at least one dimension)
        rng_seed: Seed; the same seed and shape give bit-identical values
        name: Optional parameter name

    Returns:
        Tensor with requires_grad=True
    """
    shape = tuple(int(s) for s in shape)
    if not shape or any(s < 1 for s in shape):
        raise ContractError(f"xavier_init needs positive dimensions, got {shape}")
    bound = xavier_bound(shape)
    values = np.random.default_rng(rng_seed).uniform(-bound, bound, size=shape)
    return Tensor(values, requires_grad=True, name=name)
