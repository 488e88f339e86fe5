"""Adam optimiser (bias-corrected adaptive moment estimation)."""
from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from core.constants import ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, DEFAULT_LEARNING_RATE
from core.exceptions import ContractError, NonFiniteError, ShapeError
from numerics.tensor import Tensor


@dataclass
class AdamState:
    """Moment buffers and step counter, keyed by parameter name."""
    learning_rate: float = DEFAULT_LEARNING_RATE
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPSILON
    step: int = 0
    first: Dict[str, np.ndarray] = field(default_factory=dict)
    second: Dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(params: Mapping[str, Tensor], grads: Mapping[str, np.ndarray],
              state: AdamState) -> Mapping[str, Tensor]:
    """
    Apply one Adam update in place.

    Every gradient is validated before any parameter moves, so a rejected
    update leaves parameters and state untouched.

    Args:
        params: Named trainable tensors
        grads: Named gradients, one per parameter
        state: Optimiser state (mutated)

    Returns:
        The updated params mapping

    Raises:
        ContractError: If a gradient is missing or the step counter is negative
        ShapeError: If a gradient's shape differs from its parameter's
        NonFiniteError: If any gradient holds NaN/Inf (names the parameter)
    """
    if state.step < 0:
        raise ContractError(f"Adam step counter is negative ({state.step})")
    for name, param in params.items():
        if name not in grads:
            raise ContractError(f"no gradient for parameter '{name}'")
        grad = grads[name]
        if grad.shape != param.shape:
            raise ShapeError(f"adam_step '{name}'", grad.shape, param.shape)
        if not np.all(np.isfinite(grad)):
            raise NonFiniteError("gradient", name)

    state.step += 1
    bias1 = 1.0 - state.beta1 ** state.step
    bias2 = 1.0 - state.beta2 ** state.step
    for name, param in params.items():
        grad = grads[name]
        if name not in state.first:
            state.first[name] = np.zeros_like(param.data)
            state.second[name] = np.zeros_like(param.data)
        m, v = state.first[name], state.second[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)
        param.data -= state.learning_rate * (m / bias1) / (np.sqrt(v / bias2) + state.eps)
    return params
