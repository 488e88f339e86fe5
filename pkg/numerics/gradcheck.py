"""Central finite-difference gradient checking."""
from typing import Callable, Dict, Mapping

import numpy as np

from core.constants import GRADCHECK_STEP
from numerics.tensor import Tensor, backward


def numeric_gradient(loss_fn: Callable[[], Tensor], param: Tensor,
                     step: float = GRADCHECK_STEP) -> np.ndarray:
    """Central differences of `loss_fn()` with respect to every element of `param`."""
    grad = np.zeros_like(param.data)
    flat = param.data.reshape(-1)
    out = grad.reshape(-1)
    for index in range(flat.size):
        original = flat[index]
        flat[index] = original + step
        upper = loss_fn().item()
        flat[index] = original - step
        lower = loss_fn().item()
        flat[index] = original
        out[index] = (upper - lower) / (2.0 * step)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-6) -> float:
    """||a - n|| / max(||a||, ||n||, floor)."""
    scale = max(np.linalg.norm(analytic), np.linalg.norm(numeric), floor)
    return float(np.linalg.norm(analytic - numeric) / scale)


def gradient_check(loss_fn: Callable[[], Tensor], params: Mapping[str, Tensor],
                   step: float = GRADCHECK_STEP) -> Dict[str, float]:
    """
    Compare analytic gradients with central finite differences.

    Args:
        loss_fn: Rebuilds the scalar loss from the current parameter values
        params: Named leaves to check

    Returns:
        Relative error per parameter name
    """
    for param in params.values():
        param.grad = None
    backward(loss_fn())
    errors = {}
    for name, param in params.items():
        analytic = param.grad if param.grad is not None else np.zeros_like(param.data)
        errors[name] = relative_error(analytic, numeric_gradient(loss_fn, param, step))
    return errors
