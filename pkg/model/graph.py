"""Continuity and interference adjacency matrices, filtering and normalisation."""
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.exceptions import ConfigError, ContractError, ShapeError
from core.logger import get_logger
from model.quantum import CollapseBatch, event_operators
from numerics.tensor import Tensor, einsum, matmul, mul, relu, reshape, row_normalize_tensor

logger = get_logger(__name__)


@dataclass
class AdjacencyPair:
    """Filtered (°) and row-normalised (•) continuity and interference matrices."""
    continuity: Tensor
    interference: Tensor
    continuity_norm: Tensor
    interference_norm: Tensor
    alpha: float
    beta: float


def continuity_matrix(x_circ: Tensor) -> Tensor:
    """Â = Ψ(x°,(|Φ|,Λ)) · Ψ(x°,(Λ,|Φ|)), the Gram matrix of the learned segment rows."""
    rows, width = x_circ.shape
    return matmul(reshape(x_circ, (rows, width)), reshape(x_circ, (rows, width)).T)


def interference_matrix(states: np.ndarray, bases: Optional[Tensor],
                        collapse: Optional[CollapseBatch],
                        operators: Optional[Tuple[Tensor, Tensor]] = None) -> Tensor:
    """
    ã(j, k) = 2·⟨x*_j| Ō_k · O_j · O_j · O_k |x*_j⟩.

    Row j is the future segment, column k the past one; O are the top-c
    (occurrence) operators and Ō the bottom-c (non-occurrence) operators.

    Args:
        states: |Φ|×Λ unit states
        bases: |Φ|×|B|×Λ basis stack
        collapse: Collapse results of every segment
        operators: Precomputed (top, bottom) operator stacks, if available

    Raises:
        ContractError: If a segment has no collapse result
    """
    segments = states.shape[0]
    if collapse is None or len(collapse) != segments:
        have = 0 if collapse is None else len(collapse)
        raise ContractError(f"interference needs a collapse result per segment ({have}/{segments})")
    if operators is None:
        operators = (event_operators(bases, collapse.top_mask()),
                     event_operators(bases, collapse.bottom_mask()))
    top_ops, bottom_ops = operators
    x = Tensor(states)
    past = einsum('kab,jb->jka', top_ops, x)
    past_not = einsum('kab,jb->jka', bottom_ops, x)
    future_twice = einsum('jab,jbc->jac', top_ops, top_ops)
    return mul(einsum('jka,jab,jkb->jk', past_not, future_twice, past), 2.0)


def temporal_mask(coords: np.ndarray, enabled: bool = True) -> np.ndarray:
    """Boolean |Φ|×|Φ| mask, True where the row's segment index exceeds the column's."""
    coords = np.asarray(coords)
    if not enabled:
        return np.ones((coords.size, coords.size), dtype=bool)
    return coords[:, None] > coords[None, :]


def filter_threshold(values: np.ndarray, ratio: float) -> float:
    """t = ratio·(max − min) + min over the whole matrix (zeros included)."""
    low, high = float(values.min()), float(values.max())
    return min(low + ratio * (high - low), high)


def apply_filter(matrix: Tensor, ratio: float, coords: np.ndarray,
                 temporal: bool = True) -> Tensor:
    """
    ReLU, ratio threshold and temporal mask.

    The keep/drop mask is recomputed on every call and treated as a constant;
    gradients flow through the retained values only.

    Raises:
        ConfigError: If ratio lies outside [0, 1]
        ShapeError: If coords does not match the matrix
    """
    if not 0.0 <= ratio <= 1.0:
        raise ConfigError(f"filter ratio must lie in [0, 1] (got {ratio})")
    coords = np.asarray(coords)
    if matrix.ndim != 2 or matrix.shape != (coords.size, coords.size):
        raise ShapeError("apply_filter", matrix.shape, coords.shape)
    rectified = relu(matrix)
    keep = rectified.data >= filter_threshold(rectified.data, ratio)
    keep &= temporal_mask(coords, temporal)
    return mul(rectified, Tensor(keep.astype(np.float64)))


def row_normalize(matrix: Tensor) -> Tensor:
    """
    Divide each row by its sum; all-zero rows stay zero.

    Raises:
        ContractError: If an entry is negative
    """
    if np.any(matrix.data < 0):
        raise ContractError("row_normalize expects non-negative entries")
    return row_normalize_tensor(matrix)


def build_adjacency(continuity: Tensor, interference: Tensor, coords: np.ndarray,
                    alpha: float, beta: float, temporal: bool = True) -> AdjacencyPair:
    """Filter and normalise both raw matrices."""
    continuity_f = apply_filter(continuity, alpha, coords, temporal)
    interference_f = apply_filter(interference, beta, coords, temporal)
    logger.debug(
        f"Adjacency kept {int(np.count_nonzero(continuity_f.data))} continuity / "
        f"{int(np.count_nonzero(interference_f.data))} interference edges"
    )
    return AdjacencyPair(
        continuity=continuity_f,
        interference=interference_f,
        continuity_norm=row_normalize(continuity_f),
        interference_norm=row_normalize(interference_f),
        alpha=alpha,
        beta=beta,
    )
