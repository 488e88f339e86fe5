"""Ranking, orthogonality, continuity and regularisation losses."""
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ContractError, NonFiniteError
from core.logger import get_logger
from model.params import ModelParams
from numerics.tensor import (
    Tensor, add, einsum, frobenius_norm, matmul, mean, mul, neg_log_sigmoid, reshape, sub, take, tsum,
)
from training.sampling import TrainingPair

logger = get_logger(__name__)


@dataclass(frozen=True)
class LossTerms:
    """Plain-float view of one loss evaluation."""
    bpr: float
    orthogonality: float
    continuity: float
    regularizer: float
    total: float


def pair_loss(representation: Tensor, liked: np.ndarray, disliked: np.ndarray) -> Tensor:
    """
    Σ over liked × disliked of −log σ(x̄·y◁ − x̄·y▷) for one instance.

    Raises:
        ContractError: If either item set is empty
    """
    liked = np.atleast_2d(np.asarray(liked, dtype=np.float64))
    disliked = np.atleast_2d(np.asarray(disliked, dtype=np.float64))
    if liked.size == 0 or disliked.size == 0:
        raise ContractError("bpr_loss needs at least one liked and one disliked item")
    x = reshape(representation, (1, representation.size))
    positive = matmul(x, Tensor(liked.T))
    negative = matmul(x, Tensor(disliked.T))
    margin = sub(reshape(positive, (liked.shape[0], 1)), reshape(negative, (1, disliked.shape[0])))
    return tsum(neg_log_sigmoid(margin))


def bpr_loss(representations: Union[Tensor, Sequence[Tensor]],
             pairs: Union[TrainingPair, Sequence[TrainingPair]]) -> Tensor:
    """
    L₁: mean over instances of the per-instance pair loss.

    Raises:
        ContractError: On empty inputs or mismatched counts
    """
    if isinstance(representations, Tensor):
        representations = [representations]
    if isinstance(pairs, TrainingPair):
        pairs = [pairs]
    if not representations or len(representations) != len(pairs):
        raise ContractError(
            f"bpr_loss needs one item pair set per instance ({len(representations)} vs {len(pairs)})"
        )
    terms = [pair_loss(x, p.liked, p.disliked) for x, p in zip(representations, pairs)]
    total = terms[0]
    for term in terms[1:]:
        total = add(total, term)
    return mul(total, 1.0 / len(terms))


def continuity_loss(x_circ: Tensor, states: np.ndarray, electrodes: int, count: int) -> Tensor:
    """
    L₃ = Σ_m Σ_{i<℧} −log σ(x°(m,i) · x*(m,i+1)).

    Every electrode contributes its ℧−1 adjacent pairs.
    """
    if count < 2:
        logger.warning(f"Only {count} segment(s) per electrode; continuity loss is 0")
        return Tensor(0.0)
    rows = np.array([m * count + i for m in range(electrodes) for i in range(count - 1)])
    current = take(x_circ, rows)
    following = Tensor(np.asarray(states)[rows + 1])
    dots = einsum('ja,ja->j', current, following)
    return tsum(neg_log_sigmoid(dots))


def orthogonality_loss(penalties: Optional[Tensor]) -> Tensor:
    """L₂: mean of ‖B·Bᵀ − I‖_F over the quantum spaces (0 without bases)."""
    if penalties is None or penalties.size == 0:
        return Tensor(0.0)
    return mean(penalties)


def parameter_norm(params: Union[ModelParams, Iterable[Tensor]]) -> Tensor:
    """‖Γ‖_F as the sum of Frobenius norms of every registered block."""
    if isinstance(params, ModelParams):
        blocks = [(t, axis) for _, t, axis in params.norm_blocks()]
    else:
        blocks = [(t, None) for t in params]
    total: Tensor = Tensor(0.0)
    for tensor, axis in blocks:
        total = add(total, tsum(frobenius_norm(tensor, axis=axis)))
    return total


def _check_finite(term: Tensor, name: str) -> None:
    if not np.all(np.isfinite(term.data)):
        raise NonFiniteError("loss term", name)


def total_loss(l1: Tensor, l2: Tensor, l3: Tensor,
               params: Union[ModelParams, Iterable[Tensor]], rho: float) -> Tuple[Tensor, LossTerms]:
    """
    L = L₁ + L₂ + L₃ + ρ·‖Γ‖_F.

    Raises:
        NonFiniteError: Naming the first non-finite term
    """
    regularizer = mul(parameter_norm(params), rho) if rho else Tensor(0.0)
    for term, name in ((l1, "bpr"), (l2, "orthogonality"), (l3, "continuity"), (regularizer, "regularizer")):
        _check_finite(term, name)
    total = add(add(add(l1, l2), l3), regularizer)
    _check_finite(total, "total")
    return total, LossTerms(l1.item(), l2.item(), l3.item(), regularizer.item(), total.item())
