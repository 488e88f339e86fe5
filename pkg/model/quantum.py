"""Real Hilbert-space machinery: unit states, collapse, projectors, interference.

Two layers live here. The plain numpy functions operate on one state and one
basis and serve inspection and verification. The `*_batch`/plural functions
operate on all |Φ| segments at once on `Tensor`s so gradients reach the bases.
Index selection (top-c / bottom-c) is always computed on plain values and
carries no gradient.
"""
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from core.constants import UNIT_NORM_FLOOR
from core.exceptions import ConfigError, ContractError, ShapeError
from core.logger import get_logger
from numerics.tensor import Tensor, einsum, frobenius_norm, mul, sub

logger = get_logger(__name__)


@dataclass(frozen=True)
class UnitState:
    vector: np.ndarray
    degenerate: bool = False


@dataclass
class QuantumSpace:
    """Basis matrix B(m, i): |B| rows of length Λ, rows are the vectors b_j."""
    basis: np.ndarray
    electrode: int = 1
    segment: int = 1

    @property
    def size(self) -> int:
        return self.basis.shape[0]


@dataclass(frozen=True)
class CollapseResult:
    """Collapse probabilities of one state and its top-c / bottom-c indices (0-based)."""
    probabilities: np.ndarray
    top_indices: np.ndarray
    bottom_indices: np.ndarray


@dataclass(frozen=True)
class EventOperator:
    """Σ_j |b_j⟩⟨b_j| over the selected basis vectors."""
    projector: np.ndarray


OperatorLike = Union[EventOperator, np.ndarray]


def _matrix(op: OperatorLike) -> np.ndarray:
    return op.projector if isinstance(op, EventOperator) else np.asarray(op, dtype=np.float64)


def to_unit_state(v: Sequence[float]) -> UnitState:
    """
    Revise a vector to unit length.

    A vector with norm below 1e-12 carries no signal: it maps to the zero
    vector and is flagged degenerate.
    """
    v = np.asarray(v, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm < UNIT_NORM_FLOOR:
        return UnitState(np.zeros_like(v), degenerate=True)
    return UnitState(v / norm)


def unit_states(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Row-wise to_unit_state; returns (states, degenerate mask)."""
    rows = np.asarray(rows, dtype=np.float64)
    norms = np.linalg.norm(rows, axis=1, keepdims=True)
    degenerate = norms[:, 0] < UNIT_NORM_FLOOR
    safe = np.where(norms < UNIT_NORM_FLOOR, 1.0, norms)
    states = np.where(degenerate[:, None], 0.0, rows / safe)
    return states, degenerate


def select_indices(probabilities: Sequence[float], c: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Indices of the c highest and the c lowest probabilities.

    Ties go to the lowest index. The bottom set is drawn from the indices not
    already in the top set, so the two are always disjoint.

    Raises:
        ConfigError: If 2c exceeds the number of probabilities
    """
    p = np.asarray(probabilities, dtype=np.float64)
    if c < 1 or 2 * c > p.size:
        raise ConfigError(f"cannot select 2c = {2 * c} disjoint indices from {p.size} probabilities")
    top = np.argsort(-p, kind='stable')[:c]
    rest = np.setdiff1d(np.arange(p.size), top)
    bottom = rest[np.argsort(p[rest], kind='stable')[:c]]
    return top, bottom


def collapse_probabilities(state: Sequence[float], space: QuantumSpace, c: int) -> CollapseResult:
    """
    P_j = (b_j · state)² for every basis row, plus top/bottom index selection.

    Raises:
        ConfigError: If c > |B| / 2
        ShapeError: If the state length differs from the basis width
    """
    state = np.asarray(state, dtype=np.float64)
    basis = np.asarray(space.basis, dtype=np.float64)
    if basis.shape[1] != state.shape[0]:
        raise ShapeError("collapse_probabilities", basis.shape, state.shape)
    if 2 * c > basis.shape[0]:
        raise ConfigError(f"c = {c} exceeds half the basis size {basis.shape[0]}")
    amplitudes = basis @ state
    probabilities = amplitudes * amplitudes
    top, bottom = select_indices(probabilities, c)
    return CollapseResult(probabilities, top, bottom)


def event_operator(basis: np.ndarray, indices: Sequence[int]) -> EventOperator:
    """
    Σ_{j ∈ indices} outer(b_j, b_j), a symmetric Λ×Λ matrix.

    Raises:
        ContractError: If indices is empty
    """
    basis = np.asarray(basis, dtype=np.float64)
    indices = list(indices)
    if not indices:
        raise ContractError("event_operator needs at least one basis index")
    width = basis.shape[1]
    projector = np.zeros((width, width), dtype=np.float64)
    for j in indices:
        projector += np.outer(basis[j], basis[j])
    return EventOperator(projector)


def project_mixed_state(state: Sequence[float], basis: np.ndarray,
                        indices: Sequence[int]) -> np.ndarray:
    """
    Mixed state x° = (Σ_{j ∈ indices} |b_j⟩⟨b_j|) · state, summed-operator form.

    An empty index set has no collapse target: returns zeros with a warning.
    """
    state = np.asarray(state, dtype=np.float64)
    if len(indices) == 0:
        logger.warning("Empty collapse index set; mixed state is the zero vector")
        return np.zeros_like(state)
    return event_operator(basis, indices).projector @ state


def mixed_state_terms(state: Sequence[float], basis: np.ndarray,
                      indices: Sequence[int]) -> np.ndarray:
    """Term-by-term form Σ_j ⟨b_j|state⟩ |b_j⟩ of the same mixed state."""
    state = np.asarray(state, dtype=np.float64)
    basis = np.asarray(basis, dtype=np.float64)
    out = np.zeros_like(state)
    for j in indices:
        out += float(basis[j] @ state) * basis[j]
    return out


def interference_value(state_future: Sequence[float], o_past: OperatorLike,
                       o_past_not: OperatorLike, o_future: OperatorLike) -> float:
    """
    η = 2 · stateᵀ · o_past_not · o_future · o_future · o_past · state.

    This is the cross term by which the past event and its complement fail
    to add up to the future event's probability.
    """
    x = np.asarray(state_future, dtype=np.float64)
    past, past_not, future = _matrix(o_past), _matrix(o_past_not), _matrix(o_future)
    for op in (past, past_not, future):
        if op.shape != (x.size, x.size):
            raise ShapeError("interference_value", op.shape, x.shape)
    return float(2.0 * x @ past_not @ future @ future @ past @ x)


def orthogonality_penalty(basis: np.ndarray) -> float:
    """‖B·Bᵀ − I‖_F."""
    basis = np.asarray(basis, dtype=np.float64)
    gram = basis @ basis.T
    return float(np.linalg.norm(gram - np.eye(basis.shape[0]), ord='fro'))


# ---------------------------------------------------------------------------
# Batched, differentiable forms
# ---------------------------------------------------------------------------

@dataclass
class CollapseBatch:
    """Collapse results for all |Φ| segments."""
    probabilities: Tensor
    top_indices: np.ndarray
    bottom_indices: np.ndarray

    def __len__(self) -> int:
        return self.top_indices.shape[0]

    def _mask(self, indices: np.ndarray) -> np.ndarray:
        mask = np.zeros(self.probabilities.shape, dtype=np.float64)
        np.put_along_axis(mask, indices, 1.0, axis=1)
        return mask

    def top_mask(self) -> np.ndarray:
        return self._mask(self.top_indices)

    def bottom_mask(self) -> np.ndarray:
        return self._mask(self.bottom_indices)

    def result(self, j: int) -> CollapseResult:
        """CollapseResult of flat row j (0-based)."""
        return CollapseResult(self.probabilities.data[j].copy(),
                              self.top_indices[j].copy(), self.bottom_indices[j].copy())


def collapse_batch(states: np.ndarray, bases: Tensor, c: int) -> CollapseBatch:
    """
    Collapse every segment state onto its own basis.

    Args:
        states: |Φ|×Λ unit states (constants)
        bases: |Φ|×|B|×Λ learnable basis stack
        c: Selection size

    Raises:
        ShapeError: If the stack does not match the states
        ConfigError: If 2c > |B|
    """
    if bases.ndim != 3 or bases.shape[0] != states.shape[0] or bases.shape[2] != states.shape[1]:
        raise ShapeError("collapse_batch", bases.shape, states.shape)
    if 2 * c > bases.shape[1]:
        raise ConfigError(f"c = {c} exceeds half the basis size {bases.shape[1]}")
    amplitudes = einsum('ska,sa->sk', bases, Tensor(states))
    probabilities = mul(amplitudes, amplitudes)
    selections = [select_indices(row, c) for row in probabilities.data]
    top = np.stack([s[0] for s in selections])
    bottom = np.stack([s[1] for s in selections])
    return CollapseBatch(probabilities, top, bottom)


def event_operators(bases: Tensor, mask: np.ndarray) -> Tensor:
    """Per-segment Σ_j mask[s, j] · |b_j⟩⟨b_j|, shape |Φ|×Λ×Λ."""
    return einsum('sk,ska,skb->sab', Tensor(mask), bases, bases)


def mixed_states(operators: Tensor, states: np.ndarray) -> Tensor:
    """x°(s) = O(s) · x*(s) for every segment, shape |Φ|×Λ."""
    return einsum('sab,sb->sa', operators, Tensor(states))


def orthogonality_penalties(bases: Tensor) -> Tensor:
    """‖B(s)·B(s)ᵀ − I‖_F for every slot s, shape |Φ|."""
    gram = einsum('ska,sla->skl', bases, bases)
    identity = Tensor(np.eye(bases.shape[1]))
    return frobenius_norm(sub(gram, identity), axis=(1, 2))

