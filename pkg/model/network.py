"""Approximate-GCN forward pass: preprocess → quantum → graph → GCN branches → fusion."""
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from core.config import HyperParams
from core.constants import Ablation, Branch
from core.exceptions import ConfigError, ContractError
from core.logger import get_logger
from core.utils import make_rng, stage
from model.graph import AdjacencyPair, build_adjacency, continuity_matrix, interference_matrix
from model.params import BASES, ModelParams, adjacency_name, fusion_name, gcn_name
from model.preprocess import EegRecording, PreparedRecording, prepare
from model.quantum import (
    CollapseBatch, collapse_batch, event_operators, mixed_states, orthogonality_penalties,
)
from numerics.tensor import Tensor, add, concat, matmul, mul, relu, reshape

logger = get_logger(__name__)


@dataclass
class GcnStack:
    """Per-depth Λ×Λ layers of one branch plus the teleport ratio ξ."""
    layers: List[Tensor]
    xi: float

    @property
    def depth(self) -> int:
        return len(self.layers)

    @classmethod
    def from_params(cls, params: ModelParams, branch: Branch, hyper: HyperParams) -> "GcnStack":
        return cls([params[gcn_name(branch, d)] for d in range(hyper.depth)], hyper.xi)


@dataclass
class FusionHead:
    """Seq₁ = (H1, H2), Seq₂ = (H3, H4), Seq₃ = (H5, H6)."""
    h1: Tensor
    h2: Tensor
    h3: Tensor
    h4: Tensor
    h5: Tensor
    h6: Tensor

    @classmethod
    def from_params(cls, params: ModelParams) -> "FusionHead":
        return cls(*(params[fusion_name(layer)] for layer in ("h1", "h2", "h3", "h4", "h5", "h6")))

    @property
    def embedding_dim(self) -> int:
        return self.h6.shape[1]

    @staticmethod
    def sequence(x: Tensor, first: Tensor, second: Tensor) -> Tensor:
        """ReLU(x·first)·second."""
        return matmul(relu(matmul(x, first)), second)

    def branch_sequences(self, continuity: Tensor, interference: Tensor):
        """Seq₁ and Seq₂ activations of the flattened branch outputs (1×h each)."""
        return (self.sequence(reshape(continuity, (1, continuity.size)), self.h1, self.h2),
                self.sequence(reshape(interference, (1, interference.size)), self.h3, self.h4))


@dataclass
class ForwardResult:
    """x̄ plus every intermediate the losses and inspection need."""
    prepared: PreparedRecording
    collapse: Optional[CollapseBatch]
    x_circ: Tensor
    continuity_raw: Tensor
    interference_raw: Tensor
    adjacency: AdjacencyPair
    continuity_branch: Tensor
    interference_branch: Tensor
    representation: Tensor
    orthogonality: Optional[Tensor]

    @property
    def states(self) -> np.ndarray:
        return self.prepared.states

    def shapes(self) -> Dict[str, tuple]:
        return {
            'segments': self.prepared.segments.segments.shape,
            'states': self.states.shape,
            'x_circ': self.x_circ.shape,
            'continuity': self.adjacency.continuity.shape,
            'interference': self.adjacency.interference.shape,
            'continuity_branch': self.continuity_branch.shape,
            'interference_branch': self.interference_branch.shape,
            'representation': self.representation.shape,
        }


def gcn_layer(x_circ: Tensor, x_prev: Tensor, adjacency: Tensor, weight: Tensor,
              xi: float) -> Tensor:
    """
    x^{d+1} = [ξ·x° + (1 − ξ)·A•·x^d] · H^d.

    Raises:
        ContractError: On mismatched shapes
    """
    rows, width = x_circ.shape
    if x_prev.shape != (rows, width):
        raise ContractError(f"gcn_layer: x^d shape {x_prev.shape} differs from x° shape {x_circ.shape}")
    if adjacency.shape != (rows, rows):
        raise ContractError(f"gcn_layer: adjacency shape {adjacency.shape} does not match {rows} segments")
    if weight.shape != (width, width):
        raise ContractError(f"gcn_layer: layer shape {weight.shape} is not {width}×{width}")
    teleport = mul(x_circ, xi)
    propagated = mul(matmul(adjacency, x_prev), 1.0 - xi)
    return matmul(add(teleport, propagated), weight)


def depth_concat(outputs: Sequence[Tensor]) -> Tensor:
    """Feature-axis concatenation of the depth outputs, in order."""
    return concat(list(outputs), axis=1)


def fuse_final(continuity: Tensor, interference: Tensor, head: FusionHead) -> Tensor:
    """
    x̄ = Seq₃(Seq₁(flat(x̂■)) ⊕ Seq₂(flat(x̃■))), an E-vector.

    Raises:
        ContractError: If the branch outputs differ in shape
    """
    if continuity.shape != interference.shape:
        raise ContractError(
            f"fuse_final: branch shapes differ ({continuity.shape} vs {interference.shape})"
        )
    seq1, seq2 = head.branch_sequences(continuity, interference)
    fused = FusionHead.sequence(concat([seq1, seq2], axis=1), head.h5, head.h6)
    return reshape(fused, (head.embedding_dim,))


class QuarkModel:
    """Forward pass of one recording under a fixed configuration and parameter set."""

    def __init__(self, hyper: HyperParams, params: ModelParams,
                 ablation: Ablation = Ablation.NONE, seed: int = 0):
        self.hyper = hyper
        self.params = params
        self.ablation = Ablation(ablation)
        self.seed = seed

    def prepare(self, recording: EegRecording) -> PreparedRecording:
        with stage("preprocess"):
            return prepare(recording, self.hyper.window, self.hyper.step)

    def _quantum(self, prepared: PreparedRecording):
        states = prepared.states
        if self.ablation == Ablation.NO_QM:
            segments = states.shape[0]
            rng = make_rng(self.seed, "no_qm", prepared.recording.recording_id)
            x_circ = Tensor(states)
            return (None, x_circ, Tensor(rng.random((segments, segments))),
                    Tensor(rng.random((segments, segments))), None)
        bases = self.params[BASES]
        collapse = collapse_batch(states, bases, self.hyper.c)
        top_ops = event_operators(bases, collapse.top_mask())
        bottom_ops = event_operators(bases, collapse.bottom_mask())
        x_circ = mixed_states(top_ops, states)
        continuity = continuity_matrix(x_circ)
        interference = interference_matrix(states, bases, collapse, (top_ops, bottom_ops))
        return collapse, x_circ, continuity, interference, orthogonality_penalties(bases)

    def _branch(self, branch: Branch, x_circ: Tensor, adjacency: Tensor) -> Tensor:
        if self.ablation == Ablation.NO_GCN:
            return matmul(adjacency, self.params[adjacency_name(branch)])
        stack = GcnStack.from_params(self.params, branch, self.hyper)
        outputs = [x_circ] if self.hyper.prepend_initial else []
        x_prev = x_circ
        for layer in stack.layers:
            x_prev = gcn_layer(x_circ, x_prev, adjacency, layer, stack.xi)
            outputs.append(x_prev)
        return depth_concat(outputs)

    def forward(self, recording: Union[EegRecording, PreparedRecording]) -> ForwardResult:
        """
        Run the full pipeline on one recording.

        Raises:
            StageError: Naming the stage (preprocess, quantum, graph, gcn, fusion)
        """
        prepared = recording if isinstance(recording, PreparedRecording) else self.prepare(recording)
        if prepared.segments.size != self.params.layout.segments:
            raise ConfigError(
                f"recording {prepared.recording.recording_id} yields {prepared.segments.size} "
                f"segments; the model was built for {self.params.layout.segments}"
            )
        with stage("quantum"):
            collapse, x_circ, continuity, interference, penalties = self._quantum(prepared)
        with stage("graph"):
            if self.ablation == Ablation.NO_CONTINUITY:
                continuity = Tensor(np.zeros(continuity.shape))
            if self.ablation == Ablation.NO_INTERFERENCE:
                interference = Tensor(np.zeros(interference.shape))
            adjacency = build_adjacency(
                continuity, interference, prepared.coords, self.hyper.alpha, self.hyper.beta,
                temporal=self.ablation != Ablation.NO_TEMPORAL_MASK,
            )
        with stage("gcn"):
            continuity_branch = self._branch(Branch.CONTINUITY, x_circ, adjacency.continuity_norm)
            interference_branch = self._branch(Branch.INTERFERENCE, x_circ, adjacency.interference_norm)
        with stage("fusion"):
            representation = fuse_final(continuity_branch, interference_branch,
                                        FusionHead.from_params(self.params))
        return ForwardResult(
            prepared=prepared,
            collapse=collapse,
            x_circ=x_circ,
            continuity_raw=continuity,
            interference_raw=interference,
            adjacency=adjacency,
            continuity_branch=continuity_branch,
            interference_branch=interference_branch,
            representation=representation,
            orthogonality=penalties,
        )

    def represent(self, recording: Union[EegRecording, PreparedRecording]) -> np.ndarray:
        """x̄ as a plain array, for ranking."""
        return self.forward(recording).representation.data.copy()


def forward(recording: EegRecording, params: ModelParams, hyper: HyperParams,
            ablation: Ablation = Ablation.NONE, seed: int = 0) -> ForwardResult:
    """Functional form of QuarkModel.forward."""
    return QuarkModel(hyper, params, ablation, seed).forward(recording)
