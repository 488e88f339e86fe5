"""The learnable parameter registry Γ (bases, GCN layers, fusion layers)."""
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from core.config import HyperParams
from core.constants import Ablation, Branch
from core.exceptions import ContractError, NonFiniteError, ShapeError
from core.logger import get_logger
from core.utils import derive_seed
from model.preprocess import segment_count
from numerics.init import xavier_init
from numerics.tensor import Tensor

logger = get_logger(__name__)

BASES = "quantum.bases"
FUSION_LAYERS = ("h1", "h2", "h3", "h4", "h5", "h6")


def gcn_name(branch: Branch, depth: int) -> str:
    return f"gcn.{branch.value}.{depth}"


def adjacency_name(branch: Branch) -> str:
    return f"adjacency.{branch.value}"


def fusion_name(layer: str) -> str:
    return f"fusion.{layer}"


@dataclass(frozen=True)
class ParamLayout:
    """Recording geometry the parameters were built for."""
    electrodes: int
    samples: int
    segments: int
    branch_width: int

    @classmethod
    def for_recording(cls, hyper: HyperParams, electrodes: int, samples: int) -> "ParamLayout":
        hyper.validate(samples)
        count = segment_count(samples, hyper.window, hyper.step)
        blocks = hyper.depth + (1 if hyper.prepend_initial else 0)
        return cls(electrodes, samples, electrodes * count, blocks * hyper.window)


def parameter_shapes(hyper: HyperParams, layout: ParamLayout,
                     ablation: Ablation = Ablation.NONE) -> Dict[str, Tuple[int, ...]]:
    """Name → shape of every tensor in Γ, in registry order."""
    shapes: Dict[str, Tuple[int, ...]] = {}
    if ablation != Ablation.NO_QM:
        shapes[BASES] = (layout.segments, hyper.basis_size, hyper.window)
    for branch in Branch:
        if ablation == Ablation.NO_GCN:
            shapes[adjacency_name(branch)] = (layout.segments, layout.branch_width)
        else:
            for d in range(hyper.depth):
                shapes[gcn_name(branch, d)] = (hyper.window, hyper.window)
    flat = layout.segments * layout.branch_width
    h = hyper.hidden
    shapes.update({
        fusion_name("h1"): (flat, h),
        fusion_name("h2"): (h, h),
        fusion_name("h3"): (flat, h),
        fusion_name("h4"): (h, h),
        fusion_name("h5"): (2 * h, h),
        fusion_name("h6"): (h, hyper.embedding_dim),
    })
    return shapes


class ModelParams:
    """Ordered, exhaustive mapping of parameter name to trainable Tensor."""

    def __init__(self, tensors: Mapping[str, Tensor], layout: ParamLayout):
        self._tensors: Dict[str, Tensor] = dict(tensors)
        self.layout = layout

    @classmethod
    def initialize(cls, hyper: HyperParams, layout: ParamLayout, seed: int,
                   ablation: Ablation = Ablation.NONE) -> "ModelParams":
        """
        Xavier-initialise every parameter.

        Each tensor draws from its own seed derived from (seed, name), so adding
        or removing a tensor never shifts the values of the others.
        """
        tensors = {
            name: xavier_init(shape, derive_seed(seed, name), name=name)
            for name, shape in parameter_shapes(hyper, layout, ablation).items()
        }
        logger.debug(f"Initialised {len(tensors)} parameters "
                     f"({sum(t.size for t in tensors.values())} values)")
        return cls(tensors, layout)

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self._tensors[name]
        except KeyError:
            raise ContractError(f"unknown parameter '{name}'")

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def __len__(self) -> int:
        return len(self._tensors)

    def items(self):
        return self._tensors.items()

    def as_dict(self) -> Dict[str, Tensor]:
        return dict(self._tensors)

    @property
    def size(self) -> int:
        return sum(t.size for t in self._tensors.values())

    def zero_grad(self) -> None:
        for tensor in self._tensors.values():
            tensor.grad = None

    def grads(self) -> Dict[str, np.ndarray]:
        """Current gradients; parameters the loss never reached get zeros."""
        return {
            name: t.grad if t.grad is not None else np.zeros_like(t.data)
            for name, t in self._tensors.items()
        }

    def norm_blocks(self) -> List[Tuple[str, Tensor, Optional[Tuple[int, ...]]]]:
        """
        (name, tensor, axis) blocks whose Frobenius norms form ‖Γ‖_F.

        The basis stack counts one norm per (m, i) slot, the other tensors
        one norm each.
        """
        return [(name, t, (1, 2) if name == BASES else None) for name, t in self._tensors.items()]

    def check_finite(self) -> None:
        for name, tensor in self._tensors.items():
            if not np.all(np.isfinite(tensor.data)):
                raise NonFiniteError("parameter", name)

    def state_dict(self) -> Dict[str, np.ndarray]:
        """Deep copies of every parameter value."""
        return {name: t.data.copy() for name, t in self._tensors.items()}

    def load_state(self, state: Mapping[str, np.ndarray]) -> None:
        """
        Overwrite parameter values in place.

        Raises:
            ContractError: If the name sets differ
            ShapeError: If a shape differs
        """
        if set(state) != set(self._tensors):
            missing = sorted(set(self._tensors) ^ set(state))
            raise ContractError(f"parameter sets differ: {', '.join(missing)}")
        for name, values in state.items():
            tensor = self._tensors[name]
            if values.shape != tensor.shape:
                raise ShapeError(f"load '{name}'", values.shape, tensor.shape)
            tensor.data[...] = values

    def copy(self) -> "ModelParams":
        return ModelParams(
            {name: Tensor(t.data.copy(), requires_grad=True, name=name)
             for name, t in self._tensors.items()},
            self.layout,
        )
