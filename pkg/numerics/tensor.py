"""Dense float64 tensors with reverse-mode differentiation.

Every differentiable operation is a `Function` subclass with a `forward`
working on numpy arrays and a `backward` returning one gradient per input.
`Function.apply` wires the result into the graph; `backward()` walks the
graph in reverse topological order and accumulates leaf gradients.
"""
import re
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.exceptions import ContractError, ShapeError
from core.logger import get_logger

logger = get_logger(__name__)

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]


class Function:
    """Base class for differentiable operations."""

    def __init__(self, *tensors: "Tensor"):
        self.tensors = tensors

    def forward(self, *args: np.ndarray, **kwargs) -> np.ndarray:
        raise NotImplementedError(f"{self.__class__.__name__} must implement forward()")

    def backward(self, grad: np.ndarray) -> Tuple[Optional[np.ndarray], ...]:
        """Return dL/d(input) for every input, given dL/d(output)."""
        raise NotImplementedError(f"{self.__class__.__name__} must implement backward()")

    @classmethod
    def apply(cls, *tensors: "Tensor", **kwargs) -> "Tensor":
        """Run the forward pass and attach the result to the graph."""
        func = cls(*tensors)
        out_data = func.forward(*(t.data for t in tensors), **kwargs)
        requires_grad = any(t.requires_grad for t in tensors)
        return Tensor(out_data, requires_grad=requires_grad,
                      creator=func if requires_grad else None)

    @staticmethod
    def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
        """Sum out broadcast dimensions so `grad` matches `shape`."""
        if grad.shape == shape:
            return grad
        while grad.ndim > len(shape):
            grad = grad.sum(axis=0)
        for axis, size in enumerate(shape):
            if size == 1 and grad.shape[axis] != 1:
                grad = grad.sum(axis=axis, keepdims=True)
        return grad


class Tensor:
    """A float64 array that records how it was computed."""

    __array_priority__ = 1000

    def __init__(self, data: ArrayLike, requires_grad: bool = False,
                 creator: Optional[Function] = None, name: Optional[str] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.requires_grad = requires_grad
        self.creator = creator
        self.grad: Optional[np.ndarray] = None
        self.name = name

    # -- plumbing ---------------------------------------------------------

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return transpose(self)

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() on tensor of shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        if self.grad is not None:
            self.grad.fill(0.0)

    def accumulate(self, grad: np.ndarray) -> None:
        if grad.shape != self.data.shape:
            raise ShapeError("gradient accumulation", grad.shape, self.data.shape)
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64, copy=True)
        else:
            self.grad += grad

    def backward(self) -> Dict["Tensor", np.ndarray]:
        return backward(self)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}{label})"

    # -- operators --------------------------------------------------------

    def __add__(self, other): return add(self, other)
    def __radd__(self, other): return add(other, self)
    def __sub__(self, other): return sub(self, other)
    def __rsub__(self, other): return sub(other, self)
    def __mul__(self, other): return mul(self, other)
    def __rmul__(self, other): return mul(other, self)
    def __neg__(self): return mul(self, -1.0)
    def __truediv__(self, other):
        if isinstance(other, Tensor):
            raise ContractError("division is only defined by a constant")
        return mul(self, 1.0 / float(other))
    def __matmul__(self, other): return matmul(self, other)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def sum(self, axis=None) -> "Tensor":
        return tsum(self, axis=axis)


def as_tensor(value: Union[Tensor, ArrayLike]) -> Tensor:
    """Wrap constants; tensors pass through."""
    return value if isinstance(value, Tensor) else Tensor(value)


# ---------------------------------------------------------------------------
# Elementwise arithmetic
# ---------------------------------------------------------------------------

class Add(Function):
    def forward(self, a, b):
        self.shapes = (a.shape, b.shape)
        return a + b

    def backward(self, grad):
        return (self.unbroadcast(grad, self.shapes[0]),
                self.unbroadcast(grad, self.shapes[1]))


class Sub(Function):
    def forward(self, a, b):
        self.shapes = (a.shape, b.shape)
        return a - b

    def backward(self, grad):
        return (self.unbroadcast(grad, self.shapes[0]),
                self.unbroadcast(-grad, self.shapes[1]))


class Mul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return a * b

    def backward(self, grad):
        return (self.unbroadcast(grad * self.b, self.a.shape),
                self.unbroadcast(grad * self.a, self.b.shape))


def _check_broadcast(op: str, a: Tensor, b: Tensor) -> None:
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(op, a.shape, b.shape)


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("add", a, b)
    return Add.apply(a, b)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("sub", a, b)
    return Sub.apply(a, b)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _check_broadcast("mul", a, b)
    return Mul.apply(a, b)


class ReLU(Function):
    def forward(self, a):
        # subgradient at exactly 0 is 0
        self.mask = a > 0
        return np.where(self.mask, a, 0.0)

    def backward(self, grad):
        return (grad * self.mask,)


def relu(t: Tensor) -> Tensor:
    """Elementwise max(0, v)."""
    return ReLU.apply(as_tensor(t))


class NegLogSigmoid(Function):
    """-log(sigmoid(x)), computed as softplus(-x)."""

    def forward(self, a):
        self.a = a
        return np.logaddexp(0.0, -a)

    def backward(self, grad):
        # d/dx softplus(-x) = -sigmoid(-x)
        sig_neg = np.exp(-np.logaddexp(0.0, self.a))
        return (-grad * sig_neg,)


def neg_log_sigmoid(t: Tensor) -> Tensor:
    return NegLogSigmoid.apply(as_tensor(t))


# ---------------------------------------------------------------------------
# Linear algebra and shape manipulation
# ---------------------------------------------------------------------------

class MatMul(Function):
    def forward(self, a, b):
        self.a, self.b = a, b
        return np.matmul(a, b)

    def backward(self, grad):
        ga = np.matmul(grad, np.swapaxes(self.b, -1, -2))
        gb = np.matmul(np.swapaxes(self.a, -1, -2), grad)
        return (self.unbroadcast(ga, self.a.shape), self.unbroadcast(gb, self.b.shape))


def matmul(a, b) -> Tensor:
    """
    Matrix product (batched over leading dimensions).

    Raises:
        ShapeError: If either operand has fewer than two dimensions or the
            inner dimensions disagree
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul", a.shape, b.shape)
    try:
        np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    except ValueError:
        raise ShapeError("matmul", a.shape, b.shape)
    return MatMul.apply(a, b)


class Reshape(Function):
    def forward(self, a, shape):
        self.in_shape = a.shape
        return a.reshape(shape)

    def backward(self, grad):
        return (grad.reshape(self.in_shape),)


def reshape(t: Tensor, shape: Sequence[int]) -> Tensor:
    """Row-major reshape; element order and count are preserved."""
    t = as_tensor(t)
    shape = tuple(int(s) for s in shape)
    if int(np.prod(shape)) != t.size:
        raise ShapeError("reshape", t.shape, shape)
    return Reshape.apply(t, shape=shape)


class Transpose(Function):
    def forward(self, a, axes):
        self.axes = axes
        return np.transpose(a, axes)

    def backward(self, grad):
        return (np.transpose(grad, np.argsort(self.axes)),)


def transpose(t: Tensor, axes: Optional[Sequence[int]] = None) -> Tensor:
    t = as_tensor(t)
    if axes is None:
        axes = tuple(range(t.ndim - 2)) + (t.ndim - 1, t.ndim - 2) if t.ndim >= 2 else (0,)
    return Transpose.apply(t, axes=tuple(axes))


class Sum(Function):
    def forward(self, a, axis):
        self.in_shape = a.shape
        self.axis = axis
        return np.sum(a, axis=axis)

    def backward(self, grad):
        if self.axis is None:
            return (np.broadcast_to(grad, self.in_shape).copy(),)
        axes = self.axis if isinstance(self.axis, tuple) else (self.axis,)
        expanded = grad
        for ax in sorted(a % len(self.in_shape) for a in axes):
            expanded = np.expand_dims(expanded, ax)
        return (np.broadcast_to(expanded, self.in_shape).copy(),)


def tsum(t: Tensor, axis=None) -> Tensor:
    return Sum.apply(as_tensor(t), axis=axis)


def mean(t: Tensor) -> Tensor:
    t = as_tensor(t)
    return mul(tsum(t), 1.0 / max(t.size, 1))


class Concat(Function):
    def forward(self, *arrays, axis):
        self.axis = axis
        self.sizes = [a.shape[axis] for a in arrays]
        return np.concatenate(arrays, axis=axis)

    def backward(self, grad):
        splits = np.cumsum(self.sizes)[:-1]
        return tuple(np.split(grad, splits, axis=self.axis))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """
    Concatenate along an existing axis.

    Raises:
        ShapeError: If the non-concatenated dimensions differ
    """
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ContractError("concat of an empty sequence")
    ref = tensors[0].shape
    for t in tensors[1:]:
        if t.ndim != len(ref) or any(
                s != r for i, (s, r) in enumerate(zip(t.shape, ref)) if i != axis % len(ref)):
            raise ShapeError("concat", ref, t.shape)
    return Concat.apply(*tensors, axis=axis)


class Take(Function):
    def forward(self, a, indices):
        self.in_shape = a.shape
        self.indices = indices
        return a[indices]

    def backward(self, grad):
        out = np.zeros(self.in_shape, dtype=np.float64)
        np.add.at(out, self.indices, grad)
        return (out,)


def take(t: Tensor, indices: Sequence[int]) -> Tensor:
    """Gather rows (first axis) by integer index."""
    return Take.apply(as_tensor(t), indices=np.asarray(indices, dtype=np.intp))


_EINSUM_SPEC = re.compile(r"^([a-zA-Z,]+)->([a-zA-Z]*)$")


class Einsum(Function):
    """Explicit-output einsum; operands may not repeat an index internally."""

    def forward(self, *arrays, inputs, output):
        self.arrays = arrays
        self.inputs = inputs
        self.output = output
        return np.einsum(f"{','.join(inputs)}->{output}", *arrays, optimize=True)

    def backward(self, grad):
        grads = []
        for i, (subs, tensor) in enumerate(zip(self.inputs, self.tensors)):
            if not tensor.requires_grad:
                grads.append(None)
                continue
            others = [s for j, s in enumerate(self.inputs) if j != i]
            arrays = [a for j, a in enumerate(self.arrays) if j != i]
            spec = f"{','.join([self.output] + others)}->{subs}"
            grads.append(np.einsum(spec, grad, *arrays, optimize=True))
        return tuple(grads)


def einsum(spec: str, *tensors: Tensor) -> Tensor:
    """
    Differentiable einsum with an explicit output, e.g. 'ij,jk->ik'.

    Raises:
        ContractError: On specs whose gradient is not expressible as an einsum
        ShapeError: If operand shapes disagree with the spec
    """
    match = _EINSUM_SPEC.match(spec.replace(' ', ''))
    if not match:
        raise ContractError(f"einsum spec must be explicit: '{spec}'")
    inputs = match.group(1).split(',')
    output = match.group(2)
    tensors = [as_tensor(t) for t in tensors]
    if len(inputs) != len(tensors):
        raise ContractError(f"einsum '{spec}' expects {len(inputs)} operands, got {len(tensors)}")
    sizes: Dict[str, int] = {}
    for subs, tensor in zip(inputs, tensors):
        if len(subs) != tensor.ndim or len(set(subs)) != len(subs):
            raise ShapeError(f"einsum '{spec}'", tensor.shape)
        for letter, size in zip(subs, tensor.shape):
            if sizes.setdefault(letter, size) != size:
                raise ShapeError(f"einsum '{spec}'", *(t.shape for t in tensors))
    for i, subs in enumerate(inputs):
        reachable = set(output).union(*(set(s) for j, s in enumerate(inputs) if j != i))
        if not set(subs) <= reachable:
            raise ContractError(f"einsum '{spec}': operand {i} sums an index internally")
    return Einsum.apply(*tensors, inputs=inputs, output=output)


# ---------------------------------------------------------------------------
# Norms and normalisation
# ---------------------------------------------------------------------------

class FrobeniusNorm(Function):
    def forward(self, a, axis):
        self.a = a
        self.axis = axis
        self.norm = np.sqrt(np.sum(a * a, axis=axis, keepdims=True))
        return np.sqrt(np.sum(a * a, axis=axis))

    def backward(self, grad):
        g = grad
        if self.axis is not None:
            axes = self.axis if isinstance(self.axis, tuple) else (self.axis,)
            for ax in sorted(a % self.a.ndim for a in axes):
                g = np.expand_dims(g, ax)
        safe = np.where(self.norm > 0, self.norm, 1.0)
        return (np.where(self.norm > 0, g * self.a / safe, 0.0),)


def frobenius_norm(t: Tensor, axis=None) -> Tensor:
    """sqrt of the sum of squares over `axis` (all axes by default)."""
    return FrobeniusNorm.apply(as_tensor(t), axis=axis)


class RowNormalize(Function):
    def forward(self, a):
        sums = a.sum(axis=1, keepdims=True)
        self.nonzero = sums != 0
        self.sums = np.where(self.nonzero, sums, 1.0)
        self.out = np.where(self.nonzero, a / self.sums, 0.0)
        return self.out

    def backward(self, grad):
        inner = np.sum(grad * self.out, axis=1, keepdims=True)
        return (np.where(self.nonzero, (grad - inner) / self.sums, 0.0),)


def row_normalize_tensor(t: Tensor) -> Tensor:
    """Divide each row by its sum; all-zero rows stay zero."""
    t = as_tensor(t)
    if t.ndim != 2:
        raise ShapeError("row_normalize", t.shape)
    return RowNormalize.apply(t)


# ---------------------------------------------------------------------------
# Graph traversal
# ---------------------------------------------------------------------------

class ComputeGraph:
    """Operation records reachable from one output, in topological order."""

    def __init__(self, nodes: List[Tensor]):
        self.nodes = nodes
        self.order = {id(node): index for index, node in enumerate(nodes)}

    @classmethod
    def trace(cls, output: Tensor) -> "ComputeGraph":
        """Collect every tensor the output depends on, inputs before outputs."""
        nodes: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(output, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                nodes.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            if node.creator is not None:
                for parent in reversed(node.creator.tensors):
                    if parent.requires_grad and id(parent) not in visited:
                        stack.append((parent, False))
        return cls(nodes)

    def __len__(self) -> int:
        return len(self.nodes)

    def leaves(self) -> List[Tensor]:
        return [n for n in self.nodes if n.creator is None]


def backward(loss: Tensor, graph: Optional[ComputeGraph] = None) -> Dict[Tensor, np.ndarray]:
    """
    Backpropagate from a scalar loss.

    Leaf gradients are accumulated additively into `.grad`; callers zero them
    at the start of each optimisation step.

    Args:
        loss: Scalar tensor produced by the graph
        graph: Pre-traced graph (traced from `loss` when omitted)

    Returns:
        Mapping of every requires_grad leaf to its gradient from this pass

    Raises:
        ContractError: If `loss` is not a scalar
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if graph is None:
        graph = ComputeGraph.trace(loss)
    if not loss.requires_grad:
        return {}

    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    result: Dict[Tensor, np.ndarray] = {}
    for node in reversed(graph.nodes):
        grad = grads.pop(id(node), None)
        if grad is None:
            continue
        if node.creator is None:
            node.accumulate(grad)
            result[node] = grad
            continue
        for parent, parent_grad in zip(node.creator.tensors, node.creator.backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            if key in grads:
                grads[key] = grads[key] + parent_grad
            else:
                grads[key] = parent_grad
    return result
