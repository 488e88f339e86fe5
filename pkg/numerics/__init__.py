"""Tensor arithmetic, reverse-mode differentiation and optimisation for QUARK."""
from numerics.init import xavier_init
from numerics.optim import AdamState, adam_step
from numerics.tensor import (
    ComputeGraph, Tensor, backward, concat, einsum, frobenius_norm, matmul, mean,
    neg_log_sigmoid, relu, reshape, row_normalize_tensor, take, transpose, tsum,
)

__all__ = [
    "AdamState", "ComputeGraph", "Tensor", "adam_step", "backward", "concat", "einsum",
    "frobenius_norm", "matmul", "mean", "neg_log_sigmoid", "relu", "reshape",
    "row_normalize_tensor", "take", "transpose", "tsum", "xavier_init",
]
