import numpy as np
import pytest

from core.exceptions import ContractError, ShapeError
from numerics.gradcheck import gradient_check
from numerics.tensor import (
    ComputeGraph, Tensor, add, backward, concat, einsum, frobenius_norm, matmul, mean, mul,
    neg_log_sigmoid, relu, reshape, row_normalize_tensor, sub, take, tsum,
)


# rows of a row-normalised matrix always sum to 1, so weight the entries
ROW_WEIGHTS = Tensor(np.arange(1.0, 9.0).reshape(2, 4) / 8.0)


def leaf(shape, seed=0):
    return Tensor(np.random.default_rng(seed).standard_normal(shape), requires_grad=True)


def test_scalar_product_gradients():
    a = Tensor(3.0, requires_grad=True)
    b = Tensor(4.0, requires_grad=True)
    backward(mul(a, b))
    assert a.grad == pytest.approx(4.0)
    assert b.grad == pytest.approx(3.0)


def test_matmul_gradient_matches_formula():
    a, b = leaf((2, 3), 1), leaf((3, 4), 2)
    backward(tsum(matmul(a, b)))
    np.testing.assert_allclose(a.grad, np.ones((2, 4)) @ b.data.T)
    np.testing.assert_allclose(b.grad, a.data.T @ np.ones((2, 4)))


def test_gradients_accumulate_across_passes():
    a = Tensor(2.0, requires_grad=True)
    backward(mul(a, 3.0))
    backward(mul(a, 3.0))
    assert a.grad == pytest.approx(6.0)


def test_shared_subexpression_sums_both_paths():
    a = Tensor(1.5, requires_grad=True)
    b = mul(a, a)
    backward(add(b, b))
    assert a.grad == pytest.approx(4 * 1.5)


def test_backward_rejects_non_scalar():
    with pytest.raises(ContractError):
        backward(mul(leaf((2,)), 2.0))


def test_matmul_shape_error_names_both_shapes():
    with pytest.raises(ShapeError) as info:
        matmul(leaf((2, 3)), leaf((4, 2)))
    assert "(2, 3)" in str(info.value) and "(4, 2)" in str(info.value)


def test_broadcast_mismatch():
    with pytest.raises(ShapeError):
        add(leaf((2, 3)), leaf((4,)))


def test_relu_subgradient_at_zero_is_zero():
    a = Tensor(np.array([-1.0, 0.0, 2.0]), requires_grad=True)
    backward(tsum(relu(a)))
    np.testing.assert_array_equal(a.grad, [0.0, 0.0, 1.0])


def test_neg_log_sigmoid_is_stable():
    values = neg_log_sigmoid(Tensor(np.array([-800.0, 0.0, 800.0]))).data
    assert np.all(np.isfinite(values))
    np.testing.assert_allclose(values, [800.0, np.log(2.0), 0.0], atol=1e-12)


def test_row_normalize_keeps_zero_rows():
    out = row_normalize_tensor(Tensor(np.array([[1.0, 3.0], [0.0, 0.0]]))).data
    np.testing.assert_allclose(out, [[0.25, 0.75], [0.0, 0.0]])


def test_einsum_rejects_implicit_output():
    with pytest.raises(ContractError):
        einsum('ij,jk', leaf((2, 2)), leaf((2, 2)))


def test_einsum_rejects_size_conflict():
    with pytest.raises(ShapeError):
        einsum('ij,jk->ik', leaf((2, 3)), leaf((2, 2)))


@pytest.mark.parametrize("build", [
    lambda p: tsum(mul(relu(matmul(p['a'], p['b'])), 0.5)),
    lambda p: tsum(neg_log_sigmoid(sub(matmul(p['a'], p['b']), 0.2))),
    lambda p: mean(einsum('ij,jk,ik->i', p['a'], p['b'], matmul(p['a'], p['b']))),
    lambda p: frobenius_norm(concat([p['a'], p['a']], axis=1)),
    lambda p: tsum(mul(row_normalize_tensor(mul(matmul(p['a'], p['b']), matmul(p['a'], p['b']))), ROW_WEIGHTS)),
    lambda p: tsum(take(reshape(p['b'], (4, 3)), [0, 2, 2])),
    lambda p: tsum(frobenius_norm(reshape(p['b'], (2, 2, 3)), axis=(1, 2))),
])
def test_operations_pass_gradient_check(build):
    params = {'a': leaf((2, 3), 3), 'b': leaf((3, 4), 4)}
    errors = gradient_check(lambda: build(params), params)
    assert max(errors.values()) < 1e-6


def test_trace_orders_inputs_before_outputs():
    a = leaf((2, 2))
    out = tsum(matmul(a, a))
    graph = ComputeGraph.trace(out)
    assert graph.nodes[-1] is out
    assert graph.leaves() == [a]
