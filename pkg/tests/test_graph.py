import numpy as np
import pytest

from core.exceptions import ConfigError, ContractError, ShapeError
from model.graph import (
    apply_filter, build_adjacency, continuity_matrix, filter_threshold, interference_matrix,
    row_normalize, temporal_mask,
)
from model.quantum import collapse_batch, event_operator, interference_value, unit_states
from numerics.tensor import Tensor

COORDS = np.tile(np.arange(1, 5), 3)


def random_matrix(seed, size=COORDS.size):
    return Tensor(np.random.default_rng(seed).standard_normal((size, size)))


def test_temporal_mask_keeps_strictly_earlier_columns():
    mask = temporal_mask(np.array([1, 2, 1, 2]))
    expected = np.array([[0, 0, 0, 0], [1, 0, 1, 0], [0, 0, 0, 0], [1, 0, 1, 0]], dtype=bool)
    np.testing.assert_array_equal(mask, expected)
    assert temporal_mask(np.array([1, 2]), enabled=False).all()


def test_filter_threshold_interpolates_between_extremes():
    values = np.array([[0.0, 2.0], [4.0, 10.0]])
    assert filter_threshold(values, 0.0) == 0.0
    assert filter_threshold(values, 0.5) == 5.0
    assert filter_threshold(values, 1.0) == 10.0


@pytest.mark.parametrize("seed", range(25))
def test_filtered_and_normalised_matrices_hold_invariants(seed):
    rng = np.random.default_rng(seed)
    alpha, beta = rng.random(2)
    pair = build_adjacency(random_matrix(seed), random_matrix(seed + 100), COORDS, alpha, beta)
    later_or_same = COORDS[:, None] <= COORDS[None, :]
    for filtered, normalised in ((pair.continuity, pair.continuity_norm),
                                 (pair.interference, pair.interference_norm)):
        assert np.all(filtered.data >= 0)
        assert not filtered.data[later_or_same].any()
        sums = normalised.data.sum(axis=1)
        assert np.all(np.isclose(sums, 1.0) | np.isclose(sums, 0.0))


def test_higher_ratio_never_keeps_more_edges():
    matrix = random_matrix(7)
    kept = [np.count_nonzero(apply_filter(matrix, r, COORDS).data) for r in np.linspace(0, 1, 11)]
    assert kept == sorted(kept, reverse=True)


def test_ratio_one_keeps_only_the_maximum():
    matrix = Tensor(np.arange(16, dtype=float).reshape(4, 4))
    out = apply_filter(matrix, 1.0, np.arange(1, 5), temporal=False).data
    assert np.count_nonzero(out) == 1 and out[3, 3] == 15.0


def test_filter_rejects_bad_inputs():
    with pytest.raises(ConfigError):
        apply_filter(random_matrix(0), 1.5, COORDS)
    with pytest.raises(ShapeError):
        apply_filter(random_matrix(0, 5), 0.5, COORDS)
    with pytest.raises(ContractError):
        row_normalize(Tensor(np.array([[1.0, -1.0], [0.0, 1.0]])))


def test_continuity_is_gram_matrix():
    x = np.random.default_rng(3).standard_normal((5, 3))
    np.testing.assert_allclose(continuity_matrix(Tensor(x)).data, x @ x.T)


def test_interference_entries_match_single_pair_values():
    rng = np.random.default_rng(4)
    bases = rng.standard_normal((4, 4, 3))
    states, _ = unit_states(rng.standard_normal((4, 3)))
    collapse = collapse_batch(states, Tensor(bases), 1)
    matrix = interference_matrix(states, Tensor(bases), collapse).data
    for j in range(4):
        future = event_operator(bases[j], collapse.top_indices[j])
        for k in range(4):
            past = event_operator(bases[k], collapse.top_indices[k])
            past_not = event_operator(bases[k], collapse.bottom_indices[k])
            assert matrix[j, k] == pytest.approx(interference_value(states[j], past, past_not, future))


def test_interference_requires_collapse_for_every_segment():
    with pytest.raises(ContractError):
        interference_matrix(np.zeros((3, 2)), None, None)
