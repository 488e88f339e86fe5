import numpy as np
import pytest

from core.constants import DistributionKind
from core.exceptions import ConfigError
from integrations.dataset import (
    DistributionSpec, largest_remainder, normal_targets, normal_weights, shape_distribution, split,
)
from model.preprocess import EegRecording


def recordings_for(counts):
    return [EegRecording(np.ones((1, 2)), label, f"{label}{i:03d}")
            for label, n in counts.items() for i in range(n)]


def test_normal_targets_for_three_classes():
    assert normal_targets({"a": 40, "b": 40, "c": 40}, 30) == {"a": 24, "b": 3, "c": 3}


def test_normal_weights_follow_source_counts_not_label_order():
    targets = normal_targets({"2": 40, "10": 60, "3": 50}, 30)
    assert targets == {"10": 24, "3": 3, "2": 3}
    assert list(targets) == ["10", "3", "2"]


def test_normal_weights_are_symmetric_and_peak_in_the_middle():
    weights = normal_weights(7)
    assert weights.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(weights, weights[::-1])
    assert weights.argmax() == 3


def test_largest_remainder_sums_exactly():
    for total in (1, 17, 100, 7048):
        assert largest_remainder(normal_weights(111), total).sum() == total


def test_normal_targets_pick_the_largest_feasible_total():
    targets = normal_targets({"a": 10, "b": 10, "c": 10})
    assert targets["a"] <= 10 and sum(targets.values()) > 10
    assert targets["b"] == targets["c"]


def test_infeasible_normal_shaping_lists_short_classes():
    with pytest.raises(ConfigError) as info:
        normal_targets({"a": 40, "b": 2, "c": 40}, 30)
    assert str(info.value).endswith("in: b")


def test_shaping_keeps_input_order_and_counts():
    recordings = recordings_for({"a": 40, "b": 40, "c": 40})
    shaped = shape_distribution(recordings, DistributionSpec(DistributionKind.NORMAL, 30),
                                np.random.default_rng(0))
    assert len(shaped) == 30
    order = {r.recording_id: i for i, r in enumerate(recordings)}
    positions = [order[r.recording_id] for r in shaped]
    assert positions == sorted(positions)
    assert sum(r.label == "a" for r in shaped) == 24


def test_as_is_keeps_everything():
    recordings = recordings_for({"a": 3, "b": 1})
    kept = shape_distribution(recordings, DistributionSpec(), np.random.default_rng(0))
    assert [r.recording_id for r in kept] == [r.recording_id for r in recordings]


def test_split_is_stratified():
    data = split(recordings_for({"a": 20, "b": 7, "c": 1}), 0.85, np.random.default_rng(1))
    assert data.per_class == {"a": (17, 3), "b": (6, 1), "c": (1, 0)}
    assert len(data) == 28
    assert not {r.recording_id for r in data.train} & {r.recording_id for r in data.test}


def test_split_keeps_one_test_instance_for_small_classes():
    data = split(recordings_for({"a": 2}), 0.99, np.random.default_rng(0))
    assert data.per_class == {"a": (1, 1)}


def test_split_rejects_bad_ratio():
    with pytest.raises(ConfigError):
        split(recordings_for({"a": 2}), 1.0, np.random.default_rng(0))
