from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from core.config import HyperParams
from core.constants import PRESETS
from core.exceptions import ConfigError, ContractError, EvaluationError
from evaluation.protocol import (
    evaluate, infeasible_classes, precision_recall_f1, random_topk, recommend_topk, sample_candidates,
)
from integrations.catalog import CatalogItem, ItemCatalog
from integrations.synthetic import generate_synthetic
from model.network import QuarkModel
from model.params import ModelParams, ParamLayout
from model.preprocess import EegRecording

CLASSES = 8
DIM = 8

# Reported P@10 / R@10 / F1@10 rows for the eight dataset variants
REPORTED = [
    ("111_Normal", 0.3011, 0.2007, 0.2409),
    ("50_Normal", 0.3070, 0.2047, 0.2456),
    ("25_Normal", 0.3945, 0.2630, 0.3156),
    ("8_Normal", 0.6807, 0.4538, 0.5445),
    ("111_LongTail", 0.2034, 0.1356, 0.1627),
    ("50_LongTail", 0.2261, 0.1507, 0.1809),
    ("25_LongTail", 0.2601, 0.1734, 0.2081),
    ("8_LongTail", 0.3971, 0.2647, 0.3177),
]


def class_direction(label):
    return np.eye(DIM)[int(label)]


@pytest.fixture
def catalog():
    rng = np.random.default_rng(0)
    items = [CatalogItem(f"i{c}_{j:02d}", str(c), class_direction(c) + 0.1 * rng.standard_normal(DIM))
             for c in range(CLASSES) for j in range(20)]
    return ItemCatalog(items)


@pytest.fixture
def recordings():
    return [EegRecording(np.ones((1, 4)), str(c), f"r{c}_{i:02d}")
            for c in range(CLASSES) for i in range(50)]


class OracleModel:
    """Represents every recording by its class direction."""

    def represent(self, recording):
        return class_direction(recording.label)


def test_candidate_strata(catalog):
    candidates = sample_candidates("3", catalog, np.random.default_rng(1))
    assert len(candidates) == 100 and len(set(candidates.item_ids)) == 100
    assert len(candidates.positives) == 15
    assert all(catalog[i].label == "3" for i in candidates.positives)
    assert all(catalog[i].label != "3" for i in candidates.negatives)


def test_infeasible_classes_are_all_listed():
    items = [CatalogItem(f"{c}{j}", c, np.ones(2)) for c, n in (("a", 5), ("b", 120)) for j in range(n)]
    catalog = ItemCatalog(items)
    assert infeasible_classes(["a", "b"], catalog) == ["a", "b"]
    with pytest.raises(EvaluationError) as info:
        sample_candidates("a", catalog, np.random.default_rng(0))
    assert info.value.classes == ["a"]


def test_recommend_topk_breaks_ties_by_id():
    items = [CatalogItem(name, "x", np.array([1.0])) for name in ("c", "a", "b")]
    assert recommend_topk([1.0], items, 2) == ["a", "b"]
    with pytest.raises(ContractError):
        recommend_topk([1.0], items, 4)


def test_metric_formulas():
    recommended = [f"p{i}" for i in range(3)] + [f"n{i}" for i in range(7)]
    positives = [f"p{i}" for i in range(15)]
    precision, recall, f1 = precision_recall_f1(recommended, positives, 10)
    assert precision == pytest.approx(0.3) and recall == pytest.approx(0.2)
    assert f1 == pytest.approx(0.24)
    assert precision_recall_f1([f"n{i}" for i in range(10)], positives, 10) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("name,precision,recall,f1", REPORTED, ids=[row[0] for row in REPORTED])
def test_reported_rows_follow_fixed_candidate_identities(name, precision, recall, f1):
    assert recall == pytest.approx(2 * precision / 3, abs=5e-4)
    assert f1 == pytest.approx(0.8 * precision, abs=5e-4)


def test_evaluated_metrics_follow_the_same_identities(catalog, recordings):
    report = evaluate(None, recordings[::7], catalog, baseline="random", seed=3)
    for instance in report.instances:
        p, r, f = instance.exact
        assert r == p * Fraction(2, 3)
        assert f == p * Fraction(4, 5)


def test_random_baseline_is_near_chance(catalog, recordings):
    report = evaluate(None, recordings, catalog, baseline="random", seed=0)
    assert len(report.instances) == 400
    assert 0.13 <= report.precision <= 0.17


def test_oracle_ranks_every_positive_first(catalog, recordings):
    report = evaluate(OracleModel(), recordings[:40], catalog, seed=0)
    assert report.precision == 1.0
    assert report.recall == pytest.approx(10 / 15)


def test_results_do_not_depend_on_order(catalog, recordings):
    subset = recordings[::25]
    forward = evaluate(OracleModel(), subset, catalog, seed=2)
    backward = evaluate(OracleModel(), subset[::-1], catalog, seed=2)
    by_id = {m.recording_id: m.recommended for m in backward.instances}
    assert all(by_id[m.recording_id] == m.recommended for m in forward.instances)


def test_random_topk_is_seeded(catalog):
    items = list(catalog)[:30]
    assert random_topk(items, 5, np.random.default_rng(4)) == random_topk(items, 5, np.random.default_rng(4))


def test_unknown_baseline(catalog, recordings):
    with pytest.raises(ConfigError):
        evaluate(None, recordings[:1], catalog, baseline="popular")


def test_negative_classes_appear_in_proportion_to_their_size():
    sizes = {"x": 20, "y": 40, "z": 60}
    items = [CatalogItem(f"p{j:02d}", "p", np.ones(2)) for j in range(15)]
    items += [CatalogItem(f"{label}{j:02d}", label, np.ones(2)) for label, n in sizes.items() for j in range(n)]
    catalog = ItemCatalog(items)
    rng = np.random.default_rng(12)
    resamples, negatives, pool = 1000, 85, sum(sizes.values())
    counts = Counter()
    for _ in range(resamples):
        counts.update(catalog[i].label for i in sample_candidates("p", catalog, rng).negatives)
    for label, size in sizes.items():
        share = size / pool
        # hypergeometric spread of one draw of 85 from the 120 negatives
        per_draw = negatives * share * (1 - share) * (pool - negatives) / (pool - 1)
        sigma = np.sqrt(resamples * per_draw) / (resamples * negatives)
        assert abs(counts[label] / (resamples * negatives) - share) < 3 * sigma


def test_untrained_model_on_synthetic_data_is_near_chance():
    hyper = HyperParams(**PRESETS['desk'])
    recordings, synthetic = generate_synthetic(50, 10, hyper.embedding_dim, seed=0)
    layout = ParamLayout.for_recording(hyper, *recordings[0].signal.shape)
    model = QuarkModel(hyper, ModelParams.initialize(hyper, layout, seed=0))
    report = evaluate(model, recordings, synthetic, seed=0)
    assert len(report.instances) == 500
    assert 0.13 <= report.precision <= 0.17
