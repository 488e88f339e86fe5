from collections import Counter

import numpy as np
import pytest

from core.exceptions import SamplingError
from integrations.catalog import CatalogItem, ItemCatalog
from training.sampling import sample_pairs


def test_liked_items_share_the_label(toy_catalog):
    pair = sample_pairs("a", toy_catalog, 2, 3, np.random.default_rng(0))
    assert all(toy_catalog[i].label == "a" for i in pair.liked_ids)
    assert all(toy_catalog[i].label == "b" for i in pair.disliked_ids)
    assert len(set(pair.liked_ids)) == 2 and len(set(pair.disliked_ids)) == 3
    assert pair.liked.shape == (2, 8) and pair.disliked.shape == (3, 8)


def test_sampling_is_seeded(toy_catalog):
    first = sample_pairs("b", toy_catalog, 1, 2, np.random.default_rng(7))
    second = sample_pairs("b", toy_catalog, 1, 2, np.random.default_rng(7))
    assert first.liked_ids == second.liked_ids and first.disliked_ids == second.disliked_ids


@pytest.mark.parametrize("n_pos,n_neg,side", [(4, 1, "liked"), (1, 4, "disliked")])
def test_short_catalog_raises(toy_catalog, n_pos, n_neg, side):
    with pytest.raises(SamplingError) as info:
        sample_pairs("a", toy_catalog, n_pos, n_neg, np.random.default_rng(0))
    assert side in str(info.value)


def test_disliked_classes_are_drawn_evenly():
    items = [CatalogItem(f"{label}{j}", label, np.ones(2)) for label in "pxyz" for j in range(10)]
    catalog = ItemCatalog(items)
    rng = np.random.default_rng(11)
    draws = 10_000
    counts = Counter(catalog[sample_pairs("p", catalog, 1, 1, rng).disliked_ids[0]].label for _ in range(draws))
    assert set(counts) == {"x", "y", "z"}
    sigma = np.sqrt((1 / 3) * (2 / 3) / draws)
    for label in "xyz":
        assert abs(counts[label] / draws - 1 / 3) < 3 * sigma
