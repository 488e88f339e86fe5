import numpy as np
import pytest

from core.constants import StyleMetric
from core.exceptions import ContractError
from evaluation.similarity import (
    StyleInput, color_similarity, content_similarity, edge_map, edge_overlap, structural_similarity,
    style_report, to_grayscale,
)
from integrations.catalog import CatalogItem, ItemCatalog
from integrations.synthetic import stripe_image


def test_identical_images_score_one():
    image = stripe_image(0.3, 2.0, 0.1)
    assert color_similarity(image, image) == 1.0
    assert structural_similarity(image, image) == 1.0


def test_uniform_color_ratio():
    assert color_similarity(np.full((4, 4), 100.0), np.full((4, 4), 50.0)) == pytest.approx(0.5)
    assert color_similarity(np.zeros((2, 2)), np.zeros((2, 2))) == 1.0


def test_color_similarity_rejects_mismatch_and_negatives():
    with pytest.raises(ContractError):
        color_similarity(np.zeros((2, 2)), np.zeros((3, 3)))
    with pytest.raises(ContractError):
        color_similarity(-np.ones((2, 2)), np.ones((2, 2)))


def test_grayscale_uses_luma_weights():
    rgb = np.zeros((1, 1, 3))
    rgb[0, 0] = [100.0, 100.0, 100.0]
    assert to_grayscale(rgb)[0, 0] == pytest.approx(100.0)
    with pytest.raises(ContractError):
        to_grayscale(np.zeros((2, 2, 2)))


def test_flat_image_has_no_edges():
    assert not edge_map(np.full((8, 8), 30.0)).any()


def test_orthogonal_stripes_are_less_similar_than_identical_ones():
    a = stripe_image(0.0, 2.0, 0.0)
    b = stripe_image(np.pi / 2, 2.0, 0.0)
    assert structural_similarity(a, b) < structural_similarity(a, a)


def test_complementary_edge_maps_do_not_overlap():
    edges = np.zeros((10, 10), dtype=bool)
    edges[::2] = True
    assert edge_overlap(edges, ~edges) == 0.0


def test_sparse_edges_against_a_blank_map():
    edges = np.zeros((10, 10), dtype=bool)
    edges[3] = True
    assert edge_overlap(edges, np.zeros_like(edges)) == pytest.approx(0.9)
    with pytest.raises(ContractError):
        edge_overlap(edges, np.zeros((5, 5), dtype=bool))


def test_flat_image_scores_the_share_of_non_edge_pixels():
    image = stripe_image(0.4, 3.0, 0.0)
    flat = np.full(image.shape, 90.0)
    assert structural_similarity(image, flat) == pytest.approx(1.0 - edge_map(image).mean())
    assert structural_similarity(image, flat) < 1.0


def test_content_similarity_is_cosine():
    assert content_similarity([1.0, 0.0], [2.0, 0.0]) == pytest.approx(1.0)
    assert content_similarity([1.0, 0.0], [0.0, 3.0]) == pytest.approx(0.0)
    assert content_similarity([0.0, 0.0], [1.0, 1.0]) == 0.0


def test_style_report_scores_and_excludes():
    images = {"v": np.full((4, 4), 100.0), "same": np.full((4, 4), 100.0), "half": np.full((4, 4), 50.0)}
    items = [CatalogItem(i, "x", np.array([1.0, 1.0])) for i in ("v", "same", "half", "missing")]
    catalog = ItemCatalog(items, images=images)
    report = style_report([
        StyleInput("r1", "v", ("same", "half", "missing"), 0.2),
        StyleInput("r2", None, ("same",), 0.1),
    ], catalog, thresholds=[0.0, 0.75, 1.0])
    assert len(report.scores) == 2 and report.excluded == 2
    assert report.curve(StyleMetric.COLOR) == [(0.0, 100.0), (0.75, 50.0), (1.0, 50.0)]
    assert report.mean(StyleMetric.MIXED) == pytest.approx(
        np.mean([s.content * s.color * s.structural * 0.2 for s in report.scores]))
