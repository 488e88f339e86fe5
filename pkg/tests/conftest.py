"""Shared fixtures: the toy configuration and small synthetic datasets."""
import numpy as np
import pytest

from core.config import HyperParams, RunConfig, TrainConfig
from integrations.catalog import CatalogItem, ItemCatalog
from integrations.synthetic import generate_synthetic
from model.params import ModelParams, ParamLayout
from model.preprocess import EegRecording

TOY_HYPER = HyperParams(window=4, step=4, basis_size=4, c=2, alpha=0.0, beta=0.0,
                        depth=2, xi=0.3, hidden=6, embedding_dim=8)
DESK_OVERRIDES = {'preset': 'desk', 'hidden': 8, 'embedding_dim': 8, 'depth': 1}


@pytest.fixture
def toy_hyper():
    return TOY_HYPER


@pytest.fixture
def toy_recording():
    rng = np.random.default_rng(11)
    return EegRecording(rng.standard_normal((1, 12)), label="a", recording_id="toy", stimulus_id="a0")


@pytest.fixture
def toy_catalog():
    rng = np.random.default_rng(12)
    items = [CatalogItem(f"{label}{j}", label, rng.standard_normal(8))
             for label in ("a", "b") for j in range(3)]
    return ItemCatalog(items)


@pytest.fixture
def toy_params(toy_hyper):
    layout = ParamLayout.for_recording(toy_hyper, 1, 12)
    return ModelParams.initialize(toy_hyper, layout, seed=5)


@pytest.fixture
def small_dataset():
    """3 classes x 6 recordings, E = 8, with in-memory images."""
    return generate_synthetic(3, 6, 8, seed=1)


@pytest.fixture
def desk_config(tmp_path):
    """A fast synthetic RunConfig writing under tmp_path."""
    config = RunConfig(train=TrainConfig(epochs=2, batch_size=8, learning_rate=1e-3, seed=4),
                       synthetic="3x8", output_dir=str(tmp_path / "run"))
    return config.with_overrides(DESK_OVERRIDES)
