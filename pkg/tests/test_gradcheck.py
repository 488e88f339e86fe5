"""Analytic gradients of the full objective versus central differences on the toy configuration."""
import time

import numpy as np
import pytest

from core.config import RunConfig, TrainConfig
from core.constants import Ablation
from core.utils import make_rng
from model.params import BASES, ModelParams, ParamLayout
from model.quantum import orthogonality_penalties
from numerics.gradcheck import gradient_check
from numerics.tensor import backward
from training.losses import orthogonality_loss
from training.trainer import Trainer


def _trainer(hyper, catalog, params, ablation=Ablation.NONE):
    config = RunConfig(hyper=hyper, train=TrainConfig(rho=1e-2, n_pos=2, n_neg=2, ablation=ablation))
    return Trainer(config, catalog, params=params)


def test_total_loss_gradients_match_finite_differences(toy_hyper, toy_recording, toy_catalog, toy_params):
    trainer = _trainer(toy_hyper, toy_catalog, toy_params)
    start = time.perf_counter()
    errors = gradient_check(lambda: trainer.batch_loss([toy_recording], make_rng(0, "pairs"))[0],
                            toy_params.as_dict())
    assert set(errors) == set(toy_params)
    assert max(errors.values()) < 1e-4, errors
    assert time.perf_counter() - start < 60


@pytest.mark.parametrize("ablation", [Ablation.NO_GCN, Ablation.NO_QM_LOSS, Ablation.NO_CONTINUITY_LOSS])
def test_ablated_objectives_pass_gradient_check(ablation, toy_hyper, toy_recording, toy_catalog):
    params = ModelParams.initialize(toy_hyper, ParamLayout.for_recording(toy_hyper, 1, 12), 5, ablation)
    trainer = _trainer(toy_hyper, toy_catalog, params, ablation)
    errors = gradient_check(lambda: trainer.batch_loss([toy_recording], make_rng(0, "pairs"))[0],
                            params.as_dict())
    assert max(errors.values()) < 1e-4, errors


def test_bases_receive_gradient(toy_hyper, toy_recording, toy_catalog, toy_params):
    trainer = _trainer(toy_hyper, toy_catalog, toy_params)
    trainer.step([toy_recording], make_rng(0, "pairs"))
    assert np.any(toy_params.grads()["quantum.bases"] != 0)


def _gradients(trainer, recording, params):
    params.zero_grad()
    backward(trainer.batch_loss([recording], make_rng(0, "pairs"))[0])
    return params.grads()


def test_loss_switches_remove_only_their_own_gradient(toy_hyper, toy_recording, toy_catalog, toy_params):
    full = _gradients(_trainer(toy_hyper, toy_catalog, toy_params), toy_recording, toy_params)
    without_qm = _gradients(_trainer(toy_hyper, toy_catalog, toy_params, Ablation.NO_QM_LOSS),
                            toy_recording, toy_params)
    without_continuity = _gradients(_trainer(toy_hyper, toy_catalog, toy_params, Ablation.NO_CONTINUITY_LOSS),
                                    toy_recording, toy_params)

    toy_params.zero_grad()
    backward(orthogonality_loss(orthogonality_penalties(toy_params[BASES])))
    orthogonality = toy_params.grads()

    # both auxiliary losses only reach the bases
    for name in toy_params:
        if name != BASES:
            np.testing.assert_allclose(without_qm[name], full[name], rtol=1e-10, atol=1e-12)
            np.testing.assert_allclose(without_continuity[name], full[name], rtol=1e-10, atol=1e-12)
    np.testing.assert_allclose(without_qm[BASES] + orthogonality[BASES], full[BASES], rtol=1e-9, atol=1e-12)
    assert np.abs(full[BASES] - without_continuity[BASES]).max() > 1e-8
