import numpy as np
import pytest

from core.config import HyperParams, RunConfig, TrainConfig
from core.constants import PRESETS
from core.exceptions import ConfigError, NonFiniteError
from integrations.synthetic import generate_synthetic
from training.trainer import Trainer, model_layout, train

DESK_SMALL = HyperParams(**{**PRESETS['desk'], 'hidden': 8, 'embedding_dim': 8, 'depth': 1})


def config(**train_args):
    args = {'epochs': 2, 'batch_size': 8, 'learning_rate': 1e-3, 'seed': 4, **train_args}
    return RunConfig(hyper=DESK_SMALL, train=TrainConfig(**args))


def test_fit_records_every_epoch(small_dataset):
    recordings, catalog = small_dataset
    result = train(recordings, catalog, config())
    assert [r.epoch for r in result.history] == [1, 2]
    assert [t.steps for t in result.timings] == [3, 3]
    for record in result.history:
        parts = record.bpr + record.orthogonality + record.continuity + record.regularizer
        assert record.total == pytest.approx(parts)
        assert record.val_precision is None


def test_training_is_deterministic(small_dataset):
    recordings, catalog = small_dataset
    first = train(recordings, catalog, config())
    second = train(recordings, catalog, config())
    assert first.history == second.history
    for name, values in first.params.state_dict().items():
        np.testing.assert_array_equal(values, second.params[name].data)


def test_loss_falls_every_epoch_on_separable_data():
    recordings, catalog = generate_synthetic(3, 20, PRESETS['desk']['embedding_dim'], seed=2)
    config = RunConfig(hyper=HyperParams(**PRESETS['desk']),
                       train=TrainConfig(epochs=5, batch_size=16, learning_rate=1e-3, seed=0))
    totals = [record.total for record in train(recordings, catalog, config).history]
    assert len(totals) == 5
    assert all(later < earlier for earlier, later in zip(totals, totals[1:])), totals


def test_zero_epochs_keeps_initial_parameters(small_dataset):
    recordings, catalog = small_dataset
    result = train(recordings, catalog, config(epochs=0))
    assert result.history == []
    assert result.params.size > 0


def test_checkpoint_callback_runs_on_schedule(small_dataset):
    recordings, catalog = small_dataset
    calls = []
    train(recordings, catalog, config(epochs=3, checkpoint_every=2),
          checkpoint_fn=lambda params, epoch: calls.append(epoch))
    assert calls == [2]


def test_validation_precision_is_logged(small_dataset):
    recordings, catalog = small_dataset
    result = train(recordings[:12], catalog, config(validate_every=1), validation=recordings[12:])
    assert all(0.0 <= r.val_precision <= 1.0 for r in result.history)


def test_non_finite_step_restores_last_good_parameters(small_dataset):
    recordings, catalog = small_dataset
    saved = []
    trainer = Trainer(config(learning_rate=float('inf')), catalog,
                      checkpoint_fn=lambda params, epoch: saved.append((epoch, params.state_dict())))
    trainer._ensure_params(recordings)
    initial = trainer.params.state_dict()
    with pytest.raises(NonFiniteError):
        trainer.fit(recordings)
    assert saved and saved[0][0] == 0
    for name, values in initial.items():
        np.testing.assert_array_equal(trainer.params[name].data, values)


def test_mixed_geometries_are_rejected(small_dataset, toy_recording):
    recordings, _ = small_dataset
    with pytest.raises(ConfigError):
        model_layout(config(), [recordings[0], toy_recording])
