from dataclasses import replace

import numpy as np
import pytest

from agents.eval_agent import EvalAgent
from agents.generate_agent import GenerateAgent
from agents.inspect_agent import InspectAgent, representation_similarity
from agents.sweep_agent import SweepAgent, default_values
from agents.train_agent import TrainAgent
from agents.workspace import build_model, load_workspace
from core.checkpoint import load_checkpoint
from core.constants import Ablation
from core.exceptions import ConfigError, StageError
from integrations.dataset import load_recordings


def test_workspace_split_is_stratified_and_seeded(desk_config):
    first = load_workspace(desk_config)
    second = load_workspace(desk_config)
    assert len(first.train) == 21 and len(first.test) == 3
    assert {r.label for r in first.test} == {"0", "1", "2"}
    assert [r.recording_id for r in first.test] == [r.recording_id for r in second.test]
    assert first.find(first.test[0].recording_id) is first.test[0]
    with pytest.raises(ConfigError):
        first.find("nope")


def test_validation_holdout_comes_from_train(desk_config):
    workspace = load_workspace(desk_config.with_overrides({'validate_every': 1}))
    assert workspace.validation and len(workspace.train) + len(workspace.validation) == 21


def test_embedding_dimension_mismatch_names_the_data_stage(desk_config, tmp_path):
    generated = GenerateAgent(desk_config, tmp_path / "data").run()
    config = replace(desk_config.with_overrides({'eeg_path': str(generated.eeg_path),
                                                 'embeddings_path': str(generated.embeddings_path),
                                                 'embedding_dim': 4}), synthetic=None)
    with pytest.raises(StageError) as info:
        load_workspace(config)
    assert info.value.stage == "data"


def test_generated_files_reload_to_the_same_recordings(desk_config, tmp_path):
    generated = GenerateAgent(desk_config, tmp_path / "data").run()
    reloaded = load_recordings(generated.eeg_path)
    original = load_workspace(desk_config).recordings
    by_id = {r.recording_id: r for r in reloaded}
    for recording in original:
        np.testing.assert_array_equal(by_id[recording.recording_id].signal, recording.signal)


def test_train_eval_inspect_round(desk_config):
    result = TrainAgent(desk_config).run()
    assert len(result.history) == 2
    checkpoint = load_checkpoint(TrainAgent(desk_config).checkpoint_path)
    report = EvalAgent(desk_config).run(checkpoint=checkpoint)
    assert len(report.instances) == 3
    inspected = InspectAgent(desk_config).run(checkpoint=checkpoint, similarity=True)
    assert inspected.similarity.shape == (3, 3)
    np.testing.assert_allclose(inspected.similarity, inspected.similarity.T)
    assert "collapse_bottom.txt" in inspected.files


def test_representation_similarity_is_a_gram_matrix(desk_config):
    workspace = load_workspace(desk_config)
    model = build_model(workspace)
    matrix = representation_similarity(model, workspace.test)
    reps = np.stack([model.represent(r) for r in workspace.test])
    np.testing.assert_allclose(matrix, reps @ reps.T)


def test_sweep_defaults():
    assert default_values("ablation") == [a.value for a in Ablation]
    assert default_values("c") == ["1", "2", "3", "4"]
    with pytest.raises(ConfigError):
        SweepAgent.check_key("colour")
