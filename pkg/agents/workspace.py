"""Dataset assembly shared by the command agents."""
from dataclasses import dataclass, field
from typing import List, Optional

from core.checkpoint import Checkpoint
from core.config import RunConfig, parse_synthetic_spec
from core.constants import Ablation
from core.exceptions import ConfigError
from core.logger import get_logger
from core.utils import make_rng, stage
from integrations.catalog import ItemCatalog, load_embeddings, relabel_recordings
from integrations.dataset import DistributionSpec, load_recordings, shape_distribution, split
from integrations.formats import read_class_map
from integrations.synthetic import generate_synthetic
from model.network import QuarkModel
from model.params import ModelParams
from model.preprocess import EegRecording
from training.trainer import model_layout

logger = get_logger(__name__)

VALIDATION_RATIO = 0.9


@dataclass
class Workspace:
    """Train/test recordings and the item catalog of one run."""
    config: RunConfig
    train: List[EegRecording]
    test: List[EegRecording]
    catalog: ItemCatalog
    validation: List[EegRecording] = field(default_factory=list)

    @property
    def recordings(self) -> List[EegRecording]:
        return self.train + self.validation + self.test

    def find(self, recording_id: str) -> EegRecording:
        for recording in self.recordings:
            if recording.recording_id == recording_id:
                return recording
        raise ConfigError(f"unknown recording id '{recording_id}'")


def load_workspace(config: RunConfig) -> Workspace:
    """
    Load (or generate) the dataset, apply the class map and shaping, and split it.

    Raises:
        StageError: Wrapping the failing stage ('data' or 'split')
    """
    with stage("data"):
        config.validate()
        if config.synthetic:
            classes, per_class = parse_synthetic_spec(config.synthetic)
            recordings, catalog = generate_synthetic(classes, per_class, config.hyper.embedding_dim,
                                                     config.seed, snr=config.snr)
        else:
            recordings = load_recordings(config.eeg_path)
            catalog = load_embeddings(config.embeddings_path, config.image_dir)
        if config.class_map_path:
            mapping = read_class_map(config.class_map_path)
            recordings = relabel_recordings(recordings, mapping)
            catalog = catalog.relabel(mapping)
        if catalog.embedding_dim != config.hyper.embedding_dim:
            raise ConfigError(f"catalog embeddings have E={catalog.embedding_dim}, "
                              f"config embedding_dim is {config.hyper.embedding_dim}")
        recordings = shape_distribution(
            recordings, DistributionSpec(config.distribution, config.distribution_total),
            make_rng(config.seed, "shape"),
        )

    with stage("split"):
        dataset = split(recordings, config.train_ratio, make_rng(config.seed, "split"))
        train, validation = dataset.train, []
        if config.train.validate_every:
            held = split(train, VALIDATION_RATIO, make_rng(config.seed, "validation"))
            train, validation = held.train, held.test
    logger.info(f"Workspace: {len(train)} train, {len(validation)} validation, "
                f"{len(dataset.test)} test recordings; {len(catalog)} items")
    return Workspace(config, train, dataset.test, catalog, validation)


def build_model(workspace: Workspace, checkpoint: Optional[Checkpoint] = None) -> QuarkModel:
    """Model from a checkpoint, or freshly initialised from the config seed."""
    config = workspace.config
    ablation = Ablation(config.train.ablation)
    if checkpoint is not None:
        params = checkpoint.params()
    else:
        logger.warning("No checkpoint given; using untrained parameters")
        params = ModelParams.initialize(config.hyper, model_layout(config, workspace.recordings),
                                        config.seed, ablation)
    return QuarkModel(config.hyper, params, ablation, config.seed)
