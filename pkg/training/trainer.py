"""Seeded mini-batch training loop."""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from core.config import RunConfig
from core.constants import Ablation, DEFAULT_K
from core.exceptions import ConfigError, NonFiniteError
from core.logger import get_logger
from core.utils import Timer, make_rng
from evaluation.protocol import evaluate
from integrations.catalog import ItemCatalog
from model.network import QuarkModel
from model.params import BASES, ModelParams, ParamLayout
from model.preprocess import EegRecording, PreparedRecording
from model.quantum import orthogonality_penalties
from numerics.optim import AdamState, adam_step
from numerics.tensor import Tensor, add, backward, mul
from training.losses import LossTerms, bpr_loss, continuity_loss, orthogonality_loss, total_loss
from training.sampling import sample_pairs

logger = get_logger(__name__)

CheckpointFn = Callable[[ModelParams, int], None]


@dataclass(frozen=True)
class EpochRecord:
    """Instance-weighted epoch means of every loss term."""
    epoch: int
    bpr: float
    orthogonality: float
    continuity: float
    regularizer: float
    total: float
    val_precision: Optional[float] = None


@dataclass(frozen=True)
class TimingRecord:
    epoch: int
    seconds: float
    steps: int


@dataclass
class TrainingResult:
    params: ModelParams
    history: List[EpochRecord] = field(default_factory=list)
    timings: List[TimingRecord] = field(default_factory=list)
    optimizer: Optional[AdamState] = None


def model_layout(config: RunConfig, recordings: Sequence[EegRecording]) -> ParamLayout:
    """
    Parameter layout for a recording set; every recording must share M×N.

    Raises:
        ConfigError: On an empty set or mixed geometries
    """
    if not recordings:
        raise ConfigError("no training recordings")
    geometries = {r.signal.shape for r in recordings}
    if len(geometries) != 1:
        raise ConfigError(f"recordings have mixed shapes: {sorted(geometries)}")
    electrodes, samples = geometries.pop()
    return ParamLayout.for_recording(config.hyper, electrodes, samples)


class Trainer:
    """
    Owns Γ and the optimiser; one Adam step per mini-batch.

    Per instance: forward pass, BPR pairs resampled at every step, continuity
    loss. Per batch: orthogonality loss on the shared bases, regulariser,
    one backward pass and one Adam update.
    """

    def __init__(self, config: RunConfig, catalog: ItemCatalog,
                 params: Optional[ModelParams] = None,
                 layout: Optional[ParamLayout] = None,
                 checkpoint_fn: Optional[CheckpointFn] = None,
                 validation: Optional[Sequence[EegRecording]] = None,
                 show_progress: bool = False):
        self.config = config
        self.train_config = config.train
        self.catalog = catalog
        self.ablation = Ablation(config.train.ablation)
        self.layout = layout
        self.params = params
        self.checkpoint_fn = checkpoint_fn
        self.validation = list(validation or [])
        self.show_progress = show_progress
        self.optimizer = AdamState(
            learning_rate=config.train.learning_rate,
            beta1=config.train.beta1,
            beta2=config.train.beta2,
            eps=config.train.eps,
        )
        self._prepared: Dict[str, PreparedRecording] = {}

    def _ensure_params(self, recordings: Sequence[EegRecording]) -> ModelParams:
        if self.params is None:
            layout = self.layout or model_layout(self.config, recordings)
            self.params = ModelParams.initialize(self.config.hyper, layout, self.config.seed, self.ablation)
        return self.params

    @property
    def model(self) -> QuarkModel:
        return QuarkModel(self.config.hyper, self.params, self.ablation, self.config.seed)

    def _prepare(self, model: QuarkModel, recording: EegRecording) -> PreparedRecording:
        prepared = self._prepared.get(recording.recording_id)
        if prepared is None or prepared.recording is not recording:
            prepared = model.prepare(recording)
            self._prepared[recording.recording_id] = prepared
        return prepared

    def batch_loss(self, batch: Sequence[EegRecording], rng: np.random.Generator):
        """Build the batch objective; returns (loss tensor, LossTerms)."""
        model = self.model
        cfg = self.train_config
        representations = []
        pairs = []
        continuity_terms: List[Tensor] = []
        for recording in batch:
            result = model.forward(self._prepare(model, recording))
            representations.append(result.representation)
            pairs.append(sample_pairs(recording.label, self.catalog, cfg.n_pos, cfg.n_neg, rng))
            if self.ablation != Ablation.NO_CONTINUITY_LOSS:
                segments = result.prepared.segments
                continuity_terms.append(
                    continuity_loss(result.x_circ, result.states, segments.electrodes, segments.count)
                )
        l1 = bpr_loss(representations, pairs)
        l3 = Tensor(0.0)
        for term in continuity_terms:
            l3 = add(l3, term)
        l3 = mul(l3, 1.0 / len(batch))
        if not cfg.average_batch_gradients:
            l1, l3 = mul(l1, float(len(batch))), mul(l3, float(len(batch)))
        l2 = Tensor(0.0)
        if BASES in self.params and self.ablation != Ablation.NO_QM_LOSS:
            l2 = orthogonality_loss(orthogonality_penalties(self.params[BASES]))
        return total_loss(l1, l2, l3, self.params, cfg.rho)

    def step(self, batch: Sequence[EegRecording], rng: np.random.Generator) -> LossTerms:
        """One optimisation step; gradients are zeroed first."""
        self.params.zero_grad()
        loss, terms = self.batch_loss(batch, rng)
        backward(loss)
        adam_step(self.params.as_dict(), self.params.grads(), self.optimizer)
        return terms

    def _halt(self, error: NonFiniteError, snapshot: Dict[str, np.ndarray], epoch: int) -> None:
        self.params.load_state(snapshot)
        logger.error(f"Training halted in epoch {epoch}: {error}; restored last good parameters")
        if self.checkpoint_fn is not None:
            self.checkpoint_fn(self.params, epoch - 1)

    def validate(self) -> Optional[float]:
        if not self.validation:
            return None
        report = evaluate(self.model, self.validation, self.catalog, k=DEFAULT_K,
                          seed=self.config.seed)
        return report.precision

    def fit(self, recordings: Sequence[EegRecording]) -> TrainingResult:
        """
        Train for the configured number of epochs.

        Raises:
            NonFiniteError: After restoring and checkpointing the last good parameters
        """
        cfg = self.train_config
        self._ensure_params(recordings)
        result = TrainingResult(params=self.params, optimizer=self.optimizer)
        if not recordings or cfg.epochs == 0:
            return result
        rng = make_rng(self.config.seed, "train")
        recordings = list(recordings)
        epochs = tqdm(range(1, cfg.epochs + 1), desc="train", unit="epoch", disable=not self.show_progress)
        for epoch in epochs:
            timer = Timer()
            snapshot = self.params.state_dict()
            order = rng.permutation(len(recordings))
            sums = np.zeros(5)
            steps = 0
            for start in range(0, len(order), cfg.batch_size):
                batch = [recordings[i] for i in order[start:start + cfg.batch_size]]
                try:
                    terms = self.step(batch, rng)
                    self.params.check_finite()
                except NonFiniteError as e:
                    self._halt(e, snapshot, epoch)
                    raise
                sums += len(batch) * np.array([terms.bpr, terms.orthogonality, terms.continuity,
                                               terms.regularizer, terms.total])
                steps += 1
            means = sums / len(recordings)
            val = None
            if cfg.validate_every and epoch % cfg.validate_every == 0:
                val = self.validate()
            record = EpochRecord(epoch, *(float(v) for v in means), val_precision=val)
            result.history.append(record)
            result.timings.append(TimingRecord(epoch, timer.elapsed(), steps))
            logger.info(
                f"Epoch {epoch}/{cfg.epochs}: L1={record.bpr:.6f} L2={record.orthogonality:.6f} "
                f"L3={record.continuity:.6f} reg={record.regularizer:.6f} L={record.total:.6f}"
                + (f" val_P@{DEFAULT_K}={val:.4f}" if val is not None else "")
            )
            if cfg.checkpoint_every and epoch % cfg.checkpoint_every == 0 and self.checkpoint_fn:
                self.checkpoint_fn(self.params, epoch)
        return result


def train(recordings: Sequence[EegRecording], catalog: ItemCatalog, config: RunConfig,
          checkpoint_fn: Optional[CheckpointFn] = None,
          validation: Optional[Sequence[EegRecording]] = None) -> TrainingResult:
    """Initialise Γ from the config seed and train on `recordings`."""
    config.hyper.validate()
    config.train.validate()
    return Trainer(config, catalog, checkpoint_fn=checkpoint_fn, validation=validation).fit(recordings)
