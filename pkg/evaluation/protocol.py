"""The 100-candidate top-k recommendation protocol and its ranking metrics."""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from core.constants import CANDIDATES_POSITIVE, CANDIDATES_TOTAL, DEFAULT_K
from core.exceptions import ConfigError, ContractError, EvaluationError
from core.logger import get_logger
from core.utils import make_rng
from evaluation.similarity import StyleInput, StyleReport, style_report
from integrations.catalog import CatalogItem, ItemCatalog
from model.preprocess import EegRecording

logger = get_logger(__name__)

BASELINES = ("random",)


@dataclass(frozen=True)
class CandidateSet:
    """Candidate item ids (sorted) and which of them share the EEG's class."""
    label: str
    item_ids: Tuple[str, ...]
    positives: FrozenSet[str]

    @property
    def negatives(self) -> FrozenSet[str]:
        return frozenset(self.item_ids) - self.positives

    def __len__(self) -> int:
        return len(self.item_ids)


def infeasible_classes(labels: Iterable[str], catalog: ItemCatalog,
                       total: int = CANDIDATES_TOTAL,
                       positives: int = CANDIDATES_POSITIVE) -> List[str]:
    """Labels for which the catalog cannot supply the candidate strata."""
    short = []
    for label in sorted(set(labels)):
        if len(catalog.ids_for(label)) < positives or len(catalog.ids_excluding(label)) < total - positives:
            short.append(label)
    return short


def sample_candidates(label: str, catalog: ItemCatalog, rng: np.random.Generator,
                      total: int = CANDIDATES_TOTAL,
                      positives: int = CANDIDATES_POSITIVE) -> CandidateSet:
    """
    Draw `positives` same-class and `total − positives` other-class items.

    Raises:
        EvaluationError: If the catalog is short on either stratum (names the class)
    """
    same = catalog.ids_for(label)
    other = catalog.ids_excluding(label)
    if len(same) < positives or len(other) < total - positives:
        raise EvaluationError(
            f"need {positives} same-class and {total - positives} other-class items, "
            f"have {len(same)} and {len(other)}", [label]
        )
    chosen_pos = [same[i] for i in rng.choice(len(same), size=positives, replace=False)]
    chosen_neg = [other[i] for i in rng.choice(len(other), size=total - positives, replace=False)]
    return CandidateSet(label, tuple(sorted(chosen_pos + chosen_neg)), frozenset(chosen_pos))


def recommend_topk(representation: Sequence[float], candidates: Sequence[CatalogItem], k: int) -> List[str]:
    """
    Item ids of the k highest dot scores x̄·y, ties by item id.

    Raises:
        ContractError: If k is outside 1..len(candidates)
    """
    if not 1 <= k <= len(candidates):
        raise ContractError(f"k = {k} must lie in 1..{len(candidates)}")
    x = np.asarray(representation, dtype=np.float64)
    scores = np.stack([c.embedding for c in candidates]) @ x
    ranked = sorted(range(len(candidates)), key=lambda i: (-scores[i], candidates[i].item_id))
    return [candidates[i].item_id for i in ranked[:k]]


def random_topk(candidates: Sequence[CatalogItem], k: int, rng: np.random.Generator) -> List[str]:
    """Random-guess baseline: a uniformly random ranking."""
    if not 1 <= k <= len(candidates):
        raise ContractError(f"k = {k} must lie in 1..{len(candidates)}")
    return [candidates[i].item_id for i in rng.permutation(len(candidates))[:k]]


def _fractions(recommended: Sequence[str], positives: Iterable[str], k: int) -> Tuple[Fraction, Fraction, Fraction]:
    if len(recommended) != k:
        raise ContractError(f"expected {k} recommendations, got {len(recommended)}")
    positives = set(positives)
    hits = len(set(recommended) & positives)
    precision = Fraction(hits, k)
    recall = Fraction(hits, len(positives)) if positives else Fraction(0)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else Fraction(0)
    return precision, recall, f1


def precision_recall_f1(recommended: Sequence[str], positives: Iterable[str], k: int) -> Tuple[float, float, float]:
    """P = hits/k, R = hits/|positives|, F1 = 2PR/(P+R) (0 when both are 0)."""
    return tuple(float(v) for v in _fractions(recommended, positives, k))


@dataclass(frozen=True)
class InstanceMetrics:
    recording_id: str
    label: str
    viewed_id: Optional[str]
    recommended: Tuple[str, ...]
    exact: Tuple[Fraction, Fraction, Fraction]

    @property
    def precision(self) -> float:
        return float(self.exact[0])

    @property
    def recall(self) -> float:
        return float(self.exact[1])

    @property
    def f1(self) -> float:
        return float(self.exact[2])


@dataclass
class MetricReport:
    """Per-instance and averaged P@k / R@k / F1@k, optionally with style scores."""
    k: int
    instances: List[InstanceMetrics] = field(default_factory=list)
    style: Optional[StyleReport] = None
    baseline: Optional[str] = None

    def exact_mean(self, index: int) -> Fraction:
        if not self.instances:
            return Fraction(0)
        return sum((m.exact[index] for m in self.instances), Fraction(0)) / len(self.instances)

    @property
    def precision(self) -> float:
        return float(self.exact_mean(0))

    @property
    def recall(self) -> float:
        return float(self.exact_mean(1))

    @property
    def f1(self) -> float:
        return float(self.exact_mean(2))


def evaluate(model, recordings: Sequence[EegRecording], catalog: ItemCatalog,
             k: int = DEFAULT_K, seed: int = 0, baseline: Optional[str] = None,
             thresholds: Optional[Sequence[float]] = None, with_style: bool = False,
             show_progress: bool = False) -> MetricReport:
    """
    Run the candidate protocol over test recordings.

    Each instance draws its candidates from a generator keyed on (seed,
    recording_id), so results do not depend on evaluation order.

    Args:
        model: Object with `represent(recording)`; unused for the random baseline
        baseline: None for the model, 'random' for random guessing
        with_style: Also compute the feeling/style report

    Raises:
        ConfigError: On an unknown baseline
        EvaluationError: Listing every class the catalog cannot serve
    """
    if baseline is not None and baseline not in BASELINES:
        raise ConfigError(f"unknown baseline '{baseline}' (valid: {', '.join(BASELINES)})")
    short = infeasible_classes((r.label for r in recordings), catalog)
    if short:
        raise EvaluationError("candidate sampling is infeasible for classes", short)

    report = MetricReport(k=k, baseline=baseline)
    for recording in tqdm(recordings, desc="eval", unit="rec", disable=not show_progress):
        candidates = sample_candidates(recording.label, catalog,
                                       make_rng(seed, "candidates", recording.recording_id))
        items = [catalog[i] for i in candidates.item_ids]
        if baseline == "random":
            recommended = random_topk(items, k, make_rng(seed, "random-guess", recording.recording_id))
        else:
            recommended = recommend_topk(model.represent(recording), items, k)
        report.instances.append(InstanceMetrics(
            recording_id=recording.recording_id,
            label=recording.label,
            viewed_id=recording.stimulus_id,
            recommended=tuple(recommended),
            exact=_fractions(recommended, candidates.positives, k),
        ))
    if with_style or thresholds is not None:
        report.style = style_report(
            [StyleInput(m.recording_id, m.viewed_id, m.recommended, m.precision) for m in report.instances],
            catalog, thresholds,
        )
    logger.info(f"Evaluated {len(report.instances)} instances: P@{k}={report.precision:.4f} "
                f"R@{k}={report.recall:.4f} F1@{k}={report.f1:.4f}")
    return report
