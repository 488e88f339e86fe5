"""Dataset assembly: loading, class mapping, distribution shaping and the train/test split."""
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import norm

from core.constants import DistributionKind
from core.exceptions import ConfigError
from core.logger import get_logger
from integrations.formats import read_recordings
from integrations.mindbigdata import parse_eeg_source
from model.preprocess import EegRecording

logger = get_logger(__name__)


@dataclass(frozen=True)
class DistributionSpec:
    """Target shape of the per-class instance counts."""
    kind: DistributionKind = DistributionKind.AS_IS
    total: Optional[int] = None


@dataclass
class DatasetSplit:
    train: List[EegRecording]
    test: List[EegRecording]
    per_class: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.train) + len(self.test)


def load_recordings(path: Union[str, Path]) -> List[EegRecording]:
    """
    Read either a MindBigData TSV (tab-separated lines) or a canonical recordings file.

    Raises:
        FileNotFoundError: If the path does not exist
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"EEG data not found: {path}")
    with open(path, encoding='utf-8') as handle:
        first = next((line for line in handle if line.strip() and not line.startswith('#')), '')
    if '\t' in first:
        return parse_eeg_source(path)
    return read_recordings(path)


def group_by_label(recordings: Sequence[EegRecording]) -> "OrderedDict[str, List[int]]":
    """Label → positions in `recordings`, labels sorted."""
    groups: Dict[str, List[int]] = {}
    for position, recording in enumerate(recordings):
        groups.setdefault(recording.label, []).append(position)
    return OrderedDict(sorted(groups.items()))


def normal_weights(classes: int) -> np.ndarray:
    """Standard-normal density at the centres of `classes` equal bins over [-3, 3], normalised."""
    centres = -3.0 + 6.0 * (np.arange(classes) + 0.5) / classes
    density = norm.pdf(centres)
    return density / density.sum()


def largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer counts summing exactly to `total`, proportional to `weights`."""
    raw = weights * total
    counts = np.floor(raw).astype(int)
    shortfall = total - int(counts.sum())
    order = np.argsort(-(raw - counts), kind='stable')
    counts[order[:shortfall]] += 1
    return counts


def normal_targets(available: Dict[str, int], total: Optional[int] = None) -> Dict[str, int]:
    """
    Per-class targets following a discretised standard normal.

    Classes are ranked by source count (ties by label) and the normal weights,
    largest first, go to that ranking. Without a total, the largest feasible
    total is used.

    Raises:
        ConfigError: If the targets exceed what some classes hold (lists them)
    """
    labels = sorted(available, key=lambda label: (-available[label], label))
    weights = np.sort(normal_weights(len(labels)))[::-1]
    have = np.array([available[label] for label in labels])
    if total is None:
        total = int(np.floor(np.min(have / weights)))
        while total > 0 and np.any(largest_remainder(weights, total) > have):
            total -= 1
    counts = largest_remainder(weights, total)
    short = [label for label, want, got in zip(labels, counts, have) if want > got]
    if short:
        raise ConfigError(
            f"normal shaping to {total} instances is infeasible; too few instances in: {', '.join(short)}"
        )
    return dict(zip(labels, (int(c) for c in counts)))


def shape_distribution(recordings: Sequence[EegRecording], spec: DistributionSpec,
                       rng: np.random.Generator) -> List[EegRecording]:
    """
    Subsample recordings to the per-class targets of `spec`.

    `as-is` and `long-tail` keep the source counts (the source itself is long-tailed);
    `normal` subsamples without replacement. Kept recordings stay in input order.
    """
    kind = DistributionKind(spec.kind)
    if kind != DistributionKind.NORMAL:
        return list(recordings)
    groups = group_by_label(recordings)
    targets = normal_targets({label: len(p) for label, p in groups.items()}, spec.total)
    keep: List[int] = []
    for label, positions in groups.items():
        chosen = rng.choice(len(positions), size=targets[label], replace=False)
        keep.extend(positions[i] for i in chosen)
    logger.info(f"Normal shaping kept {len(keep)} of {len(recordings)} recordings over {len(groups)} classes")
    return [recordings[p] for p in sorted(keep)]


def split(recordings: Sequence[EegRecording], ratio: float,
          rng: np.random.Generator) -> DatasetSplit:
    """
    Stratified train/test split, per class round(ratio·n) to train (at most n-1).

    A single-instance class goes to train with a warning.
    """
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"split ratio must lie in (0, 1) (got {ratio})")
    train: List[int] = []
    test: List[int] = []
    per_class: Dict[str, Tuple[int, int]] = {}
    for label, positions in group_by_label(recordings).items():
        n = len(positions)
        if n == 1:
            logger.warning(f"Class '{label}' has a single instance; placed in train")
            n_train = 1
        else:
            n_train = min(n - 1, int(math.floor(ratio * n + 0.5)))
        order = rng.permutation(n)
        train.extend(positions[i] for i in order[:n_train])
        test.extend(positions[i] for i in order[n_train:])
        per_class[label] = (n_train, n - n_train)
    return DatasetSplit(
        train=[recordings[p] for p in sorted(train)],
        test=[recordings[p] for p in sorted(test)],
        per_class=per_class,
    )
