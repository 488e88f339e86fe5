"""Liked/disliked item sampling for the pairwise ranking loss."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from core.exceptions import SamplingError
from integrations.catalog import ItemCatalog


@dataclass(frozen=True)
class TrainingPair:
    """Liked items (same class as the EEG label) and disliked items (other classes)."""
    label: str
    liked_ids: Tuple[str, ...]
    disliked_ids: Tuple[str, ...]
    liked: np.ndarray
    disliked: np.ndarray


def sample_pairs(label: str, catalog: ItemCatalog, n_pos: int, n_neg: int,
                 rng: np.random.Generator) -> TrainingPair:
    """
    Draw n_pos liked and n_neg disliked items uniformly without replacement.

    Raises:
        SamplingError: If the catalog holds too few items on either side
    """
    positives = catalog.ids_for(label)
    negatives = catalog.ids_excluding(label)
    if len(positives) < n_pos:
        raise SamplingError(label, n_pos, len(positives), "liked")
    if len(negatives) < n_neg:
        raise SamplingError(label, n_neg, len(negatives), "disliked")
    liked = tuple(positives[i] for i in rng.choice(len(positives), size=n_pos, replace=False))
    disliked = tuple(negatives[i] for i in rng.choice(len(negatives), size=n_neg, replace=False))
    return TrainingPair(label, liked, disliked, catalog.embeddings(liked), catalog.embeddings(disliked))
