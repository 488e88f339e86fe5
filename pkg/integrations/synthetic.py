"""Synthetic EEG recordings and item catalog for desk-scale runs.

Every class owns a latent template: per electrode a mixture of sinusoids
with class-specific frequencies and phases. Recordings are the template plus
white noise at the requested amplitude SNR. Items of a class share a unit
mean embedding with per-item jitter and an oriented stripe texture. The
jitter of a class is centred, so its item pool averages exactly to the class
mean; an untrained representation then sees no pool-level class offset.
Pools hold at least CLASS_POOL items, so the 15 positives of an instance
are a fresh draw rather than the whole pool.
"""
import math
from typing import List, Tuple

import numpy as np

from core.constants import CANDIDATES_POSITIVE, CANDIDATES_TOTAL, DEFAULT_ELECTRODES, DEFAULT_SAMPLES
from core.exceptions import ConfigError
from core.logger import get_logger
from core.utils import make_rng
from integrations.catalog import CatalogItem, ItemCatalog
from model.preprocess import EegRecording

logger = get_logger(__name__)

COMPONENTS = 3
EMBEDDING_JITTER = 8.0
CLASS_POOL = 100
IMAGE_SIZE = 16


def items_per_class(n_classes: int) -> int:
    """Enough items per class for 15 positives and 85 negatives from the others.

    Never fewer than CLASS_POOL, so each instance draws its positives from a
    larger pool than the 15 it needs.
    """
    negatives = CANDIDATES_TOTAL - CANDIDATES_POSITIVE
    return max(CLASS_POOL, CANDIDATES_POSITIVE, math.ceil(negatives / (n_classes - 1)))


def class_label(index: int) -> str:
    return str(index)


def class_template(seed: int, index: int, electrodes: int, samples: int) -> np.ndarray:
    rng = make_rng(seed, "template", index)
    t = np.arange(samples) / samples
    template = np.zeros((electrodes, samples))
    for m in range(electrodes):
        freqs = rng.uniform(2.0, 40.0, size=COMPONENTS)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=COMPONENTS)
        amps = rng.uniform(0.5, 1.5, size=COMPONENTS)
        template[m] = (amps[:, None] * np.sin(2.0 * np.pi * freqs[:, None] * t + phases[:, None])).sum(axis=0)
    return template


def stripe_image(angle: float, frequency: float, phase: float, size: int = IMAGE_SIZE) -> np.ndarray:
    """Grayscale oriented sinusoidal stripes in [0, 255]."""
    yy, xx = np.mgrid[0:size, 0:size]
    wave = np.sin(2.0 * np.pi * frequency * (xx * np.cos(angle) + yy * np.sin(angle)) / size + phase)
    return 127.5 * (1.0 + wave)


def generate_synthetic(n_classes: int, per_class: int, embedding_dim: int, seed: int,
                       snr: float = 10.0, electrodes: int = DEFAULT_ELECTRODES,
                       samples: int = DEFAULT_SAMPLES,
                       image_size: int = IMAGE_SIZE,
                       jitter: float = EMBEDDING_JITTER) -> Tuple[List[EegRecording], ItemCatalog]:
    """
    Build `n_classes × per_class` recordings and a catalog satisfying the candidate protocol.

    Args:
        snr: Template RMS over noise standard deviation; inf gives noise-free recordings
        jitter: Norm scale of the per-item embedding noise around the unit class mean

    Raises:
        ConfigError: If n_classes < 2, per_class < 1 or snr <= 0
    """
    if n_classes < 2:
        raise ConfigError(f"synthetic data needs at least 2 classes (got {n_classes})")
    if per_class < 1 or embedding_dim < 1:
        raise ConfigError("per_class and embedding_dim must be >= 1")
    if not snr > 0:
        raise ConfigError(f"snr must be > 0 (got {snr})")

    n_items = items_per_class(n_classes)
    recordings: List[EegRecording] = []
    items: List[CatalogItem] = []
    images = {}
    for c in range(n_classes):
        label = class_label(c)
        template = class_template(seed, c, electrodes, samples)
        noise_std = 0.0 if math.isinf(snr) else float(np.sqrt(np.mean(template ** 2))) / snr

        rng = make_rng(seed, "catalog", c)
        mean = rng.standard_normal(embedding_dim)
        mean /= np.linalg.norm(mean)
        angle = np.pi * c / n_classes
        frequency = 1.0 + (c % 4)
        noise = jitter * rng.standard_normal((n_items, embedding_dim)) / math.sqrt(embedding_dim)
        if n_items > 1:
            noise -= noise.mean(axis=0)
        item_ids = []
        for j in range(n_items):
            item_id = f"item{c:03d}_{j:04d}"
            items.append(CatalogItem(item_id, label, mean + noise[j]))
            images[item_id] = stripe_image(angle, frequency, rng.uniform(0.0, 0.5), image_size)
            item_ids.append(item_id)

        rng = make_rng(seed, "recordings", c)
        for i in range(per_class):
            noise = rng.standard_normal(template.shape) * noise_std if noise_std > 0 else 0.0
            recordings.append(EegRecording(
                signal=template + noise,
                label=label,
                recording_id=f"syn{c:03d}_{i:04d}",
                stimulus_id=item_ids[int(rng.integers(len(item_ids)))],
            ))
    logger.info(f"Generated {len(recordings)} synthetic recordings and {len(items)} items "
                f"({n_classes} classes, snr={snr})")
    return recordings, ItemCatalog(items, images=images)
