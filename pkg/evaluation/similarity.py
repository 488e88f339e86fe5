"""Feeling/style detectors: content, color and structural similarity of recommended images."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from scipy import ndimage

from core.constants import DEFAULT_THRESHOLDS, EDGE_PERCENTILE, LUMA_WEIGHTS, StyleMetric
from core.exceptions import ContractError
from core.logger import get_logger

logger = get_logger(__name__)


def content_similarity(rep_a: Sequence[float], rep_b: Sequence[float]) -> float:
    """Cosine of two representations; 0 when either is the zero vector."""
    a = np.asarray(rep_a, dtype=np.float64).ravel()
    b = np.asarray(rep_b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ContractError(f"content_similarity: lengths differ ({a.size} vs {b.size})")
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float((a / norm_a) @ (b / norm_b))


def to_grayscale(image: np.ndarray) -> np.ndarray:
    """Luma (0.299, 0.587, 0.114) for RGB(A) input; 2-D input passes through."""
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 2:
        return image
    if image.ndim == 3 and image.shape[2] in (3, 4):
        return image[..., :3] @ np.asarray(LUMA_WEIGHTS)
    if image.ndim == 3 and image.shape[2] == 1:
        return image[..., 0]
    raise ContractError(f"unsupported image shape {image.shape}")


def _pair(img_a: np.ndarray, img_b: np.ndarray, op: str):
    a, b = to_grayscale(img_a), to_grayscale(img_b)
    if a.shape != b.shape:
        raise ContractError(f"{op}: image dimensions differ ({a.shape} vs {b.shape})")
    return a, b


def color_similarity(img_a: np.ndarray, img_b: np.ndarray) -> float:
    """
    Mean over pixels of 1 − |a − b| / max(a, b); pixels where both are 0 count as 1.

    Raises:
        ContractError: On differing dimensions or negative pixel values
    """
    a, b = _pair(img_a, img_b, "color_similarity")
    if np.any(a < 0) or np.any(b < 0):
        raise ContractError("color_similarity expects non-negative pixel values")
    peak = np.maximum(a, b)
    safe = np.where(peak > 0, peak, 1.0)
    per_pixel = np.where(peak > 0, 1.0 - np.abs(a - b) / safe, 1.0)
    return float(per_pixel.mean())


def edge_map(image: np.ndarray, percentile: float = EDGE_PERCENTILE) -> np.ndarray:
    """Binary edges: Sobel magnitude at or above its per-image percentile, and non-zero."""
    gray = to_grayscale(image)
    magnitude = np.hypot(ndimage.sobel(gray, axis=0), ndimage.sobel(gray, axis=1))
    threshold = np.percentile(magnitude, percentile)
    return (magnitude >= threshold) & (magnitude > 0)


def edge_overlap(edges_a: np.ndarray, edges_b: np.ndarray) -> float:
    """1 − (number of disagreeing pixels) / (pixel count)."""
    if edges_a.shape != edges_b.shape:
        raise ContractError(f"edge maps differ in shape ({edges_a.shape} vs {edges_b.shape})")
    return 1.0 - float(np.logical_xor(edges_a, edges_b).mean())


def structural_similarity(img_a: np.ndarray, img_b: np.ndarray) -> float:
    a, b = _pair(img_a, img_b, "structural_similarity")
    return edge_overlap(edge_map(a), edge_map(b))


@dataclass(frozen=True)
class StyleScores:
    """Scores of one recommended image against the viewed image."""
    recording_id: str
    item_id: str
    content: float
    color: float
    structural: float
    precision: float

    @property
    def synthesis(self) -> float:
        return self.content * self.color * self.structural

    @property
    def mixed(self) -> float:
        return self.synthesis * self.precision

    def value(self, metric: StyleMetric) -> float:
        value = {
            StyleMetric.CONTENT: self.content,
            StyleMetric.COLOR: self.color,
            StyleMetric.STRUCTURAL: self.structural,
            StyleMetric.SYNTHESIS: self.synthesis,
            StyleMetric.MIXED: self.mixed,
        }[metric]
        # cosine can be negative; threshold counting uses [0, 1]
        return max(value, 0.0)


@dataclass(frozen=True)
class StyleInput:
    """One test instance: the viewed item, its recommendations and its P@k."""
    recording_id: str
    viewed_id: Optional[str]
    recommended: Sequence[str]
    precision: float


@dataclass
class StyleReport:
    thresholds: List[float]
    scores: List[StyleScores] = field(default_factory=list)
    excluded: int = 0

    def fraction_at(self, metric: StyleMetric, threshold: float) -> float:
        """Share of scored recommendations with score ≥ threshold."""
        if not self.scores:
            return 0.0
        return sum(1 for s in self.scores if s.value(metric) >= threshold) / len(self.scores)

    def curve(self, metric: StyleMetric) -> List[tuple]:
        """(threshold, percentage) pairs."""
        return [(t, 100.0 * self.fraction_at(metric, t)) for t in self.thresholds]

    def mean(self, metric: StyleMetric) -> float:
        if not self.scores:
            return 0.0
        return float(np.mean([s.value(metric) for s in self.scores]))


def style_report(instances: Sequence[StyleInput], catalog,
                 thresholds: Optional[Sequence[float]] = None) -> StyleReport:
    """
    Score every recommended image against the image the EEG was recorded on.

    Recommendations whose raw image (or whose instance's viewed image) is
    unavailable are excluded and counted.
    """
    report = StyleReport(thresholds=list(DEFAULT_THRESHOLDS if thresholds is None else thresholds))
    for instance in instances:
        viewed_image = catalog.image(instance.viewed_id) if instance.viewed_id in catalog else None
        if viewed_image is None:
            report.excluded += len(instance.recommended)
            continue
        viewed = catalog[instance.viewed_id]
        viewed_edges = edge_map(viewed_image)
        for item_id in instance.recommended:
            image = catalog.image(item_id)
            if image is None:
                report.excluded += 1
                continue
            if to_grayscale(image).shape != to_grayscale(viewed_image).shape:
                logger.warning(f"Image {item_id} differs in size from {instance.viewed_id}; excluded")
                report.excluded += 1
                continue
            report.scores.append(StyleScores(
                recording_id=instance.recording_id,
                item_id=item_id,
                content=content_similarity(viewed.embedding, catalog[item_id].embedding),
                color=color_similarity(viewed_image, image),
                structural=edge_overlap(viewed_edges, edge_map(image)),
                precision=instance.precision,
            ))
    if report.excluded:
        logger.warning(f"Style report excluded {report.excluded} recommendations without usable images")
    return report
