"""EEG normalisation and sliding-window segmentation.

Indices are 1-based in the public helpers (electrode m = 1..M, segment
i = 1..℧, flat j = 1..|Φ|); arrays are stored 0-based.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from core.exceptions import ConfigError, ContractError
from core.logger import get_logger
from model.quantum import unit_states

logger = get_logger(__name__)


@dataclass(frozen=True)
class EegRecording:
    """One M×N raw signal matrix with its class label."""
    signal: np.ndarray
    label: str
    recording_id: str
    stimulus_id: Optional[str] = None

    def __post_init__(self):
        signal = np.asarray(self.signal, dtype=np.float64)
        if signal.ndim != 2 or signal.shape[0] < 1 or signal.shape[1] < 1:
            raise ContractError(
                f"recording {self.recording_id}: signal must be M×N with M, N >= 1, got {signal.shape}"
            )
        if not np.all(np.isfinite(signal)):
            raise ContractError(f"recording {self.recording_id}: signal has non-finite values")
        signal.setflags(write=False)
        object.__setattr__(self, 'signal', signal)
        object.__setattr__(self, 'label', str(self.label))

    @property
    def electrodes(self) -> int:
        return self.signal.shape[0]

    @property
    def samples(self) -> int:
        return self.signal.shape[1]


@dataclass(frozen=True)
class NormalizedSignal:
    values: np.ndarray
    degenerate: bool = False


@dataclass(frozen=True)
class SegmentSet:
    """Λ-length windows of every electrode; `segments[m-1, i-1]` is segment (m, i)."""
    segments: np.ndarray
    window: int
    step: int

    @property
    def electrodes(self) -> int:
        return self.segments.shape[0]

    @property
    def count(self) -> int:
        """℧, segments per electrode."""
        return self.segments.shape[1]

    @property
    def size(self) -> int:
        """|Φ| = M·℧."""
        return self.electrodes * self.count

    def segment(self, m: int, i: int) -> np.ndarray:
        flat_index(m, i, self.count, self.electrodes)
        return self.segments[m - 1, i - 1]

    def flat(self) -> np.ndarray:
        """|Φ|×Λ matrix whose row j-1 is the segment with flat index j."""
        return self.segments.reshape(self.size, self.window)

    def segment_indices(self) -> np.ndarray:
        """Segment index i (1-based) of every flat row."""
        return np.tile(np.arange(1, self.count + 1), self.electrodes)


def mean_normalize(recording: EegRecording) -> NormalizedSignal:
    """
    Scale a recording to [-1, 1] with (x - mean) / (max - min) over the whole matrix.

    A constant recording normalises to zeros and is flagged degenerate.
    """
    x = recording.signal
    spread = float(x.max() - x.min())
    if spread == 0.0:
        logger.warning(f"Recording {recording.recording_id} is constant; normalised to zeros")
        return NormalizedSignal(np.zeros_like(x), degenerate=True)
    return NormalizedSignal((x - x.mean()) / spread)


def segment_count(samples: int, window: int, step: int) -> int:
    """℧ = floor((N - Λ + Δ) / Δ)."""
    return (samples - window + step) // step


def sliding_window(normalized: np.ndarray, window: int, step: int) -> SegmentSet:
    """
    Cut every electrode row into Λ-sample windows advancing by Δ.

    Segment (m, i) covers columns (i-1)·Δ+1 … (i-1)·Δ+Λ (1-based, inclusive).
    Gaps between windows (Δ > Λ) are allowed.

    Raises:
        ConfigError: If Λ or Δ lies outside 1..N
    """
    x = np.asarray(normalized, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis, :]
    samples = x.shape[1]
    if not 1 <= window <= samples:
        raise ConfigError(f"window {window} must lie in 1..{samples}")
    if not 1 <= step <= samples:
        raise ConfigError(f"step {step} must lie in 1..{samples}")
    count = segment_count(samples, window, step)
    assert (count - 1) * step + window <= samples
    windows = np.lib.stride_tricks.sliding_window_view(x, window, axis=1)[:, ::step]
    segments = np.ascontiguousarray(windows[:, :count])
    return SegmentSet(segments=segments, window=window, step=step)


def flat_index(m: int, i: int, count: int, electrodes: Optional[int] = None) -> int:
    """
    j = (m-1)·℧ + i, a bijection onto 1..M·℧.

    Raises:
        ContractError: If m or i is out of range
    """
    if m < 1 or (electrodes is not None and m > electrodes):
        raise ContractError(f"electrode index {m} out of range 1..{electrodes or 'M'}")
    if not 1 <= i <= count:
        raise ContractError(f"segment index {i} out of range 1..{count}")
    return (m - 1) * count + i


@dataclass(frozen=True)
class PreparedRecording:
    """Data-only prefix of the forward pass (no learnable parameters involved)."""
    recording: EegRecording
    normalized: NormalizedSignal
    segments: SegmentSet
    states: np.ndarray
    degenerate_states: np.ndarray = field(repr=False)

    @property
    def coords(self) -> np.ndarray:
        return self.segments.segment_indices()


def prepare(recording: EegRecording, window: int, step: int) -> PreparedRecording:
    """Normalise, window and unit-revise one recording."""
    normalized = mean_normalize(recording)
    segments = sliding_window(normalized.values, window, step)
    states, degenerate = unit_states(segments.flat())
    if degenerate.any():
        logger.debug(f"Recording {recording.recording_id}: {int(degenerate.sum())} degenerate segments")
    return PreparedRecording(recording, normalized, segments, states, degenerate)
