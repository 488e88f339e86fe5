"""MindBigData-style EEG source (one tab-separated line per channel per event)."""
from collections import OrderedDict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Union

import numpy as np

from core.constants import CHANNEL_ORDER, DEFAULT_SAMPLES
from core.exceptions import ParseError
from core.logger import get_logger
from model.preprocess import EegRecording

logger = get_logger(__name__)

FIELD_COUNT = 7


@dataclass
class SourceReport:
    """Recordings read from a source plus what was dropped on the way."""
    recordings: List[EegRecording]
    skipped_events: Dict[str, List[str]] = field(default_factory=dict)
    ignored_lines: int = 0

    @property
    def skipped(self) -> int:
        return len(self.skipped_events)


class MindBigDataSource:
    """
    Reader for `record_id, event_id, device, channel, class_code, size, samples`.

    Lines are grouped by event_id into one recording with the configured
    channel rows; rows are truncated or zero-padded to `samples`.
    """

    def __init__(self, path: Union[str, Path], channels: Sequence[str] = CHANNEL_ORDER,
                 samples: int = DEFAULT_SAMPLES):
        self.path = Path(path)
        self.channels = tuple(channels)
        self.samples = samples

    def _fit(self, values: np.ndarray) -> np.ndarray:
        if values.size >= self.samples:
            return values[:self.samples]
        return np.concatenate([values, np.zeros(self.samples - values.size)])

    def _parse_line(self, line: str, number: int):
        parts = line.rstrip('\n').split('\t')
        if len(parts) != FIELD_COUNT:
            raise ParseError(str(self.path), f"expected {FIELD_COUNT} tab-separated fields, found {len(parts)}", number)
        _, event_id, _, channel, code, size, data = (p.strip() for p in parts)
        try:
            declared = int(size)
            values = np.array([float(v) for v in data.split(',') if v.strip()], dtype=np.float64)
        except ValueError as e:
            raise ParseError(str(self.path), f"bad numeric field ({e})", number)
        if values.size != declared:
            raise ParseError(str(self.path), f"declared {declared} samples, found {values.size}", number)
        if not np.all(np.isfinite(values)):
            raise ParseError(str(self.path), "non-finite sample", number)
        return event_id, channel, code, values

    def read(self) -> SourceReport:
        """
        Parse the whole file in one pass.

        Raises:
            FileNotFoundError: If the file does not exist
            ParseError: On a malformed line (with line number)
        """
        if not self.path.exists():
            raise FileNotFoundError(f"EEG source not found: {self.path}")
        events: "OrderedDict[str, Dict]" = OrderedDict()
        ignored = 0
        with open(self.path, encoding='utf-8') as handle:
            for number, line in enumerate(handle, 1):
                if not line.strip() or line.startswith('#'):
                    continue
                event_id, channel, code, values = self._parse_line(line, number)
                if channel not in self.channels:
                    ignored += 1
                    continue
                event = events.setdefault(event_id, {'code': code, 'rows': {}})
                if event['code'] != code:
                    raise ParseError(str(self.path), f"event {event_id} has conflicting class codes", number)
                if channel in event['rows']:
                    raise ParseError(str(self.path), f"event {event_id} repeats channel {channel}", number)
                event['rows'][channel] = self._fit(values)

        report = SourceReport(recordings=[], ignored_lines=ignored)
        for event_id, event in events.items():
            missing = [c for c in self.channels if c not in event['rows']]
            if missing:
                report.skipped_events[event_id] = missing
                continue
            signal = np.stack([event['rows'][c] for c in self.channels])
            report.recordings.append(EegRecording(signal, label=event['code'], recording_id=event_id))
        if report.skipped:
            logger.warning(f"Skipped {report.skipped} events with missing channels in {self.path}")
        logger.info(f"Read {len(report.recordings)} recordings from {self.path}")
        return report


def parse_eeg_source(path: Union[str, Path], channels: Sequence[str] = CHANNEL_ORDER,
                     samples: int = DEFAULT_SAMPLES) -> List[EegRecording]:
    """Recordings of a MindBigData file; incomplete events are skipped and logged."""
    return MindBigDataSource(path, channels, samples).read().recordings
