"""Text formats: canonical recordings, embedding lines and class-mapping files.

Floats are written with repr(), the shortest string that reads back to the
same double, so parse → serialise is byte-stable.
"""
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import numpy as np

from core.exceptions import FormatError, ParseError
from core.logger import get_logger
from core.utils import atomic_write
from model.preprocess import EegRecording

logger = get_logger(__name__)

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    return repr(float(value))


def _token(path: str, value: str, what: str) -> str:
    if not value or any(ch.isspace() for ch in value):
        raise FormatError(path, f"{what} '{value}' must be a non-empty token without whitespace")
    return value


def format_recording(recording: EegRecording, path: str = "<memory>") -> str:
    """
    Canonical text form.

    Header `M N label recording_id [stimulus_id]`, then M lines of N
    space-separated floats.
    """
    header = [str(recording.electrodes), str(recording.samples),
              _token(path, recording.label, "label"),
              _token(path, recording.recording_id, "recording_id")]
    if recording.stimulus_id:
        header.append(_token(path, recording.stimulus_id, "stimulus_id"))
    lines = [" ".join(header)]
    for row in recording.signal:
        lines.append(" ".join(format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def write_recordings(path: PathLike, recordings: Iterable[EegRecording]) -> int:
    """Write recordings back to back in canonical form; returns the count."""
    count = 0
    with atomic_write(path) as handle:
        for recording in recordings:
            handle.write(format_recording(recording, str(path)))
            count += 1
    logger.info(f"Wrote {count} recordings to {path}")
    return count


def parse_recordings(text: str, path: str = "<memory>") -> List[EegRecording]:
    """
    Parse one or more canonical recordings.

    Raises:
        ParseError: On malformed headers or rows (with line number)
    """
    lines = text.splitlines()
    recordings: List[EegRecording] = []
    index = 0
    while index < len(lines):
        if not lines[index].strip():
            index += 1
            continue
        header = lines[index].split()
        if len(header) not in (4, 5):
            raise ParseError(path, "expected header 'M N label recording_id [stimulus_id]'", index + 1)
        try:
            electrodes, samples = int(header[0]), int(header[1])
        except ValueError:
            raise ParseError(path, "M and N must be integers", index + 1)
        if electrodes < 1 or samples < 1:
            raise ParseError(path, f"invalid dimensions {electrodes}x{samples}", index + 1)
        rows = []
        for offset in range(1, electrodes + 1):
            number = index + offset + 1
            if index + offset >= len(lines):
                raise ParseError(path, f"recording {header[3]} ends after {offset - 1} rows", number - 1)
            values = lines[index + offset].split()
            if len(values) != samples:
                raise ParseError(path, f"expected {samples} values, found {len(values)}", number)
            try:
                rows.append([float(v) for v in values])
            except ValueError as e:
                raise ParseError(path, f"bad float ({e})", number)
        recordings.append(EegRecording(
            signal=np.array(rows, dtype=np.float64),
            label=header[2],
            recording_id=header[3],
            stimulus_id=header[4] if len(header) == 5 else None,
        ))
        index += electrodes + 1
    return recordings


def read_recordings(path: PathLike) -> List[EegRecording]:
    """Read a canonical recordings file."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"recordings file not found: {path}")
    return parse_recordings(path.read_text(encoding='utf-8'), str(path))


def parse_embedding_line(line: str, number: int, path: str) -> Tuple[str, str, np.ndarray]:
    """`item_id<TAB>label<TAB>f1 … fE` → (item_id, label, vector)."""
    parts = line.rstrip('\n').split('\t')
    if len(parts) != 3:
        raise ParseError(path, "expected 'item_id<TAB>label<TAB>values'", number)
    item_id, label, values = (p.strip() for p in parts)
    if not item_id or not label:
        raise ParseError(path, "empty item_id or label", number)
    try:
        vector = np.array([float(v) for v in values.split()], dtype=np.float64)
    except ValueError as e:
        raise ParseError(path, f"bad float ({e})", number)
    if vector.size == 0:
        raise ParseError(path, f"item {item_id} has no embedding values", number)
    if not np.all(np.isfinite(vector)):
        raise ParseError(path, f"item {item_id} has non-finite embedding values", number)
    return item_id, label, vector


def format_embedding_line(item_id: str, label: str, vector: Sequence[float]) -> str:
    return f"{item_id}\t{label}\t{' '.join(format_float(v) for v in vector)}"


def parse_class_map(text: str, path: str = "<memory>") -> Dict[str, str]:
    """
    `child<TAB>merged` pairs; `#` starts a comment.

    Raises:
        ParseError: On malformed lines or a child mapped twice to different classes
    """
    mapping: Dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), 1):
        content = line.split('#', 1)[0].strip()
        if not content:
            continue
        parts = [p.strip() for p in content.split('\t')]
        if len(parts) != 2 or not all(parts):
            raise ParseError(path, "expected 'child<TAB>merged'", number)
        child, merged = parts
        if mapping.get(child, merged) != merged:
            raise ParseError(path, f"class '{child}' mapped to both '{mapping[child]}' and '{merged}'", number)
        mapping[child] = merged
    return mapping


def read_class_map(path: PathLike) -> Dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"class map not found: {path}")
    return parse_class_map(path.read_text(encoding='utf-8'), str(path))
