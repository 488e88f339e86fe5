"""Shared utilities for QUARK."""
import hashlib
import os
import tempfile
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np

from core.exceptions import QuarkError, StageError
from core.logger import get_logger

logger = get_logger(__name__)


def derive_seed(seed: int, *keys: object) -> int:
    """
    Derive a stable child seed from a base seed and any number of keys.

    The same (seed, keys) always yields the same 63-bit integer, across runs
    and platforms.
    """
    text = ":".join([str(seed)] + [str(k) for k in keys])
    digest = hashlib.sha256(text.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'little') >> 1


def make_rng(seed: int, *keys: object) -> np.random.Generator:
    """Return a numpy Generator seeded from (seed, keys)."""
    return np.random.default_rng(derive_seed(seed, *keys) if keys else seed)


class Timer:
    """Wall-clock timer for logging and timing records."""

    def __init__(self):
        """Start the timer."""
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        """Seconds since start."""
        return time.perf_counter() - self.start

    def reset(self) -> float:
        """Return elapsed seconds and restart."""
        now = time.perf_counter()
        elapsed, self.start = now - self.start, now
        return elapsed


@contextmanager
def stage(name: str) -> Iterator[None]:
    """
    Label errors raised inside a pipeline stage with the stage name.

    Raises:
        StageError: Wrapping any QuarkError, OSError or ValueError raised inside
    """
    try:
        yield
    except StageError:
        raise
    except (QuarkError, OSError, ValueError) as e:
        logger.error(f"Stage '{name}' failed: {e}")
        raise StageError(name, e) from e


@contextmanager
def atomic_write(path: Union[str, Path], encoding: Optional[str] = 'utf-8'):
    """
    Write a file atomically: the target only appears once the block succeeds.

    Yields:
        Open text handle on a temporary file in the target directory
    """
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    try:
        with os.fdopen(fd, 'w', encoding=encoding, newline='\n') as handle:
            yield handle
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
