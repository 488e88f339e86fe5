"""Model checkpoint persistence.

Text format, one record per line:

    QUARK-CHECKPOINT 1
    config {...}                      JSON of the flat run configuration (location keys omitted)
    layout <M> <N> <|Φ|> <branch width>
    epoch <n>
    param <name> <d1> <d2> ...
    <row-major float.hex values>

float.hex round-trips every double exactly, so save → load is bit-exact.
"""
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Union

import numpy as np

from core.config import RunConfig, apply_overrides
from core.constants import CHECKPOINT_MAGIC, CHECKPOINT_VERSION
from core.exceptions import ParseError
from core.logger import get_logger
from core.utils import atomic_write

logger = get_logger(__name__)

# run-location settings, not stored
LOCATION_KEYS = ("output_dir", "workers")


@dataclass
class Checkpoint:
    config: RunConfig
    layout: "ParamLayout"
    state: Dict[str, np.ndarray]
    epoch: int = 0

    def params(self) -> "ModelParams":
        """Rebuild the parameter registry with the stored values."""
        from model.params import ModelParams
        from numerics.tensor import Tensor
        return ModelParams(
            {name: Tensor(values.copy(), requires_grad=True, name=name) for name, values in self.state.items()},
            self.layout,
        )


def _stored_config(config: RunConfig) -> Dict[str, object]:
    return {k: v for k, v in config.to_flat().items() if k not in LOCATION_KEYS}


def save_checkpoint(path: Union[str, Path], params, config: RunConfig, epoch: int = 0) -> Path:
    """
    Write parameters and configuration atomically.

    Args:
        path: Target file
        params: ModelParams to store
        config: Resolved run configuration
        epoch: Last completed epoch

    Returns:
        The written path
    """
    path = Path(path)
    layout = params.layout
    with atomic_write(path) as handle:
        handle.write(f"{CHECKPOINT_MAGIC} {CHECKPOINT_VERSION}\n")
        handle.write(f"config {json.dumps(_stored_config(config), sort_keys=True)}\n")
        handle.write(f"layout {layout.electrodes} {layout.samples} {layout.segments} {layout.branch_width}\n")
        handle.write(f"epoch {epoch}\n")
        for name, tensor in params.items():
            dims = " ".join(str(d) for d in tensor.shape)
            handle.write(f"param {name} {dims}\n")
            handle.write(" ".join(float(v).hex() for v in tensor.data.reshape(-1)) + "\n")
    logger.info(f"Saved checkpoint ({len(params)} tensors, epoch {epoch}) to {path}")
    return path


def _expect(line: Optional[str], keyword: str, path: Path, number: int) -> str:
    if line is None or not line.startswith(keyword + " "):
        raise ParseError(str(path), f"expected '{keyword}' record", number)
    return line[len(keyword) + 1:]


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    """
    Read a checkpoint written by save_checkpoint.

    Raises:
        FileNotFoundError: If the file does not exist
        ParseError: On a wrong header, version or malformed record
    """
    from model.params import ParamLayout

    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"checkpoint not found: {path}")
    lines = path.read_text(encoding='utf-8').splitlines()
    header = lines[0].split() if lines else []
    if len(header) != 2 or header[0] != CHECKPOINT_MAGIC:
        raise ParseError(str(path), "not a QUARK checkpoint", 1)
    if header[1] != str(CHECKPOINT_VERSION):
        raise ParseError(str(path), f"unsupported checkpoint version {header[1]}", 1)

    def line(index: int) -> Optional[str]:
        return lines[index] if index < len(lines) else None

    try:
        flat = json.loads(_expect(line(1), "config", path, 2))
        config = apply_overrides(RunConfig(), flat)
        layout = ParamLayout(*(int(v) for v in _expect(line(2), "layout", path, 3).split()))
        epoch = int(_expect(line(3), "epoch", path, 4))
    except (ValueError, TypeError) as e:
        raise ParseError(str(path), f"bad header record ({e})")

    state: Dict[str, np.ndarray] = {}
    index = 4
    while index < len(lines):
        if not lines[index].strip():
            index += 1
            continue
        fields = _expect(lines[index], "param", path, index + 1).split()
        if len(fields) < 2:
            raise ParseError(str(path), "param record needs a name and dimensions", index + 1)
        name, dims = fields[0], tuple(int(d) for d in fields[1:])
        raw = line(index + 1)
        if raw is None:
            raise ParseError(str(path), f"missing values for '{name}'", index + 2)
        try:
            values = np.array([float.fromhex(v) for v in raw.split()], dtype=np.float64)
        except ValueError as e:
            raise ParseError(str(path), f"bad value for '{name}' ({e})", index + 2)
        if values.size != int(np.prod(dims)):
            raise ParseError(str(path), f"'{name}' holds {values.size} values, dims {dims} need {int(np.prod(dims))}", index + 2)
        state[name] = values.reshape(dims)
        index += 2
    logger.info(f"Loaded checkpoint ({len(state)} tensors, epoch {epoch}) from {path}")
    return Checkpoint(config=config, layout=layout, state=state, epoch=epoch)
