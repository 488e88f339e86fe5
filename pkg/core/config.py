"""Configuration management for QUARK."""
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from dotenv import load_dotenv

from core.constants import (
    ADAM_BETA1, ADAM_BETA2, ADAM_EPSILON, DEFAULT_BATCH_SIZE, DEFAULT_EMBEDDING_DIM,
    DEFAULT_HIDDEN, DEFAULT_K, DEFAULT_LEARNING_RATE, DEFAULT_RHO, DEFAULT_TRAIN_RATIO,
    NORMAL_HYPERPARAMS, PRESETS, Ablation, DistributionKind,
)
from core.exceptions import ConfigError

load_dotenv()


class Config:
    """Environment-driven defaults."""

    OUTPUT_DIR = os.getenv("QUARK_OUTPUT_DIR", "runs")
    LOG_LEVEL = os.getenv("QUARK_LOG_LEVEL", "INFO")
    SEED = int(os.getenv("QUARK_SEED", "0"))
    WORKERS = int(os.getenv("QUARK_WORKERS", "1"))  # sweep fan-out threads


@dataclass(frozen=True)
class HyperParams:
    """Model hyperparameters (window Λ, step Δ, |B|, c, α, β, D, ξ, h, E)."""
    window: int = NORMAL_HYPERPARAMS['window']
    step: int = NORMAL_HYPERPARAMS['step']
    basis_size: int = NORMAL_HYPERPARAMS['basis_size']
    c: int = NORMAL_HYPERPARAMS['c']
    alpha: float = NORMAL_HYPERPARAMS['alpha']
    beta: float = NORMAL_HYPERPARAMS['beta']
    depth: int = NORMAL_HYPERPARAMS['depth']
    xi: float = NORMAL_HYPERPARAMS['xi']
    hidden: int = DEFAULT_HIDDEN
    embedding_dim: int = DEFAULT_EMBEDDING_DIM
    prepend_initial: bool = False

    def validate(self, samples: Optional[int] = None) -> None:
        """
        Check hyperparameter consistency.

        Args:
            samples: Recording length N, when known

        Raises:
            ConfigError: On any violated constraint
        """
        if self.window < 1 or self.step < 1:
            raise ConfigError(f"window and step must be >= 1 (got {self.window}, {self.step})")
        if samples is not None:
            if self.window > samples:
                raise ConfigError(f"window {self.window} exceeds recording length {samples}")
            if self.step > samples:
                raise ConfigError(f"step {self.step} exceeds recording length {samples}")
        if self.c < 1:
            raise ConfigError(f"c must be >= 1 (got {self.c})")
        if 2 * self.c > self.basis_size:
            raise ConfigError(
                f"2c = {2 * self.c} exceeds basis size {self.basis_size}; "
                "top and bottom selections would overlap"
            )
        for name in ('alpha', 'beta', 'xi'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1] (got {value})")
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1 (got {self.depth})")
        if self.hidden < 1 or self.embedding_dim < 1:
            raise ConfigError("hidden and embedding_dim must be >= 1")


@dataclass(frozen=True)
class TrainConfig:
    """Optimisation settings."""
    learning_rate: float = DEFAULT_LEARNING_RATE
    batch_size: int = DEFAULT_BATCH_SIZE
    rho: float = DEFAULT_RHO
    epochs: int = 10
    seed: int = Config.SEED
    n_pos: int = 1
    n_neg: int = 1
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPSILON
    average_batch_gradients: bool = True
    checkpoint_every: int = 0
    validate_every: int = 0
    ablation: Ablation = Ablation.NONE

    def validate(self) -> None:
        """Raise ConfigError on invalid optimisation settings."""
        if self.rho < 0:
            raise ConfigError(f"rho must be >= 0 (got {self.rho})")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1 (got {self.batch_size})")
        if self.epochs < 0:
            raise ConfigError(f"epochs must be >= 0 (got {self.epochs})")
        if self.n_pos < 1 or self.n_neg < 1:
            raise ConfigError("n_pos and n_neg must be >= 1")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0 (got {self.learning_rate})")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration of one run."""
    hyper: HyperParams = field(default_factory=HyperParams)
    train: TrainConfig = field(default_factory=TrainConfig)
    eeg_path: Optional[str] = None
    embeddings_path: Optional[str] = None
    image_dir: Optional[str] = None
    class_map_path: Optional[str] = None
    distribution: DistributionKind = DistributionKind.AS_IS
    distribution_total: Optional[int] = None
    synthetic: Optional[str] = None
    snr: float = 10.0
    train_ratio: float = DEFAULT_TRAIN_RATIO
    output_dir: str = Config.OUTPUT_DIR
    k: int = DEFAULT_K
    workers: int = Config.WORKERS

    @property
    def seed(self) -> int:
        return self.train.seed

    def validate(self) -> None:
        """Validate every section; raises ConfigError."""
        self.hyper.validate()
        self.train.validate()
        if self.synthetic is None and self.eeg_path is None:
            raise ConfigError("no dataset: give eeg_path (and embeddings_path) or synthetic CxN")
        if self.synthetic is None and self.embeddings_path is None:
            raise ConfigError("eeg_path given without embeddings_path")
        if self.synthetic is not None:
            parse_synthetic_spec(self.synthetic)
        if not 0.0 < self.train_ratio < 1.0:
            raise ConfigError(f"train_ratio must lie in (0, 1) (got {self.train_ratio})")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1 (got {self.k})")

    def with_overrides(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Return a copy with flat key overrides applied."""
        return apply_overrides(self, overrides)

    def to_flat(self) -> Dict[str, Any]:
        """Flatten into the key-value form used by config files."""
        flat: Dict[str, Any] = {}
        flat.update(asdict(self.hyper))
        flat.update(asdict(self.train))
        for f in fields(self):
            if f.name not in ('hyper', 'train'):
                flat[f.name] = getattr(self, f.name)
        return {key: _plain(value) for key, value in flat.items()}


_HYPER_KEYS = {f.name: f for f in fields(HyperParams)}
_TRAIN_KEYS = {f.name: f for f in fields(TrainConfig)}
_RUN_KEYS = {f.name: f for f in fields(RunConfig) if f.name not in ('hyper', 'train')}


def _plain(value: Any) -> Any:
    if isinstance(value, (Ablation, DistributionKind)):
        return value.value
    return value


def _coerce(key: str, raw: Any, annotation: Any) -> Any:
    """Convert a raw (usually string) value to the field's type."""
    if raw is None:
        return None
    text = str(raw).strip()
    target = annotation
    if isinstance(target, str):
        target = {'int': int, 'float': float, 'bool': bool, 'str': str}.get(target, str)
    if getattr(target, '__origin__', None) is Union:
        # only optional fields read "none" as unset
        if text.lower() in ('none', ''):
            return None
        target = next(a for a in target.__args__ if a is not type(None))
    try:
        if target is bool:
            if isinstance(raw, bool):
                return raw
            if text.lower() in ('1', 'true', 'yes', 'on'):
                return True
            if text.lower() in ('0', 'false', 'no', 'off'):
                return False
            raise ValueError(text)
        if target is int:
            return int(text)
        if target is float:
            return float(text)
        if target is Ablation:
            return Ablation(text)
        if target is DistributionKind:
            return DistributionKind(text)
        return text
    except ValueError:
        raise ConfigError(f"invalid value for '{key}': {raw!r}")


def apply_overrides(config: RunConfig, overrides: Mapping[str, Any]) -> RunConfig:
    """
    Apply flat key overrides to a RunConfig.

    Args:
        config: Base configuration
        overrides: Mapping of flat keys (hyperparameter, training or run keys)

    Returns:
        New RunConfig

    Raises:
        ConfigError: On unknown keys or unparsable values
    """
    hyper: Dict[str, Any] = {}
    train: Dict[str, Any] = {}
    run: Dict[str, Any] = {}
    for key, raw in overrides.items():
        if raw is None:
            continue
        if key == 'preset':
            preset = PRESETS.get(str(raw))
            if preset is None:
                raise ConfigError(f"unknown preset '{raw}' (valid: {', '.join(PRESETS)})")
            hyper.update(preset)
        elif key in _HYPER_KEYS:
            hyper[key] = _coerce(key, raw, _HYPER_KEYS[key].type)
        elif key in _TRAIN_KEYS:
            train[key] = _coerce(key, raw, _TRAIN_KEYS[key].type)
        elif key in _RUN_KEYS:
            run[key] = _coerce(key, raw, _RUN_KEYS[key].type)
        else:
            raise ConfigError(f"unknown configuration key '{key}'")
    return replace(
        config,
        hyper=replace(config.hyper, **hyper),
        train=replace(config.train, **train),
        **run,
    )


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a `key = value` configuration file.

    Args:
        path: Config file path

    Returns:
        Ordered mapping of keys to raw string values

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: On malformed lines
    """
    entries: Dict[str, str] = {}
    with open(path, encoding='utf-8') as handle:
        for number, line in enumerate(handle, 1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            if '=' not in text:
                raise ConfigError(f"{path}:{number}: expected 'key = value'")
            key, value = (part.strip() for part in text.split('=', 1))
            entries[key] = value
    return entries


def write_config_file(path: Union[str, Path], config: RunConfig) -> None:
    """Write the resolved configuration in `key = value` form."""
    lines = ["# resolved QUARK run configuration"]
    for key, value in config.to_flat().items():
        lines.append(f"{key} = {'none' if value is None else value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding='utf-8')


def load_run_config(config_path: Optional[str] = None,
                    overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """
    Resolve a RunConfig with precedence flags > config file > defaults.

    Args:
        config_path: Optional `key = value` file
        overrides: Flag values (None entries are ignored)

    Returns:
        Resolved configuration
    """
    config = RunConfig()
    if config_path:
        file_entries = read_config_file(config_path)
        # a preset in the file applies before the file's own keys
        if 'preset' in file_entries:
            config = apply_overrides(config, {'preset': file_entries.pop('preset')})
        config = apply_overrides(config, file_entries)
    if overrides:
        overrides = dict(overrides)
        if overrides.get('preset'):
            config = apply_overrides(config, {'preset': overrides.pop('preset')})
        config = apply_overrides(config, overrides)
    return config


def parse_synthetic_spec(spec: str) -> List[int]:
    """
    Parse a `CxN` synthetic dataset spec (classes x recordings per class).

    Raises:
        ConfigError: If the spec is malformed or has fewer than two classes
    """
    parts = spec.lower().split('x')
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ConfigError(f"synthetic spec must look like '8x50' (got '{spec}')")
    classes, per_class = int(parts[0]), int(parts[1])
    if classes < 2 or per_class < 1:
        raise ConfigError(f"synthetic spec needs >= 2 classes and >= 1 recording each (got '{spec}')")
    return [classes, per_class]
