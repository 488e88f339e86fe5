"""Constants used throughout QUARK."""
from enum import Enum


class DistributionKind(str, Enum):
    """Per-class instance-count shapes a dataset can be resampled into."""
    NORMAL = "normal"
    LONG_TAIL = "long-tail"
    AS_IS = "as-is"


class Ablation(str, Enum):
    """Model variants with one component switched off."""
    NONE = "none"
    NO_GCN = "no_gcn"
    NO_QM = "no_qm"
    NO_INTERFERENCE = "no_interference"
    NO_CONTINUITY = "no_continuity"
    NO_TEMPORAL_MASK = "no_temporal_mask"
    NO_CONTINUITY_LOSS = "no_continuity_loss"
    NO_QM_LOSS = "no_qm_loss"


class Branch(str, Enum):
    """The two adjacency branches of the model."""
    CONTINUITY = "continuity"
    INTERFERENCE = "interference"


class StyleMetric(str, Enum):
    """Feeling/style scores computed for every recommended image."""
    CONTENT = "content"
    COLOR = "color"
    STRUCTURAL = "structural"
    SYNTHESIS = "synthesis"
    MIXED = "mixed"


class ExitCode(int, Enum):
    """Process exit codes of the command-line surface."""
    OK = 0
    INTERNAL_ERROR = 1
    USER_ERROR = 2


# Recording geometry (MindBigData Insight)
CHANNEL_ORDER = ("AF3", "AF4", "T7", "T8", "Pz")
DEFAULT_ELECTRODES = len(CHANNEL_ORDER)
DEFAULT_SAMPLES = 360

# Recommendation protocol
CANDIDATES_TOTAL = 100
CANDIDATES_POSITIVE = 15
DEFAULT_K = 10
DEFAULT_TRAIN_RATIO = 0.85

# Hyperparameter sets. Keys match core.config.HyperParams fields.
NORMAL_HYPERPARAMS = {
    'window': 15, 'step': 25, 'basis_size': 15, 'c': 2,
    'alpha': 0.8, 'beta': 0.4, 'depth': 5, 'xi': 0.3,
}
LONG_TAIL_HYPERPARAMS = {
    'window': 10, 'step': 20, 'basis_size': 10, 'c': 2,
    'alpha': 0.9, 'beta': 0.7, 'depth': 5, 'xi': 0.3,
}
# Small enough for a laptop CPU on synthetic data
DESK_HYPERPARAMS = {
    'window': 15, 'step': 25, 'basis_size': 15, 'c': 2,
    'alpha': 0.8, 'beta': 0.4, 'depth': 2, 'xi': 0.3,
    'hidden': 32, 'embedding_dim': 128,
}
PRESETS = {
    'normal': NORMAL_HYPERPARAMS,
    'long-tail': LONG_TAIL_HYPERPARAMS,
    'desk': DESK_HYPERPARAMS,
}

DEFAULT_HIDDEN = 128
DEFAULT_EMBEDDING_DIM = 64

# Optimisation
DEFAULT_LEARNING_RATE = 1e-4
DEFAULT_BATCH_SIZE = 16
DEFAULT_RHO = 1e-4
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8

# Sweepable keys and the ranges explored in the hyperparameter analysis
SWEEP_RANGES = {
    'window': [5, 10, 15, 20, 25, 30, 35],
    'step': [5, 10, 15, 20, 25, 30, 35],
    'basis_size': [5, 10, 15, 20, 25],
    'c': [1, 2, 3, 4],
    'alpha': [round(0.1 * i, 1) for i in range(11)],
    'beta': [round(0.1 * i, 1) for i in range(11)],
    'depth': [1, 2, 3, 4, 5, 6, 7],
    'xi': [round(0.1 * i, 1) for i in range(11)],
}
SWEEP_KEYS = tuple(SWEEP_RANGES)

# Numerical guards
UNIT_NORM_FLOOR = 1e-12
GRADCHECK_STEP = 1e-5

# Feeling/style detection
LUMA_WEIGHTS = (0.299, 0.587, 0.114)
EDGE_PERCENTILE = 90.0
DEFAULT_THRESHOLDS = [round(0.1 * i, 1) for i in range(11)]

# File formats
CHECKPOINT_MAGIC = "QUARK-CHECKPOINT"
CHECKPOINT_VERSION = 1
CHECKPOINT_FILE = "checkpoint.qck"
CONFIG_SNAPSHOT_FILE = "config.cfg"
EPOCH_LOG_FILE = "epochs.tsv"
TIMING_LOG_FILE = "timing.tsv"
RUN_LOG_FILE = "run.log"
