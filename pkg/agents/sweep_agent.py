"""Sweep Agent - trains and evaluates once per value of one sweepable key."""
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from agents.base_agent import BaseAgent
from agents.eval_agent import EvalAgent
from agents.train_agent import TrainAgent
from agents.workspace import Workspace, load_workspace
from core.config import RunConfig
from core.constants import SWEEP_KEYS, SWEEP_RANGES, Ablation
from core.exceptions import ConfigError
from evaluation.protocol import MetricReport
from model.network import QuarkModel
from output.formatters import ReportFormatter

ABLATION_KEY = "ablation"
VALID_KEYS = SWEEP_KEYS + (ABLATION_KEY,)
SWEEP_TABLE_FILE = "sweep.tsv"
SWEEP_REPORT_FILE = "sweep.txt"


def default_values(key: str) -> List[str]:
    """Documented sweep range of a key; every ablation variant for 'ablation'."""
    if key == ABLATION_KEY:
        return [a.value for a in Ablation]
    return [str(v) for v in SWEEP_RANGES[key]]


class SweepAgent(BaseAgent):
    """
    Runs train + eval per value with a shared seed.

    Value runs fan out over `workers` threads; each writes into its own
    `<key>=<value>` subdirectory, and the table keeps the order of `values`.
    """

    def __init__(self, config, run_dir=None):
        super().__init__("sweep", config, run_dir)

    @staticmethod
    def check_key(key: str) -> None:
        if key not in VALID_KEYS:
            raise ConfigError(f"'{key}' is not sweepable (valid: {', '.join(VALID_KEYS)})")

    def _one(self, key: str, value: str, workspace: Workspace) -> MetricReport:
        config: RunConfig = self.config.with_overrides({key: value})
        run_dir = self.run_dir / f"{key}={value}"
        self.log(f"Sweep run {key}={value}")
        result = TrainAgent(config, run_dir).run(workspace=workspace, log_to_file=False)
        model = QuarkModel(config.hyper, result.params, Ablation(config.train.ablation), config.seed)
        return EvalAgent(config, run_dir).run(workspace=workspace, model=model, log_to_file=False)

    def run(self, key: str = ABLATION_KEY, values: Optional[Sequence[str]] = None,
            **kwargs) -> List[Tuple[str, MetricReport]]:
        """
        Sweep `key` over `values` (its documented range when omitted).

        Raises:
            ConfigError: On a key outside the sweepable set, or an invalid value
        """
        self.check_key(key)
        values = [str(v) for v in (values or default_values(key))]
        for value in values:
            self.config.with_overrides({key: value}).hyper.validate()
        with self.run_context():
            workspace = load_workspace(self.config)
            workers = max(1, min(self.config.workers, len(values)))
            with ThreadPoolExecutor(max_workers=workers) as pool:
                reports = list(pool.map(lambda v: self._one(key, v, workspace), values))
            rows = list(zip(values, reports))
            self.save_artifact(SWEEP_TABLE_FILE, ReportFormatter.format_sweep_table(key, rows))
            table = ReportFormatter.format_metric_table(
                [(f"{key}={value}", report) for value, report in rows], title=f"Sweep over {key}")
            self.save_artifact(SWEEP_REPORT_FILE, table + "\n")
            self.log("\n" + table)
            return rows
