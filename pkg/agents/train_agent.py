"""Train Agent - trains Γ on the training split and writes checkpoint and logs."""
from typing import Optional

from agents.base_agent import BaseAgent
from agents.workspace import Workspace, load_workspace
from core.checkpoint import save_checkpoint
from core.constants import CHECKPOINT_FILE, EPOCH_LOG_FILE, TIMING_LOG_FILE
from core.utils import stage
from model.params import ModelParams
from output.formatters import ReportFormatter
from training.trainer import Trainer, TrainingResult


class TrainAgent(BaseAgent):
    """
    Runs data → preprocess → training.

    Writes the checkpoint, the config snapshot, the epoch log and the timing log.
    """

    def __init__(self, config, run_dir=None, show_progress: bool = False):
        super().__init__("train", config, run_dir)
        self.show_progress = show_progress

    @property
    def checkpoint_path(self):
        return self.run_dir / CHECKPOINT_FILE

    def _checkpoint(self, params: ModelParams, epoch: int) -> None:
        save_checkpoint(self.checkpoint_path, params, self.config, epoch)

    def run(self, workspace: Optional[Workspace] = None, log_to_file: bool = True, **kwargs) -> TrainingResult:
        """
        Train and persist.

        Args:
            workspace: Pre-loaded dataset; loaded from the config when omitted
            log_to_file: Mirror logs into the run directory's run.log
        """
        with self.run_context(log_to_file):
            workspace = workspace or load_workspace(self.config)
            trainer = Trainer(self.config, workspace.catalog,
                              checkpoint_fn=self._checkpoint,
                              validation=workspace.validation,
                              show_progress=self.show_progress)
            with stage("train"):
                self.config.hyper.validate()
                self.config.train.validate()
                result = trainer.fit(workspace.train)
                self._checkpoint(result.params, len(result.history))
            self.save_artifact(EPOCH_LOG_FILE, ReportFormatter.format_epoch_log(result.history))
            self.save_artifact(TIMING_LOG_FILE, ReportFormatter.format_timing_log(result.timings))
            if result.history:
                last = result.history[-1]
                self.log(f"Finished {len(result.history)} epochs, final loss {last.total:.6f}")
            return result
