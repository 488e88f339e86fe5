"""Eval Agent - runs the candidate protocol on the test split and writes metric files."""
from typing import Optional

from agents.base_agent import BaseAgent
from agents.workspace import Workspace, build_model, load_workspace
from core.checkpoint import Checkpoint
from core.constants import Ablation
from core.utils import stage
from evaluation.protocol import MetricReport, evaluate
from model.network import QuarkModel
from output.formatters import ReportFormatter

METRICS_FILE = "metrics.txt"
SUMMARY_FILE = "summary.tsv"
INSTANCES_FILE = "instances.tsv"
CURVES_FILE = "style_curves.tsv"
STYLE_SCORES_FILE = "style_scores.tsv"


class EvalAgent(BaseAgent):
    """Averaged and per-instance P@k/R@k/F1@k, plus the optional feeling/style report."""

    def __init__(self, config, run_dir=None, show_progress: bool = False):
        super().__init__("eval", config, run_dir)
        self.show_progress = show_progress

    def run(self, checkpoint: Optional[Checkpoint] = None,
            workspace: Optional[Workspace] = None,
            model: Optional[QuarkModel] = None,
            baseline: Optional[str] = None,
            with_style: bool = False,
            log_to_file: bool = True, **kwargs) -> MetricReport:
        """
        Evaluate a checkpoint (or an untrained model, or a baseline).

        Args:
            checkpoint: Trained parameters; omitted means untrained
            workspace: Pre-loaded dataset
            model: Ready model, taking precedence over checkpoint
            baseline: 'random' for the random-guess recommender
            with_style: Also write the feeling/style files
        """
        with self.run_context(log_to_file):
            workspace = workspace or load_workspace(self.config)
            if model is None and baseline is None:
                model = build_model(workspace, checkpoint)
            with stage("eval"):
                report = evaluate(model, workspace.test, workspace.catalog, k=self.config.k,
                                  seed=self.config.seed, baseline=baseline, with_style=with_style,
                                  show_progress=self.show_progress)
            name = baseline or Ablation(self.config.train.ablation).value
            table = ReportFormatter.format_metric_table([(name, report)])
            self.save_artifact(METRICS_FILE, table + "\n")
            self.save_artifact(SUMMARY_FILE, ReportFormatter.format_summary_tsv(report))
            self.save_artifact(INSTANCES_FILE, ReportFormatter.format_instances_tsv(report))
            if report.style is not None:
                self.save_artifact(CURVES_FILE, ReportFormatter.format_curves(report.style))
                self.save_artifact(STYLE_SCORES_FILE, ReportFormatter.format_style_scores(report.style))
                self.log(ReportFormatter.format_style_summary(report.style))
            self.log("\n" + table)
            return report
