"""Formatters for converting run results to human-readable and delimited output."""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.constants import StyleMetric
from integrations.formats import format_float


def _cell(value: Optional[float]) -> str:
    return "-" if value is None else format_float(value)


class ReportFormatter:
    """Formats metric reports, training logs, curves and matrices."""

    EPOCH_COLUMNS = ("epoch", "bpr", "orthogonality", "continuity", "regularizer", "total", "val_precision")
    TIMING_COLUMNS = ("epoch", "seconds", "steps")

    @staticmethod
    def format_metric_table(rows: Sequence[Tuple[str, "MetricReport"]], title: str = "QUARK metrics") -> str:
        """
        Format an aligned table of averaged metrics, one row per named report.

        Args:
            rows: (name, MetricReport) pairs, e.g. one per ablation variant
            title: Header line

        Returns:
            Formatted text
        """
        lines = [f"=== {title} ===", ""]
        if not rows:
            lines.append("No results to report.")
            return "\n".join(lines)
        k = rows[0][1].k
        width = max(len("variant"), max(len(name) for name, _ in rows))
        lines.append(f"{'variant':<{width}}  {f'P@{k}':>8}  {f'R@{k}':>8}  {f'F1@{k}':>8}  {'n':>6}")
        for name, report in rows:
            lines.append(f"{name:<{width}}  {report.precision:>8.4f}  {report.recall:>8.4f}  "
                         f"{report.f1:>8.4f}  {len(report.instances):>6}")
        return "\n".join(lines)

    @staticmethod
    def format_instances_tsv(report: "MetricReport") -> str:
        """Per-instance metrics; recommendations are comma-joined."""
        lines = ["\t".join(("recording_id", "label", "viewed_id", f"P@{report.k}",
                            f"R@{report.k}", f"F1@{report.k}", "recommended"))]
        for m in report.instances:
            lines.append("\t".join((m.recording_id, m.label, m.viewed_id or "-",
                                    format_float(m.precision), format_float(m.recall),
                                    format_float(m.f1), ",".join(m.recommended))))
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_summary_tsv(report: "MetricReport") -> str:
        lines = ["metric\tvalue",
                 f"P@{report.k}\t{format_float(report.precision)}",
                 f"R@{report.k}\t{format_float(report.recall)}",
                 f"F1@{report.k}\t{format_float(report.f1)}",
                 f"instances\t{len(report.instances)}"]
        if report.baseline:
            lines.append(f"baseline\t{report.baseline}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_epoch_log(history: Sequence["EpochRecord"]) -> str:
        """
        Epoch log TSV. Holds no wall-clock values, so seeded runs emit identical bytes.
        """
        lines = ["\t".join(ReportFormatter.EPOCH_COLUMNS)]
        for record in history:
            lines.append("\t".join([str(record.epoch)] + [
                _cell(v) for v in (record.bpr, record.orthogonality, record.continuity,
                                   record.regularizer, record.total, record.val_precision)
            ]))
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_timing_log(timings: Sequence["TimingRecord"]) -> str:
        lines = ["\t".join(ReportFormatter.TIMING_COLUMNS)]
        for t in timings:
            lines.append(f"{t.epoch}\t{t.seconds:.3f}\t{t.steps}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_sweep_table(key: str, rows: Sequence[Tuple[object, "MetricReport"]]) -> str:
        """(value, P@k, R@k, F1@k) rows, ready for plotting."""
        k = rows[0][1].k if rows else 10
        lines = [f"{key}\tP@{k}\tR@{k}\tF1@{k}"]
        for value, report in rows:
            lines.append(f"{value}\t{format_float(report.precision)}\t"
                         f"{format_float(report.recall)}\t{format_float(report.f1)}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_curves(style: "StyleReport") -> str:
        """Threshold → percentage of recommendations at or above it, per style metric."""
        metrics = list(StyleMetric)
        lines = ["threshold\t" + "\t".join(m.value for m in metrics)]
        for threshold in style.thresholds:
            row = [format_float(threshold)]
            row.extend(format_float(100.0 * style.fraction_at(m, threshold)) for m in metrics)
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_style_scores(style: "StyleReport") -> str:
        lines = ["recording_id\titem_id\t" + "\t".join(m.value for m in StyleMetric)]
        for s in style.scores:
            lines.append("\t".join([s.recording_id, s.item_id] +
                                   [format_float(s.value(m)) for m in StyleMetric]))
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_style_summary(style: "StyleReport") -> str:
        lines = ["=== Feeling/style detection ===", ""]
        lines.append(f"Scored recommendations: {len(style.scores)}")
        if style.excluded:
            lines.append(f"Excluded (no image): {style.excluded}")
        lines.append("")
        for metric in StyleMetric:
            lines.append(f"{metric.value.title():<12} mean {style.mean(metric):.4f}")
        return "\n".join(lines)

    @staticmethod
    def format_matrix(matrix: np.ndarray, header: Optional[str] = None) -> str:
        """Matrix as lines of space-separated floats, with an optional `# header` line."""
        matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
        lines: List[str] = []
        if header:
            lines.append(f"# {header}")
        for row in matrix:
            lines.append(" ".join(format_float(v) for v in row))
        return "\n".join(lines) + "\n"

    @staticmethod
    def format_labeled_matrix(labels: Sequence[str], ids: Sequence[str], matrix: np.ndarray) -> str:
        """Similarity matrix with `id:label` row and column names, tab-separated."""
        names = [f"{i}:{label}" for i, label in zip(ids, labels)]
        lines = ["\t" + "\t".join(names)]
        for name, row in zip(names, np.asarray(matrix, dtype=np.float64)):
            lines.append(name + "\t" + "\t".join(format_float(v) for v in row))
        return "\n".join(lines) + "\n"
