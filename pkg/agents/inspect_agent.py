"""Inspect Agent - dumps the intermediate matrices of one instance."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional

import numpy as np

from agents.base_agent import BaseAgent
from agents.workspace import build_model, load_workspace
from core.checkpoint import Checkpoint
from core.utils import stage
from model.network import ForwardResult, QuarkModel
from numerics.tensor import Tensor
from output.formatters import ReportFormatter

SIMILARITY_FILE = "similarity.tsv"


@dataclass
class InspectResult:
    recording_id: str
    forward: ForwardResult
    files: Dict[str, Path] = field(default_factory=dict)
    similarity: Optional[np.ndarray] = None


def representation_similarity(model: QuarkModel, recordings) -> np.ndarray:
    """Dot similarity between x̄ of the given recordings, in the given order."""
    reps = np.stack([model.represent(r) for r in recordings])
    return reps @ reps.T


class InspectAgent(BaseAgent):
    """Writes adjacency matrices, collapse probabilities and, optionally, the x̄ similarity matrix."""

    def __init__(self, config, run_dir=None):
        super().__init__("inspect", config, run_dir)

    def _dump(self, result: InspectResult, filename: str, matrix, header: str) -> None:
        if matrix is None:
            return
        data = matrix.data if isinstance(matrix, Tensor) else matrix
        result.files[filename] = self.save_artifact(filename, ReportFormatter.format_matrix(data, header))

    def run(self, checkpoint: Optional[Checkpoint] = None, recording_id: Optional[str] = None,
            similarity: bool = False, **kwargs) -> InspectResult:
        """
        Inspect one recording (the first test recording when no id is given).

        Args:
            checkpoint: Trained parameters; omitted means untrained
            recording_id: Recording to inspect
            similarity: Also write the test-set representation similarity matrix
        """
        with self.run_context():
            workspace = load_workspace(self.config)
            model = build_model(workspace, checkpoint)
            recording = workspace.find(recording_id) if recording_id else (workspace.test or workspace.train)[0]
            with stage("inspect"):
                forward = model.forward(recording)
            result = InspectResult(recording.recording_id, forward)
            rid = recording.recording_id
            adjacency = forward.adjacency
            self._dump(result, "continuity_raw.txt", forward.continuity_raw, f"{rid} continuity before filtering")
            self._dump(result, "interference_raw.txt", forward.interference_raw, f"{rid} interference before filtering")
            self._dump(result, "continuity_filtered.txt", adjacency.continuity,
                       f"{rid} continuity filtered, alpha={adjacency.alpha}")
            self._dump(result, "interference_filtered.txt", adjacency.interference,
                       f"{rid} interference filtered, beta={adjacency.beta}")
            self._dump(result, "continuity_normalized.txt", adjacency.continuity_norm, f"{rid} continuity row-normalised")
            self._dump(result, "interference_normalized.txt", adjacency.interference_norm,
                       f"{rid} interference row-normalised")
            if forward.collapse is not None:
                self._dump(result, "collapse.txt", forward.collapse.probabilities,
                           f"{rid} collapse probabilities, one row per segment")
                self._dump(result, "collapse_top.txt", forward.collapse.top_indices + 1,
                           f"{rid} top-c basis indices (1-based)")
                self._dump(result, "collapse_bottom.txt", forward.collapse.bottom_indices + 1,
                           f"{rid} bottom-c basis indices (1-based)")
            self._dump(result, "representation.txt", forward.representation, f"{rid} representation")

            if similarity:
                ordered = sorted(workspace.test, key=lambda r: (r.label, r.recording_id))
                with stage("inspect"):
                    result.similarity = representation_similarity(model, ordered)
                result.files[SIMILARITY_FILE] = self.save_artifact(SIMILARITY_FILE, ReportFormatter.format_labeled_matrix(
                    [r.label for r in ordered], [r.recording_id for r in ordered], result.similarity))
            self.log(f"Inspected {rid}: {len(result.files)} files")
            return result
