"""Generate Agent - writes a synthetic dataset in the on-disk formats."""
from dataclasses import dataclass
from pathlib import Path

from agents.base_agent import BaseAgent
from core.config import parse_synthetic_spec
from core.exceptions import ConfigError
from core.utils import stage
from integrations.catalog import save_image, write_embeddings
from integrations.formats import write_recordings
from integrations.synthetic import generate_synthetic

RECORDINGS_FILE = "recordings.txt"
EMBEDDINGS_FILE = "embeddings.tsv"
IMAGE_DIR = "images"


@dataclass(frozen=True)
class GeneratedDataset:
    eeg_path: Path
    embeddings_path: Path
    image_dir: Path
    recordings: int
    items: int


class GenerateAgent(BaseAgent):
    """Materialises `--synthetic CxN` data so it can be fed back through eeg_path/embeddings_path."""

    def __init__(self, config, run_dir=None):
        super().__init__("generate", config, run_dir)

    def run(self, **kwargs) -> GeneratedDataset:
        if not self.config.synthetic:
            raise ConfigError("generate needs --synthetic CxN")
        with self.run_context(), stage("generate"):
            classes, per_class = parse_synthetic_spec(self.config.synthetic)
            recordings, catalog = generate_synthetic(classes, per_class, self.config.hyper.embedding_dim,
                                                     self.config.seed, snr=self.config.snr)
            eeg_path = self.run_dir / RECORDINGS_FILE
            embeddings_path = self.run_dir / EMBEDDINGS_FILE
            image_dir = self.run_dir / IMAGE_DIR
            write_recordings(eeg_path, recordings)
            write_embeddings(embeddings_path, catalog)
            for item_id, image in catalog.images().items():
                save_image(image_dir / f"{item_id}.npy", image)
            self.log(f"Generated {len(recordings)} recordings and {len(catalog)} items in {self.run_dir}")
            return GeneratedDataset(eeg_path, embeddings_path, image_dir, len(recordings), len(catalog))
