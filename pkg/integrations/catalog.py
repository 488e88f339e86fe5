"""Item catalog: precomputed image embeddings plus optional raw images."""
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Union

import numpy as np
from PIL import Image

from core.exceptions import ContractError, FormatError
from core.logger import get_logger
from core.utils import atomic_write
from integrations.formats import format_embedding_line, parse_embedding_line
from model.preprocess import EegRecording

logger = get_logger(__name__)

IMAGE_SUFFIXES = ('.npy', '.png', '.jpg', '.jpeg')


@dataclass(frozen=True)
class CatalogItem:
    item_id: str
    label: str
    embedding: np.ndarray


class ItemCatalog:
    """
    Items keyed by id, grouped by class label.

    Raw images come either from memory (synthetic data) or from an image
    directory holding `<item_id>.npy|.png|.jpg`, loaded on first use.
    """

    def __init__(self, items: Iterable[CatalogItem],
                 images: Optional[Mapping[str, np.ndarray]] = None,
                 image_dir: Optional[Union[str, Path]] = None):
        self._items: Dict[str, CatalogItem] = {}
        dim = None
        for item in items:
            if item.item_id in self._items:
                raise ContractError(f"duplicate item_id '{item.item_id}'")
            if dim is None:
                dim = item.embedding.shape[0]
            elif item.embedding.shape != (dim,):
                raise ContractError(
                    f"item '{item.item_id}' has embedding length {item.embedding.shape[0]}, expected {dim}"
                )
            self._items[item.item_id] = item
        self.embedding_dim = dim or 0
        self._images: Dict[str, np.ndarray] = dict(images or {})
        self.image_dir = Path(image_dir) if image_dir else None
        self._by_label: Dict[str, List[str]] = {}
        for item_id in sorted(self._items):
            self._by_label.setdefault(self._items[item_id].label, []).append(item_id)

    def __len__(self) -> int:
        return len(self._items)

    def __iter__(self) -> Iterator[CatalogItem]:
        return (self._items[i] for i in sorted(self._items))

    def __contains__(self, item_id: str) -> bool:
        return item_id in self._items

    def __getitem__(self, item_id: str) -> CatalogItem:
        try:
            return self._items[item_id]
        except KeyError:
            raise ContractError(f"unknown item '{item_id}'")

    def labels(self) -> List[str]:
        return sorted(self._by_label)

    def ids_for(self, label: str) -> List[str]:
        """Item ids of one class, sorted."""
        return list(self._by_label.get(label, []))

    def ids_excluding(self, label: str) -> List[str]:
        """Item ids of every other class, sorted."""
        return sorted(i for i, item in self._items.items() if item.label != label)

    def class_sizes(self) -> Dict[str, int]:
        return {label: len(ids) for label, ids in sorted(self._by_label.items())}

    def embeddings(self, item_ids: Sequence[str]) -> np.ndarray:
        """Stacked embeddings, shape len(item_ids)×E."""
        if not item_ids:
            return np.zeros((0, self.embedding_dim))
        return np.stack([self[i].embedding for i in item_ids])

    def image(self, item_id: str) -> Optional[np.ndarray]:
        """Raw image as float array (d×d or d×d×3), or None when unavailable."""
        if item_id in self._images:
            return self._images[item_id]
        if self.image_dir is None:
            return None
        for suffix in IMAGE_SUFFIXES:
            candidate = self.image_dir / f"{item_id}{suffix}"
            if candidate.exists():
                image = load_image(candidate)
                self._images[item_id] = image
                return image
        return None

    def images(self) -> Dict[str, np.ndarray]:
        """In-memory images (synthetic catalogs)."""
        return dict(self._images)

    def relabel(self, mapping: Mapping[str, str]) -> "ItemCatalog":
        """Apply a child → merged class mapping; unmapped labels stay."""
        return ItemCatalog(
            (replace(item, label=mapping.get(item.label, item.label)) for item in self),
            self._images, self.image_dir,
        )


def load_image(path: Union[str, Path]) -> np.ndarray:
    """Read `.npy` with numpy, anything else with Pillow."""
    path = Path(path)
    if path.suffix == '.npy':
        return np.asarray(np.load(path), dtype=np.float64)
    with Image.open(path) as img:
        mode = 'L' if img.mode in ('1', 'L', 'I', 'F') else 'RGB'
        return np.asarray(img.convert(mode), dtype=np.float64)


def save_image(path: Union[str, Path], image: np.ndarray) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.save(path, np.asarray(image, dtype=np.float64))


def load_embeddings(path: Union[str, Path], image_dir: Optional[Union[str, Path]] = None) -> ItemCatalog:
    """
    Load an embedding file (`item_id<TAB>label<TAB>f1 … fE` per line).

    Raises:
        FileNotFoundError: If the file does not exist
        FormatError: On an empty file, inconsistent E (first offending line)
            or a duplicate item_id
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"embeddings file not found: {path}")
    items: List[CatalogItem] = []
    seen: Dict[str, int] = {}
    dim = None
    with open(path, encoding='utf-8') as handle:
        for number, line in enumerate(handle, 1):
            if not line.strip() or line.startswith('#'):
                continue
            item_id, label, vector = parse_embedding_line(line, number, str(path))
            if item_id in seen:
                raise FormatError(str(path), f"duplicate item_id '{item_id}' (first on line {seen[item_id]})", number)
            if dim is None:
                dim = vector.size
            elif vector.size != dim:
                raise FormatError(str(path), f"item {item_id} has {vector.size} values, expected {dim}", number)
            seen[item_id] = number
            items.append(CatalogItem(item_id, label, vector))
    if not items:
        raise FormatError(str(path), "empty catalog; evaluation needs item embeddings")
    if image_dir is not None and not Path(image_dir).is_dir():
        logger.warning(f"Image directory {image_dir} does not exist; style metrics will skip images")
    logger.info(f"Loaded {len(items)} items (E={dim}) from {path}")
    return ItemCatalog(items, image_dir=image_dir)


def write_embeddings(path: Union[str, Path], catalog: ItemCatalog) -> None:
    with atomic_write(path) as handle:
        for item in catalog:
            handle.write(format_embedding_line(item.item_id, item.label, item.embedding) + "\n")


def relabel_recordings(recordings: Sequence[EegRecording],
                       mapping: Mapping[str, str]) -> List[EegRecording]:
    """Apply a child → merged class mapping to recording labels."""
    return [replace(r, label=mapping.get(r.label, r.label)) for r in recordings]
