"""Closed vocabularies with one-hot encoding, and pretrained word vectors.

Vocabularies are built from the training split only and frozen; anything
unseen maps to the reserved UNK id 0. Word forms are looked up lowercased
in a pretrained embedding table; all out-of-vocabulary words share one
fixed random vector so the table stays total.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import EmbeddingFormatError

UNK = "<unk>"


class Vocabulary:
    """Bijective label-to-id map with UNK pinned at id 0."""

    def __init__(self, labels: Iterable[str] = ()):
        self._labels: list[str] = [UNK]
        self._ids: dict[str, int] = {UNK: 0}
        for label in labels:
            if label not in self._ids:
                self._ids[label] = len(self._labels)
                self._labels.append(label)

    @property
    def size(self) -> int:
        return len(self._labels)

    def id(self, label: str) -> int:
        return self._ids.get(label, 0)

    def label(self, index: int) -> str:
        return self._labels[index]

    def __contains__(self, label: str) -> bool:
        return label in self._ids

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self._labels)

    def to_list(self) -> list[str]:
        """Known labels in id order, UNK excluded (for serialization)."""
        return list(self._labels[1:])

    @classmethod
    def from_list(cls, labels: Iterable[str]) -> "Vocabulary":
        return cls(labels)


def build_vocab(sequences: Iterable[Iterable[str]]) -> Vocabulary:
    """Vocabulary over every label in the given sequences, first occurrence first."""
    return Vocabulary(label for seq in sequences for label in seq)


def encode_onehot(vocab: Vocabulary, label: str) -> np.ndarray:
    vec = np.zeros(vocab.size)
    vec[vocab.id(label)] = 1.0
    return vec


class EmbeddingTable:
    """Word-to-vector lookup with a single shared UNK vector.

    Lookups are case-folded to lowercase. The UNK vector is drawn once at
    construction from uniform(-0.05, 0.05) with the given seed, so every
    out-of-vocabulary word gets the same vector for the whole run.
    """

    def __init__(self, vectors: Mapping[str, np.ndarray], dim: int, unk: np.ndarray | None = None, seed: int = 0):
        self.dim = dim
        self._vectors = {w: np.asarray(v, dtype=float) for w, v in vectors.items()}
        if unk is None:
            rng = np.random.default_rng(seed)
            unk = rng.uniform(-0.05, 0.05, dim)
        self.unk = np.asarray(unk, dtype=float)

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._vectors

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(self._vectors)

    def vector(self, word: str) -> np.ndarray:
        return self._vectors.get(word.lower(), self.unk)

    def subset(self, words: Iterable[str]) -> "EmbeddingTable":
        """A table restricted to the given words (for compact checkpoints)."""
        kept = {}
        for word in words:
            key = word.lower()
            if key in self._vectors and key not in kept:
                kept[key] = self._vectors[key]
        return EmbeddingTable(kept, self.dim, unk=self.unk.copy())


def load_embeddings(path: str | Path, dim: int, seed: int = 0) -> EmbeddingTable:
    """Read a GloVe-style text file: word followed by dim numbers per line.

    Duplicate words keep their first occurrence. A line with the wrong
    number of components is a format error reported with its line number.
    """
    vectors: dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != dim + 1:
                raise EmbeddingFormatError(
                    f"expected a word plus {dim} numbers, found {len(parts)} fields",
                    line_number,
                )
            word = parts[0].lower()
            if word in vectors:
                continue
            try:
                vectors[word] = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise EmbeddingFormatError(
                    f"non-numeric vector component for word {parts[0]!r}", line_number
                ) from None
    return EmbeddingTable(vectors, dim, seed=seed)


def embed_word(table: EmbeddingTable, word: str) -> np.ndarray:
    return table.vector(word)
