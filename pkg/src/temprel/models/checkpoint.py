"""Versioned JSON checkpoints: parameters, vocabularies, and config in one file.

A checkpoint is self-contained for prediction: sequence models carry the
embedding vectors of their training vocabulary plus the shared UNK vector,
so loading a checkpoint and classifying an input needs no external
resources. An embedding table passed at load time widens word coverage
(useful when scoring text with many words unseen in training).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..encoding import EmbeddingTable, Vocabulary
from ..errors import CheckpointError
from ..relations import RELATIONS
from .config import ModelConfig
from .features import Baseline1Featurizer, DiscreteFeatureModel, Lexicons
from .majority import MajorityClassModel
from .sequence import SequenceModel
from .windows import EventWindowModel

FORMAT_VERSION = 1


def _embedding_payload(table: EmbeddingTable | None) -> dict | None:
    if table is None:
        return None
    return {
        "dim": table.dim,
        "unk": table.unk.tolist(),
        "vectors": {w: table.vector(w).tolist() for w in table.words},
    }


def _embedding_from_payload(payload: dict | None, extra: EmbeddingTable | None):
    if payload is None:
        return None
    vectors = {w: np.array(v) for w, v in payload["vectors"].items()}
    if extra is not None:
        for word in extra.words:
            vectors.setdefault(word, extra.vector(word))
    return EmbeddingTable(vectors, payload["dim"], unk=np.array(payload["unk"]))


def _tensor_payload(tensors: dict[str, np.ndarray]) -> dict:
    return {name: arr.tolist() for name, arr in tensors.items()}


def _restore_tensors(model, payload: dict) -> None:
    tensors = model.tensors()
    if set(tensors) != set(payload):
        raise CheckpointError(
            f"checkpoint tensors {sorted(payload)} do not match the model "
            f"architecture ({sorted(tensors)})"
        )
    for name, arr in tensors.items():
        saved = np.array(payload[name])
        if saved.shape != arr.shape:
            raise CheckpointError(
                f"tensor {name!r} has shape {saved.shape}, expected {arr.shape}"
            )
        arr[:] = saved


def save_checkpoint(path: str | Path, model) -> None:
    if isinstance(model, MajorityClassModel):
        payload = {"architecture": "majority"}
    elif isinstance(model, SequenceModel):
        payload = {
            "architecture": model.config.architecture,
            "config": model.config.to_dict(),
            "pos_vocab": model.pos_vocab.to_list(),
            "dep_vocab": model.dep_vocab.to_list(),
            "embedding": _embedding_payload(model.embeddings),
            "tensors": _tensor_payload(model.tensors()),
        }
    elif isinstance(model, DiscreteFeatureModel):
        f = model.featurizer
        payload = {
            "architecture": "baseline1",
            "config": model.config.to_dict(),
            "pos_vocab": f.pos_vocab.to_list(),
            "dep_vocab": f.dep_vocab.to_list(),
            "token_vocab": f.token_vocab.to_list(),
            "lemma_vocab": f.lemma_vocab.to_list(),
            "prep_vocab": f.prep_vocab.to_list(),
            "signal_words": list(f.lexicons.signal_words),
            "verb_relations": sorted(f.lexicons.verb_relations),
            "tensors": _tensor_payload(model.tensors()),
        }
    elif isinstance(model, EventWindowModel):
        payload = {
            "architecture": "baseline3",
            "config": model.config.to_dict(),
            "pos_vocab": model.pos_vocab.to_list(),
            "embedding": _embedding_payload(model.embeddings),
            "tensors": _tensor_payload(model.tensors()),
        }
    else:
        raise CheckpointError(f"cannot checkpoint a {type(model).__name__}")

    payload["format_version"] = FORMAT_VERSION
    payload["labels"] = list(RELATIONS)
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_checkpoint(path: str | Path, embeddings: EmbeddingTable | None = None):
    """Rebuild a model from a checkpoint file.

    Raises CheckpointError for unreadable files, unsupported versions, or
    payloads inconsistent with the recorded architecture.
    """
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as err:
        raise CheckpointError(f"cannot read checkpoint {path}: {err}") from None
    if not isinstance(payload, dict) or "format_version" not in payload:
        raise CheckpointError(f"{path} is not a model checkpoint")
    if payload["format_version"] != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format version {payload['format_version']}"
        )
    if payload.get("labels") != list(RELATIONS):
        raise CheckpointError("checkpoint label ordering does not match this build")

    arch = payload.get("architecture")
    try:
        if arch == "majority":
            return MajorityClassModel()
        config = ModelConfig.from_dict(payload["config"])
        rng = np.random.default_rng(0)  # placeholder init, overwritten below
        if arch in ("sequence_model", "baseline2"):
            model = SequenceModel(
                config,
                Vocabulary.from_list(payload["pos_vocab"]),
                Vocabulary.from_list(payload["dep_vocab"]),
                _embedding_from_payload(payload.get("embedding"), embeddings),
                rng,
            )
        elif arch == "baseline1":
            featurizer = Baseline1Featurizer.__new__(Baseline1Featurizer)
            featurizer.lexicons = Lexicons(
                signal_words=tuple(payload["signal_words"]),
                verb_relations=frozenset(tuple(t) for t in payload["verb_relations"]),
            )
            featurizer.pos_vocab = Vocabulary.from_list(payload["pos_vocab"])
            featurizer.dep_vocab = Vocabulary.from_list(payload["dep_vocab"])
            featurizer.token_vocab = Vocabulary.from_list(payload["token_vocab"])
            featurizer.lemma_vocab = Vocabulary.from_list(payload["lemma_vocab"])
            featurizer.prep_vocab = Vocabulary.from_list(payload["prep_vocab"])
            featurizer.blocks = {}
            offset = 0
            for name, width in featurizer._block_widths():
                featurizer.blocks[name] = slice(offset, offset + width)
                offset += width
            featurizer.width = offset
            model = DiscreteFeatureModel(config, featurizer)
        elif arch == "baseline3":
            model = EventWindowModel(
                config,
                Vocabulary.from_list(payload["pos_vocab"]),
                _embedding_from_payload(payload.get("embedding"), embeddings),
                rng,
            )
        else:
            raise CheckpointError(f"unknown architecture {arch!r} in checkpoint")
        _restore_tensors(model, payload["tensors"])
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise CheckpointError(f"malformed checkpoint {path}: {err}") from None
    return model
