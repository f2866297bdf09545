"""Model assembly, training, prediction, and checkpointing."""

from __future__ import annotations

import numpy as np

from ..relations import RELATIONS
from .checkpoint import load_checkpoint, save_checkpoint
from .config import ARCHITECTURES, SEQUENCE_ORDER, ModelConfig, config_from_arch
from .features import Baseline1Featurizer, DiscreteFeatureModel, Lexicons
from .gradcheck import check_model_gradients
from .majority import MajorityClassModel
from .sequence import SequenceModel, context_for_pair
from .train import TrainResult, build_examples, train_model, training_log_csv
from .windows import EventWindowModel, extract_event_windows


def predict(model, inputs) -> tuple[str, np.ndarray]:
    """Dropout-free prediction; ties break toward the lowest class id."""
    probs = model.predict_proba(inputs)
    return RELATIONS[int(np.argmax(probs))], probs


__all__ = [
    "ARCHITECTURES",
    "SEQUENCE_ORDER",
    "Baseline1Featurizer",
    "DiscreteFeatureModel",
    "EventWindowModel",
    "Lexicons",
    "MajorityClassModel",
    "ModelConfig",
    "SequenceModel",
    "TrainResult",
    "build_examples",
    "check_model_gradients",
    "config_from_arch",
    "context_for_pair",
    "extract_event_windows",
    "load_checkpoint",
    "predict",
    "save_checkpoint",
    "train_model",
    "training_log_csv",
]
