"""Reference baseline that labels every pair with the corpus-majority relation."""

from __future__ import annotations

import numpy as np

from ..relations import RELATION_IDS, RELATIONS

MAJORITY_LABEL = "after"


class MajorityClassModel:
    """Assigns the fixed majority label ("after") to every input."""

    label = MAJORITY_LABEL

    def predict_proba(self, _inputs=None) -> np.ndarray:
        probs = np.zeros(len(RELATIONS))
        probs[RELATION_IDS[self.label]] = 1.0
        return probs

    def tensors(self) -> dict[str, np.ndarray]:
        return {}

    def parameter_count(self) -> int:
        return 0
