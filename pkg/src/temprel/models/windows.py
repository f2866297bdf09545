"""Event-embedding baseline over fixed context windows.

Each event mention is represented by encoding up to 19 tokens of left
context with a forward LSTM and up to 19 tokens of right context,
consumed in reverse, with a backward LSTM. The two layers are shared
between the events; the four final states are concatenated and fed to the
softmax output layer. Inputs are word embedding + POS one-hot per token.
"""

from __future__ import annotations

import numpy as np

from .. import nn
from ..corpus import EventPair, ParsedSentence
from ..encoding import EmbeddingTable, Vocabulary, encode_onehot
from ..errors import ConfigError
from ..relations import RELATIONS
from .config import ModelConfig

WindowInputs = tuple[list[np.ndarray], list[np.ndarray], list[np.ndarray], list[np.ndarray]]


def extract_event_windows(
    sentence: ParsedSentence, pair: EventPair, width: int = 19
) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Token indices of the four context windows, in surface order.

    For each event: up to `width` tokens to its left and up to `width` to
    its right, excluding the event token itself. Windows shrink at the
    sentence boundaries.
    """
    n = len(sentence)

    def windows(event: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        left = tuple(range(max(1, event - width), event))
        right = tuple(range(event + 1, min(n, event + width) + 1))
        return left, right

    left1, right1 = windows(pair.e1_index)
    left2, right2 = windows(pair.e2_index)
    return left1, right1, left2, right2


class EventWindowModel:
    # Window roles: (input slot, shared layer, feed in reverse order).
    _ROLES = (("fwd", False), ("bwd", True), ("fwd", False), ("bwd", True))

    def __init__(
        self,
        config: ModelConfig,
        pos_vocab: Vocabulary,
        embeddings: EmbeddingTable,
        rng: np.random.Generator,
    ):
        config.validate()
        if config.architecture != "baseline3":
            raise ConfigError(f"not the window baseline: {config.architecture!r}")
        self.config = config
        self.pos_vocab = pos_vocab
        self.embeddings = embeddings
        in_dim = embeddings.dim + pos_vocab.size
        self.lstms = {
            "fwd": nn.LstmParams.init(config.window_width, in_dim, rng),
            "bwd": nn.LstmParams.init(config.window_width, in_dim, rng),
        }
        self.output = nn.DenseParams.zeros(len(RELATIONS), 4 * config.window_width)

    def _token_vector(self, sentence: ParsedSentence, index: int) -> np.ndarray:
        tok = sentence.token(index)
        return np.concatenate(
            [self.embeddings.vector(tok.form), encode_onehot(self.pos_vocab, tok.pos)]
        )

    def encode(self, sentence: ParsedSentence, pair: EventPair) -> WindowInputs:
        windows = extract_event_windows(sentence, pair, self.config.context_window)
        return tuple(
            [self._token_vector(sentence, i) for i in window] for window in windows
        )  # type: ignore[return-value]

    def forward(self, inputs: WindowInputs, training: bool = False, rng=None):
        width = self.config.window_width
        parts = []
        caches = []
        for xs, (which, reverse) in zip(inputs, self._ROLES):
            if not xs:
                # Boundary window: the zero initial state stands in.
                parts.append(np.zeros(width))
                caches.append((which, None))
                continue
            h, cache = nn.lstm_forward(
                self.lstms[which],
                xs,
                reverse=reverse,
                dropout=self.config.window_dropout if training else 0.0,
                training=training,
                rng=rng,
            )
            parts.append(h)
            caches.append((which, cache))
        stacked = np.concatenate(parts)
        probs = nn.dense_softmax(self.output, stacked)
        return probs, stacked, caches

    def predict_proba(self, inputs: WindowInputs) -> np.ndarray:
        probs, _, _ = self.forward(inputs, training=False)
        return probs

    def loss_and_grads(self, inputs: WindowInputs, target: int, training: bool = True, rng=None):
        probs, stacked, caches = self.forward(inputs, training=training, rng=rng)
        loss = nn.cross_entropy(probs, target)
        out_grads, dstacked = nn.dense_softmax_backward(self.output, stacked, probs, target)
        grads = {"output.W": out_grads["W"], "output.b": out_grads["b"]}
        for which in self.lstms:
            for tensor_name, arr in self.lstms[which].tensors().items():
                grads[f"{which}.{tensor_name}"] = np.zeros_like(arr)
        width = self.config.window_width
        for k, (which, cache) in enumerate(caches):
            if cache is None:
                continue
            dh = dstacked[k * width : (k + 1) * width]
            enc_grads, _ = nn.lstm_backward(self.lstms[which], cache, dh)
            for tensor_name, g in enc_grads.items():
                grads[f"{which}.{tensor_name}"] += g
        return loss, grads

    def tensors(self) -> dict[str, np.ndarray]:
        out = {}
        for which, params in self.lstms.items():
            for tensor_name, arr in params.tensors().items():
                out[f"{which}.{tensor_name}"] = arr
        out["output.W"] = self.output.W
        out["output.b"] = self.output.b
        return out

    def parameter_count(self) -> int:
        return sum(arr.size for arr in self.tensors().values())
