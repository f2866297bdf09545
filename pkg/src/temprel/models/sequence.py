"""Bidirectional LSTM classifier over extracted context sequences.

One forward (and, when bidirectional, one backward) LSTM encodes each
selected sequence; the final hidden states are concatenated and fed to a
14-way softmax layer. The same machinery serves the full model, its
uni/bi-directional and 1/2-sequence ablations, and the surface-path
baseline, which differs only in how its sequences are extracted.
"""

from __future__ import annotations

import numpy as np

from .. import nn
from ..corpus import EventPair, ParsedSentence
from ..deppath import ContextSequences, build_sequences, extract_surface_path
from ..encoding import EmbeddingTable, Vocabulary, encode_onehot
from ..errors import ConfigError
from ..relations import RELATIONS
from .config import ModelConfig


def context_for_pair(
    config: ModelConfig, sentence: ParsedSentence, pair: EventPair
) -> ContextSequences:
    """Extract the sequences the configured architecture consumes."""
    if config.architecture == "baseline2":
        return extract_surface_path(sentence, pair)
    return build_sequences(sentence, pair, use_rules=config.use_rules)


class SequenceModel:
    def __init__(
        self,
        config: ModelConfig,
        pos_vocab: Vocabulary,
        dep_vocab: Vocabulary,
        embeddings: EmbeddingTable | None,
        rng: np.random.Generator,
    ):
        config.validate()
        if config.architecture not in ("sequence_model", "baseline2"):
            raise ConfigError(f"not a sequence architecture: {config.architecture!r}")
        if "word" in config.sequences_used and embeddings is None:
            raise ConfigError("word sequences require an embedding table")
        self.config = config
        self.pos_vocab = pos_vocab
        self.dep_vocab = dep_vocab
        self.embeddings = embeddings

        in_dims = {
            "pos": pos_vocab.size,
            "dep": dep_vocab.size,
            "word": embeddings.dim if embeddings is not None else 0,
        }
        directions = ("fwd", "bwd") if config.bidirectional else ("fwd",)
        self.encoders: dict[str, nn.LstmParams] = {}
        for seq in config.ordered_sequences():
            for direction in directions:
                self.encoders[f"{seq}_{direction}"] = nn.LstmParams.init(
                    config.width(seq), in_dims[seq], rng
                )
        self.output = nn.DenseParams.zeros(len(RELATIONS), self.concat_width)

    @property
    def concat_width(self) -> int:
        directions = 2 if self.config.bidirectional else 1
        return directions * sum(self.config.width(s) for s in self.config.ordered_sequences())

    def encode(self, cs: ContextSequences) -> dict[str, list[np.ndarray]]:
        """Turn extracted sequences into the per-encoder input vectors."""
        inputs: dict[str, list[np.ndarray]] = {}
        used = self.config.sequences_used
        if "pos" in used:
            inputs["pos"] = [encode_onehot(self.pos_vocab, p) for p in cs.pos]
        if "dep" in used:
            inputs["dep"] = [encode_onehot(self.dep_vocab, d) for d in cs.deps]
        if "word" in used:
            inputs["word"] = [self.embeddings.vector(w) for w in cs.words]
        return inputs

    def forward(
        self,
        inputs: dict[str, list[np.ndarray]],
        training: bool = False,
        rng: np.random.Generator | None = None,
    ):
        parts = []
        caches = []
        for name, params in self.encoders.items():
            seq, _, direction = name.rpartition("_")
            h, cache = nn.lstm_forward(
                params,
                inputs[seq],
                reverse=(direction == "bwd"),
                dropout=self.config.dropout(seq) if training else 0.0,
                training=training,
                rng=rng,
            )
            parts.append(h)
            caches.append((name, params, cache))
        stacked = np.concatenate(parts)
        probs = nn.dense_softmax(self.output, stacked)
        return probs, stacked, caches

    def predict_proba(self, inputs) -> np.ndarray:
        probs, _, _ = self.forward(inputs, training=False)
        return probs

    def loss_and_grads(
        self,
        inputs,
        target: int,
        training: bool = True,
        rng: np.random.Generator | None = None,
    ) -> tuple[float, dict[str, np.ndarray]]:
        probs, stacked, caches = self.forward(inputs, training=training, rng=rng)
        loss = nn.cross_entropy(probs, target)
        out_grads, dstacked = nn.dense_softmax_backward(self.output, stacked, probs, target)
        grads = {"output.W": out_grads["W"], "output.b": out_grads["b"]}
        offset = 0
        for name, params, cache in caches:
            dh = dstacked[offset : offset + params.hidden]
            offset += params.hidden
            enc_grads, _ = nn.lstm_backward(params, cache, dh)
            for tensor_name, g in enc_grads.items():
                grads[f"{name}.{tensor_name}"] = g
        return loss, grads

    def tensors(self) -> dict[str, np.ndarray]:
        out = {}
        for name, params in self.encoders.items():
            for tensor_name, arr in params.tensors().items():
                out[f"{name}.{tensor_name}"] = arr
        out["output.W"] = self.output.W
        out["output.b"] = self.output.b
        return out

    def parameter_count(self) -> int:
        return sum(arr.size for arr in self.tensors().values())
