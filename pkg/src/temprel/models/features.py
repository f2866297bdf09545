"""Discrete lexico-syntactic features and the feature-vector baseline.

The featurizer concatenates one-hot and binary blocks describing the two
event mentions: their POS tags, dependency labels, tokens and lemmas,
bags of child dependency labels, verb-pair lexicon hits, structural flags,
the direct dependency label between the events when one heads the other,
associated prepositions, signal-word indicators for the span between the
events, and the scaled token distance. The resulting vector feeds a
14-way softmax layer directly.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .. import nn
from ..corpus import Corpus, EventPair, ParsedSentence
from ..encoding import Vocabulary
from ..errors import ConfigError, SchemaError
from ..relations import RELATIONS
from .config import ModelConfig

VERB_RELATIONS = ("happens-before", "similar")

# Token distance is divided by this so it stays commensurate with the
# binary blocks.
DISTANCE_SCALE = 10.0

_PREPOSITION_POS = ("IN", "TO")


@dataclass(frozen=True)
class Lexicons:
    """Optional signal-word and verb-pair resources; empty lexicons zero
    the corresponding feature blocks."""

    signal_words: tuple[str, ...] = ()
    verb_relations: frozenset[tuple[str, str, str]] = frozenset()

    @classmethod
    def load(
        cls, signal_path: str | Path | None = None, verbocean_path: str | Path | None = None
    ) -> "Lexicons":
        signals: tuple[str, ...] = ()
        if signal_path is not None:
            lines = Path(signal_path).read_text(encoding="utf-8").splitlines()
            seen = []
            for line in lines:
                word = line.strip().lower()
                if word and word not in seen:
                    seen.append(word)
            signals = tuple(seen)
        triples = set()
        if verbocean_path is not None:
            for number, line in enumerate(
                Path(verbocean_path).read_text(encoding="utf-8").splitlines(), start=1
            ):
                if not line.strip():
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise SchemaError(
                        f"verb-relation lexicon line {number}: expected "
                        f"verb1<TAB>relation<TAB>verb2"
                    )
                v1, rel, v2 = (p.strip().lower() for p in parts)
                if rel not in VERB_RELATIONS:
                    raise SchemaError(
                        f"verb-relation lexicon line {number}: unknown relation {rel!r}"
                    )
                triples.add((v1, rel, v2))
        return cls(signal_words=signals, verb_relations=frozenset(triples))

    def happens_before(self, v1: str, v2: str) -> bool:
        return (v1, "happens-before", v2) in self.verb_relations

    def similar(self, v1: str, v2: str) -> bool:
        return (v1, "similar", v2) in self.verb_relations or (
            v2,
            "similar",
            v1,
        ) in self.verb_relations


def _prepositions_of(sentence: ParsedSentence, index: int) -> list[str]:
    """Prepositions attached below the token (case/mark children) or
    governing it (a prepositional head)."""
    preps = []
    for child in sentence.children(index):
        tok = sentence.token(child)
        if tok.deprel.split(":", 1)[0] in ("case", "mark") and tok.pos in _PREPOSITION_POS:
            preps.append(tok.form.lower())
    head = sentence.token(index).head
    if head != 0 and sentence.token(head).pos in _PREPOSITION_POS:
        preps.append(sentence.token(head).form.lower())
    return preps


class Baseline1Featurizer:
    """Feature extractor whose vocabularies are frozen on the training split.

    Token and lemma one-hot blocks use a frequency-capped vocabulary
    (minimum count 2, everything rarer maps to UNK).
    """

    def __init__(
        self,
        corpus: Corpus,
        pairs: Sequence[EventPair],
        lexicons: Lexicons | None = None,
        min_token_count: int = 2,
    ):
        self.lexicons = lexicons or Lexicons()

        pos_labels: list[str] = []
        dep_labels: list[str] = []
        token_counts: Counter[str] = Counter()
        lemma_counts: Counter[str] = Counter()
        prep_labels: list[str] = []
        seen_sentences = set()
        for pair in pairs:
            sentence = corpus.sentence_for(pair)
            if sentence.sentence_id not in seen_sentences:
                seen_sentences.add(sentence.sentence_id)
                for tok in sentence.tokens:
                    pos_labels.append(tok.pos)
                    dep_labels.append(tok.deprel)
            for idx in (pair.e1_index, pair.e2_index):
                tok = sentence.token(idx)
                token_counts[tok.form.lower()] += 1
                lemma_counts[tok.lemma.lower()] += 1
                prep_labels.extend(_prepositions_of(sentence, idx))

        self.pos_vocab = Vocabulary(pos_labels)
        self.dep_vocab = Vocabulary(dep_labels)
        self.token_vocab = Vocabulary(
            w for w, c in token_counts.items() if c >= min_token_count
        )
        self.lemma_vocab = Vocabulary(
            w for w, c in lemma_counts.items() if c >= min_token_count
        )
        self.prep_vocab = Vocabulary(prep_labels)

        self.blocks: dict[str, slice] = {}
        offset = 0
        for name, width in self._block_widths():
            self.blocks[name] = slice(offset, offset + width)
            offset += width
        self.width = offset

    def _block_widths(self) -> list[tuple[str, int]]:
        return [
            ("pos_e1", self.pos_vocab.size),
            ("pos_e2", self.pos_vocab.size),
            ("dep_e1", self.dep_vocab.size),
            ("dep_e2", self.dep_vocab.size),
            ("token_e1", self.token_vocab.size),
            ("token_e2", self.token_vocab.size),
            ("lemma_e1", self.lemma_vocab.size),
            ("lemma_e2", self.lemma_vocab.size),
            ("child_deps_e1", self.dep_vocab.size),
            ("child_deps_e2", self.dep_vocab.size),
            ("verb_relations", 2),
            ("flags", 5),
            ("direct_dep", self.dep_vocab.size),
            ("preps_e1", self.prep_vocab.size),
            ("preps_e2", self.prep_vocab.size),
            ("signals", len(self.lexicons.signal_words)),
            ("distance", 1),
        ]

    def featurize(self, sentence: ParsedSentence, pair: EventPair) -> np.ndarray:
        vec = np.zeros(self.width)
        e1 = sentence.token(pair.e1_index)
        e2 = sentence.token(pair.e2_index)

        def put(block: str, index: int):
            vec[self.blocks[block].start + index] = 1.0

        put("pos_e1", self.pos_vocab.id(e1.pos))
        put("pos_e2", self.pos_vocab.id(e2.pos))
        put("dep_e1", self.dep_vocab.id(e1.deprel))
        put("dep_e2", self.dep_vocab.id(e2.deprel))
        put("token_e1", self.token_vocab.id(e1.form.lower()))
        put("token_e2", self.token_vocab.id(e2.form.lower()))
        put("lemma_e1", self.lemma_vocab.id(e1.lemma.lower()))
        put("lemma_e2", self.lemma_vocab.id(e2.lemma.lower()))
        for block, event in (("child_deps_e1", e1), ("child_deps_e2", e2)):
            for child in sentence.children(event.index):
                put(block, self.dep_vocab.id(sentence.token(child).deprel))

        lex = self.lexicons
        if lex.happens_before(e1.lemma.lower(), e2.lemma.lower()):
            put("verb_relations", 0)
        if lex.similar(e1.lemma.lower(), e2.lemma.lower()):
            put("verb_relations", 1)

        flags = self.blocks["flags"].start
        vec[flags + 0] = 1.0 if e1.pos == e2.pos else 0.0
        vec[flags + 1] = 1.0 if e1.head == 0 else 0.0
        vec[flags + 2] = 1.0 if e2.head == 0 else 0.0
        vec[flags + 3] = 1.0 if e2.head == e1.index else 0.0
        vec[flags + 4] = 1.0 if e1.head == e2.index else 0.0

        if e2.head == e1.index:
            put("direct_dep", self.dep_vocab.id(e2.deprel))
        elif e1.head == e2.index:
            put("direct_dep", self.dep_vocab.id(e1.deprel))

        for block, idx in (("preps_e1", pair.e1_index), ("preps_e2", pair.e2_index)):
            for prep in _prepositions_of(sentence, idx):
                put(block, self.prep_vocab.id(prep))

        between = {
            sentence.token(i).form.lower()
            for i in range(pair.e1_index + 1, pair.e2_index)
        }
        for k, signal in enumerate(self.lexicons.signal_words):
            if signal in between:
                put("signals", k)

        vec[self.blocks["distance"].start] = (pair.e2_index - pair.e1_index) / DISTANCE_SCALE
        return vec

    def block(self, vec: np.ndarray, name: str) -> np.ndarray:
        return vec[self.blocks[name]]


class DiscreteFeatureModel:
    """Feature vector straight into the softmax output layer."""

    def __init__(self, config: ModelConfig, featurizer: Baseline1Featurizer):
        config.validate()
        if config.architecture != "baseline1":
            raise ConfigError(f"not the feature baseline: {config.architecture!r}")
        self.config = config
        self.featurizer = featurizer
        self.output = nn.DenseParams.zeros(len(RELATIONS), featurizer.width)

    def predict_proba(self, features: np.ndarray) -> np.ndarray:
        return nn.dense_softmax(self.output, features)

    def loss_and_grads(self, features, target: int, training: bool = True, rng=None):
        probs = nn.dense_softmax(self.output, features)
        loss = nn.cross_entropy(probs, target)
        grads, _ = nn.dense_softmax_backward(self.output, features, probs, target)
        return loss, {"output.W": grads["W"], "output.b": grads["b"]}

    def tensors(self) -> dict[str, np.ndarray]:
        return {"output.W": self.output.W, "output.b": self.output.b}

    def parameter_count(self) -> int:
        return self.output.size()
