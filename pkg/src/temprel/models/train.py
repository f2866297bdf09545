"""Training loop: seeded shuffling, per-batch gradient averaging, rmsprop.

A run is fully determined by (config, corpora): training examples are
put into a canonical order before the seed-driven shuffles, so the result
does not depend on the order pairs appear in the input files. The log
records an epoch-0 row for the untrained model, then one row per epoch
with the mean training loss and the validation accuracy.
"""

from __future__ import annotations

import copy
import io
from dataclasses import dataclass

import numpy as np

from ..corpus import Corpus, EventPair
from ..encoding import EmbeddingTable, Vocabulary, build_vocab
from ..errors import ConfigError, InputError
from ..relations import RELATION_IDS
from .config import ModelConfig
from .features import Baseline1Featurizer, DiscreteFeatureModel, Lexicons
from .majority import MajorityClassModel
from .sequence import SequenceModel, context_for_pair
from .windows import EventWindowModel


@dataclass
class TrainResult:
    final_model: object
    best_model: object
    log: list[tuple[int, float, float]]  # (epoch, train_loss, val_accuracy)

    @property
    def best_val_accuracy(self) -> float:
        return max((row[2] for row in self.log), default=0.0)


def training_log_csv(log: list[tuple[int, float, float]]) -> str:
    out = io.StringIO()
    out.write("epoch,train_loss,val_accuracy\n")
    for epoch, loss, acc in log:
        out.write(f"{epoch},{loss!r},{acc!r}\n")
    return out.getvalue()


def _sorted_pairs(corpus: Corpus) -> list[EventPair]:
    return sorted(
        corpus.pairs, key=lambda p: (p.sentence_ref, p.e1_index, p.e2_index, p.relation)
    )


def _targets(pairs: list[EventPair]) -> list[int]:
    return [RELATION_IDS[p.relation] for p in pairs]


def build_examples(
    config: ModelConfig,
    train_corpus: Corpus,
    other_corpus: Corpus,
    embeddings: EmbeddingTable | None,
    lexicons: Lexicons | None,
    rng_init: np.random.Generator,
):
    """Construct the model from the training split and encode both corpora.

    Vocabularies (and the embedding sub-table stored with the model) are
    frozen on the training split; the other corpus is encoded with them,
    falling back to UNK where needed.
    """
    train_pairs = _sorted_pairs(train_corpus)
    other_pairs = _sorted_pairs(other_corpus)

    if config.architecture in ("sequence_model", "baseline2"):
        train_cs = [
            context_for_pair(config, train_corpus.sentence_for(p), p) for p in train_pairs
        ]
        other_cs = [
            context_for_pair(config, other_corpus.sentence_for(p), p) for p in other_pairs
        ]
        used = config.sequences_used
        pos_vocab = build_vocab(cs.pos for cs in train_cs) if "pos" in used else Vocabulary()
        dep_vocab = build_vocab(cs.deps for cs in train_cs) if "dep" in used else Vocabulary()
        table = None
        if "word" in used:
            if embeddings is None:
                raise ConfigError("this architecture needs a pretrained embedding table")
            table = embeddings.subset(w for cs in train_cs for w in cs.words)
        model = SequenceModel(config, pos_vocab, dep_vocab, table, rng_init)
        train_inputs = [model.encode(cs) for cs in train_cs]
        other_inputs = [model.encode(cs) for cs in other_cs]
    elif config.architecture == "baseline1":
        featurizer = Baseline1Featurizer(train_corpus, train_pairs, lexicons)
        model = DiscreteFeatureModel(config, featurizer)
        train_inputs = [
            featurizer.featurize(train_corpus.sentence_for(p), p) for p in train_pairs
        ]
        other_inputs = [
            featurizer.featurize(other_corpus.sentence_for(p), p) for p in other_pairs
        ]
    elif config.architecture == "baseline3":
        if embeddings is None:
            raise ConfigError("this architecture needs a pretrained embedding table")
        pos_labels = []
        words = []
        seen = set()
        for pair in train_pairs:
            sentence = train_corpus.sentence_for(pair)
            if sentence.sentence_id in seen:
                continue
            seen.add(sentence.sentence_id)
            for tok in sentence.tokens:
                pos_labels.append(tok.pos)
                words.append(tok.form)
        pos_vocab = Vocabulary(pos_labels)
        table = embeddings.subset(words)
        model = EventWindowModel(config, pos_vocab, table, rng_init)
        train_inputs = [model.encode(train_corpus.sentence_for(p), p) for p in train_pairs]
        other_inputs = [model.encode(other_corpus.sentence_for(p), p) for p in other_pairs]
    elif config.architecture == "majority":
        model = MajorityClassModel()
        train_inputs = [None] * len(train_pairs)
        other_inputs = [None] * len(other_pairs)
    else:
        raise ConfigError(f"unknown architecture {config.architecture!r}")

    return model, train_inputs, _targets(train_pairs), other_inputs, _targets(other_pairs)


def _accuracy(model, inputs, targets) -> float:
    if not targets:
        return 0.0
    hits = sum(
        1 for x, t in zip(inputs, targets) if int(np.argmax(model.predict_proba(x))) == t
    )
    return hits / len(targets)


def _mean_loss(model, inputs, targets) -> float:
    from .. import nn

    losses = [nn.cross_entropy(model.predict_proba(x), t) for x, t in zip(inputs, targets)]
    return float(np.mean(losses))


def train_model(
    config: ModelConfig,
    train_corpus: Corpus,
    val_corpus: Corpus,
    embeddings: EmbeddingTable | None = None,
    lexicons: Lexicons | None = None,
    stop_val_accuracy: float | None = None,
) -> TrainResult:
    """Train a model and return both the final and the best-validation state."""
    from .. import nn

    config.validate()
    if not train_corpus.pairs:
        raise InputError("training corpus has no pairs")

    seed_seq = np.random.SeedSequence(config.seed)
    rng_init, rng_shuffle, rng_dropout = (
        np.random.default_rng(s) for s in seed_seq.spawn(3)
    )

    model, train_inputs, train_targets, val_inputs, val_targets = build_examples(
        config, train_corpus, val_corpus, embeddings, lexicons, rng_init
    )

    if config.architecture == "majority":
        return TrainResult(final_model=model, best_model=model, log=[])

    log: list[tuple[int, float, float]] = []
    log.append(
        (0, _mean_loss(model, train_inputs, train_targets), _accuracy(model, val_inputs, val_targets))
    )

    optimizer = nn.RmsProp()
    n = len(train_inputs)
    best_acc = -1.0
    best_state: dict[str, np.ndarray] = {}

    def snapshot():
        return {name: arr.copy() for name, arr in model.tensors().items()}

    best_state = snapshot()
    best_acc = log[0][2]

    for epoch in range(1, config.epochs + 1):
        perm = rng_shuffle.permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            batch = perm[start : start + config.batch_size]
            summed: dict[str, np.ndarray] | None = None
            for k in batch:
                loss, grads = model.loss_and_grads(
                    train_inputs[k], train_targets[k], training=True, rng=rng_dropout
                )
                losses.append(loss)
                if summed is None:
                    summed = grads
                else:
                    for name, g in grads.items():
                        summed[name] += g
            mean_grads = {name: g / len(batch) for name, g in summed.items()}
            optimizer.step(model.tensors(), mean_grads)
        val_acc = _accuracy(model, val_inputs, val_targets)
        log.append((epoch, float(np.mean(losses)), val_acc))
        if val_acc > best_acc:
            best_acc = val_acc
            best_state = snapshot()
        if stop_val_accuracy is not None and val_acc >= stop_val_accuracy:
            break

    best_model = copy.deepcopy(model)
    for name, arr in best_model.tensors().items():
        arr[:] = best_state[name]
    return TrainResult(final_model=model, best_model=best_model, log=log)
