"""Corpus data model: dependency-parsed sentences and labeled event pairs.

Sentences arrive as CoNLL-U; event pairs arrive as a JSON file
({"pairs": [{"sentence": ..., "e1": ..., "e2": ..., "relation": ...}]}).
Pairs are normalized so the first mention precedes the second in the
sentence, inverting the relation label when the annotation was in the
opposite order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ConlluParseError,
    ConfigError,
    DanglingReferenceError,
    InvalidPairError,
    SchemaError,
    TreeStructureError,
)
from .relations import RELATIONS, invert_relation, normalize_relation


@dataclass(frozen=True)
class Token:
    """One token of a dependency parse. Indices are 1-based; head 0 is the root."""

    index: int
    form: str
    lemma: str
    pos: str
    head: int
    deprel: str

    def __post_init__(self):
        if self.index < 1:
            raise TreeStructureError("?", f"token index {self.index} < 1")
        if self.head < 0:
            raise TreeStructureError("?", f"token {self.index} has negative head")
        if self.head == self.index:
            raise TreeStructureError("?", f"token {self.index} is its own head")
        if not self.deprel:
            raise TreeStructureError("?", f"token {self.index} has empty deprel")


class ParsedSentence:
    """A dependency-parsed sentence whose head links form a single rooted tree."""

    def __init__(self, sentence_id: str, tokens: list[Token] | tuple[Token, ...]):
        self.sentence_id = sentence_id
        self.tokens: tuple[Token, ...] = tuple(tokens)
        self._children: dict[int, tuple[int, ...]] = {}
        self._validate()

    def _validate(self):
        n = len(self.tokens)
        if n == 0:
            raise TreeStructureError(self.sentence_id, "sentence has no tokens")
        for pos, tok in enumerate(self.tokens, start=1):
            if tok.index != pos:
                raise TreeStructureError(
                    self.sentence_id, f"token indices not contiguous at position {pos}"
                )
            if tok.head > n:
                raise TreeStructureError(
                    self.sentence_id, f"token {tok.index} head {tok.head} out of range"
                )
        roots = [tok.index for tok in self.tokens if tok.head == 0]
        if len(roots) != 1:
            raise TreeStructureError(
                self.sentence_id, f"expected exactly one root, found {len(roots)}"
            )
        self._root = roots[0]

        children: dict[int, list[int]] = {i: [] for i in range(0, n + 1)}
        for tok in self.tokens:
            children[tok.head].append(tok.index)
        self._children = {i: tuple(c) for i, c in children.items()}

        # Reachability from the root proves there is no cycle.
        seen = set()
        stack = [self._root]
        while stack:
            node = stack.pop()
            seen.add(node)
            stack.extend(self._children[node])
        if len(seen) != n:
            raise TreeStructureError(
                self.sentence_id, "head links contain a cycle or disconnected tokens"
            )

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def root(self) -> int:
        return self._root

    def token(self, index: int) -> Token:
        if not 1 <= index <= len(self.tokens):
            raise DanglingReferenceError(
                f"sentence {self.sentence_id!r} has no token {index}"
            )
        return self.tokens[index - 1]

    def children(self, index: int) -> tuple[int, ...]:
        return self._children.get(index, ())


@dataclass(frozen=True)
class EventPair:
    """Two in-sentence event mentions plus the gold relation, in surface order."""

    sentence_ref: str
    e1_index: int
    e2_index: int
    relation: str

    def __post_init__(self):
        if self.e1_index == self.e2_index:
            raise InvalidPairError(
                f"pair in {self.sentence_ref!r} uses token {self.e1_index} twice"
            )
        if self.e1_index > self.e2_index:
            raise InvalidPairError(
                f"pair in {self.sentence_ref!r} is not in surface order; "
                "construct through normalize_pair"
            )
        if self.e1_index < 1:
            raise InvalidPairError(f"pair in {self.sentence_ref!r} has index < 1")


@dataclass(frozen=True)
class Corpus:
    sentences: dict[str, ParsedSentence]
    pairs: tuple[EventPair, ...] = field(default_factory=tuple)

    def sentence_for(self, pair: EventPair) -> ParsedSentence:
        if pair.sentence_ref not in self.sentences:
            raise DanglingReferenceError(
                f"pair references unknown sentence {pair.sentence_ref!r}"
            )
        return self.sentences[pair.sentence_ref]


def normalize_pair(e1: int, e2: int, relation: str, sentence_ref: str = "") -> EventPair:
    """Order a pair by surface position, inverting the relation on a swap."""
    label = normalize_relation(relation)
    if e1 == e2:
        raise InvalidPairError(
            f"pair in {sentence_ref!r} uses token {e1} for both mentions"
        )
    if e1 < e2:
        return EventPair(sentence_ref, e1, e2, label)
    return EventPair(sentence_ref, e2, e1, invert_relation(label))


_SKIP_ID_CHARS = ("-", ".")  # multi-word token ranges and empty nodes


def parse_conllu(text: str) -> list[ParsedSentence]:
    """Parse CoNLL-U text into validated sentences.

    Uses the ID, FORM, LEMMA, XPOS, HEAD and DEPREL columns; XPOS falls
    back to UPOS when it is "_", and LEMMA falls back to the lowercased
    form. The sentence id comes from a "# sent_id = ..." comment when
    present, otherwise ids s1, s2, ... are assigned in file order.
    """
    sentences: list[ParsedSentence] = []
    rows: list[Token] = []
    sent_id: str | None = None
    ordinal = 0

    def flush(line_number: int):
        nonlocal rows, sent_id, ordinal
        if not rows:
            sent_id = None
            return
        ordinal += 1
        name = sent_id if sent_id is not None else f"s{ordinal}"
        try:
            sentences.append(ParsedSentence(name, rows))
        except TreeStructureError as err:
            if err.sentence_id == "?":
                raise TreeStructureError(name, str(err).split(": ", 1)[1]) from None
            raise
        rows = []
        sent_id = None

    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped:
            flush(line_number)
            continue
        if stripped.startswith("#"):
            comment = stripped[1:].strip()
            if comment.startswith("sent_id"):
                _, _, value = comment.partition("=")
                sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != 10:
            raise ConlluParseError(
                f"expected 10 tab-separated columns, found {len(cols)}", line_number
            )
        tok_id, form, lemma, upos, xpos, _feats, head, deprel = cols[:8]
        if any(ch in tok_id for ch in _SKIP_ID_CHARS):
            continue
        try:
            index = int(tok_id)
            head_index = int(head)
        except ValueError:
            raise ConlluParseError(
                f"non-integer ID or HEAD field ({tok_id!r}, {head!r})", line_number
            ) from None
        pos = xpos if xpos != "_" else upos
        if lemma == "_":
            lemma = form.lower()
        try:
            rows.append(Token(index, form, lemma, pos, head_index, deprel))
        except TreeStructureError as err:
            name = sent_id if sent_id is not None else f"s{ordinal + 1}"
            raise TreeStructureError(name, str(err).split(": ", 1)[1]) from None
    flush(len(text.splitlines()) + 1)
    return sentences


def load_corpus(pairs_path: str | Path, conllu_path: str | Path) -> Corpus:
    """Load and cross-validate the pairs file against the CoNLL-U file."""
    conllu_text = Path(conllu_path).read_text(encoding="utf-8")
    sentences = {s.sentence_id: s for s in parse_conllu(conllu_text)}

    try:
        payload = json.loads(Path(pairs_path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SchemaError(f"pairs file is not valid JSON: {err}") from None
    if not isinstance(payload, dict) or "pairs" not in payload:
        raise SchemaError('pairs file must be an object with a "pairs" list')

    pairs = []
    for record in payload["pairs"]:
        try:
            ref = record["sentence"]
            e1 = record["e1"]
            e2 = record["e2"]
            relation = record["relation"]
        except (TypeError, KeyError) as err:
            raise SchemaError(f"pair record missing field: {err}") from None
        if not isinstance(e1, int) or not isinstance(e2, int):
            raise SchemaError(f"pair in {ref!r} has non-integer token indices")
        pair = normalize_pair(e1, e2, relation, sentence_ref=ref)
        if ref not in sentences:
            raise DanglingReferenceError(
                f"pair references unknown sentence {ref!r}"
            )
        sentence = sentences[ref]
        for idx in (pair.e1_index, pair.e2_index):
            if not 1 <= idx <= len(sentence):
                raise InvalidPairError(
                    f"pair in {ref!r} references token {idx}, "
                    f"but the sentence has {len(sentence)} tokens"
                )
        pairs.append(pair)
    return Corpus(sentences=sentences, pairs=tuple(pairs))


def _largest_remainder_counts(total: int, ratios: tuple[float, ...]) -> list[int]:
    exact = [total * r for r in ratios]
    base = [math.floor(x) for x in exact]
    leftover = total - sum(base)
    # Ties in the remainder go to the later split.
    order = sorted(range(len(ratios)), key=lambda i: (-(exact[i] - base[i]), -i))
    for i in order[:leftover]:
        base[i] += 1
    return base


def split_corpus(
    corpus: Corpus, ratios: tuple[float, float, float], seed: int
) -> tuple[Corpus, Corpus, Corpus]:
    """Stratified train/validate/test partition of the pairs.

    Each relation label's pairs are shuffled with the seeded generator and
    cut by the ratios using largest-remainder rounding, so per-label
    proportions track the ratios as closely as integer counts allow.
    """
    if len(ratios) != 3:
        raise ConfigError("split ratios must have exactly three components")
    if any(r < 0 for r in ratios):
        raise ConfigError("split ratios must be nonnegative")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"split ratios must sum to 1, got {sum(ratios)}")

    rng = np.random.default_rng(seed)
    buckets: tuple[list[EventPair], ...] = ([], [], [])
    for rel in RELATIONS:
        group = [p for p in corpus.pairs if p.relation == rel]
        if not group:
            continue
        perm = rng.permutation(len(group))
        shuffled = [group[i] for i in perm]
        counts = _largest_remainder_counts(len(group), tuple(ratios))
        start = 0
        for bucket, count in zip(buckets, counts):
            bucket.extend(shuffled[start : start + count])
            start += count
    return tuple(Corpus(corpus.sentences, tuple(b)) for b in buckets)  # type: ignore[return-value]
