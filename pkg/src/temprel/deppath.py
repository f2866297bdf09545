"""Context-sequence extraction along the dependency path between two events.

The core context is the tree path between the two event mentions. Two
enrichment rules widen it: whitelisted modifier children of path words are
pulled in, and commas immediately adjacent to an event or to one of its
included modifiers are pulled in. The result is emitted as three parallel
sequences in surface order: word forms, POS tags, and (for path words
only) dependency labels.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import EventPair, ParsedSentence
from .errors import DanglingReferenceError

# Dependency labels whose child tokens are considered temporal-context
# modifiers. "nmod:tmod" must match exactly (plain "nmod" does not count);
# the rest match on the label up to its first ":", so "aux:pass" and
# "conj:and" qualify.
_WHITELIST_EXACT = frozenset({"nmod:tmod"})
_WHITELIST_BASE = frozenset(
    {"mark", "case", "aux", "conj", "expl", "cc", "cop", "amod", "advmod", "punct", "ref"}
)


def _is_modifier_label(deprel: str) -> bool:
    if deprel in _WHITELIST_EXACT:
        return True
    return deprel.split(":", 1)[0] in _WHITELIST_BASE


@dataclass(frozen=True)
class ContextSequences:
    """Extracted sequences for one event pair.

    words and pos run over all selected tokens (path plus enrichment) in
    ascending token order; deps covers the core path tokens only, giving
    each one its incoming dependency label ("root" for the sentence root).
    """

    words: tuple[str, ...]
    pos: tuple[str, ...]
    deps: tuple[str, ...]
    path_indices: tuple[int, ...]
    enriched_indices: tuple[int, ...]

    def __post_init__(self):
        assert len(self.words) == len(self.pos)
        assert len(self.deps) == len(self.path_indices)


def dependency_path(sentence: ParsedSentence, a: int, b: int) -> list[int]:
    """Token indices on the unique tree path from a to b, in surface order.

    The path runs from a up to the lowest common ancestor and down to b,
    and includes both endpoints and the ancestor itself.
    """
    if a == b:
        raise DanglingReferenceError("path endpoints must be distinct tokens")
    for idx in (a, b):
        sentence.token(idx)  # raises on invalid index

    ancestors_a = [a]
    cur = a
    while sentence.token(cur).head != 0:
        cur = sentence.token(cur).head
        ancestors_a.append(cur)
    on_a_chain = set(ancestors_a)

    chain_b = []
    cur = b
    while cur not in on_a_chain:
        chain_b.append(cur)
        cur = sentence.token(cur).head
    lca = cur

    path = ancestors_a[: ancestors_a.index(lca) + 1] + chain_b
    return sorted(path)


def include_modifier_children(sentence: ParsedSentence, path: list[int]) -> set[int]:
    """Enrich a path with children attached by whitelisted modifier labels.

    Children of any path word (the events included) whose dependency label
    passes the whitelist are added; everything else stays out.
    """
    selected = set(path)
    for idx in path:
        for child in sentence.children(idx):
            if _is_modifier_label(sentence.token(child).deprel):
                selected.add(child)
    return selected


def include_adjacent_commas(
    sentence: ParsedSentence, selected: set[int], e1: int, e2: int
) -> set[int]:
    """Add commas immediately next to an event or one of its selected modifiers.

    Anchor tokens are the two events plus every already-selected dependency
    child of either event; commas themselves never anchor further commas,
    which keeps the rule idempotent.
    """
    anchors = {e1, e2}
    for idx in selected:
        tok = sentence.token(idx)
        if tok.head in (e1, e2) and tok.form != ",":
            anchors.add(idx)
    out = set(selected)
    for anchor in anchors:
        for neighbor in (anchor - 1, anchor + 1):
            if 1 <= neighbor <= len(sentence) and sentence.token(neighbor).form == ",":
                out.add(neighbor)
    return out


def build_sequences(
    sentence: ParsedSentence, pair: EventPair, use_rules: bool = True
) -> ContextSequences:
    """Extract the word/POS/dependency sequences for an event pair.

    With use_rules off only the bare dependency path is used (the
    direct-path variant). The dependency-label sequence always covers the
    path tokens only, so it is identical under both settings.
    """
    path = dependency_path(sentence, pair.e1_index, pair.e2_index)
    if use_rules:
        selected = include_modifier_children(sentence, path)
        selected = include_adjacent_commas(sentence, selected, pair.e1_index, pair.e2_index)
    else:
        selected = set(path)

    covered = sorted(selected)
    words = tuple(sentence.token(i).form for i in covered)
    pos = tuple(sentence.token(i).pos for i in covered)
    deps = tuple(
        "root" if sentence.token(i).head == 0 else sentence.token(i).deprel for i in path
    )
    return ContextSequences(
        words=words,
        pos=pos,
        deps=deps,
        path_indices=tuple(path),
        enriched_indices=tuple(sorted(selected - set(path))),
    )


def extract_surface_path(sentence: ParsedSentence, pair: EventPair) -> ContextSequences:
    """Sequences over the contiguous token span from e1 to e2 inclusive.

    This is the surface-order alternative to the dependency path; it
    carries no dependency-label sequence.
    """
    span = range(pair.e1_index, pair.e2_index + 1)
    words = tuple(sentence.token(i).form for i in span)
    pos = tuple(sentence.token(i).pos for i in span)
    return ContextSequences(
        words=words,
        pos=pos,
        deps=(),
        path_indices=(),
        enriched_indices=tuple(span),
    )
