"""Shared fixtures: hand-built parse trees and synthetic corpus generators."""

import json
from pathlib import Path

import numpy as np
import pytest

from temprel.corpus import ParsedSentence, Token, parse_conllu
from temprel.relations import RELATIONS

DATA_DIR = Path(__file__).parent / "data"

# 7-token reference sentence used across the suite: root "invaded" with an
# adverbial clause "before troops arrived".
REFERENCE_CONLLU = """\
# sent_id = ref
1\tKuwait\tkuwait\tPROPN\tNNP\t_\t3\tnsubj:pass\t_\t_
2\twas\tbe\tAUX\tVBD\t_\t3\taux:pass\t_\t_
3\tinvaded\tinvade\tVERB\tVBN\t_\t0\troot\t_\t_
4\tbefore\tbefore\tSCONJ\tIN\t_\t6\tmark\t_\t_
5\ttroops\ttroop\tNOUN\tNNS\t_\t6\tnsubj\t_\t_
6\tarrived\tarrive\tVERB\tVBD\t_\t3\tadvcl\t_\t_
7\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_
"""


@pytest.fixture
def reference_sentence() -> ParsedSentence:
    [sentence] = parse_conllu(REFERENCE_CONLLU)
    return sentence


def sentence_from_rows(sentence_id, rows) -> ParsedSentence:
    """Build a sentence from (form, pos, head, deprel) rows."""
    tokens = [
        Token(i, form, form.lower(), pos, head, deprel)
        for i, (form, pos, head, deprel) in enumerate(rows, start=1)
    ]
    return ParsedSentence(sentence_id, tokens)


def random_tree_heads(n: int, rng: np.random.Generator) -> list[int]:
    """Heads of a uniformly-shaped random tree over tokens 1..n.

    Nodes are attached in a random order, each to a random already-attached
    node, so the root lands at an arbitrary surface position.
    """
    order = list(rng.permutation(n) + 1)
    heads = [0] * (n + 1)
    for pos, node in enumerate(order):
        if pos == 0:
            heads[node] = 0
        else:
            heads[node] = int(order[int(rng.integers(pos))])
    return heads[1:]


def bfs_tree_path(heads: list[int], a: int, b: int) -> list[int]:
    """Independent path oracle: BFS over the undirected head graph."""
    n = len(heads)
    adjacency = {i: set() for i in range(1, n + 1)}
    for child, head in enumerate(heads, start=1):
        if head != 0:
            adjacency[child].add(head)
            adjacency[head].add(child)
    parent = {a: None}
    queue = [a]
    while queue:
        node = queue.pop(0)
        if node == b:
            break
        for nxt in adjacency[node]:
            if nxt not in parent:
                parent[nxt] = node
                queue.append(nxt)
    path = [b]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return sorted(path)


# --- synthetic training corpora -------------------------------------------

def marker_corpus_text(per_relation: int = 4):
    """A tiny corpus where each relation has its own marker word, POS tag,
    and dependency label on the path; trivially separable by construction."""
    blocks, pairs = [], []
    for rel in RELATIONS:
        for k in range(per_relation):
            sid = f"{rel}-{k}"
            blocks.append(
                "\n".join(
                    [
                        f"# sent_id = {sid}",
                        "1\teva\teva\tVERB\tVB_A\t_\t0\troot\t_\t_",
                        f"2\tmk_{rel}\tmk_{rel}\tADV\tPT_{rel}\t_\t1\trel_{rel}\t_\t_",
                        "3\tevb\tevb\tVERB\tVB_B\t_\t2\tdep_end\t_\t_",
                    ]
                )
                + "\n"
            )
            pairs.append({"sentence": sid, "e1": 1, "e2": 3, "relation": rel})
    return "\n".join(blocks), {"pairs": pairs}


def marker_embeddings_text(dim: int = 12, seed: int = 3) -> str:
    rng = np.random.default_rng(seed)
    words = ["eva", "evb"] + [f"mk_{rel}" for rel in RELATIONS]
    lines = [
        w + " " + " ".join(f"{x:.6f}" for x in rng.uniform(-1.0, 1.0, dim)) for w in words
    ]
    return "\n".join(lines) + "\n"


def write_marker_corpus(tmp_path: Path, per_relation: int = 4, dim: int = 12) -> dict:
    conllu, pairs = marker_corpus_text(per_relation)
    paths = {
        "conllu": tmp_path / "sents.conllu",
        "pairs": tmp_path / "pairs.json",
        "embeddings": tmp_path / "vectors.txt",
        "dim": dim,
    }
    paths["conllu"].write_text(conllu)
    paths["pairs"].write_text(json.dumps(pairs))
    paths["embeddings"].write_text(marker_embeddings_text(dim))
    return paths


# Test-split distribution of the reference corpus: heavily skewed, with
# "after" the majority class (120 of 467 pairs).
SKEWED_TEST_COUNTS = {
    "after": 120,
    "before": 97,
    "simultaneous": 83,
    "identity": 43,
    "includes": 41,
    "is_included": 27,
    "ended_by": 19,
    "during_inv": 8,
    "begun_by": 7,
    "begins": 7,
    "ibefore": 5,
    "iafter": 4,
    "during": 3,
    "ends": 3,
}

# Whole-corpus per-relation totals (2308 pairs).
FULL_CORPUS_COUNTS = {
    "after": 599,
    "before": 482,
    "simultaneous": 412,
    "identity": 211,
    "includes": 202,
    "is_included": 133,
    "ended_by": 94,
    "during_inv": 38,
    "begun_by": 35,
    "begins": 32,
    "ibefore": 23,
    "iafter": 18,
    "during": 15,
    "ends": 14,
}


def write_skewed_corpus(tmp_path: Path) -> dict:
    """467 pairs over one shared sentence, following SKEWED_TEST_COUNTS."""
    conllu = (
        "# sent_id = shared\n"
        "1\teva\teva\tVERB\tVB\t_\t0\troot\t_\t_\n"
        "2\tthen\tthen\tADV\tRB\t_\t1\tadvmod\t_\t_\n"
        "3\tevb\tevb\tVERB\tVB\t_\t1\tconj\t_\t_\n"
    )
    pairs = [
        {"sentence": "shared", "e1": 1, "e2": 3, "relation": rel}
        for rel, count in SKEWED_TEST_COUNTS.items()
        for _ in range(count)
    ]
    paths = {"conllu": tmp_path / "skew.conllu", "pairs": tmp_path / "skew_pairs.json"}
    paths["conllu"].write_text(conllu)
    paths["pairs"].write_text(json.dumps({"pairs": pairs}))
    return paths
