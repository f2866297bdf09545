"""Temporal relation classification for same-sentence event pairs.

The pipeline: load a dependency-parsed corpus (CoNLL-U plus a JSON pairs
file), extract word/POS/dependency sequences along the enriched
dependency path between the two event mentions, and classify the pair
into one of 14 temporal relations with a from-scratch bidirectional LSTM
model. Ablations, three reference baselines, and the evaluation suite are
included; the `temprel` CLI ties the stages together.
"""

from .corpus import (
    Corpus,
    EventPair,
    ParsedSentence,
    Token,
    load_corpus,
    normalize_pair,
    parse_conllu,
    split_corpus,
)
from .deppath import (
    ContextSequences,
    build_sequences,
    dependency_path,
    extract_surface_path,
    include_adjacent_commas,
    include_modifier_children,
)
from .encoding import EmbeddingTable, Vocabulary, build_vocab, embed_word, encode_onehot, load_embeddings
from .evaluation import EvalReport, compute_metrics, confusion_matrix, evaluate_predictions, render_report
from .relations import RELATIONS, invert_relation, normalize_relation, relation_id

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "ContextSequences",
    "EmbeddingTable",
    "EvalReport",
    "EventPair",
    "ParsedSentence",
    "RELATIONS",
    "Token",
    "Vocabulary",
    "build_sequences",
    "build_vocab",
    "compute_metrics",
    "confusion_matrix",
    "dependency_path",
    "embed_word",
    "encode_onehot",
    "evaluate_predictions",
    "extract_surface_path",
    "include_adjacent_commas",
    "include_modifier_children",
    "invert_relation",
    "load_corpus",
    "load_embeddings",
    "normalize_pair",
    "normalize_relation",
    "parse_conllu",
    "relation_id",
    "render_report",
    "split_corpus",
]
