"""Exception types shared across the package.

Errors that stem from user-supplied input (corpus files, configs,
lexicons) derive from InputError; the CLI maps those to exit code 2.
Checkpoint/model incompatibilities map to exit code 3.
"""


class TemprelError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TemprelError):
    """Invalid user-supplied input: files, configuration, corpus contents."""


class ConlluParseError(InputError):
    """Malformed CoNLL-U content."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class TreeStructureError(InputError):
    """A sentence whose head links do not form a single rooted tree."""

    def __init__(self, sentence_id: str, message: str):
        super().__init__(f"sentence {sentence_id!r}: {message}")
        self.sentence_id = sentence_id


class SchemaError(InputError):
    """Data that does not match a documented file schema or label set."""


class DanglingReferenceError(InputError):
    """An event pair referencing a sentence or token that does not exist."""


class InvalidPairError(InputError):
    """An event pair that violates the pair invariants (e.g. e1 == e2)."""


class EmbeddingFormatError(InputError):
    """Malformed pretrained-embedding text file."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigError(InputError):
    """Invalid run or model configuration."""


class ShapeError(TemprelError):
    """Tensor dimensions that do not match the receiving operation."""


class CheckpointError(TemprelError):
    """Unreadable or incompatible model checkpoint."""
