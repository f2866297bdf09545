"""The closed set of 14 temporal relation labels and their inverses.

The label ordering below is the canonical class ordering used everywhere:
one-hot targets, confusion-matrix axes, argmax tie-breaking, and report
rows all follow it.
"""

from .errors import SchemaError

RELATIONS: tuple[str, ...] = (
    "simultaneous",
    "before",
    "after",
    "ibefore",
    "iafter",
    "begins",
    "begun_by",
    "ends",
    "ended_by",
    "includes",
    "is_included",
    "during",
    "during_inv",
    "identity",
)

RELATION_IDS: dict[str, int] = {rel: i for i, rel in enumerate(RELATIONS)}

# Six inverse pairs plus the two commutative relations.
_INVERSE_PAIRS = (
    ("before", "after"),
    ("ibefore", "iafter"),
    ("begins", "begun_by"),
    ("ends", "ended_by"),
    ("includes", "is_included"),
    ("during", "during_inv"),
)

_INVERSE: dict[str, str] = {"simultaneous": "simultaneous", "identity": "identity"}
for _a, _b in _INVERSE_PAIRS:
    _INVERSE[_a] = _b
    _INVERSE[_b] = _a


def normalize_relation(raw: str) -> str:
    """Lowercase a relation label and check it against the closed set."""
    label = raw.lower()
    if label not in RELATION_IDS:
        raise SchemaError(f"unknown temporal relation {raw!r}")
    return label


def relation_id(label: str) -> int:
    if label not in RELATION_IDS:
        raise SchemaError(f"unknown temporal relation {label!r}")
    return RELATION_IDS[label]


def invert_relation(label: str) -> str:
    """Return the label that holds when the two mentions are swapped."""
    if label not in _INVERSE:
        raise SchemaError(f"unknown temporal relation {label!r}")
    return _INVERSE[label]
