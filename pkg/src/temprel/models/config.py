"""Configuration for the sequence classifier, its ablations, and the baselines."""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

from ..errors import ConfigError

ARCHITECTURES = ("sequence_model", "baseline1", "baseline2", "baseline3", "majority")
SEQUENCE_ORDER = ("pos", "dep", "word")


@dataclass(frozen=True)
class ModelConfig:
    architecture: str = "sequence_model"
    sequences_used: tuple[str, ...] = SEQUENCE_ORDER
    bidirectional: bool = True
    use_rules: bool = True
    pos_width: int = 50
    dep_width: int = 50
    word_width: int = 100
    pos_dropout: float = 0.20
    dep_dropout: float = 0.20
    word_dropout: float = 0.25
    window_width: int = 150
    window_dropout: float = 0.20
    context_window: int = 19
    embedding_dim: int = 100
    epochs: int = 100
    batch_size: int = 100
    seed: int = 0

    def validate(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {self.architecture!r}")
        if self.architecture in ("sequence_model", "baseline2"):
            if not self.sequences_used:
                raise ConfigError("a sequence model needs at least one input sequence")
            unknown = set(self.sequences_used) - set(SEQUENCE_ORDER)
            if unknown:
                raise ConfigError(f"unknown sequences {sorted(unknown)}")
        if self.architecture == "baseline2" and "dep" in self.sequences_used:
            raise ConfigError("the surface-path baseline has no dependency sequence")
        for name in ("pos_width", "dep_width", "word_width", "window_width", "context_window"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("pos_dropout", "dep_dropout", "word_dropout", "window_dropout"):
            rate = getattr(self, name)
            if not 0.0 <= rate < 1.0:
                raise ConfigError(f"{name} must lie in [0, 1)")
        if self.embedding_dim <= 0:
            raise ConfigError("embedding_dim must be positive")
        if self.epochs < 0 or self.batch_size < 1:
            raise ConfigError("epochs must be >= 0 and batch_size >= 1")

    def width(self, sequence: str) -> int:
        return getattr(self, f"{sequence}_width")

    def dropout(self, sequence: str) -> float:
        return getattr(self, f"{sequence}_dropout")

    def ordered_sequences(self) -> tuple[str, ...]:
        return tuple(s for s in SEQUENCE_ORDER if s in self.sequences_used)

    def uses_word_embeddings(self) -> bool:
        if self.architecture in ("sequence_model", "baseline2"):
            return "word" in self.sequences_used
        return self.architecture == "baseline3"

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["sequences_used"] = list(self.sequences_used)
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "ModelConfig":
        known = {f for f in cls.__dataclass_fields__}
        kwargs = {k: v for k, v in payload.items() if k in known}
        if "sequences_used" in kwargs:
            kwargs["sequences_used"] = tuple(kwargs["sequences_used"])
        return cls(**kwargs)


def config_from_arch(arch: str, unidirectional: bool = False, **overrides) -> ModelConfig:
    """Build a ModelConfig from a CLI architecture token.

    Tokens: full, pos, dep, word, any "+"-joined pair of those three,
    baseline1, baseline2, baseline3, majority.
    """
    arch = arch.lower()
    if arch in ("baseline1", "baseline3", "majority"):
        return ModelConfig(architecture=arch, sequences_used=(), **overrides)
    if arch == "baseline2":
        return ModelConfig(architecture=arch, sequences_used=("pos", "word"), **overrides)
    if arch == "full":
        used = SEQUENCE_ORDER
    else:
        parts = arch.split("+")
        if any(p not in SEQUENCE_ORDER for p in parts) or len(set(parts)) != len(parts):
            raise ConfigError(f"unknown architecture token {arch!r}")
        used = tuple(s for s in SEQUENCE_ORDER if s in parts)
    return ModelConfig(
        architecture="sequence_model",
        sequences_used=used,
        bidirectional=not unidirectional,
        **overrides,
    )
