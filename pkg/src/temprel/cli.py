"""Command-line front end: extract, train, evaluate, predict.

Every command takes a JSON config file via --config; explicit flags win
over config-file values. The resolved configuration is echoed into the
output directory so a run is reproducible from that file alone. Exit
codes: 0 success, 2 input or configuration error, 3 checkpoint/data
incompatibility.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import sys
from pathlib import Path

import click
import numpy as np

from .corpus import Corpus, load_corpus
from .deppath import build_sequences, extract_surface_path
from .encoding import load_embeddings
from .errors import CheckpointError, ConfigError, InputError
from .evaluation import confusion_csv, evaluate_predictions, render_report
from .models import (
    DiscreteFeatureModel,
    EventWindowModel,
    Lexicons,
    MajorityClassModel,
    SequenceModel,
    config_from_arch,
    context_for_pair,
    load_checkpoint,
    predict,
    save_checkpoint,
    train_model,
    training_log_csv,
)

ARCH_CHOICES = (
    "full",
    "pos",
    "dep",
    "word",
    "pos+word",
    "dep+word",
    "dep+pos",
    "baseline1",
    "baseline2",
    "baseline3",
    "majority",
)


@dataclasses.dataclass
class RunConfig:
    conllu: str | None = None
    pairs: str | None = None
    train_pairs: str | None = None
    validate_pairs: str | None = None
    test_pairs: str | None = None
    embeddings: str | None = None
    embedding_dim: int = 100
    arch: str = "full"
    unidirectional: bool = False
    no_rules: bool = False
    surface_path: bool = False
    epochs: int = 100
    batch_size: int = 100
    seed: int | None = None
    out: str | None = None
    checkpoint: str | None = None
    split: str = "test"
    signal_lexicon: str | None = None
    verbocean_lexicon: str | None = None
    predictions: str | None = None
    stop_val_accuracy: float | None = None


def _resolve_config(config_path: str | None, overrides: dict) -> RunConfig:
    values: dict = {}
    if config_path is not None:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as err:
            raise ConfigError(f"config file is not valid JSON: {err}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in dataclasses.fields(RunConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for key, value in overrides.items():
        if value is None:
            continue
        if value is False and isinstance(values.get(key), bool):
            continue  # an absent boolean flag never un-sets a config value
        values[key] = value
    return RunConfig(**values)


def _require(config: RunConfig, *names: str) -> None:
    missing = [n for n in names if getattr(config, n) in (None, "")]
    if missing:
        raise ConfigError(f"missing required settings: {', '.join(missing)}")


def _out_dir(config: RunConfig) -> Path:
    _require(config, "out")
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _echo_config(config: RunConfig, out: Path) -> None:
    payload = dataclasses.asdict(config)
    (out / "config.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _handle_errors(f):
    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except (InputError, FileNotFoundError, NotADirectoryError) as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(2)
        except CheckpointError as err:
            click.echo(f"error: {err}", err=True)
            sys.exit(3)

    return wrapper


def common_options(f):
    f = click.option("--config", "config_path", type=str, default=None,
                     help="JSON config file; flags override its values.")(f)
    f = click.option("--seed", type=int, default=None)(f)
    f = click.option("--out", type=str, default=None, help="Output directory.")(f)
    return f


@click.group()
def main():
    """Temporal relation classification over dependency-parsed event pairs."""


@main.command()
@common_options
@click.option("--pairs", type=str, default=None)
@click.option("--conllu", type=str, default=None)
@click.option("--no-rules", "no_rules", is_flag=True, default=False,
              help="Bare dependency path, no enrichment rules.")
@click.option("--surface-path", "surface_path", is_flag=True, default=False,
              help="Contiguous token span between the events instead of the tree path.")
@_handle_errors
def extract(config_path, seed, out, pairs, conllu, no_rules, surface_path):
    """Write one JSON record of extracted sequences per event pair."""
    config = _resolve_config(config_path, {
        "seed": seed, "out": out, "pairs": pairs, "conllu": conllu,
        "no_rules": no_rules, "surface_path": surface_path,
    })
    _require(config, "pairs", "conllu")
    out_path = _out_dir(config)
    corpus = load_corpus(config.pairs, config.conllu)

    lines = []
    for pair in corpus.pairs:
        sentence = corpus.sentence_for(pair)
        if config.surface_path:
            cs = extract_surface_path(sentence, pair)
        else:
            cs = build_sequences(sentence, pair, use_rules=not config.no_rules)
        record = {
            "words": list(cs.words),
            "pos": list(cs.pos),
            "deps": list(cs.deps),
            "relation": pair.relation,
        }
        lines.append(json.dumps(record))
    (out_path / "sequences.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _echo_config(config, out_path)
    click.echo(f"wrote {len(lines)} records to {out_path / 'sequences.jsonl'}")


def _load_embeddings_if_needed(config: RunConfig, model_config) -> object | None:
    if not model_config.uses_word_embeddings():
        return None
    _require(config, "embeddings")
    table = load_embeddings(config.embeddings, config.embedding_dim,
                            seed=config.seed if config.seed is not None else 0)
    return table


def _vocab_payload(model) -> dict:
    if isinstance(model, SequenceModel):
        return {"pos": model.pos_vocab.to_list(), "dep": model.dep_vocab.to_list()}
    if isinstance(model, DiscreteFeatureModel):
        f = model.featurizer
        return {
            "pos": f.pos_vocab.to_list(),
            "dep": f.dep_vocab.to_list(),
            "token": f.token_vocab.to_list(),
            "lemma": f.lemma_vocab.to_list(),
            "prep": f.prep_vocab.to_list(),
        }
    if isinstance(model, EventWindowModel):
        return {"pos": model.pos_vocab.to_list()}
    return {}


@main.command()
@common_options
@click.option("--train-pairs", "train_pairs", type=str, default=None)
@click.option("--val-pairs", "validate_pairs", type=str, default=None)
@click.option("--conllu", type=str, default=None)
@click.option("--embeddings", type=str, default=None)
@click.option("--embedding-dim", "embedding_dim", type=int, default=None)
@click.option("--arch", type=click.Choice(ARCH_CHOICES), default=None)
@click.option("--unidirectional", is_flag=True, default=False)
@click.option("--no-rules", "no_rules", is_flag=True, default=False)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", "batch_size", type=int, default=None)
@click.option("--signal-lexicon", "signal_lexicon", type=str, default=None)
@click.option("--verbocean-lexicon", "verbocean_lexicon", type=str, default=None)
@click.option("--stop-val-accuracy", "stop_val_accuracy", type=float, default=None)
@_handle_errors
def train(config_path, seed, out, **flags):
    """Train a model; writes final and best-validation checkpoints and the log."""
    config = _resolve_config(config_path, {"seed": seed, "out": out, **flags})
    _require(config, "train_pairs", "validate_pairs", "conllu")
    if config.seed is None:
        raise ConfigError("training requires an explicit seed")
    out_path = _out_dir(config)

    model_config = config_from_arch(
        config.arch,
        unidirectional=config.unidirectional,
        use_rules=not config.no_rules,
        embedding_dim=config.embedding_dim,
        epochs=config.epochs,
        batch_size=config.batch_size,
        seed=config.seed,
    )
    embeddings = _load_embeddings_if_needed(config, model_config)
    lexicons = Lexicons.load(config.signal_lexicon, config.verbocean_lexicon)

    train_corpus = load_corpus(config.train_pairs, config.conllu)
    val_corpus = load_corpus(config.validate_pairs, config.conllu)
    result = train_model(
        model_config,
        train_corpus,
        val_corpus,
        embeddings=embeddings,
        lexicons=lexicons,
        stop_val_accuracy=config.stop_val_accuracy,
    )

    save_checkpoint(out_path / "checkpoint_final.json", result.final_model)
    save_checkpoint(out_path / "checkpoint_best.json", result.best_model)
    (out_path / "training_log.csv").write_text(training_log_csv(result.log), encoding="utf-8")
    (out_path / "vocabs.json").write_text(
        json.dumps(_vocab_payload(result.final_model), indent=2) + "\n", encoding="utf-8"
    )
    _echo_config(config, out_path)
    final_acc = result.log[-1][2] if result.log else None
    if final_acc is None:
        click.echo("trained (no optimization loop for this architecture)")
    else:
        click.echo(f"final validation accuracy: {final_acc:.4f}")


def _inputs_for(model, corpus: Corpus, pair) -> object:
    sentence = corpus.sentence_for(pair)
    if isinstance(model, SequenceModel):
        return model.encode(context_for_pair(model.config, sentence, pair))
    if isinstance(model, DiscreteFeatureModel):
        return model.featurizer.featurize(sentence, pair)
    if isinstance(model, EventWindowModel):
        return model.encode(sentence, pair)
    if isinstance(model, MajorityClassModel):
        return None
    raise CheckpointError(f"cannot build inputs for {type(model).__name__}")


def _split_pairs_path(config: RunConfig) -> str:
    if config.split == "test":
        _require(config, "test_pairs")
        return config.test_pairs
    if config.split == "validate":
        _require(config, "validate_pairs")
        return config.validate_pairs
    raise ConfigError(f"split must be 'test' or 'validate', got {config.split!r}")


@main.command()
@common_options
@click.option("--checkpoint", type=str, default=None)
@click.option("--split", type=click.Choice(["test", "validate"]), default=None)
@click.option("--conllu", type=str, default=None)
@click.option("--test-pairs", "test_pairs", type=str, default=None)
@click.option("--val-pairs", "validate_pairs", type=str, default=None)
@click.option("--embeddings", type=str, default=None,
              help="Optional: widen word coverage beyond the checkpoint's table.")
@click.option("--embedding-dim", "embedding_dim", type=int, default=None)
@click.option("--predictions", type=str, default=None,
              help="Score a predictions JSONL file instead of running a model.")
@_handle_errors
def evaluate(config_path, seed, out, **flags):
    """Evaluate a checkpoint (or a predictions file) on a corpus split."""
    config = _resolve_config(config_path, {"seed": seed, "out": out, **flags})
    out_path = _out_dir(config)

    if config.predictions is not None:
        gold, predicted = [], []
        for line in Path(config.predictions).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            gold.append(record["gold"])
            predicted.append(record["predicted"])
        if not gold:
            raise InputError("predictions file holds no records")
    else:
        _require(config, "checkpoint", "conllu")
        corpus = load_corpus(_split_pairs_path(config), config.conllu)
        if not corpus.pairs:
            raise InputError("evaluation split has no pairs")
        extra = None
        if config.embeddings is not None:
            extra = load_embeddings(config.embeddings, config.embedding_dim,
                                    seed=config.seed if config.seed is not None else 0)
        model = load_checkpoint(config.checkpoint, embeddings=extra)
        gold, predicted = [], []
        for pair in corpus.pairs:
            label, _ = predict(model, _inputs_for(model, corpus, pair))
            gold.append(pair.relation)
            predicted.append(label)

    report = evaluate_predictions(gold, predicted)
    (out_path / "report.json").write_text(render_report(report, "json") + "\n", encoding="utf-8")
    (out_path / "confusion.csv").write_text(confusion_csv(report), encoding="utf-8")
    _echo_config(config, out_path)
    click.echo(f"accuracy: {report.accuracy:.4f}")
    click.echo(render_report(report, "table"), nl=False)


@main.command("predict")
@common_options
@click.option("--checkpoint", type=str, default=None)
@click.option("--pairs", type=str, default=None)
@click.option("--conllu", type=str, default=None)
@click.option("--embeddings", type=str, default=None)
@click.option("--embedding-dim", "embedding_dim", type=int, default=None)
@_handle_errors
def predict_cmd(config_path, seed, out, **flags):
    """Label each pair in a corpus; writes predictions.jsonl."""
    config = _resolve_config(config_path, {"seed": seed, "out": out, **flags})
    _require(config, "checkpoint", "pairs", "conllu")
    out_path = _out_dir(config)

    extra = None
    if config.embeddings is not None:
        extra = load_embeddings(config.embeddings, config.embedding_dim,
                                seed=config.seed if config.seed is not None else 0)
    model = load_checkpoint(config.checkpoint, embeddings=extra)
    corpus = load_corpus(config.pairs, config.conllu)

    lines = []
    for pair in corpus.pairs:
        label, probs = predict(model, _inputs_for(model, corpus, pair))
        record = {
            "sentence": pair.sentence_ref,
            "e1": pair.e1_index,
            "e2": pair.e2_index,
            "gold": pair.relation,
            "predicted": label,
            "probabilities": {rel: float(p) for rel, p in zip_relations(probs)},
        }
        lines.append(json.dumps(record))
    (out_path / "predictions.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _echo_config(config, out_path)
    click.echo(f"wrote {len(lines)} predictions to {out_path / 'predictions.jsonl'}")


def zip_relations(probs: np.ndarray):
    from .relations import RELATIONS

    return zip(RELATIONS, probs)


if __name__ == "__main__":
    main()
