import json

import numpy as np
import pytest

from temprel.corpus import load_corpus, normalize_pair
from temprel.encoding import EmbeddingTable, Vocabulary
from temprel.errors import CheckpointError, ConfigError, InputError
from temprel.models import (
    Baseline1Featurizer,
    DiscreteFeatureModel,
    EventWindowModel,
    Lexicons,
    MajorityClassModel,
    ModelConfig,
    SequenceModel,
    check_model_gradients,
    config_from_arch,
    extract_event_windows,
    load_checkpoint,
    predict,
    save_checkpoint,
    train_model,
    training_log_csv,
)
from temprel.relations import RELATIONS

from conftest import sentence_from_rows, write_marker_corpus


def small_vocabs():
    pos = Vocabulary([f"P{i}" for i in range(4)])
    dep = Vocabulary([f"D{i}" for i in range(3)])
    return pos, dep


def small_table(dim=5, seed=2):
    rng = np.random.default_rng(seed)
    return EmbeddingTable({f"w{i}": rng.uniform(-1, 1, dim) for i in range(6)}, dim, seed=0)


def onehot(size, k):
    v = np.zeros(size)
    v[k] = 1.0
    return v


def random_inputs(model, rng, t=3, n=2):
    inputs = {}
    if "pos" in model.config.sequences_used:
        inputs["pos"] = [onehot(model.pos_vocab.size, rng.integers(model.pos_vocab.size)) for _ in range(t)]
    if "dep" in model.config.sequences_used:
        inputs["dep"] = [onehot(model.dep_vocab.size, rng.integers(model.dep_vocab.size)) for _ in range(n)]
    if "word" in model.config.sequences_used:
        inputs["word"] = [model.embeddings.vector(f"w{rng.integers(6)}") for _ in range(t)]
    return inputs


def lstm_param_count(hidden, in_dim):
    return 4 * (hidden * in_dim + hidden * hidden + hidden)


class TestBuildModel:
    def test_full_model_concat_width(self):
        pos, dep = small_vocabs()
        model = SequenceModel(ModelConfig(), pos, dep, small_table(100), np.random.default_rng(0))
        assert model.concat_width == 2 * (50 + 50 + 100)
        assert model.output.W.shape == (14, 400)

    def test_unidirectional_pos_only_width(self):
        pos, dep = small_vocabs()
        cfg = ModelConfig(sequences_used=("pos",), bidirectional=False)
        model = SequenceModel(cfg, pos, dep, None, np.random.default_rng(0))
        assert model.concat_width == 50
        assert set(model.encoders) == {"pos_fwd"}

    def test_parameter_counts_for_all_ten_configurations(self):
        pos, dep = small_vocabs()
        table = small_table()
        combos = [
            (("pos",), False), (("word",), False), (("dep",), False),
            (("pos",), True), (("word",), True), (("dep",), True),
            (("pos", "word"), True), (("dep", "word"), True), (("pos", "dep"), True),
            (("pos", "dep", "word"), True),
        ]
        in_dims = {"pos": pos.size, "dep": dep.size, "word": table.dim}
        for used, bidirectional in combos:
            cfg = ModelConfig(
                sequences_used=used, bidirectional=bidirectional, embedding_dim=table.dim
            )
            model = SequenceModel(cfg, pos, dep, table, np.random.default_rng(1))
            directions = 2 if bidirectional else 1
            expected = sum(
                directions * lstm_param_count(cfg.width(s), in_dims[s]) for s in used
            )
            concat = directions * sum(cfg.width(s) for s in used)
            expected += 14 * concat + 14
            assert model.parameter_count() == expected
            assert model.concat_width == concat

    def test_surface_baseline_reuses_full_model_hyperparameters(self):
        full = ModelConfig()
        surf = config_from_arch("baseline2")
        assert surf.word_width == full.word_width
        assert surf.pos_width == full.pos_width
        assert surf.word_dropout == full.word_dropout
        assert surf.pos_dropout == full.pos_dropout
        assert surf.bidirectional

    def test_word_model_requires_embeddings(self):
        pos, dep = small_vocabs()
        with pytest.raises(ConfigError):
            SequenceModel(ModelConfig(), pos, dep, None, np.random.default_rng(0))

    def test_invalid_config_rejected(self):
        with pytest.raises(ConfigError):
            ModelConfig(sequences_used=()).validate()
        with pytest.raises(ConfigError):
            ModelConfig(pos_width=0).validate()
        with pytest.raises(ConfigError):
            ModelConfig(word_dropout=1.0).validate()
        with pytest.raises(ConfigError):
            config_from_arch("pos+pos")


class TestModelForward:
    def test_probabilities_sum_to_one(self):
        rng = np.random.default_rng(5)
        pos, dep = small_vocabs()
        model = SequenceModel(
            ModelConfig(pos_width=4, dep_width=4, word_width=6, embedding_dim=5),
            pos, dep, small_table(), rng,
        )
        model.output.W[:] = rng.uniform(-1, 1, model.output.W.shape)
        for _ in range(10):
            probs = model.predict_proba(random_inputs(model, rng))
            assert abs(probs.sum() - 1.0) < 1e-9
            assert probs.shape == (14,)

    def test_zero_output_layer_gives_uniform(self):
        rng = np.random.default_rng(6)
        pos, dep = small_vocabs()
        model = SequenceModel(
            ModelConfig(pos_width=4, dep_width=4, word_width=6, embedding_dim=5),
            pos, dep, small_table(), rng,
        )
        probs = model.predict_proba(random_inputs(model, rng))
        assert np.allclose(probs, 1.0 / 14)

    def test_minimal_length_two_input(self):
        rng = np.random.default_rng(7)
        pos, dep = small_vocabs()
        model = SequenceModel(
            ModelConfig(pos_width=3, dep_width=3, word_width=3, embedding_dim=5),
            pos, dep, small_table(), rng,
        )
        inputs = random_inputs(model, rng, t=2, n=2)
        assert model.predict_proba(inputs).shape == (14,)

    def test_prediction_ignores_dropout_seed(self):
        rng = np.random.default_rng(8)
        pos, dep = small_vocabs()
        model = SequenceModel(
            ModelConfig(pos_width=4, dep_width=4, word_width=6, embedding_dim=5),
            pos, dep, small_table(), rng,
        )
        inputs = random_inputs(model, rng)
        assert np.array_equal(model.predict_proba(inputs), model.predict_proba(inputs))


class TestPredict:
    def test_uniform_ties_break_to_first_label(self):
        rng = np.random.default_rng(9)
        pos, dep = small_vocabs()
        model = SequenceModel(
            ModelConfig(pos_width=4, dep_width=4, word_width=6, embedding_dim=5),
            pos, dep, small_table(), rng,
        )
        label, probs = predict(model, random_inputs(model, rng))
        assert np.allclose(probs, 1.0 / 14)
        assert label == RELATIONS[0] == "simultaneous"

    def test_majority_model_always_after(self):
        model = MajorityClassModel()
        for _ in range(3):
            label, probs = predict(model, None)
            assert label == "after"
            assert probs[RELATIONS.index("after")] == 1.0


class TestBaseline1Features:
    def build(self, reference_sentence, lexicons=None):
        from temprel.corpus import Corpus

        pair = normalize_pair(3, 6, "before", "ref")
        corpus = Corpus(sentences={"ref": reference_sentence}, pairs=(pair,))
        featurizer = Baseline1Featurizer(corpus, [pair], lexicons)
        return featurizer, featurizer.featurize(reference_sentence, pair)

    def test_reference_pair_structural_flags(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        flags = featurizer.block(vec, "flags")
        # same-POS, e1-root, e2-root, e1-governs-e2, e2-governs-e1
        assert list(flags) == [0.0, 1.0, 0.0, 1.0, 0.0]

    def test_reference_pair_direct_deprel(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        block = featurizer.block(vec, "direct_dep")
        assert block.sum() == 1.0
        assert block[featurizer.dep_vocab.id("advcl")] == 1.0

    def test_distance_scaling(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        assert featurizer.block(vec, "distance")[0] == pytest.approx(0.3)

    def test_same_pos_flag(self):
        s = sentence_from_rows(
            "same", [("fell", "VBD", 0, "root"), ("rose", "VBD", 1, "conj")]
        )
        from temprel.corpus import Corpus

        pair = normalize_pair(1, 2, "before", "same")
        corpus = Corpus(sentences={"same": s}, pairs=(pair,))
        featurizer = Baseline1Featurizer(corpus, [pair])
        vec = featurizer.featurize(s, pair)
        assert featurizer.block(vec, "flags")[0] == 1.0

    def test_child_dependency_bags(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        bag1 = featurizer.block(vec, "child_deps_e1")
        for deprel in ("nsubj:pass", "aux:pass", "advcl", "punct"):
            assert bag1[featurizer.dep_vocab.id(deprel)] == 1.0
        bag2 = featurizer.block(vec, "child_deps_e2")
        assert bag2[featurizer.dep_vocab.id("mark")] == 1.0

    def test_rare_tokens_map_to_unk(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        assert featurizer.token_vocab.size == 1  # every event form is rare
        assert featurizer.block(vec, "token_e1")[0] == 1.0

    def test_missing_lexicons_zero_their_blocks(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        assert featurizer.block(vec, "verb_relations").sum() == 0.0
        assert featurizer.block(vec, "signals").size == 0

    def test_lexicon_hits(self, reference_sentence):
        lex = Lexicons(
            signal_words=("before", "after"),
            verb_relations=frozenset({("invade", "happens-before", "arrive")}),
        )
        featurizer, vec = self.build(reference_sentence, lex)
        assert list(featurizer.block(vec, "verb_relations")) == [1.0, 0.0]
        assert list(featurizer.block(vec, "signals")) == [1.0, 0.0]

    def test_preposition_block(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        preps_e2 = featurizer.block(vec, "preps_e2")
        assert preps_e2[featurizer.prep_vocab.id("before")] == 1.0
        assert featurizer.block(vec, "preps_e1").sum() == 0.0

    def test_feature_width_fixed_by_training_vocabularies(self, reference_sentence):
        featurizer, vec = self.build(reference_sentence)
        assert vec.shape == (featurizer.width,)
        again = featurizer.featurize(reference_sentence, normalize_pair(3, 6, "before", "ref"))
        assert again.shape == vec.shape


class TestEventWindows:
    def test_reference_windows_for_first_event(self, reference_sentence):
        pair = normalize_pair(3, 6, "before", "ref")
        left1, right1, left2, right2 = extract_event_windows(reference_sentence, pair)
        assert left1 == (1, 2)
        assert right1 == (4, 5, 6, 7)
        assert left2 == (1, 2, 3, 4, 5)
        assert right2 == (7,)

    def test_event_at_sentence_start_has_empty_left(self):
        s = sentence_from_rows(
            "start", [("went", "VBD", 0, "root"), ("home", "NN", 1, "obj")]
        )
        left1, right1, _, _ = extract_event_windows(s, normalize_pair(1, 2, "before", "start"))
        assert left1 == ()
        assert right1 == (2,)

    def test_width_honored_on_long_sentence(self):
        rows = [(f"w{i}", "NN", i - 1 if i > 1 else 0, "dep") for i in range(1, 41)]
        s = sentence_from_rows("long", rows)
        pair = normalize_pair(20, 40, "before", "long")
        left1, right1, _, _ = extract_event_windows(s, pair, width=19)
        assert left1 == tuple(range(1, 20))
        assert len(left1) == 19
        assert right1 == tuple(range(21, 40))
        assert len(right1) == 19

    def test_empty_window_contributes_zero_vector(self):
        s = sentence_from_rows(
            "start", [("went", "VBD", 0, "root"), ("home", "NN", 1, "obj")]
        )
        pos_vocab = Vocabulary(["VBD", "NN"])
        table = small_table()
        cfg = ModelConfig(architecture="baseline3", sequences_used=(), window_width=6,
                          embedding_dim=table.dim)
        model = EventWindowModel(cfg, pos_vocab, table, np.random.default_rng(0))
        inputs = model.encode(s, normalize_pair(1, 2, "before", "start"))
        assert inputs[0] == []
        _, stacked, _ = model.forward(inputs)
        assert stacked.shape == (4 * 6,)
        assert np.all(stacked[:6] == 0.0)
        assert not np.all(stacked[6:12] == 0.0)

    def test_window_model_shares_two_layers(self):
        pos_vocab = Vocabulary(["VBD", "NN"])
        table = small_table()
        cfg = ModelConfig(architecture="baseline3", sequences_used=(), window_width=6,
                          embedding_dim=table.dim)
        model = EventWindowModel(cfg, pos_vocab, table, np.random.default_rng(0))
        in_dim = table.dim + pos_vocab.size
        expected = 2 * lstm_param_count(6, in_dim) + 14 * 24 + 14
        assert model.parameter_count() == expected


class TestGradientsThroughModels:
    def test_feature_model_gradients(self, reference_sentence):
        from temprel.corpus import Corpus

        pair = normalize_pair(3, 6, "before", "ref")
        corpus = Corpus(sentences={"ref": reference_sentence}, pairs=(pair,))
        featurizer = Baseline1Featurizer(corpus, [pair])
        model = DiscreteFeatureModel(config_from_arch("baseline1"), featurizer)
        rng = np.random.default_rng(1)
        model.output.W[:] = rng.uniform(-0.5, 0.5, model.output.W.shape)
        features = featurizer.featurize(reference_sentence, pair)
        err = check_model_gradients(model, features, target=4)
        assert err < 1e-4

    def test_window_model_gradients(self, reference_sentence):
        pos_vocab = Vocabulary([t.pos for t in reference_sentence.tokens])
        table = small_table()
        cfg = ModelConfig(architecture="baseline3", sequences_used=(), window_width=4,
                          embedding_dim=table.dim)
        model = EventWindowModel(cfg, pos_vocab, table, np.random.default_rng(3))
        rng = np.random.default_rng(4)
        model.output.W[:] = rng.uniform(-0.3, 0.3, model.output.W.shape)
        inputs = model.encode(reference_sentence, normalize_pair(3, 6, "before", "ref"))
        err = check_model_gradients(model, inputs, target=1, sample_per_tensor=40)
        assert err < 1e-4


class TestTraining:
    def test_overfits_marker_corpus(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        from temprel.encoding import load_embeddings

        table = load_embeddings(paths["embeddings"], paths["dim"])
        cfg = ModelConfig(embedding_dim=paths["dim"], epochs=40, batch_size=100, seed=3)
        result = train_model(cfg, corpus, corpus, embeddings=table, stop_val_accuracy=1.0)
        assert result.best_val_accuracy == 1.0
        assert result.log[0][1] == pytest.approx(np.log(14), abs=1e-9)

    def test_identical_logs_for_identical_seed(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        from temprel.encoding import load_embeddings

        table = load_embeddings(paths["embeddings"], paths["dim"])
        cfg = ModelConfig(embedding_dim=paths["dim"], epochs=5, seed=17)
        first = train_model(cfg, corpus, corpus, embeddings=table)
        second = train_model(cfg, corpus, corpus, embeddings=table)
        assert training_log_csv(first.log) == training_log_csv(second.log)

    def test_training_invariant_to_pair_order(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=2)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        from temprel.corpus import Corpus
        from temprel.encoding import load_embeddings

        table = load_embeddings(paths["embeddings"], paths["dim"])
        rng = np.random.default_rng(0)
        order = rng.permutation(len(corpus.pairs))
        shuffled = Corpus(corpus.sentences, tuple(corpus.pairs[i] for i in order))
        cfg = ModelConfig(embedding_dim=paths["dim"], epochs=4, seed=23)
        a = train_model(cfg, corpus, corpus, embeddings=table)
        b = train_model(cfg, shuffled, shuffled, embeddings=table)
        assert training_log_csv(a.log) == training_log_csv(b.log)

    def test_empty_training_set_rejected(self):
        from temprel.corpus import Corpus

        with pytest.raises(InputError):
            train_model(ModelConfig(seed=0), Corpus({}, ()), Corpus({}, ()))

    def test_majority_architecture_skips_training(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        cfg = ModelConfig(architecture="majority", sequences_used=(), seed=0)
        result = train_model(cfg, corpus, corpus)
        assert isinstance(result.final_model, MajorityClassModel)
        assert result.log == []

    def test_feature_baseline_learns_markers(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        cfg = ModelConfig(architecture="baseline1", sequences_used=(), epochs=250, seed=5)
        result = train_model(cfg, corpus, corpus, stop_val_accuracy=1.0)
        assert result.best_val_accuracy == 1.0

    def test_window_baseline_learns_markers(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        from temprel.encoding import load_embeddings

        table = load_embeddings(paths["embeddings"], paths["dim"])
        cfg = ModelConfig(architecture="baseline3", sequences_used=(), window_width=20,
                          embedding_dim=paths["dim"], epochs=60, seed=7)
        result = train_model(cfg, corpus, corpus, embeddings=table, stop_val_accuracy=1.0)
        assert result.best_val_accuracy == 1.0

    def test_best_checkpoint_tracks_validation(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        from temprel.encoding import load_embeddings

        table = load_embeddings(paths["embeddings"], paths["dim"])
        cfg = ModelConfig(embedding_dim=paths["dim"], epochs=6, seed=2)
        result = train_model(cfg, corpus, corpus, embeddings=table)
        best_epoch_acc = max(row[2] for row in result.log)
        inputs, targets = _encode_all(result.best_model, corpus)
        hits = sum(
            1 for x, t in zip(inputs, targets)
            if int(np.argmax(result.best_model.predict_proba(x))) == t
        )
        assert hits / len(targets) == pytest.approx(best_epoch_acc)


def _encode_all(model, corpus):
    from temprel.models import context_for_pair
    from temprel.relations import RELATION_IDS

    inputs, targets = [], []
    for pair in corpus.pairs:
        cs = context_for_pair(model.config, corpus.sentence_for(pair), pair)
        inputs.append(model.encode(cs))
        targets.append(RELATION_IDS[pair.relation])
    return inputs, targets


class TestCheckpointing:
    def trained(self, tmp_path, arch="full", epochs=3):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        from temprel.encoding import load_embeddings

        table = load_embeddings(paths["embeddings"], paths["dim"])
        cfg = config_from_arch(arch, embedding_dim=paths["dim"], epochs=epochs, seed=9)
        result = train_model(cfg, corpus, corpus, embeddings=table)
        return corpus, result.final_model

    def test_sequence_model_roundtrip(self, tmp_path):
        corpus, model = self.trained(tmp_path)
        path = tmp_path / "ck.json"
        save_checkpoint(path, model)
        loaded = load_checkpoint(path)
        for name, arr in model.tensors().items():
            assert np.array_equal(arr, loaded.tensors()[name])
        inputs, _ = _encode_all(model, corpus)
        for x in inputs[:5]:
            assert np.allclose(model.predict_proba(x), loaded.predict_proba(x))

    def test_prediction_is_function_of_checkpoint_and_input(self, tmp_path):
        corpus, model = self.trained(tmp_path)
        path = tmp_path / "ck.json"
        save_checkpoint(path, model)
        a = load_checkpoint(path)
        b = load_checkpoint(path)
        inputs, _ = _encode_all(a, corpus)
        for x in inputs[:5]:
            assert np.array_equal(a.predict_proba(x), b.predict_proba(x))

    def test_majority_roundtrip(self, tmp_path):
        path = tmp_path / "maj.json"
        save_checkpoint(path, MajorityClassModel())
        loaded = load_checkpoint(path)
        assert predict(loaded, None)[0] == "after"

    def test_feature_model_roundtrip(self, tmp_path):
        paths = write_marker_corpus(tmp_path, per_relation=1)
        corpus = load_corpus(paths["pairs"], paths["conllu"])
        cfg = ModelConfig(architecture="baseline1", sequences_used=(), epochs=2, seed=1)
        result = train_model(cfg, corpus, corpus)
        path = tmp_path / "b1.json"
        save_checkpoint(path, result.final_model)
        loaded = load_checkpoint(path)
        s = corpus.sentence_for(corpus.pairs[0])
        vec = loaded.featurizer.featurize(s, corpus.pairs[0])
        ref = result.final_model.featurizer.featurize(s, corpus.pairs[0])
        assert np.array_equal(vec, ref)
        assert np.allclose(
            loaded.predict_proba(vec), result.final_model.predict_proba(ref)
        )

    def test_unsupported_version_rejected(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"format_version": 99, "architecture": "majority"}))
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_non_checkpoint_json_rejected(self, tmp_path):
        path = tmp_path / "junk.json"
        path.write_text(json.dumps({"hello": 1}))
        with pytest.raises(CheckpointError):
            load_checkpoint(path)

    def test_extra_embeddings_extend_coverage(self, tmp_path):
        corpus, model = self.trained(tmp_path)
        path = tmp_path / "ck.json"
        save_checkpoint(path, model)
        extra = EmbeddingTable({"brandnew": np.ones(model.embeddings.dim)}, model.embeddings.dim)
        loaded = load_checkpoint(path, embeddings=extra)
        assert np.array_equal(loaded.embeddings.vector("brandnew"), np.ones(model.embeddings.dim))
        # checkpoint's own vectors win over the extra table
        word = model.embeddings.words[0]
        assert np.array_equal(loaded.embeddings.vector(word), model.embeddings.vector(word))
