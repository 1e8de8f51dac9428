import json

import numpy as np
import pytest

from conftest import DATA
from conjparse.cli import EXIT_DATA, EXIT_MODEL, EXIT_OK, EXIT_OTHER, main
from conjparse.model import Model
from conjparse.parser import greedy_parse
from conjparse.resources import FeatureResources
from conjparse.treebank import read_conll, write_conll

TINY_HYPERS = [
    "--hyper", "word_dim=8", "--hyper", "pos_dim=4", "--hyper", "lstm_dim=6",
    "--hyper", "lstm_layers=1", "--hyper", "mlp_dim=10",
    "--hyper", "conj_mlp_dim=6",
]


@pytest.fixture(scope="module")
def train_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "train.conllx"
    sentences = read_conll(DATA / "sample_treebank.conllx")[:12]
    path.write_bytes(write_conll(sentences))
    return path


def _train(tmp_path, train_file, *extra, seed=5, epochs=2, name="model.bin"):
    model_path = tmp_path / name
    code = main([
        "train", "--train", str(train_file), "--model", str(model_path),
        "--seed", str(seed), "--epochs", str(epochs), *TINY_HYPERS, *extra,
    ])
    assert code == EXIT_OK
    return model_path


def test_train_parse_evaluate_pipeline(tmp_path, train_file, capsys):
    model_path = _train(tmp_path, train_file, "--dev", str(train_file))
    captured = capsys.readouterr()
    assert "configuration:" in captured.out
    assert "dev_las=" in captured.out
    assert model_path.exists()

    out_path = tmp_path / "parsed.conllx"
    code = main(["parse", "--model", str(model_path), "--input",
                 str(train_file), "--output", str(out_path)])
    assert code == EXIT_OK
    parsed = read_conll(out_path, require_tree=False)
    assert len(parsed) == 12

    code = main(["evaluate", "--gold", str(train_file), "--pred", str(out_path)])
    assert code == EXIT_OK
    assert "UAS:" in capsys.readouterr().out


def test_evaluate_tsv_flag(tmp_path, train_file, capsys):
    model_path = _train(tmp_path, train_file)
    out_path = tmp_path / "parsed.conllx"
    main(["parse", "--model", str(model_path), "--input", str(train_file),
          "--output", str(out_path)])
    capsys.readouterr()
    assert main(["evaluate", "--gold", str(train_file), "--pred",
                 str(out_path), "--tsv"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("uas\t")
    assert "counted_tokens\t" in out


def test_parse_empty_input(tmp_path, train_file):
    model_path = _train(tmp_path, train_file)
    empty = tmp_path / "empty.conllx"
    empty.write_bytes(b"")
    out_path = tmp_path / "out.conllx"
    assert main(["parse", "--model", str(model_path), "--input", str(empty),
                 "--output", str(out_path)]) == EXIT_OK
    assert out_path.read_bytes() == b""


def test_same_seed_bit_identical_models(tmp_path, train_file):
    first = _train(tmp_path, train_file, name="a.bin", seed=9)
    second = _train(tmp_path, train_file, name="b.bin", seed=9)
    assert first.read_bytes() == second.read_bytes()


def test_different_seed_differs(tmp_path, train_file):
    first = _train(tmp_path, train_file, name="a.bin", seed=9)
    second = _train(tmp_path, train_file, name="b.bin", seed=10)
    assert first.read_bytes() != second.read_bytes()


def test_no_conj_features_path_equals_zeroed_conj(tmp_path, train_file):
    model_path = _train(tmp_path, train_file, "--no-conj-features")
    model = Model.load(model_path)
    assert model.hp.use_conj_features is False
    sentences = read_conll(train_file)
    resources = FeatureResources.empty()
    zeroed = Model.load(model_path)
    zeroed.hp.use_conj_features = True
    for key in ("conj.w1", "conj.b1", "conj.w2", "conj.b2"):
        zeroed.params[key][...] = 0.0
    for sentence in sentences[:6]:
        off = greedy_parse(sentence, model, resources)
        zero = greedy_parse(sentence, zeroed, resources)
        assert [t.pred_head for t in off] == [t.pred_head for t in zero]
        assert [t.pred_label for t in off] == [t.pred_label for t in zero]


def test_train_skips_non_projective(tmp_path, capsys):
    corpus = tmp_path / "np.conllx"
    sentences = read_conll(DATA / "sample_treebank.conllx")
    corpus.write_bytes(write_conll(sentences[:6] + sentences[-3:]))
    model_path = tmp_path / "model.bin"
    code = main(["train", "--train", str(corpus), "--model", str(model_path),
                 "--seed", "1", "--epochs", "1", *TINY_HYPERS])
    assert code == EXIT_OK
    assert "skipped 3 non-projective" in capsys.readouterr().out


def test_config_file_and_flag_precedence(tmp_path, train_file):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"lstm_dim": 4, "mlp_dim": 6}))
    model_path = tmp_path / "model.bin"
    code = main([
        "train", "--train", str(train_file), "--model", str(model_path),
        "--seed", "3", "--epochs", "1", "--config", str(config),
        "--hyper", "mlp_dim=12",
    ])
    assert code == EXIT_OK
    model = Model.load(model_path)
    assert model.hp.lstm_dim == 4       # from config file
    assert model.hp.mlp_dim == 12       # flag wins over config


def test_evaluate_two_systems_emits_diff(tmp_path, train_file, capsys):
    model_path = _train(tmp_path, train_file)
    out_a = tmp_path / "a.conllx"
    out_b = tmp_path / "b.conllx"
    main(["parse", "--model", str(model_path), "--input", str(train_file),
          "--output", str(out_a)])
    main(["parse", "--model", str(model_path), "--input", str(train_file),
          "--output", str(out_b)])
    capsys.readouterr()
    code = main(["evaluate", "--gold", str(train_file), "--pred", str(out_a),
                 "--pred-b", str(out_b), "--lemma-lexicon",
                 str(DATA / "lemmas.tsv")])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "A-only 0, B-only 0" in out
    assert "feature" in out


def test_analyze_outputs_and_warning(tmp_path, capsys):
    code = main(["analyze", "--input", str(DATA / "sample_treebank.conllx"),
                 "--label", "conj", "--top", "5"])
    assert code == EXIT_OK
    captured = capsys.readouterr()
    assert "all-neutral" in captured.err
    assert "label\ttotal_edges" in captured.out
    assert "head\tmodifier\tcount" in captured.out


def test_analyze_markdown(tmp_path, capsys):
    code = main(["analyze", "--input", str(DATA / "sample_treebank.conllx"),
                 "--markdown", "--sentiment-pos",
                 str(DATA / "sentiment_positive.txt"), "--sentiment-neg",
                 str(DATA / "sentiment_negative.txt")])
    assert code == EXIT_OK
    assert "| label | edges |" in capsys.readouterr().out


def test_gradcheck_subcommand(capsys):
    assert main(["gradcheck"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "gradient check passed" in out
    assert "hinge kink" in out


def test_gradcheck_corrupted_fails(capsys):
    assert main(["gradcheck", "--corrupt", "mlp.w1"]) == EXIT_OTHER
    assert "FAILED" in capsys.readouterr().out


def test_exit_code_missing_data(tmp_path, capsys):
    code = main(["analyze", "--input", str(tmp_path / "missing.conllx")])
    assert code == EXIT_DATA


def test_exit_code_bad_model(tmp_path, train_file, capsys):
    bogus = tmp_path / "bogus.bin"
    bogus.write_bytes(b"junk bytes, not a model")
    code = main(["parse", "--model", str(bogus), "--input", str(train_file),
                 "--output", str(tmp_path / "out.conllx")])
    assert code == EXIT_MODEL


def test_exit_code_malformed_treebank(tmp_path, capsys):
    bad = tmp_path / "bad.conllx"
    bad.write_text("1\tword\n\n")
    code = main(["analyze", "--input", str(bad)])
    assert code == EXIT_DATA


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["train"])  # missing required flags
    assert err.value.code == 2


def test_train_with_all_resources(tmp_path, train_file):
    model_path = _train(
        tmp_path, train_file,
        "--embeddings", str(DATA / "embeddings_sample.txt"),
        "--lemma-lexicon", str(DATA / "lemmas.tsv"),
        "--sentiment-pos", str(DATA / "sentiment_positive.txt"),
        "--sentiment-neg", str(DATA / "sentiment_negative.txt"),
    )
    model = Model.load(model_path)
    assert model.hp.pretrained_dim == 16
    assert "pre_emb" in model.params
    assert "pre_emb" not in model.trainable  # frozen by default
    out_path = tmp_path / "parsed.conllx"
    code = main(["parse", "--model", str(model_path), "--input",
                 str(train_file), "--output", str(out_path),
                 "--embeddings", str(DATA / "embeddings_sample.txt")])
    assert code == EXIT_OK


def test_tune_pretrained_flag(tmp_path, train_file):
    model_path = _train(
        tmp_path, train_file, "--tune-pretrained",
        "--embeddings", str(DATA / "embeddings_sample.txt"),
    )
    model = Model.load(model_path)
    assert "pre_emb" in model.trainable


def test_inputs_never_mutated(tmp_path, train_file):
    before = train_file.read_bytes()
    _train(tmp_path, train_file)
    model_path = tmp_path / "model.bin"
    main(["parse", "--model", str(model_path), "--input", str(train_file),
          "--output", str(tmp_path / "out.conllx")])
    assert train_file.read_bytes() == before


def test_two_system_coordination_analysis_workflow(tmp_path, capsys):
    """Full analysis loop through the CLI: train a featured and a plain
    model on coordination data, parse held-out sentences with both, then
    diff the conj attachments and check the features concentrate on the
    featured-only side."""
    from synth import coordination_corpus

    sentences, lexicon = coordination_corpus(108)
    train = tmp_path / "train.conllx"
    test = tmp_path / "test.conllx"
    train.write_bytes(write_conll(sentences[:84]))
    test.write_bytes(write_conll(sentences[84:]))
    lemmas = tmp_path / "lemmas.tsv"
    lemmas.write_text(
        "\n".join("\t".join(entry) for entry in lexicon.items()) + "\n",
        encoding="utf-8",
    )
    hypers = ["--hyper", "word_dim=24", "--hyper", "pos_dim=8",
              "--hyper", "lstm_layers=1", "--hyper", "lstm_dim=24",
              "--hyper", "mlp_dim=32", "--hyper", "conj_mlp_dim=16"]
    outputs = {}
    for name, extra in (("featured", []), ("plain", ["--no-conj-features"])):
        model_path = tmp_path / f"{name}.bin"
        assert main(["train", "--train", str(train), "--model",
                     str(model_path), "--seed", "1", "--epochs", "10",
                     "--lemma-lexicon", str(lemmas), *hypers, *extra]) == EXIT_OK
        out = tmp_path / f"{name}.out.conllx"
        assert main(["parse", "--model", str(model_path), "--input", str(test),
                     "--output", str(out), "--lemma-lexicon", str(lemmas)]
                    ) == EXIT_OK
        outputs[name] = out
    capsys.readouterr()
    assert main(["evaluate", "--gold", str(test),
                 "--pred", str(outputs["featured"]),
                 "--pred-b", str(outputs["plain"]),
                 "--lemma-lexicon", str(lemmas)]) == EXIT_OK
    report = capsys.readouterr().out
    gold = read_conll(test)
    featured_pred = read_conll(outputs["featured"], require_tree=False)
    plain_pred = read_conll(outputs["plain"], require_tree=False)
    resources = FeatureResources(lemmas=lexicon)
    from conjparse.evaluation import conj_diff

    diff = conj_diff(gold, featured_pred, plain_pred, resources)
    assert len(diff.only_a) > len(diff.only_b)
    assert diff.prevalence_a["any_feature"] >= 50.0
    assert "only_a" in report
