import pathlib
import sys

import numpy as np
import pytest

sys.path.insert(0, str(pathlib.Path(__file__).parent))

from conjparse.model import Hyperparams, Model, Vocabulary
from conjparse.resources import FeatureResources
from conjparse.transitions import TransitionCodec, apply, initial_config, is_terminal, legal_mask
from conjparse.treebank import LabelInventory, Sentence, Token, read_conll

REPO = pathlib.Path(__file__).resolve().parent.parent
DATA = REPO / "data"
TESTS_DATA = pathlib.Path(__file__).resolve().parent / "data"
GRADCHECK_FIXTURE = REPO / "src" / "conjparse" / "data" / "gradcheck.conllx"

_LABEL_POOL = ("root", "nsubj", "dobj", "det", "amod", "conj", "punct")
_POS_POOL = ("NN", "VBZ", "DT", "JJ", ",")
_FORM_POOL = ("alpha", "beta", "Gamma", "delta", "epsilon", "zeta", ",", "run")


def make_sentence(heads, labels=None, forms=None, pos=None) -> Sentence:
    """Sentence from parallel head/label/form/pos lists (1-based heads)."""
    n = len(heads)
    labels = labels or ["dep"] * n
    forms = forms or [f"w{i}" for i in range(1, n + 1)]
    pos = pos or ["NN"] * n
    return Sentence(tuple(
        Token(id=i + 1, form=forms[i], pos=pos[i], gold_head=heads[i],
              gold_label=labels[i])
        for i in range(n)
    ))


def random_tree_sentence(rng: np.random.Generator, n: int) -> Sentence:
    """Arbitrary (often non-projective) single-headed tree over n tokens."""
    order = list(rng.permutation(n))
    heads = [0] * n
    placed = []
    for position in order:
        if placed:
            heads[position] = int(rng.choice(placed)) + 1 if rng.random() < 0.8 else 0
        placed.append(position)
    labels = [str(rng.choice(_LABEL_POOL)) for _ in range(n)]
    forms = [str(rng.choice(_FORM_POOL)) for _ in range(n)]
    pos = [str(rng.choice(_POS_POOL)) for _ in range(n)]
    return make_sentence(heads, labels, forms, pos)


def random_projective_sentence(rng: np.random.Generator, n: int,
                               labels=("root", "nsubj", "dobj", "conj")) -> Sentence:
    """Projective single-root-child tree via a random legal transition walk."""
    codec = TransitionCodec(labels)
    config = initial_config(n)
    while not is_terminal(config):
        mask = legal_mask(config, codec, single_root=True)
        choices = np.flatnonzero(mask)
        config = apply(config, codec.decode(int(rng.choice(choices))))
    heads = [0] * n
    out_labels = ["dep"] * n
    for head, dep, label in config.arcs:
        heads[dep - 1] = head
        out_labels[dep - 1] = label
    forms = [str(rng.choice(_FORM_POOL)) for _ in range(n)]
    pos = [str(rng.choice(_POS_POOL)) for _ in range(n)]
    return make_sentence(heads, out_labels, forms, pos)


def tiny_model(sentences, seed=3, **hp_overrides) -> Model:
    defaults = dict(word_dim=5, pos_dim=3, lstm_layers=2, lstm_dim=4,
                    mlp_dim=6, conj_mlp_dim=5, word_dropout_alpha=0.0)
    defaults.update(hp_overrides)
    hp = Hyperparams(**defaults)
    vocab = Vocabulary.from_corpus(sentences)
    labels = LabelInventory.from_sentences(sentences)
    return Model.build(hp, vocab, labels, seed=seed)


@pytest.fixture(scope="session")
def sample_sentences():
    return read_conll(DATA / "sample_treebank.conllx")


@pytest.fixture(scope="session")
def gradcheck_sentences():
    return read_conll(GRADCHECK_FIXTURE)


@pytest.fixture()
def empty_resources():
    return FeatureResources.empty()
