import numpy as np
import pytest

from conftest import make_sentence, random_projective_sentence
from conjparse.transitions import (
    LEFT,
    RIGHT,
    SHIFT,
    IllegalTransitionError,
    OracleError,
    ParseConfiguration,
    Transition,
    TransitionCodec,
    apply,
    initial_config,
    is_terminal,
    legal_mask,
    legal_transitions,
    oracle_sequence,
    static_oracle,
)

LABELS = ("dobj", "nsubj", "root")


def test_initial_config_shapes():
    assert initial_config(3) == ParseConfiguration((0,), (1, 2, 3))
    zero = initial_config(0)
    assert is_terminal(zero)
    assert initial_config(1).buffer == (1,)


def test_legal_initial_only_shift():
    config = initial_config(2)
    assert legal_transitions(config, LABELS) == {Transition(SHIFT)}


def test_legal_empty_buffer_only_right():
    config = ParseConfiguration(stack=(0, 1, 2), buffer=())
    expected = {Transition(RIGHT, l) for l in LABELS}
    assert legal_transitions(config, LABELS) == expected


def test_legal_terminal_empty():
    config = ParseConfiguration(stack=(0,), buffer=())
    assert legal_transitions(config, LABELS) == set()


def test_single_root_restriction():
    # With material left in the buffer, the root arc must wait.
    config = ParseConfiguration(stack=(0, 2), buffer=(3,))
    plain = legal_transitions(config, LABELS)
    restricted = legal_transitions(config, LABELS, single_root=True)
    assert any(t.kind == RIGHT for t in plain)
    assert not any(t.kind == RIGHT for t in restricted)
    # Once the buffer is empty the single root arc is the only way out.
    final = ParseConfiguration(stack=(0, 2), buffer=())
    assert any(t.kind == RIGHT
               for t in legal_transitions(final, LABELS, single_root=True))


def test_legal_mask_matches_set():
    codec = TransitionCodec(LABELS)
    rng = np.random.default_rng(0)
    for _ in range(50):
        sent = random_projective_sentence(rng, int(rng.integers(1, 7)))
        config = initial_config(len(sent))
        while not is_terminal(config):
            for single_root in (False, True):
                mask = legal_mask(config, codec, single_root=single_root)
                from_set = {
                    codec.encode(t)
                    for t in legal_transitions(config, LABELS, single_root)
                }
                assert set(np.flatnonzero(mask)) == from_set
            legal = sorted(np.flatnonzero(legal_mask(config, codec)))
            config = apply(config, codec.decode(int(rng.choice(legal))))


def test_apply_left():
    config = ParseConfiguration(stack=(0, 1), buffer=(2, 3))
    result = apply(config, Transition(LEFT, "nsubj"))
    assert result.arcs == ((2, 1, "nsubj"),)
    assert result.stack == (0,)
    assert result.buffer == (2, 3)


def test_apply_right():
    config = ParseConfiguration(stack=(0, 2, 3), buffer=())
    result = apply(config, Transition(RIGHT, "dobj"))
    assert result.arcs == ((2, 3, "dobj"),)
    assert result.stack == (0, 2)


def test_apply_shift():
    config = ParseConfiguration(stack=(0,), buffer=(1,))
    result = apply(config, Transition(SHIFT))
    assert result.stack == (0, 1)
    assert result.buffer == ()


def test_apply_illegal_names_transition():
    config = ParseConfiguration(stack=(0,), buffer=())
    with pytest.raises(IllegalTransitionError, match="shift"):
        apply(config, Transition(SHIFT))
    with pytest.raises(IllegalTransitionError, match="left"):
        apply(initial_config(2), Transition(LEFT, "dobj"))


def test_is_terminal_cases():
    assert is_terminal(ParseConfiguration((0,), ()))
    assert not is_terminal(ParseConfiguration((0, 3), ()))
    assert not is_terminal(ParseConfiguration((0,), (5,)))


def test_codec_enumeration():
    codec = TransitionCodec(LABELS)
    assert codec.size == 2 * len(LABELS) + 1
    seen = {codec.encode(t) for t in codec.all_transitions()}
    assert seen == set(range(codec.size))
    assert codec.decode(0) == Transition(SHIFT)
    assert codec.right_index("nsubj") == 1 + len(LABELS) + LABELS.index("nsubj")
    assert codec.right_index("missing") is None


def test_transition_validation():
    with pytest.raises(ValueError):
        Transition(SHIFT, "x")
    with pytest.raises(ValueError):
        Transition(LEFT)


def test_oracle_he_eats_apples():
    sent = make_sentence([2, 0, 2], labels=["nsubj", "root", "dobj"])
    assert [str(t) for t in oracle_sequence(sent)] == [
        "shift", "left(nsubj)", "shift", "shift", "right(dobj)", "right(root)",
    ]


def test_oracle_single_token():
    sent = make_sentence([0], labels=["root"])
    assert [str(t) for t in oracle_sequence(sent)] == ["shift", "right(root)"]


def test_oracle_rejects_non_projective():
    sent = make_sentence([3, 4, 0, 3])
    with pytest.raises(OracleError):
        static_oracle(initial_config(len(sent)), sent)


def test_oracle_roundtrip_on_random_projective_trees():
    rng = np.random.default_rng(13)
    for _ in range(300):
        sent = random_projective_sentence(rng, int(rng.integers(1, 11)))
        config = initial_config(len(sent))
        steps = 0
        for transition in oracle_sequence(sent):
            config = apply(config, transition)
            steps += 1
        assert is_terminal(config)
        assert steps == 2 * len(sent)
        derived = {(t.gold_head, t.id, t.gold_label) for t in sent}
        assert set(config.arcs) == derived


def test_single_head_invariant_under_random_walks():
    codec = TransitionCodec(LABELS)
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        config = initial_config(n)
        while not is_terminal(config):
            legal = np.flatnonzero(legal_mask(config, codec))
            config = apply(config, codec.decode(int(rng.choice(legal))))
            dependents = [dep for _, dep, _ in config.arcs]
            assert len(dependents) == len(set(dependents))
            on_stack = set(config.stack) - {0}
            in_buffer = set(config.buffer)
            attached = set(dependents)
            assert not (on_stack & in_buffer)
            assert not (on_stack & attached)
            assert not (in_buffer & attached)
            assert on_stack | in_buffer | attached == set(range(1, n + 1))
