"""Benchmark the compiled LSTM kernels against the pure-numpy fallback.

Two views:
  * micro: one cell step (forward and backward) at several hidden sizes
  * macro: full training steps of the parser, kernel swapped per run

Run from the repository root after `pip install -e .`:

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from conjparse import kernels, network
from conjparse.model import Hyperparams, Model, Vocabulary
from conjparse.resources import FeatureResources
from conjparse.training import oracle_path, train_step
from conjparse.treebank import LabelInventory, Sentence, Token


def bench_cell(backend, hidden, repeats):
    rng = np.random.default_rng(0)
    preact = rng.normal(size=4 * hidden)
    c_prev = rng.normal(size=hidden)
    h = np.zeros(hidden)
    c = np.zeros(hidden)
    cache = np.zeros((5, hidden))
    dh = rng.normal(size=hidden)
    dc = rng.normal(size=hidden)
    dpre = np.zeros(4 * hidden)
    dcp = np.zeros(hidden)

    start = time.perf_counter()
    for _ in range(repeats):
        backend.cell_forward(preact, c_prev, h, c, cache)
    forward = (time.perf_counter() - start) / repeats

    start = time.perf_counter()
    for _ in range(repeats):
        backend.cell_backward(dh, dc, cache, c_prev, dpre, dcp)
    backward = (time.perf_counter() - start) / repeats
    return forward, backward


def synthetic_corpus(n_sentences=30, length=12):
    """Random projective sentences via a random legal transition walk."""
    from conjparse.transitions import (
        TransitionCodec, apply as apply_transition, initial_config,
        is_terminal, legal_mask,
    )

    rng = np.random.default_rng(7)
    words = [f"w{k}" for k in range(200)]
    codec = TransitionCodec(("dep", "root"))
    sentences = []
    for _ in range(n_sentences):
        config = initial_config(length)
        while not is_terminal(config):
            legal = np.flatnonzero(legal_mask(config, codec, single_root=True))
            config = apply_transition(config, codec.decode(int(rng.choice(legal))))
        heads = [0] * length
        labels = ["dep"] * length
        for head, dep, label in config.arcs:
            heads[dep - 1] = head
            labels[dep - 1] = label
        tokens = tuple(
            Token(id=i + 1, form=str(rng.choice(words)), pos="NN",
                  gold_head=heads[i], gold_label=labels[i])
            for i in range(length)
        )
        sentences.append(Sentence(tokens))
    return sentences


def _build_model(sentences, backend):
    hp = Hyperparams(word_dropout_alpha=0.0)
    vocab = Vocabulary.from_corpus(sentences)
    labels = LabelInventory.from_sentences(sentences)
    model = Model.build(hp, vocab, labels, seed=1)
    model.kernel = backend
    return model


def bench_training(backend, sentences, steps):
    model = _build_model(sentences, backend)
    resources = FeatureResources.empty()
    optimizer = network.Adam(model.params, model.trainable)
    paths = [oracle_path(s, model) for s in sentences]
    # warm-up
    train_step([sentences[0]], model, resources, optimizer, paths=[paths[0]])
    start = time.perf_counter()
    done = 0
    while done < steps:
        index = done % len(sentences)
        train_step([sentences[index]], model, resources, optimizer,
                   paths=[paths[index]])
        done += 1
    elapsed = time.perf_counter() - start
    return steps / elapsed


def bench_parsing(backend, sentences, rounds=3):
    from conjparse.parser import greedy_parse

    model = _build_model(sentences, backend)
    resources = FeatureResources.empty()
    greedy_parse(sentences[0], model, resources)  # warm-up
    start = time.perf_counter()
    for _ in range(rounds):
        for sentence in sentences:
            greedy_parse(sentence, model, resources)
    elapsed = time.perf_counter() - start
    return rounds * len(sentences) / elapsed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20000)
    parser.add_argument("--train-steps", type=int, default=60)
    args = parser.parse_args()

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)} "
          f"(active: {kernels.BACKEND})\n")

    print(f"{'hidden':>7} {'direction':>9} "
          + "".join(f"{name:>14}" for name in backends)
          + ("{:>10}".format("speedup") if len(backends) > 1 else ""))
    for hidden in (50, 125, 250):
        results = {
            name: bench_cell(module, hidden, args.repeats)
            for name, module in backends.items()
        }
        for axis, label in ((0, "forward"), (1, "backward")):
            row = f"{hidden:>7} {label:>9} "
            row += "".join(
                f"{results[name][axis] * 1e6:>12.2f}us" for name in backends
            )
            if "python" in results and "cython" in results:
                row += f"{results['python'][axis] / results['cython'][axis]:>9.1f}x"
            print(row)

    sentences = synthetic_corpus()
    print("\nfull training steps (default model size, 12-token sentences):")
    rates = {}
    for name, module in backends.items():
        rates[name] = bench_training(module, sentences, args.train_steps)
        print(f"  {name:>7}: {rates[name]:.2f} sentences/s")
    if "python" in rates and "cython" in rates:
        print(f"  end-to-end speedup: {rates['cython'] / rates['python']:.2f}x")

    print("\ngreedy parsing (no gradients, no optimizer):")
    parse_rates = {}
    for name, module in backends.items():
        parse_rates[name] = bench_parsing(module, sentences)
        print(f"  {name:>7}: {parse_rates[name]:.2f} sentences/s")
    if "python" in parse_rates and "cython" in parse_rates:
        print("  end-to-end speedup: "
              f"{parse_rates['cython'] / parse_rates['python']:.2f}x")


if __name__ == "__main__":
    main()
