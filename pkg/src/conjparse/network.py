"""Low-level neural machinery: LSTM layers, MLPs, initialization, Adam.

Everything runs in float64 and is written as explicit forward/backward
pairs; gradients are derived analytically and verified against central
finite differences by the test suite.  The per-token gate math is delegated
to the kernel backend (compiled or pure numpy, see ``kernels``).
"""

from __future__ import annotations

from typing import Dict, List, Tuple

import numpy as np

from . import kernels


def glorot(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    bound = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-bound, bound, size=(rows, cols))


class LstmLayerCache:
    """Everything the backward pass needs for one direction of one layer."""

    __slots__ = ("inputs", "preacts", "hidden", "cells", "gates", "reverse")

    def __init__(self, inputs, preacts, hidden, cells, gates, reverse):
        self.inputs = inputs
        self.preacts = preacts
        self.hidden = hidden
        self.cells = cells
        self.gates = gates
        self.reverse = reverse


def lstm_forward(inputs: np.ndarray, w_x: np.ndarray, w_h: np.ndarray,
                 b: np.ndarray, reverse: bool = False,
                 kernel=kernels) -> Tuple[np.ndarray, LstmLayerCache]:
    """Run one LSTM direction over a (T, D) input sequence.

    Returns the (T, H) hidden states in original sequence order plus the
    cache for the backward pass.
    """
    steps = inputs.shape[0]
    hidden_size = w_h.shape[1]
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    # Input contributions for all steps at once; the recurrent term is
    # added step by step.
    preacts = inputs @ w_x.T + b
    hidden = np.zeros((steps, hidden_size))
    cells = np.zeros((steps, hidden_size))
    gates = np.zeros((steps, 5, hidden_size))
    h_prev = np.zeros(hidden_size)
    c_prev = np.zeros(hidden_size)
    for t in order:
        preacts[t] += w_h @ h_prev
        kernel.cell_forward(preacts[t], c_prev, hidden[t], cells[t], gates[t])
        h_prev = hidden[t]
        c_prev = cells[t]
    return hidden, LstmLayerCache(inputs, preacts, hidden, cells, gates, reverse)


def lstm_backward(d_hidden: np.ndarray, cache: LstmLayerCache, w_x: np.ndarray,
                  w_h: np.ndarray, kernel=kernels
                  ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Backpropagate through one LSTM direction.

    ``d_hidden`` holds dLoss/dh per step in sequence order.  Returns
    (d_inputs, d_w_x, d_w_h, d_b).
    """
    steps, hidden_size = d_hidden.shape
    order = range(steps) if cache.reverse else range(steps - 1, -1, -1)
    d_preacts = np.zeros((steps, 4 * hidden_size))
    dc_next = np.zeros(hidden_size)
    dh_rec = np.zeros(hidden_size)
    dc_prev = np.zeros(hidden_size)
    first = steps - 1 if cache.reverse else 0
    for t in order:
        dh_total = d_hidden[t] + dh_rec
        if t == first:
            c_prev = np.zeros(hidden_size)
        else:
            c_prev = cache.cells[t + 1 if cache.reverse else t - 1]
        kernel.cell_backward(dh_total, dc_next, cache.gates[t], c_prev,
                             d_preacts[t], dc_prev)
        dc_next = dc_prev.copy()
        dh_rec = w_h.T @ d_preacts[t]
    d_w_x = d_preacts.T @ cache.inputs
    d_b = d_preacts.sum(axis=0)
    d_w_h = np.zeros_like(w_h)
    for t in order:
        if t == first:
            continue
        h_prev = cache.hidden[t + 1 if cache.reverse else t - 1]
        d_w_h += np.outer(d_preacts[t], h_prev)
    d_inputs = d_preacts @ w_x
    return d_inputs, d_w_x, d_w_h, d_b


def bilstm_forward(inputs: np.ndarray, params: Dict[str, np.ndarray],
                   n_layers: int, kernel=kernels
                   ) -> Tuple[np.ndarray, List[Tuple[LstmLayerCache, LstmLayerCache]]]:
    """Stacked bidirectional LSTM; output is (T, 2H) per layer top."""
    caches = []
    current = inputs
    for layer in range(n_layers):
        fwd, fwd_cache = lstm_forward(
            current,
            params[f"lstm.{layer}.fwd.w_x"],
            params[f"lstm.{layer}.fwd.w_h"],
            params[f"lstm.{layer}.fwd.b"],
            reverse=False,
            kernel=kernel,
        )
        bwd, bwd_cache = lstm_forward(
            current,
            params[f"lstm.{layer}.bwd.w_x"],
            params[f"lstm.{layer}.bwd.w_h"],
            params[f"lstm.{layer}.bwd.b"],
            reverse=True,
            kernel=kernel,
        )
        current = np.concatenate([fwd, bwd], axis=1)
        caches.append((fwd_cache, bwd_cache))
    return current, caches


def bilstm_backward(d_output: np.ndarray, caches, params: Dict[str, np.ndarray],
                    grads: Dict[str, np.ndarray], n_layers: int,
                    kernel=kernels) -> np.ndarray:
    """Backward through the stacked BiLSTM, accumulating into ``grads``."""
    hidden_size = d_output.shape[1] // 2
    d_current = d_output
    for layer in range(n_layers - 1, -1, -1):
        fwd_cache, bwd_cache = caches[layer]
        d_fwd = d_current[:, :hidden_size]
        d_bwd = d_current[:, hidden_size:]
        d_in_f, d_wx_f, d_wh_f, d_b_f = lstm_backward(
            d_fwd, fwd_cache,
            params[f"lstm.{layer}.fwd.w_x"], params[f"lstm.{layer}.fwd.w_h"],
            kernel=kernel,
        )
        d_in_b, d_wx_b, d_wh_b, d_b_b = lstm_backward(
            d_bwd, bwd_cache,
            params[f"lstm.{layer}.bwd.w_x"], params[f"lstm.{layer}.bwd.w_h"],
            kernel=kernel,
        )
        grads[f"lstm.{layer}.fwd.w_x"] += d_wx_f
        grads[f"lstm.{layer}.fwd.w_h"] += d_wh_f
        grads[f"lstm.{layer}.fwd.b"] += d_b_f
        grads[f"lstm.{layer}.bwd.w_x"] += d_wx_b
        grads[f"lstm.{layer}.bwd.w_h"] += d_wh_b
        grads[f"lstm.{layer}.bwd.b"] += d_b_b
        d_current = d_in_f + d_in_b
    return d_current


def mlp_forward(x: np.ndarray, w1: np.ndarray, b1: np.ndarray,
                w2: np.ndarray, b2: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One tanh hidden layer; returns (output, hidden) for the backward pass."""
    hidden = np.tanh(w1 @ x + b1)
    return w2 @ hidden + b2, hidden


def mlp_backward(d_out: np.ndarray, x: np.ndarray, hidden: np.ndarray,
                 w1: np.ndarray, w2: np.ndarray
                 ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Returns (d_x, d_w1, d_b1, d_w2, d_b2)."""
    d_w2 = np.outer(d_out, hidden)
    d_b2 = d_out.copy()
    d_hidden = w2.T @ d_out
    d_pre = d_hidden * (1.0 - hidden * hidden)
    d_w1 = np.outer(d_pre, x)
    d_b1 = d_pre
    d_x = w1.T @ d_pre
    return d_x, d_w1, d_b1, d_w2, d_b2


class Adam:
    """Deterministic Adam over a fixed, ordered set of parameter keys."""

    def __init__(self, params: Dict[str, np.ndarray], keys: List[str],
                 learning_rate: float = 1e-3, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.keys = list(keys)
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {k: np.zeros_like(params[k]) for k in self.keys}
        self.v = {k: np.zeros_like(params[k]) for k in self.keys}

    def step(self, grads: Dict[str, np.ndarray]) -> None:
        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for key in self.keys:
            g = grads[key]
            m = self.m[key]
            v = self.v[key]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            m_hat = m / correction1
            v_hat = v / correction2
            self.params[key] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
