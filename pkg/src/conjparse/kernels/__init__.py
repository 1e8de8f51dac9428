"""LSTM cell kernels with a compiled core and a pure-numpy fallback.

The compiled extension (``_lstm_ops``, Cython) is preferred when it built
successfully; otherwise the numpy implementation in ``lstm_py`` is used.
Set the environment variable ``CONJPARSE_PURE_PYTHON=1`` to force the
fallback, e.g. to compare the two in the kernel benchmark.

Both backends expose the same two functions:

``cell_forward(preact, c_prev, h_out, c_out, cache_out)``
``cell_backward(dh, dc, cache, c_prev, dpreact_out, dc_prev_out)``
"""

from __future__ import annotations

import os

from . import lstm_py


def _select():
    if os.environ.get("CONJPARSE_PURE_PYTHON"):
        return lstm_py
    try:
        from . import _lstm_ops
        return _lstm_ops
    except ImportError:
        return lstm_py


_active = _select()

BACKEND = _active.BACKEND_NAME
cell_forward = _active.cell_forward
cell_backward = _active.cell_backward


def available_backends():
    """Name -> module for every importable backend on this machine."""
    backends = {"python": lstm_py}
    try:
        from . import _lstm_ops
        backends["cython"] = _lstm_ops
    except ImportError:
        pass
    return backends
