# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled LSTM cell kernels.

Fuses the elementwise gate math of one cell step into a single C loop,
removing the dozen temporary arrays the numpy fallback allocates per token.
Must stay numerically in lockstep with kernels/lstm_py.py.
"""

from libc.math cimport exp, tanh

BACKEND_NAME = "cython"


cdef inline double _sigmoid(double x) nogil:
    return 1.0 / (1.0 + exp(-x))


def cell_forward(double[::1] preact, double[::1] c_prev, double[::1] h_out,
                 double[::1] c_out, double[:, ::1] cache_out):
    cdef Py_ssize_t hidden = c_prev.shape[0]
    cdef Py_ssize_t j
    cdef double i, f, o, g, c, ct
    with nogil:
        for j in range(hidden):
            i = _sigmoid(preact[j])
            f = _sigmoid(preact[hidden + j])
            o = _sigmoid(preact[2 * hidden + j])
            g = tanh(preact[3 * hidden + j])
            c = f * c_prev[j] + i * g
            ct = tanh(c)
            c_out[j] = c
            h_out[j] = o * ct
            cache_out[0, j] = i
            cache_out[1, j] = f
            cache_out[2, j] = o
            cache_out[3, j] = g
            cache_out[4, j] = ct


def cell_backward(double[::1] dh, double[::1] dc, double[:, ::1] cache,
                  double[::1] c_prev, double[::1] dpreact_out,
                  double[::1] dc_prev_out):
    cdef Py_ssize_t hidden = c_prev.shape[0]
    cdef Py_ssize_t j
    cdef double i, f, o, g, ct, dct, dc_total
    with nogil:
        for j in range(hidden):
            i = cache[0, j]
            f = cache[1, j]
            o = cache[2, j]
            g = cache[3, j]
            ct = cache[4, j]
            dc_total = dc[j] + dh[j] * o * (1.0 - ct * ct)
            dpreact_out[j] = dc_total * g * i * (1.0 - i)
            dpreact_out[hidden + j] = dc_total * c_prev[j] * f * (1.0 - f)
            dpreact_out[2 * hidden + j] = dh[j] * ct * o * (1.0 - o)
            dpreact_out[3 * hidden + j] = dc_total * i * (1.0 - g * g)
            dc_prev_out[j] = dc_total * f
