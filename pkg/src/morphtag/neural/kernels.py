"""LSTM recurrence kernels.

Two implementations of the same contract live here: explicit-loop kernels
compiled with numba, and vectorized numpy kernels.  The numba path is used
unless ``MORPHTAG_DISABLE_NUMBA`` is set to a non-empty value other than
``0`` or numba cannot be imported.  Both paths are always importable as
``numpy_kernels`` and (when available) ``numba_kernels`` so they can be
compared directly.

Gate layout of the stacked weights is ``[input, forget, output, candidate]``:
``W`` is (4H, D), ``U`` is (4H, H), ``b`` is (4H,).
"""
from __future__ import annotations

import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _sigmoid(z):
    # tanh form never overflows
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def lstm_forward_np(X, W, U, b, h0, c0):
    T = X.shape[0]
    H = U.shape[1]
    hs = np.empty((T, H), dtype=X.dtype)
    cs = np.empty((T, H), dtype=X.dtype)
    acts = np.empty((T, 4 * H), dtype=X.dtype)
    pre = X @ W.T + b
    h, c = h0, c0
    for t in range(T):
        z = pre[t] + U @ h
        ifo = _sigmoid(z[:3 * H])
        g = np.tanh(z[3 * H:])
        c = ifo[H:2 * H] * c + ifo[:H] * g
        h = ifo[2 * H:] * np.tanh(c)
        acts[t, :3 * H] = ifo
        acts[t, 3 * H:] = g
        hs[t] = h
        cs[t] = c
    return hs, cs, acts


def lstm_backward_np(X, W, U, acts, hs, cs, h0, c0, dhs, dW, dU, db):
    """Backpropagate *dhs* through the sequence.

    Accumulates into dW, dU, db in place and returns dX.
    """
    T = X.shape[0]
    H = U.shape[1]
    dZ = np.empty((T, 4 * H), dtype=X.dtype)
    dh_next = np.zeros(H, dtype=X.dtype)
    dc_next = np.zeros(H, dtype=X.dtype)
    for t in range(T - 1, -1, -1):
        i, f, o, g = acts[t, :H], acts[t, H:2 * H], acts[t, 2 * H:3 * H], acts[t, 3 * H:]
        tc = np.tanh(cs[t])
        c_prev = cs[t - 1] if t > 0 else c0
        dh = dhs[t] + dh_next
        dc = dc_next + dh * o * (1.0 - tc * tc)
        dz = dZ[t]
        dz[:H] = dc * g * i * (1.0 - i)
        dz[H:2 * H] = dc * c_prev * f * (1.0 - f)
        dz[2 * H:3 * H] = dh * tc * o * (1.0 - o)
        dz[3 * H:] = dc * i * (1.0 - g * g)
        dc_next = dc * f
        dh_next = U.T @ dz
    H_prev = np.empty_like(hs)
    H_prev[0] = h0
    H_prev[1:] = hs[:-1]
    dW += dZ.T @ X
    dU += dZ.T @ H_prev
    db += dZ.sum(axis=0)
    return dZ @ W


numpy_kernels = SimpleNamespace(name="numpy", lstm_forward=lstm_forward_np,
                                lstm_backward=lstm_backward_np)


def _build_numba_kernels():
    njit = numba.njit(cache=True, nogil=True)

    # the recurrences run as scalar loops; the input projection and the
    # weight gradients are whole-sequence matrix products handed to BLAS
    @njit
    def lstm_forward_nb(X, W, U, b, h0, c0):
        T = X.shape[0]
        G = W.shape[0]
        H = G // 4
        hs = np.empty((T, H), dtype=X.dtype)
        cs = np.empty((T, H), dtype=X.dtype)
        acts = np.empty((T, G), dtype=X.dtype)
        pre = np.dot(np.ascontiguousarray(X), np.ascontiguousarray(W).T)
        h = h0.copy()
        c = c0.copy()
        z = np.empty(G, dtype=X.dtype)
        for t in range(T):
            for r in range(G):
                s = pre[t, r] + b[r]
                for j in range(H):
                    s += U[r, j] * h[j]
                z[r] = s
            for j in range(H):
                ig = 0.5 * (1.0 + np.tanh(0.5 * z[j]))
                fg = 0.5 * (1.0 + np.tanh(0.5 * z[H + j]))
                og = 0.5 * (1.0 + np.tanh(0.5 * z[2 * H + j]))
                g = np.tanh(z[3 * H + j])
                cn = fg * c[j] + ig * g
                c[j] = cn
                h[j] = og * np.tanh(cn)
                acts[t, j] = ig
                acts[t, H + j] = fg
                acts[t, 2 * H + j] = og
                acts[t, 3 * H + j] = g
                hs[t, j] = h[j]
                cs[t, j] = cn
        return hs, cs, acts

    @njit
    def lstm_backward_nb(X, W, U, acts, hs, cs, h0, c0, dhs, dW, dU, db):
        T = X.shape[0]
        G = W.shape[0]
        H = G // 4
        dZ = np.empty((T, G), dtype=X.dtype)
        dh_next = np.zeros(H, dtype=X.dtype)
        dc_next = np.zeros(H, dtype=X.dtype)
        for t in range(T - 1, -1, -1):
            for j in range(H):
                i = acts[t, j]
                f = acts[t, H + j]
                o = acts[t, 2 * H + j]
                g = acts[t, 3 * H + j]
                tc = np.tanh(cs[t, j])
                c_prev = cs[t - 1, j] if t > 0 else c0[j]
                dh = dhs[t, j] + dh_next[j]
                dc = dc_next[j] + dh * o * (1.0 - tc * tc)
                dZ[t, j] = dc * g * i * (1.0 - i)
                dZ[t, H + j] = dc * c_prev * f * (1.0 - f)
                dZ[t, 2 * H + j] = dh * tc * o * (1.0 - o)
                dZ[t, 3 * H + j] = dc * i * (1.0 - g * g)
                dc_next[j] = dc * f
            for j in range(H):
                s = 0.0
                for r in range(G):
                    s += U[r, j] * dZ[t, r]
                dh_next[j] = s
        H_prev = np.empty_like(hs)
        H_prev[0] = h0
        H_prev[1:] = hs[:-1]
        dZT = np.ascontiguousarray(dZ.T)
        dW += np.dot(dZT, np.ascontiguousarray(X))
        dU += np.dot(dZT, H_prev)
        for r in range(G):
            s = 0.0
            for t in range(T):
                s += dZ[t, r]
            db[r] += s
        return np.dot(dZ, np.ascontiguousarray(W))

    return SimpleNamespace(name="numba", lstm_forward=lstm_forward_nb,
                           lstm_backward=lstm_backward_nb)


def _numba_disabled() -> bool:
    flag = os.environ.get("MORPHTAG_DISABLE_NUMBA", "")
    return flag not in ("", "0")


numba_kernels = _build_numba_kernels() if numba is not None else None
active = numpy_kernels if (numba_kernels is None or _numba_disabled()) else numba_kernels
