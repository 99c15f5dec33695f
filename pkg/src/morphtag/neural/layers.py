"""Differentiable building blocks with hand-written reverse passes.

Each ``*_forward`` returns its output together with a cache; the matching
``*_backward`` consumes the cache and an upstream gradient, accumulates
parameter gradients into caller-owned arrays and returns the gradient with
respect to its input.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadClassIndex, DimensionMismatch, EmptySequence, NonFiniteValue
from . import kernels


def _kern():
    return kernels.active


def check_finite(arr, what="value", exc=NonFiniteValue):
    if not np.all(np.isfinite(arr)):
        raise exc(f"non-finite {what}")


def glorot(rng: np.random.Generator, shape, dtype=np.float64) -> np.ndarray:
    fan_out, fan_in = shape[0], shape[1]
    r = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-r, r, size=shape).astype(dtype)


@dataclass
class LstmCellParams:
    W: np.ndarray  # (4H, D) input -> gates
    U: np.ndarray  # (4H, H) hidden -> gates
    b: np.ndarray  # (4H,)

    @property
    def input_size(self) -> int:
        return self.W.shape[1]

    @property
    def hidden_size(self) -> int:
        return self.U.shape[1]

    def validate(self):
        G, H = self.U.shape
        if G != 4 * H or self.W.shape[0] != G or self.b.shape != (G,):
            raise DimensionMismatch(
                f"inconsistent LSTM shapes W{self.W.shape} U{self.U.shape} b{self.b.shape}")

    @classmethod
    def init(cls, rng, input_size, hidden_size, dtype=np.float64, forget_bias=1.0):
        G = 4 * hidden_size
        b = np.zeros(G, dtype=dtype)
        b[hidden_size:2 * hidden_size] = forget_bias
        return cls(glorot(rng, (G, input_size), dtype), glorot(rng, (G, hidden_size), dtype), b)

    @classmethod
    def zeros_like(cls, other: "LstmCellParams") -> "LstmCellParams":
        return cls(np.zeros_like(other.W), np.zeros_like(other.U), np.zeros_like(other.b))


@dataclass
class BiEncoderParams:
    forward: LstmCellParams
    backward: LstmCellParams

    @property
    def input_size(self):
        return self.forward.input_size

    @property
    def hidden_size(self):
        return self.forward.hidden_size

    def validate(self):
        self.forward.validate()
        self.backward.validate()
        if (self.forward.input_size, self.forward.hidden_size) != \
                (self.backward.input_size, self.backward.hidden_size):
            raise DimensionMismatch("forward and backward LSTMs differ in size")

    @classmethod
    def init(cls, rng, input_size, hidden_size, dtype=np.float64):
        return cls(LstmCellParams.init(rng, input_size, hidden_size, dtype),
                   LstmCellParams.init(rng, input_size, hidden_size, dtype))


def lstm_step(params: LstmCellParams, x, state):
    """One gated update: returns the new (hidden, cell) pair."""
    h, c = state
    x = np.asarray(x)
    params.validate()
    if x.shape != (params.input_size,) or np.shape(h) != (params.hidden_size,) \
            or np.shape(c) != (params.hidden_size,):
        raise DimensionMismatch(
            f"lstm_step: input {x.shape}, state {np.shape(h)}/{np.shape(c)} for "
            f"D={params.input_size}, H={params.hidden_size}")
    dtype = params.W.dtype
    hs, cs, _ = _kern().lstm_forward(x.astype(dtype)[None, :], params.W, params.U, params.b,
                                     np.asarray(h, dtype), np.asarray(c, dtype))
    check_finite(hs, "LSTM hidden state")
    check_finite(cs, "LSTM cell state")
    return hs[0], cs[0]


def lstm_forward(params: LstmCellParams, X: np.ndarray):
    """Run the cell over X (T, D) from a zero state; returns hs (T, H) and a cache."""
    H = params.hidden_size
    h0 = np.zeros(H, dtype=X.dtype)
    hs, cs, acts = _kern().lstm_forward(X, params.W, params.U, params.b, h0, h0)
    return hs, (X, hs, cs, acts)


def lstm_backward(params: LstmCellParams, cache, dhs: np.ndarray, grads: LstmCellParams):
    X, hs, cs, acts = cache
    h0 = np.zeros(params.hidden_size, dtype=X.dtype)
    return _kern().lstm_backward(X, params.W, params.U, acts, hs, cs, h0, h0,
                                 np.ascontiguousarray(dhs), grads.W, grads.U, grads.b)


def bi_encode_forward(params: BiEncoderParams, inputs: np.ndarray):
    """Bidirectional encoding of (T, D) inputs into (T, 2H).

    Row t is the forward hidden state at t followed by the backward hidden
    state at t (the backward cell reads the reversed sequence).
    """
    X = np.ascontiguousarray(inputs)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptySequence("bi_encode needs a non-empty (T, D) sequence")
    if X.shape[1] != params.input_size:
        raise DimensionMismatch(f"input width {X.shape[1]} != {params.input_size}")
    hf, cache_f = lstm_forward(params.forward, X)
    hb, cache_b = lstm_forward(params.backward, np.ascontiguousarray(X[::-1]))
    out = np.concatenate([hf, hb[::-1]], axis=1)
    return out, (cache_f, cache_b)


def bi_encode_backward(params: BiEncoderParams, cache, dout: np.ndarray, grads: BiEncoderParams):
    cache_f, cache_b = cache
    H = params.hidden_size
    dX = lstm_backward(params.forward, cache_f, dout[:, :H], grads.forward)
    dX_rev = lstm_backward(params.backward, cache_b, dout[::-1, H:], grads.backward)
    return dX + dX_rev[::-1]


def bi_encode(params: BiEncoderParams, inputs) -> np.ndarray:
    params.validate()
    out, _ = bi_encode_forward(params, np.asarray(inputs, dtype=params.forward.W.dtype))
    check_finite(out, "encoder output")
    return out


def bi_final_forward(params: BiEncoderParams, X: np.ndarray):
    """Summary vector: final forward hidden state followed by final backward hidden state."""
    hf, cache_f = lstm_forward(params.forward, X)
    hb, cache_b = lstm_forward(params.backward, np.ascontiguousarray(X[::-1]))
    return np.concatenate([hf[-1], hb[-1]]), (cache_f, cache_b)


def bi_final_backward(params: BiEncoderParams, cache, dsummary: np.ndarray, grads: BiEncoderParams):
    cache_f, cache_b = cache
    T = cache_f[0].shape[0]
    H = params.hidden_size
    dhs = np.zeros((T, H), dtype=dsummary.dtype)
    dhs[-1] = dsummary[:H]
    dX = lstm_backward(params.forward, cache_f, dhs, grads.forward)
    dhs = np.zeros((T, H), dtype=dsummary.dtype)
    dhs[-1] = dsummary[H:]
    dX_rev = lstm_backward(params.backward, cache_b, dhs, grads.backward)
    return dX + dX_rev[::-1]


def affine_forward(W, b, X):
    return X @ W.T + b


def affine_backward(W, X, dY, dW, db):
    dW += dY.T @ X
    db += dY.sum(axis=0)
    return dY @ W


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_xent(logits, gold):
    """Cross-entropy of softmax(logits) against gold class indices.

    Accepts a single logit vector with an integer class, or a (T, C) matrix
    with T class indices (the loss is then summed).  Returns (loss, probs).
    """
    logits = np.asarray(logits, dtype=float) if not isinstance(logits, np.ndarray) else logits
    C = logits.shape[-1]
    gold_arr = np.atleast_1d(np.asarray(gold))
    if np.any(gold_arr < 0) or np.any(gold_arr >= C):
        raise BadClassIndex(f"gold class {gold} outside [0, {C})")
    z = logits - logits.max(axis=-1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=-1, keepdims=True))
    log_p = z - log_norm
    probs = np.exp(log_p)
    if logits.ndim == 1:
        loss = -log_p[int(gold)]
    else:
        loss = -log_p[np.arange(logits.shape[0]), gold_arr].sum()
    return float(loss), probs


def softmax_xent_grad(probs: np.ndarray, gold) -> np.ndarray:
    """Gradient of the summed cross-entropy with respect to the logits."""
    d = probs.copy()
    if d.ndim == 1:
        d[int(gold)] -= 1.0
    else:
        d[np.arange(d.shape[0]), np.asarray(gold)] -= 1.0
    return d
