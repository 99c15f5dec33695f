"""Plain SGD with a geometric per-epoch learning-rate decay."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NonFiniteGradient


@dataclass
class OptimizerState:
    base_rate: float = 0.13
    decay: float = 0.05
    epoch: int = 0
    clip: float | None = None  # elementwise gradient clipping, off by default

    def __post_init__(self):
        if not self.base_rate > 0:
            raise ValueError(f"base_rate must be positive, got {self.base_rate}")
        if not 0 <= self.decay < 1:
            raise ValueError(f"decay must lie in [0, 1), got {self.decay}")

    @property
    def rate(self) -> float:
        return rate_at(self.base_rate, self.decay, self.epoch)

    def next_epoch(self) -> None:
        self.epoch += 1


def rate_at(base_rate: float, decay: float, epoch: int) -> float:
    return base_rate * (1.0 - decay) ** epoch


class Gradients:
    """Gradient buffers for a named parameter set.

    Dense parameters get a zero array of the same shape.  Parameters listed in
    *sparse* (embedding tables) collect (row, vector) contributions instead, so
    a step only touches the rows a sentence used.
    """

    def __init__(self, params: dict[str, np.ndarray], sparse=()):
        self.sparse_names = frozenset(n for n in sparse if n in params)
        self.dense = {n: np.zeros_like(p) for n, p in params.items() if n not in self.sparse_names}
        self._rows = {n: [] for n in self.sparse_names}
        self._vals = {n: [] for n in self.sparse_names}
        self._shapes = {n: params[n].shape for n in self.sparse_names}

    def __getitem__(self, name):
        return self.dense[name]

    def add_rows(self, name: str, rows, values: np.ndarray) -> None:
        rows = np.atleast_1d(np.asarray(rows, dtype=np.int64))
        values = np.asarray(values).reshape(len(rows), -1)
        self._rows[name].append(rows)
        self._vals[name].append(values)

    def rows(self, name):
        """Concatenated (row ids, values) collected for a sparse parameter."""
        if not self._rows[name]:
            return np.zeros(0, dtype=np.int64), np.zeros((0, self._shapes[name][1]))
        return np.concatenate(self._rows[name]), np.concatenate(self._vals[name])

    def to_dense(self, name) -> np.ndarray:
        if name in self.dense:
            return self.dense[name]
        rows, vals = self.rows(name)
        out = np.zeros(self._shapes[name], dtype=vals.dtype if len(vals) else np.float64)
        np.add.at(out, rows, vals)
        return out

    def names(self):
        return sorted(set(self.dense) | self.sparse_names)

    def check_finite(self):
        for name in self.dense:
            if not np.all(np.isfinite(self.dense[name])):
                raise NonFiniteGradient(f"non-finite gradient for {name}")
        for name in self.sparse_names:
            for v in self._vals[name]:
                if not np.all(np.isfinite(v)):
                    raise NonFiniteGradient(f"non-finite gradient for {name}")


def sgd_step(params: dict[str, np.ndarray], grads: Gradients | dict, opt: OptimizerState):
    """theta <- theta - rate * grad, in place; returns *params*."""
    rate = opt.rate
    if isinstance(grads, dict):
        dense, sparse = grads, ()
    else:
        grads.check_finite()
        dense, sparse = grads.dense, grads.sparse_names
    for name, g in dense.items():
        p = params[name]
        if p.shape != g.shape:
            raise DimensionMismatch(f"{name}: parameter {p.shape} vs gradient {g.shape}")
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient(f"non-finite gradient for {name}")
        if opt.clip is not None:
            g = np.clip(g, -opt.clip, opt.clip)
        p -= (rate * g).astype(p.dtype, copy=False)
    for name in sparse:
        rows, vals = grads.rows(name)
        if len(rows) == 0:
            continue
        p = params[name]
        if vals.shape[1] != p.shape[1]:
            raise DimensionMismatch(f"{name}: row width {vals.shape[1]} vs {p.shape[1]}")
        if opt.clip is not None:
            vals = np.clip(vals, -opt.clip, opt.clip)
        np.subtract.at(p, rows, (rate * vals).astype(p.dtype, copy=False))
    return params
