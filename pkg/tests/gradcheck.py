"""Central finite-difference oracle for model gradients (independent of backward())."""
import numpy as np

from morphtag.neural.layers import softmax_xent

EPS = 1e-5
RTOL = 1e-4
# coordinates whose analytic and numeric gradients are both below this are
# indistinguishable from zero at double precision with eps=1e-5
ATOL = 1e-9


def model_loss(model, feats, gold, hints):
    logits, _ = model.forward(feats, hints)
    return softmax_xent(logits, gold)[0]


def numeric_grad(f, arr, eps=EPS):
    """Central differences of f() wrt every coordinate of arr (mutated and restored)."""
    g = np.zeros_like(arr)
    flat = arr.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + eps
        fp = f()
        flat[i] = old - eps
        fm = f()
        flat[i] = old
        gflat[i] = (fp - fm) / (2 * eps)
    return g


def compare(analytic, numeric, rtol=RTOL, atol=ATOL):
    """Return (worst relative error, number of failing coordinates)."""
    diff = np.abs(analytic - numeric)
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    bad = (diff > rtol * scale) & (diff > atol)
    rel = np.where(scale > 0, diff / np.where(scale > 0, scale, 1), 0.0)
    rel = np.where(diff > atol, rel, 0.0)
    return float(rel.max(initial=0.0)), int(bad.sum())
