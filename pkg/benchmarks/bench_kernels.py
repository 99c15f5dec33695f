"""Compare the numba and pure-numpy LSTM kernels.

Times a forward+backward pass over sequences shaped like the char encoder
(short, narrow) and the sentence encoder (longer, wider), then one training
epoch of a small tagger with each backend.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from morphtag.neural import kernels
from morphtag.synthetic import lexicon_benchmark
from morphtag.tagger import ModelConfig, build_model, train
from morphtag.corpus import build_vocabulary

SHAPES = [  # (label, T, D, H)
    ("char encoder", 8, 20, 20),
    ("sentence encoder", 25, 229, 64),
    ("long sentence", 80, 229, 64),
]


def time_kernel(k, T, D, H, repeat, rng):
    X = rng.standard_normal((T, D))
    W = rng.standard_normal((4 * H, D)) * 0.1
    U = rng.standard_normal((4 * H, H)) * 0.1
    b = np.zeros(4 * H)
    h0 = np.zeros(H)
    c0 = np.zeros(H)
    dhs = rng.standard_normal((T, H))
    dW, dU, db = np.zeros_like(W), np.zeros_like(U), np.zeros_like(b)
    hs, cs, acts = k.lstm_forward(X, W, U, b, h0, c0)  # warm-up / jit compile
    k.lstm_backward(X, W, U, acts, hs, cs, h0, c0, dhs, dW, dU, db)
    start = time.perf_counter()
    for _ in range(repeat):
        hs, cs, acts = k.lstm_forward(X, W, U, b, h0, c0)
        k.lstm_backward(X, W, U, acts, hs, cs, h0, c0, dhs, dW, dU, db)
    return (time.perf_counter() - start) / repeat


def time_epoch(k, bench):
    saved = kernels.active
    kernels.active = k
    try:
        cfg = ModelConfig(word_dim=32, char_dim=16, char_hidden=16, sentence_hidden=32, ff_hidden=32,
                          mode="dmii", epochs=1)
        model = build_model(cfg, build_vocabulary(bench.train), bench.fine, lexicon=bench.lexicon)
        train(model, bench.train.sentences[:10], epochs=1)  # warm-up
        start = time.perf_counter()
        train(model, bench.train, epochs=1)
        return time.perf_counter() - start
    finally:
        kernels.active = saved


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=200)
    args = ap.parse_args(argv)
    backends = [kernels.numpy_kernels]
    if kernels.numba_kernels is not None:
        backends.append(kernels.numba_kernels)
    else:
        print("numba not importable; timing numpy only")
    rng = np.random.default_rng(0)
    print(f"{'shape':<18}{'T':>4}{'D':>5}{'H':>4}" + "".join(f"{k.name + ' ms':>12}" for k in backends)
          + ("     speedup" if len(backends) == 2 else ""))
    for label, T, D, H in SHAPES:
        times = [time_kernel(k, T, D, H, args.repeat, rng) for k in backends]
        row = f"{label:<18}{T:>4}{D:>5}{H:>4}" + "".join(f"{1e3 * t:>12.3f}" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)
    bench = lexicon_benchmark(0)
    times = [time_epoch(k, bench) for k in backends]
    row = f"{'train epoch':<31}" + "".join(f"{1e3 * t:>12.1f}" for t in times)
    if len(times) == 2:
        row += f"{times[0] / times[1]:>11.1f}x"
    print(row)


if __name__ == "__main__":
    main()
