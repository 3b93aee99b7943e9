"""Benchmark the numba kernels against the pure-numpy fallback.

Times each hot kernel in isolation and a short end-to-end training slice
under both backends.

Run: python benchmarks/bench_backends.py [--pairs 200] [--epochs 2]
"""

import argparse
import time

import numpy as np

from histnorm.models import ModelConfig, train
from histnorm.numerics import kernels
from histnorm.synthetic import make_identity_corpus


def time_callable(fn, *args, repeats=500):
    fn(*args)  # warm (JIT-compiles on the numba path)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats * 1e6  # us per call


def kernel_rows(backend):
    rng = np.random.default_rng(0)
    rows = {}

    x, h, c = rng.standard_normal(300), rng.standard_normal(200), rng.standard_normal(200)
    W = 0.05 * rng.standard_normal((300, 800))
    U = 0.05 * rng.standard_normal((200, 800))
    b = rng.standard_normal(800)
    rows["lstm_cell_fwd (dec-sized)"] = time_callable(backend.lstm_cell_fwd, x, h, c, W, U, b)

    h2, c2, act, tc2 = backend.lstm_cell_fwd(x, h, c, W, U, b)
    dh2, dc2 = rng.standard_normal(200), rng.standard_normal(200)
    rows["lstm_cell_bwd (dec-sized)"] = time_callable(backend.lstm_cell_bwd, c, W, U, act, tc2, dh2, dc2)

    s, enc, A = rng.standard_normal(200), rng.standard_normal((10, 200)), rng.standard_normal((200, 200))
    rows["attend_fwd"] = time_callable(backend.attend_fwd, s, enc, A)
    w, ctx, sA = backend.attend_fwd(s, enc, A)
    dw, dctx = rng.standard_normal(10), rng.standard_normal(200)
    rows["attend_bwd"] = time_callable(backend.attend_bwd, enc, A, w, sA, dw, dctx)

    logits = rng.standard_normal(40)
    rows["xent_fwd"] = time_callable(backend.xent_fwd, logits, 3, repeats=5000)

    n = 600_000
    p, g, m, v = rng.standard_normal(n), rng.standard_normal(n), np.zeros(n), np.zeros(n)
    rows["adam_step (600k params)"] = time_callable(
        backend.adam_step, p, g, m, v, 1e-3, 0.9, 0.999, 1e-8, 0.1, 0.01, 1.0, repeats=50
    )
    return rows


def end_to_end_seconds(n_pairs, epochs):
    data, _ = make_identity_corpus(n_pairs, 10, seed=3)
    config = ModelConfig(kind="hard", epochs=epochs, seed=1, emb_dim=32, enc_dim=48, dec_dim=96)
    train(config, data)  # warm JIT/caches outside the timed region
    t0 = time.perf_counter()
    train(config, data)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=200)
    parser.add_argument("--epochs", type=int, default=2)
    args = parser.parse_args()

    names = kernels.available_backends()
    print(f"available backends: {', '.join(names)}")
    results = {}
    for name in names:
        kernels.use_backend(name)
        results[name] = kernel_rows(kernels.active)
    width = max(len(k) for k in next(iter(results.values())))
    header = f"{'kernel'.ljust(width)}  " + "  ".join(f"{n:>12}" for n in names)
    print(header)
    print("-" * len(header))
    for key in next(iter(results.values())):
        cells = "  ".join(f"{results[n][key]:>9.1f} us" for n in names)
        print(f"{key.ljust(width)}  {cells}")
    if len(names) == 2:
        print()
        for key in next(iter(results.values())):
            speedup = results[names[1]][key] / results[names[0]][key]
            print(f"{key.ljust(width)}  {names[0]} speedup {speedup:5.1f}x")

    print()
    for name in names:
        kernels.use_backend(name)
        seconds = end_to_end_seconds(args.pairs, args.epochs)
        per_seq = seconds / (args.pairs * args.epochs) * 1000
        print(f"end-to-end hard training [{name}]: {seconds:.2f}s ({per_seq:.2f} ms/pair)")


if __name__ == "__main__":
    main()
