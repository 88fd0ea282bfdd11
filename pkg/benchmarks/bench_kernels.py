"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N] [--json out.json]

Shapes follow what one training batch of the default generator produces:
40 sequences of about 20 tokens, width 64, vocabulary around 600.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from paracontrol import _kernels_py as py

try:
    from paracontrol import _kernels as cy
except ImportError:
    cy = None


def cases(rng):
    rows, d, vocab = 40 * 20, 64, 600
    x = rng.normal(size=(rows, d))
    att = rng.normal(size=(40 * 4 * 20, 20))
    logits = rng.normal(size=(rows, vocab))
    targets = rng.integers(0, vocab, size=rows)
    weights = np.ones(rows)
    gamma, beta = np.ones(d), np.zeros(d)
    gy = rng.normal(size=(rows, d))
    _, xhat, rstd = py.layernorm_forward(x, gamma, beta, 1e-5)
    values = np.unique(rng.normal(size=1600))
    counts = np.ones(values.size)
    hidden = rng.normal(size=(rows, 4 * d))
    return {
        "softmax (attention rows)": lambda m: m.softmax_forward(att),
        "softmax backward": lambda m: m.softmax_backward(att, att),
        "layernorm forward": lambda m: m.layernorm_forward(x, gamma, beta, 1e-5),
        "layernorm backward": lambda m: m.layernorm_backward(gy, xhat, rstd, gamma),
        "cross-entropy fwd+bwd": lambda m: m.cross_entropy_fwd_bwd(logits, targets, weights),
        "gelu forward": lambda m: m.gelu_forward(hidden),
        "k-means 1-D (1600 values, 20 bins)": lambda m: m.kmeans1d(values, counts, 20),
    }


def best_of(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


TRAIN_STEP = """
import time, numpy as np
from paracontrol.grad import Adam
from paracontrol.models import Generator, GeneratorConfig
rng = np.random.default_rng(0)
gen = Generator(GeneratorConfig(600, n_attrs=40))
src = [list(rng.integers(4, 600, size=20)) for _ in range(40)]
tgt = [list(rng.integers(4, 600, size=20)) for _ in range(40)]
l_t = rng.normal(size=(40, 40))
opt = Adam(gen.parameters(), lr=1e-3)
gen.train_step(src, tgt, l_t, opt)
t0 = time.perf_counter()
for _ in range(5):
    gen.train_step(src, tgt, l_t, opt)
print((time.perf_counter() - t0) / 5)
"""


def train_step_seconds(pure: bool) -> float:
    env = dict(os.environ, PARACONTROL_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", TRAIN_STEP], env=env, check=True, capture_output=True, text=True)
    return float(out.stdout.strip())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args()
    rows = []
    for name, fn in cases(np.random.default_rng(0)).items():
        t_py = best_of(lambda: fn(py), args.repeat)
        t_cy = best_of(lambda: fn(cy), args.repeat) if cy is not None else float("nan")
        rows.append({"kernel": name, "python_ms": t_py * 1e3, "cython_ms": t_cy * 1e3,
                     "speedup": t_py / t_cy})
    print(f"{'kernel':38s} {'numpy ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for r in rows:
        print(f"{r['kernel']:38s} {r['python_ms']:10.3f} {r['cython_ms']:10.3f} {r['speedup']:7.1f}x")
    step_py, step_cy = train_step_seconds(True), train_step_seconds(False)
    print(f"\ngenerator training step (batch 40, length 20): numpy {step_py * 1e3:.0f} ms, "
          f"compiled {step_cy * 1e3:.0f} ms ({step_py / step_cy:.2f}x)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"kernels": rows, "train_step": {"python_s": step_py, "cython_s": step_cy}}, fh, indent=1)


if __name__ == "__main__":
    main()
