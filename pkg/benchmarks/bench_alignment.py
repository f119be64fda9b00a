#!/usr/bin/env python3
"""Benchmark the alignment DP kernel: jitted loops vs the numpy fallback.

Times the raw matrix fill on synthetic word pairs at several sizes and on
the bundled recording, checks that both kernels produce identical matrices,
and prints a comparison table.

Usage:
    python3 benchmarks/bench_alignment.py [--repeats N] [--sizes 100,500,...]
"""
from __future__ import annotations

import argparse
import random
import statistics
import time

import numpy as np

from scribeloop import fixtures, textproc
from scribeloop.alignment import _encode, _fill_numpy, use_numba

try:
    from scribeloop.alignment import _fill_numba
except ImportError:  # pragma: no cover - numba genuinely unavailable
    _fill_numba = None


def synthetic_pair(rng: random.Random, n: int, error_rate: float = 0.3):
    vocab = [f"w{k}" for k in range(max(50, n // 4))]
    ref = [rng.choice(vocab) for _ in range(n)]
    hyp = []
    for word in ref:
        roll = rng.random()
        if roll < error_rate / 3:
            continue  # deletion
        if roll < 2 * error_rate / 3:
            hyp.append(rng.choice(vocab))  # substitution
        else:
            hyp.append(word)
        if rng.random() < error_rate / 3:
            hyp.append(rng.choice(vocab))  # insertion
    return ref, hyp


def time_kernel(fill, ref_ids, hyp_ids, repeats: int) -> float:
    dp = np.empty((ref_ids.shape[0] + 1, hyp_ids.shape[0] + 1), dtype=np.int32)
    fill(ref_ids, hyp_ids, dp)  # warm-up (includes any JIT compile)
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fill(ref_ids, hyp_ids, dp)
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def run(sizes: list[int], repeats: int) -> None:
    if _fill_numba is None:
        raise SystemExit("numba kernel unavailable; nothing to compare")
    if not use_numba():
        print("note: SCRIBELOOP_NO_NUMBA is set; timing both kernels anyway\n")

    rng = random.Random(42)
    rows = []

    for n in sizes:
        ref, hyp = synthetic_pair(rng, n)
        ref_ids, hyp_ids = _encode(ref, hyp)
        rows.append((f"synthetic {len(ref)}x{len(hyp)}", ref_ids, hyp_ids))

    ref_words = textproc.surfaces(fixtures.reference_text())
    hyp_words = textproc.surfaces(fixtures.asr_text())
    ref_ids, hyp_ids = _encode(ref_words, hyp_words)
    rows.append((f"recording-1 {len(ref_words)}x{len(hyp_words)}", ref_ids, hyp_ids))

    header = f"{'pair':<28}{'numba':>12}{'numpy':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for label, a, b in rows:
        shape = (a.shape[0] + 1, b.shape[0] + 1)
        out_jit = _fill_numba(a, b, np.empty(shape, dtype=np.int32))
        out_np = _fill_numpy(a, b, np.empty(shape, dtype=np.int32))
        assert np.array_equal(out_jit, out_np), f"kernels disagree on {label}"

        t_jit = time_kernel(_fill_numba, a, b, repeats)
        t_np = time_kernel(_fill_numpy, a, b, repeats)
        print(
            f"{label:<28}{t_jit * 1e3:>10.3f}ms{t_np * 1e3:>10.3f}ms"
            f"{t_np / t_jit:>9.1f}x"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=9,
                        help="timed runs per kernel (median reported)")
    parser.add_argument("--sizes", default="100,300,1000,3000",
                        help="comma-separated reference lengths")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    run(sizes, args.repeats)


if __name__ == "__main__":
    main()
