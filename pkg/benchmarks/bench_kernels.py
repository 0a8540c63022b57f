"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot paths (similarity scan over a chunk matrix, correlation
over long series) plus the small primitives, checks that both backends agree
bit-for-bit on every workload, and prints a speedup table.

Usage:
    python3 benchmarks/bench_kernels.py [--rows 4000] [--dim 256] [--series 200000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import math
import random
import timeit
from array import array

from resume_screen._kernels import _pykernels

try:
    from resume_screen._kernels import _ckernels
except ImportError:
    _ckernels = None


def build_workloads(rows: int, dim: int, series_len: int, seed: int) -> dict:
    rng = random.Random(seed)
    matrix = array("f", (rng.uniform(-1.0, 1.0) for _ in range(rows * dim)))
    query = array("d", (rng.uniform(-1.0, 1.0) for _ in range(dim)))
    x = array("d", (rng.uniform(0.0, 10.0) for _ in range(series_len)))
    y = array("d", (0.7 * v + rng.uniform(-2.0, 2.0) for v in x))
    return {"matrix": matrix, "query": query, "x": x, "y": y, "dim": dim}


def make_cases(work: dict) -> list[tuple[str, int, callable]]:
    """(name, calls per timing loop, backend -> result) triples."""
    matrix, query, dim = work["matrix"], work["query"], work["dim"]
    norms = _pykernels.row_norms(matrix, dim)
    x, y = work["x"], work["y"]
    return [
        ("scan_scores", 1, lambda k: k.scan_scores(query, matrix, norms, dim)),
        ("row_norms", 1, lambda k: k.row_norms(matrix, dim)),
        ("pearson", 1, lambda k: k.pearson(x, y)),
        ("mae", 1, lambda k: k.mae(x, y)),
        ("cosine", 200, lambda k: k.cosine(query, query)),
        ("dot", 200, lambda k: k.dot(query, query)),
    ]


def check_agreement(cases) -> None:
    for name, _, run in cases:
        pure = run(_pykernels)
        compiled = run(_ckernels)
        if isinstance(pure, array):
            same = pure.tobytes() == compiled.tobytes()
        else:
            same = pure == compiled or (math.isnan(pure) and math.isnan(compiled))
        if not same:
            raise SystemExit(f"backend disagreement on {name}: {pure!r} != {compiled!r}")


def best_seconds(run, backend, calls: int, repeats: int) -> float:
    timer = timeit.Timer(lambda: run(backend))
    return min(timer.repeat(repeat=repeats, number=calls)) / calls


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=4000, help="chunk rows in the scan matrix")
    parser.add_argument("--dim", type=int, default=256, help="embedding dimension")
    parser.add_argument("--series", type=int, default=200_000, help="correlation series length")
    parser.add_argument("--repeats", type=int, default=5, help="timing repeats (best wins)")
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    if _ckernels is None:
        print("compiled backend not built; showing pure-Python timings only")

    work = build_workloads(args.rows, args.dim, args.series, args.seed)
    cases = make_cases(work)
    if _ckernels is not None:
        check_agreement(cases)
        print("agreement: all kernels bit-identical across backends")
    print(f"workloads: scan {args.rows}x{args.dim}, series length {args.series}\n")

    header = f"{'kernel':<12} {'pure (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, calls, run in cases:
        pure_s = best_seconds(run, _pykernels, calls, args.repeats)
        if _ckernels is None:
            print(f"{name:<12} {pure_s * 1e3:>12.4f} {'n/a':>14} {'n/a':>9}")
            continue
        compiled_s = best_seconds(run, _ckernels, calls, args.repeats)
        speedup = pure_s / compiled_s if compiled_s > 0 else float("inf")
        print(f"{name:<12} {pure_s * 1e3:>12.4f} {compiled_s * 1e3:>14.4f} {speedup:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
