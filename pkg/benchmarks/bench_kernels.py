"""Compare the compiled and numpy kernel backends on the chamber graphs.

    python benchmarks/bench_kernels.py [-q 2 3] [--repeat 3]
"""
import argparse
import time

import numpy as np

from pgkneser.constructions import FamilyParams, blowup, lineplane_family
from pgkneser.geometry import ProjectiveSpace
from pgkneser.kernels import backend
from pgkneser.kneser import build_graph, bits_from_indices


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(q: int, repeat: int):
    S = ProjectiveSpace(4, q)
    G = build_graph(S, "chambers", explicit=False)
    M = blowup(S, lineplane_family(S, FamilyParams("a")))
    mask = bits_from_indices(M, G.n)
    everything = np.arange(G.n)
    order = np.random.default_rng(0).permutation(G.n)
    cases = {
        "first_hits(M vs M)": lambda k: k.first_hits(G.table, G.idx, M, mask),
        "count_hits(all vs M)": lambda k: k.count_hits(G.table, G.idx, everything, mask),
        "or_rows(M)": lambda k: k.or_rows(G.table, G.idx, M, G.W),
        "greedy_fill": lambda k: k.greedy_fill(
            G.table, G.idx, order, np.zeros(G.W, np.uint64), ~G.valid
        ),
    }
    impls = {name: backend(name) for name in ("cython", "python")}
    print(f"PG(4,{q}): {G.n} chambers, |M| = {len(M)}")
    print(f"  {'kernel':<24}{'cython s':>10}{'python s':>10}{'speedup':>9}")
    for label, fn in cases.items():
        t = {name: best_of(lambda: fn(k), repeat) for name, k in impls.items()}
        print(f"  {label:<24}{t['cython']:>10.4f}{t['python']:>10.4f}{t['python'] / t['cython']:>8.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-q", type=int, nargs="+", default=[2, 3])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    for q in args.q:
        bench(q, args.repeat)


if __name__ == "__main__":
    main()
