"""Compiled vs numpy kernels on the chain-closure BFS and the pair scan.

    python3 benchmarks/bench_kernels.py            # default cases
    python3 benchmarks/bench_kernels.py --repeat 5 --cases M11:3 M22:3

Both backends must return identical results; the script checks that before
reporting times.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from endotrivial import kernels
from endotrivial.catalog import load_catalog
from endotrivial.kgroup import KComputation, bfs_inputs
from endotrivial.weakhom import WeakContext, quotient_characters, weak_extension


def bfs_case(name: str, p: int):
    G = load_catalog(name)
    comp = KComputation(G, p)
    inputs = bfs_inputs(comp)
    tables = kernels.RankTables.from_group(G)
    in_n = np.zeros(G.order(), dtype=np.uint8)
    for g in comp.N.elements():
        in_n[G.rank(g)] = 1

    def run(backend):
        return kernels.chain_bfs(
            tables, inputs.offsets, inputs.moves, inputs.xperm, inputs.xconj, in_n, inputs.starts,
            comp.caps.bfs_states, backend=backend,
        )

    return run


def pair_case(name: str, p: int):
    G = load_catalog(name)
    comp = KComputation(G, p)
    K, _ = comp.chain_closure()
    ctx = WeakContext(G, p, S=comp.S, N=comp.N)
    chars = quotient_characters(ctx, K)
    table = chars.tables[-1]
    rho = weak_extension(G, ctx.S, p, lambda z: table[G.rank(z)], chars.modulus, ctx=ctx)
    masks = ctx.masks
    words = (len(ctx.s_elems) + 63) // 64
    arr = np.zeros((len(masks), words), dtype=np.uint64)
    for r, mask in enumerate(masks):
        for w in range(words):
            arr[r, w] = (mask >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    elems = np.array(ctx.elements, dtype=np.int32)
    tables = kernels.RankTables.from_group(G)

    def run(backend):
        return kernels.pair_check(
            tables, elems, arr, ctx.ident_bit // 64, ctx.ident_bit % 64, rho.values, rho.modulus, backend=backend
        )

    return run


def timed(fn, repeat: int) -> tuple[float, object]:
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def same(a, b) -> bool:
    if isinstance(a, tuple) and a and isinstance(a[0], np.ndarray):
        return np.array_equal(a[0], b[0]) and a[1:] == b[1:]
    return a == b


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--cases", nargs="*", default=["M11:2", "M22:3", "J2:5", "M12:3"], help="BFS cases NAME:P")
    ap.add_argument("--pairs", nargs="*", default=["A5:2", "M11:3"], help="pair-scan cases NAME:P")
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'kernel':10s} {'case':8s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup")
    for kind, cases, make in (("chain_bfs", args.cases, bfs_case), ("pair_check", args.pairs, pair_case)):
        for case in cases:
            name, p = case.rsplit(":", 1)
            run = make(name, int(p))
            results = {b: timed(lambda b=b: run(b), args.repeat) for b in backends}
            outs = [r[1] for r in results.values()]
            if not all(same(outs[0], o) for o in outs[1:]):
                raise SystemExit(f"{kind} {case}: backends disagree")
            cols = " ".join(f"{results[b][0] * 1000:8.1f}ms" for b in backends)
            speed = ""
            if "cython" in results:
                speed = f"{results['numpy'][0] / results['cython'][0]:8.1f}x"
            print(f"{kind:10s} {case:8s} {cols} {speed}", flush=True)


if __name__ == "__main__":
    main()
