#!/usr/bin/env python3
"""Benchmark the compiled graph kernel against the pure-Python lane.

Runs single-source and multi-source sweeps over a full-size shell
snapshot and a mid-size synthetic lattice, printing per-call times and
the speedup. The compiled lane must return bit-identical results.
"""

import time

from leoveri.constellation import STARLINK_SHELL1
from leoveri.kernels import ACTIVE_LANE, pygraph
from leoveri.topology import build_snapshot, grid_snapshot

try:
    from leoveri.kernels import _ck
except ImportError:
    _ck = None


def bench(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def run_case(name, snap, sources):
    print(f"\n== {name}: {snap.node_count} nodes, "
          f"{len(snap.edge_u)} undirected edges ==")
    args = (snap.indptr, snap.indices, snap.weights, snap.node_count)
    t_py, py_out = bench(pygraph.dijkstra_csr, *args, 0)
    print(f"python   dijkstra_csr: {t_py * 1e3:8.2f} ms")
    if _ck is not None:
        t_ck, ck_out = bench(_ck.dijkstra_csr, *args, 0)
        same = py_out == ck_out
        print(f"compiled dijkstra_csr: {t_ck * 1e3:8.2f} ms "
              f"(speedup {t_py / t_ck:5.1f}x, identical={same})")
    t_py, py_out = bench(pygraph.multi_source_csr, *args, sources)
    print(f"python   multi_source : {t_py * 1e3:8.2f} ms")
    if _ck is not None:
        t_ck, ck_out = bench(_ck.multi_source_csr, *args, sources)
        same = py_out == ck_out
        print(f"compiled multi_source: {t_ck * 1e3:8.2f} ms "
              f"(speedup {t_py / t_ck:5.1f}x, identical={same})")


def main():
    print(f"active kernel lane: {ACTIVE_LANE}")
    if _ck is None:
        print("compiled lane unavailable; showing pure-Python times only")
    snap = build_snapshot(STARLINK_SHELL1, 0.0)
    run_case("starlink shell", snap, sources=[0, 500, 1000])
    toy = grid_snapshot(30, 30)
    run_case("30x30 lattice", toy, sources=[0, 450])


if __name__ == "__main__":
    main()
