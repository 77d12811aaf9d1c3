"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_backends.py [--replicas N] [--repeat R]

Each workload runs once to warm up (this also triggers JIT compilation)
and then ``--repeat`` times; the best wall time is reported.
"""
import argparse
import math
import time

import numpy as np

from stickycut import DiffusionConfig, Embedding, SpeedFunction, WeightedGraph
from stickycut.kernels import load
from stickycut.numerics import RngStream
from stickycut.sdp import SDP_INIT_STREAM


def workloads(replicas):
    cfg = DiffusionConfig()
    emb = Embedding.pair(0.5)
    kind, alpha, ts, tv = SpeedFunction.xi().kernel_args()
    disc = np.exp(-0.5 * cfg.times[:-1])
    no_ck = np.empty(0, dtype=np.int64)
    sqrt_h = math.sqrt(cfg.step_h)
    g = WeightedGraph.random(20, 0.5, 1)
    ei, ej, ew = g.arrays()
    W = g.dense()
    V0 = RngStream(0, SDP_INIT_STREAM).normals(20 * 7).reshape(20, 7)
    V0 /= np.linalg.norm(V0, axis=1, keepdims=True)

    def sticky(k):
        k.sticky_batch(emb.vectors, kind, alpha, ts, tv, np.uint64(1), np.uint64(0), sqrt_h,
                       cfg.n_steps, cfg.absorb_eps, no_ck, np.empty((replicas, 2)),
                       np.empty((replicas, 2), dtype=np.int64), np.empty((replicas, 0, 2)),
                       np.empty((replicas, 2), dtype=np.int8), np.empty((replicas, 2), dtype=bool))

    def coupled(k):
        k.coupled_batch(emb.vectors, kind, alpha, ts, tv, np.uint64(1), np.uint64(0), sqrt_h,
                        disc, cfg.absorb_eps, True, no_ck, np.zeros((replicas, 2)),
                        np.empty((replicas, 0, 2)), np.empty((replicas, 2)))

    def krivine(k):
        k.krivine_euler_batch(emb.vectors, kind, alpha, ts, tv, np.uint64(1), np.uint64(0),
                              cfg.n_steps, 1 - cfg.absorb_eps, sqrt_h / (1 - cfg.absorb_eps),
                              np.empty((replicas, 2), dtype=np.int8),
                              np.empty((replicas, 2), dtype=np.int64))

    def brute(k):
        k.brute_force(g.n, ei, ej, ew, 0, 1 << (g.n - 1))

    def sdp(k):
        k.sdp_sweeps(W, V0.copy(), 200, 0.0, np.zeros(201))

    def gauss(k):
        k.gaussians(np.uint64(3), np.uint64(4), np.uint64(0), 10**6)

    return [(f"sticky_batch  ({replicas} pairs)", sticky),
            (f"coupled_batch ({replicas} pairs)", coupled),
            (f"krivine_batch ({replicas} pairs)", krivine),
            ("brute_force   (n = 20)", brute),
            ("sdp_sweeps    (n = 20, 200 sweeps)", sdp),
            ("gaussians     (1e6 draws)", gauss)]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replicas", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = {"numba": load("numba"), "numpy": load("numpy")}
    print(f"{'workload':38s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s}")
    for name, work in workloads(args.replicas):
        t = {}
        for label, k in backends.items():
            work(k)  # warm-up / compile
            t[label] = best_of(lambda: work(k), args.repeat)
        print(f"{name:38s} {t['numba']:10.4f} {t['numpy']:10.4f} {t['numpy'] / t['numba']:8.1f}x")


if __name__ == "__main__":
    main()
