"""Slowed-down sticky Brownian motion and discrete Krivine recursions.

All vectors of an embedding are driven by one shared Brownian path; that
coupling is what correlates their signs. Replica ``r`` of a batch reads its
increments from stream ``stream0 + r`` at counters ``k*d + j`` and its
tie-break coins from the companion stream ``stream0 + r + 2**32``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .kernels import active as _k
from .numerics import MASK64, RngStream
from .speed import SpeedFunction, is_admissible

CHUNK_ROWS = 256


@dataclass(frozen=True)
class Embedding:
    """``n`` unit vectors in R^d, stored as rows."""

    vectors: np.ndarray
    norm_tol: float = 1e-9

    def __post_init__(self):
        v = np.ascontiguousarray(np.array(self.vectors, dtype=np.float64, ndmin=2))
        if v.ndim != 2 or v.shape[0] == 0 or v.shape[1] == 0:
            raise ValueError("embedding needs a non-empty (n, d) array")
        norms = np.sqrt(np.einsum("ij,ij->i", v, v))
        bad = np.nonzero(np.abs(norms - 1.0) > self.norm_tol)[0]
        if bad.size:
            raise ValueError(f"rows {bad[:5].tolist()} are not unit vectors (norms {norms[bad[:5]]})")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    @classmethod
    def normalized(cls, vectors) -> "Embedding":
        v = np.array(vectors, dtype=np.float64, ndmin=2)
        return cls(v / np.linalg.norm(v, axis=1, keepdims=True))

    @classmethod
    def pair(cls, rho: float) -> "Embedding":
        """u = (1, 0) and v = (rho, sqrt(1 - rho^2))."""
        if not -1.0 <= rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        return cls(np.array([[1.0, 0.0], [rho, math.sqrt(max(0.0, 1.0 - rho * rho))]]))

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T


@dataclass(frozen=True)
class DiffusionConfig:
    step_h: float = 1e-3
    t_max: float = 12.0
    absorb_eps: float = 1e-6
    record_paths: bool = False

    def __post_init__(self):
        if not 0.0 < self.step_h <= self.t_max:
            raise ValueError("need 0 < step_h <= t_max")
        if not 0.0 < self.absorb_eps < 1.0:
            raise ValueError("need 0 < absorb_eps < 1")

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_max / self.step_h - 1e-9))

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.n_steps + 1) * self.step_h

    def step_of(self, t: float) -> int:
        """Index of the grid time closest to ``t``."""
        return min(self.n_steps, int(round(t / self.step_h)))


@dataclass(frozen=True)
class BrownianIncrements:
    """``steps[k]`` is the d-dimensional increment B(t_{k+1}) - B(t_k)."""

    steps: np.ndarray
    step_h: float
    master_seed: int = 0
    stream_id: int = 0

    @classmethod
    def generate(cls, d: int, cfg: DiffusionConfig, stream: RngStream) -> "BrownianIncrements":
        src = stream.copy()
        g = stream.normals(cfg.n_steps * d).reshape(cfg.n_steps, d)
        return cls(math.sqrt(cfg.step_h) * g, cfg.step_h, src.master_seed, src.stream_id)

    @classmethod
    def zeros(cls, d: int, cfg: DiffusionConfig) -> "BrownianIncrements":
        return cls(np.zeros((cfg.n_steps, d)), cfg.step_h)

    def negated(self) -> "BrownianIncrements":
        return BrownianIncrements(-self.steps, self.step_h, self.master_seed, self.stream_id)

    @property
    def d(self) -> int:
        return self.steps.shape[1]

    def fallback_stream(self) -> RngStream:
        return RngStream(self.master_seed, self.stream_id).fallback()


@dataclass
class SignAssignment:
    sigma: np.ndarray
    unabsorbed_count: int = 0
    fallback_used: Optional[np.ndarray] = None

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=np.int8)
        if not np.all(np.abs(self.sigma) == 1):
            raise ValueError("signs must be exactly -1 or +1")
        if self.fallback_used is None:
            self.fallback_used = np.zeros(self.sigma.shape, dtype=bool)

    @property
    def n(self) -> int:
        return self.sigma.shape[0]


@dataclass
class TrajectoryBatch:
    times: np.ndarray
    w: Optional[np.ndarray]
    final: np.ndarray
    absorbed_at: np.ndarray
    signs: SignAssignment
    step_h: float


@dataclass
class ReplicaRun:
    """Outcome of many independent trajectories; arrays are (replicas, n)."""

    final: np.ndarray
    absorbed_at: np.ndarray
    sigma: np.ndarray
    tie: np.ndarray
    checkpoint_times: np.ndarray
    at_checkpoints: np.ndarray
    step_h: float
    n_steps: int


def _check_speed(speed: SpeedFunction, allow_inadmissible: bool):
    if not allow_inadmissible and not is_admissible(speed):
        raise ValueError(f"speed {speed.label} fails the admissibility check")


def simulate_sticky(emb: Embedding, speed: SpeedFunction, cfg: DiffusionConfig,
                    increments: BrownianIncrements, *,
                    allow_inadmissible: bool = False) -> TrajectoryBatch:
    """Euler-Maruyama for dW = speed(W) <u, dB>, clamped to [-1, 1].

    A path entering the band |W| >= 1 - absorb_eps is frozen at +-1. Paths
    still free at the horizon take the sign of W; an exact zero is broken by
    a coin from the increments' fallback stream.
    """
    if increments.d != emb.d:
        raise ValueError(f"increments have dimension {increments.d}, embedding {emb.d}")
    if increments.steps.shape[0] != cfg.n_steps or increments.step_h != cfg.step_h:
        raise ValueError("increments were generated for a different config")
    _check_speed(speed, allow_inadmissible)
    path, final, absorbed = _k.sticky_path(
        emb.vectors, *speed.kernel_args(), np.ascontiguousarray(increments.steps),
        cfg.absorb_eps, cfg.record_paths)
    sigma = np.sign(final).astype(np.int8)
    tie = final == 0.0
    if tie.any():
        coins = increments.fallback_stream().coins(emb.n)
        sigma[tie] = coins[tie]
    signs = SignAssignment(sigma, int((absorbed < 0).sum()), tie)
    return TrajectoryBatch(cfg.times, path if cfg.record_paths else None, final,
                           absorbed, signs, cfg.step_h)


def _chunks(replicas: int):
    return [(lo, min(lo + CHUNK_ROWS, replicas)) for lo in range(0, replicas, CHUNK_ROWS)]


def run_chunked(job: Callable[[int, int], None], replicas: int, workers: int = 1):
    """Run ``job(lo, hi)`` over fixed row blocks; block layout ignores ``workers``."""
    blocks = _chunks(replicas)
    if workers <= 1 or len(blocks) == 1:
        for lo, hi in blocks:
            job(lo, hi)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(job, lo, hi) for lo, hi in blocks]:
            fut.result()


def _checkpoint_steps(cfg: DiffusionConfig, checkpoints: Sequence[float]):
    steps = np.array(sorted(cfg.step_of(t) for t in checkpoints), dtype=np.int64)
    return steps, steps * cfg.step_h


def sticky_replicas(emb: Embedding, speed: SpeedFunction, cfg: DiffusionConfig,
                    seed: int, replicas: int, *, stream0: int = 0,
                    checkpoints: Sequence[float] = (), workers: int = 1,
                    allow_inadmissible: bool = False) -> ReplicaRun:
    """Run ``replicas`` independent trajectories without storing paths.

    Replica ``r`` reproduces ``simulate_sticky`` on the increments of
    ``RngStream(seed, stream0 + r)`` exactly. A trajectory stops early once
    every vector is absorbed (absorbed values are frozen, so nothing changes).
    """
    if replicas < 1:
        raise ValueError("replicas must be positive")
    _check_speed(speed, allow_inadmissible)
    n = emb.n
    ck_steps, ck_times = _checkpoint_steps(cfg, checkpoints)
    final = np.empty((replicas, n))
    absorbed = np.empty((replicas, n), dtype=np.int64)
    at_ck = np.empty((replicas, ck_steps.shape[0], n))
    sigma = np.empty((replicas, n), dtype=np.int8)
    tie = np.empty((replicas, n), dtype=bool)
    args = speed.kernel_args()
    sqrt_h = math.sqrt(cfg.step_h)

    def job(lo, hi):
        _k.sticky_batch(emb.vectors, *args, np.uint64(seed & MASK64),
                        np.uint64((stream0 + lo) & MASK64), sqrt_h, cfg.n_steps,
                        cfg.absorb_eps, ck_steps, final[lo:hi], absorbed[lo:hi],
                        at_ck[lo:hi], sigma[lo:hi], tie[lo:hi])

    run_chunked(job, replicas, workers)
    return ReplicaRun(final, absorbed, sigma, tie, ck_times, at_ck, cfg.step_h, cfg.n_steps)


@dataclass
class AbsorptionSummary:
    counts: np.ndarray
    bin_edges: np.ndarray
    fraction_unabsorbed: float
    frozen_values: np.ndarray


def absorption_stats(batch, bins: int = 24) -> AbsorptionSummary:
    """Histogram of absorption times and the share of paths never absorbed.

    Accepts a single :class:`TrajectoryBatch` or a :class:`ReplicaRun`.
    """
    absorbed = np.asarray(batch.absorbed_at)
    if isinstance(batch, ReplicaRun):
        horizon = batch.n_steps * batch.step_h
    else:
        horizon = float(batch.times[-1])
    hit = absorbed[absorbed >= 0] * batch.step_h
    counts, edges = np.histogram(hit, bins=bins, range=(0.0, horizon))
    return AbsorptionSummary(counts, edges, float(np.mean(absorbed < 0)),
                             np.asarray(batch.final))


# ------------------------------------------------------------ discrete engine

def krivine_discrete(emb: Embedding, T: int, f: Callable, coeffs, stream: RngStream) -> SignAssignment:
    """General discrete-time Krivine diffusion.

    For t = 0..T-1 every vector updates
    ``X(t+1) = X(t) + F_t(X(0..t)) * f(<gamma_{t+1}, u>)`` from ``X(0) = 0``
    with one shared Gaussian ``gamma_{t+1}`` (drawn from ``stream``). The
    coefficient sees the history as an ``(n_live, t+1)`` array. ``coeffs`` is
    either a callable ``F(t, history)`` or a sequence of ``T`` callables
    ``F_t(history)``. A vector's sign is that of X at its first |X| >= 1;
    vectors that never get there draw a fair coin from ``stream.fallback()``.
    """
    if T < 1:
        raise ValueError("T must be at least 1")
    if callable(coeffs):
        coef = coeffs
    else:
        seq = list(coeffs)
        if len(seq) != T:
            raise ValueError(f"expected {T} coefficient functions, got {len(seq)}")
        coef = lambda t, hist: seq[t](hist)  # noqa: E731
    U = emb.vectors
    n, d = U.shape
    coin_stream = stream.fallback()
    X = np.zeros((n, T + 1))
    stop = np.full(n, -1, dtype=np.int64)
    for t in range(T):
        g = stream.normals(d)
        live = np.nonzero(stop < 0)[0]
        if live.size == 0:
            continue
        dot = np.zeros(live.size)
        for j in range(d):
            dot += U[live, j] * g[j]
        F = np.broadcast_to(np.asarray(coef(t, X[live, : t + 1]), dtype=np.float64), live.shape)
        X[live, t + 1] = X[live, t] + F * f(dot)
        X[stop >= 0, t + 1] = X[stop >= 0, t]
        hit = live[np.abs(X[live, t + 1]) >= 1.0]
        stop[hit] = t + 1
    unstopped = stop < 0
    final = X[np.arange(n), np.where(unstopped, T, stop)]
    sigma = np.where(final > 0.0, 1, -1).astype(np.int8)
    if unstopped.any():
        sigma[unstopped] = coin_stream.coins(n)[unstopped]
    return SignAssignment(sigma, int(unstopped.sum()), unstopped)


def euler_coefficients(speed: SpeedFunction, cfg: DiffusionConfig):
    """Coefficients turning the discrete recursion into the Euler scheme.

    With X = W / (1 - eps) the exit rule |X| >= 1 is exactly the absorption
    band |W| >= 1 - eps, and F(t, history) = speed((1-eps) X_t) sqrt(h) / (1-eps).
    """
    c_in = 1.0 - cfg.absorb_eps
    c_out = math.sqrt(cfg.step_h) / c_in

    def coef(t, hist):
        return c_out * speed(c_in * hist[:, -1])

    return coef, c_in, c_out


def krivine_euler_replicas(emb: Embedding, speed: SpeedFunction, cfg: DiffusionConfig,
                           seed: int, replicas: int, *, stream0: int = 0,
                           workers: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Compiled form of ``krivine_discrete`` with :func:`euler_coefficients`.

    Returns ``(sigma, stop_at)``, each (replicas, n); ``stop_at`` is -1 where
    the uniform coin decided.
    """
    _check_speed(speed, False)
    _, c_in, c_out = euler_coefficients(speed, cfg)
    n = emb.n
    sigma = np.empty((replicas, n), dtype=np.int8)
    stop = np.empty((replicas, n), dtype=np.int64)
    args = speed.kernel_args()

    def job(lo, hi):
        _k.krivine_euler_batch(emb.vectors, *args, np.uint64(seed & MASK64),
                               np.uint64((stream0 + lo) & MASK64), cfg.n_steps,
                               c_in, c_out, sigma[lo:hi], stop[lo:hi])

    run_chunked(job, replicas, workers)
    return sigma, stop
