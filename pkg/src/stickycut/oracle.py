"""Exact Gaussian machinery used as an independent check on the diffusion.

``Z_u(t) = int_0^t e^{-s/2} <u, dB(s)>`` converges to a standard Gaussian,
and ``M_u(t) = 1 - 2 Phi(-e^{t/2} Z_u(t))`` is the conditional expectation
of ``sign Z_u(inf)``. With the ``xi`` speed the diffusion path W equals M, so
the sign of Z and the sign of W agree path by path.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .diffusion import (BrownianIncrements, DiffusionConfig, Embedding,
                        SignAssignment, SpeedFunction, _checkpoint_steps,
                        _check_speed, run_chunked)
from .kernels import active as _k
from .numerics import MASK64, gaussian_rows, normal_cdf


@dataclass
class ZPath:
    times: np.ndarray
    z: np.ndarray


@dataclass
class MartingalePath:
    times: np.ndarray
    m: np.ndarray


def _projections(U, steps):
    # <u_i, dB_k> accumulated over coordinates in order, matching the kernels
    x = np.zeros((steps.shape[0], U.shape[0]))
    for j in range(U.shape[1]):
        x += steps[:, j][:, None] * U[:, j][None, :]
    return x


def simulate_z(emb: Embedding, cfg: DiffusionConfig, increments: BrownianIncrements) -> ZPath:
    """Left-endpoint discretization of the discounted stochastic integral."""
    if increments.d != emb.d:
        raise ValueError(f"increments have dimension {increments.d}, embedding {emb.d}")
    if increments.steps.shape[0] != cfg.n_steps:
        raise ValueError("increments were generated for a different config")
    times = cfg.times
    disc = np.exp(-0.5 * times[:-1])
    z = np.zeros((cfg.n_steps + 1, emb.n))
    np.cumsum(disc[:, None] * _projections(emb.vectors, increments.steps), axis=0, out=z[1:])
    return ZPath(times, z)


def closed_form_m(z: ZPath) -> MartingalePath:
    scaled = np.exp(0.5 * z.times)[:, None] * z.z
    return MartingalePath(z.times, 1.0 - 2.0 * normal_cdf(-scaled))


def hyperplane_round(emb: Embedding, g) -> SignAssignment:
    """sigma_i = sign <u_i, g>, with an exact zero sent to +1."""
    g = np.asarray(g, dtype=np.float64)
    if g.shape != (emb.d,) or not np.all(np.isfinite(g)):
        raise ValueError(f"g must be a finite vector of length {emb.d}")
    return SignAssignment(np.where(emb.vectors @ g >= 0.0, 1, -1))


def hyperplane_replicas(emb: Embedding, seed: int, replicas: int, *, stream0: int = 0) -> np.ndarray:
    """Signs for ``replicas`` hyperplanes; replica r uses stream ``stream0 + r``."""
    G = gaussian_rows(seed, stream0, replicas, emb.d)
    return np.where(G @ emb.vectors.T >= 0.0, 1, -1).astype(np.int8)


def arcsin_law(rho):
    """(2/pi) arcsin(rho): the sign correlation of two rho-correlated Gaussians."""
    arr = np.asarray(rho, dtype=np.float64)
    if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
        raise ValueError("rho must lie in [-1, 1]")
    out = 2.0 / math.pi * np.arcsin(arr)
    return float(out) if out.ndim == 0 else out


def pair_correlation(pairs) -> tuple[float, float]:
    """Mean of sigma_u * sigma_v and its standard error sqrt((1 - mean^2) / N).

    ``pairs`` is an (N, 2) array-like of signs.
    """
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.size == 0:
        raise ValueError("no sign pairs given")
    arr = arr.reshape(-1, 2)
    n = arr.shape[0]
    if n < 2:
        raise ValueError("need at least two replicas")
    mean = float(np.mean(arr[:, 0] * arr[:, 1]))
    return mean, math.sqrt(max(0.0, 1.0 - mean * mean) / n)


@dataclass
class CoupledRun:
    w_final: np.ndarray
    z_final: np.ndarray
    checkpoint_times: np.ndarray
    z_at: np.ndarray


def coupled_replicas(emb: Embedding, speed: SpeedFunction, cfg: DiffusionConfig,
                     seed: int, replicas: int, *, stream0: int = 0, with_w: bool = True,
                     checkpoints: Sequence[float] = (), workers: int = 1) -> CoupledRun:
    """Advance Z (and optionally the Euler path W) on shared increments.

    Uses the same stream layout as :func:`stickycut.diffusion.sticky_replicas`,
    so ``w_final`` matches that function's ``final`` for equal arguments.
    """
    if with_w:
        _check_speed(speed, False)
    n = emb.n
    ck_steps, ck_times = _checkpoint_steps(cfg, checkpoints)
    disc = np.exp(-0.5 * cfg.times[:-1])
    w_final = np.zeros((replicas, n))
    z_final = np.empty((replicas, n))
    z_at = np.empty((replicas, ck_steps.shape[0], n))
    args = speed.kernel_args()
    sqrt_h = math.sqrt(cfg.step_h)

    def job(lo, hi):
        _k.coupled_batch(emb.vectors, *args, np.uint64(seed & MASK64),
                         np.uint64((stream0 + lo) & MASK64), sqrt_h, disc,
                         cfg.absorb_eps, with_w, ck_steps, w_final[lo:hi],
                         z_at[lo:hi], z_final[lo:hi])

    run_chunked(job, replicas, workers)
    return CoupledRun(w_final, z_final, ck_times, z_at)


def sup_gap(w_path: np.ndarray, m_path: MartingalePath) -> np.ndarray:
    """Per-vector sup over the grid of |W - M|."""
    return np.max(np.abs(w_path - m_path.m), axis=0)
