"""Gaussian special functions and a counter-based random stream.

The generator is a keyed hash: ``(master_seed, stream_id)`` selects a key and
the ``counter`` indexes the output, so any draw can be regenerated without
replaying the stream and streams never depend on scheduling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import active as _k

MASK64 = (1 << 64) - 1
FALLBACK_STREAM_OFFSET = 1 << 32


def _finite_array(x, name):
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _apply(kernel, arr):
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = kernel(flat).reshape(arr.shape)
    return float(out) if out.ndim == 0 else out


def normal_cdf(x):
    """Standard Gaussian CDF, scalar or elementwise."""
    return _apply(_k.ndtr, _finite_array(x, "x"))


def normal_pdf(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    return float(out) if out.ndim == 0 else out


def normal_quantile(p):
    """Inverse of :func:`normal_cdf` on the open interval (0, 1).

    Wichura's AS241 rational approximation followed by one Newton step on
    the lower half of the distribution.
    """
    arr = np.asarray(p, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("normal_quantile requires p in the open interval (0, 1)")
    return _apply(_k.ndtri, arr)


@dataclass
class RngStream:
    """Position in a keyed random stream.

    Copies are independent cursors: advancing one never affects another.
    """

    master_seed: int
    stream_id: int
    counter: int = 0

    def __post_init__(self):
        self.master_seed &= MASK64
        self.stream_id &= MASK64
        self.counter &= MASK64

    def copy(self) -> "RngStream":
        return RngStream(self.master_seed, self.stream_id, self.counter)

    def fallback(self) -> "RngStream":
        """Companion stream reserved for tie-breaking coins."""
        return RngStream(self.master_seed, self.stream_id + FALLBACK_STREAM_OFFSET)

    def uniforms(self, count: int) -> np.ndarray:
        out = _k.uniforms(np.uint64(self.master_seed), np.uint64(self.stream_id),
                          np.uint64(self.counter), int(count))
        self.counter = (self.counter + count) & MASK64
        return out

    def normals(self, count: int) -> np.ndarray:
        out = _k.gaussians(np.uint64(self.master_seed), np.uint64(self.stream_id),
                           np.uint64(self.counter), int(count))
        self.counter = (self.counter + count) & MASK64
        return out

    def coins(self, count: int) -> np.ndarray:
        """Fair +-1 draws at counters 0..count-1 (does not advance)."""
        return _k.coins(np.uint64(self.master_seed), np.uint64(self.stream_id), int(count))


def sample_gaussian(stream: RngStream) -> float:
    """Draw one standard Gaussian and advance ``stream`` by one counter."""
    return float(stream.normals(1)[0])


def gaussian_rows(master_seed: int, stream0: int, n_rows: int, width: int) -> np.ndarray:
    """Row ``r`` holds the first ``width`` normals of stream ``stream0 + r``."""
    return _k.gaussian_rows(np.uint64(master_seed & MASK64), np.uint64(stream0 & MASK64),
                            int(n_rows), int(width))
