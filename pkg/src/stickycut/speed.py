"""Diffusion speed functions on [-1, 1].

A speed is admissible when it is continuous, vanishes at both endpoints and
is strictly positive inside. Three kinds are supported: ``xi`` (the speed
that reproduces the arcsin correlation law), the power family
``(1 - s^2)^alpha`` and piecewise-linear tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .kernels import POWER, TABULATED, XI
from .kernels import active as _k

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_EMPTY = np.empty(0)


@dataclass(frozen=True)
class SpeedFunction:
    kind: str
    alpha: float = 0.0
    breakpoints: tuple = ()

    def __post_init__(self):
        if self.kind not in ("xi", "power", "tabulated"):
            raise ValueError(f"unknown speed kind {self.kind!r}")
        if self.kind == "power" and not self.alpha > 0.0:
            raise ValueError("power speed needs alpha > 0")
        if self.kind == "tabulated":
            s = [p[0] for p in self.breakpoints]
            if len(s) < 2 or any(b <= a for a, b in zip(s, s[1:])):
                raise ValueError("tabulated speed needs >= 2 strictly increasing breakpoints")
            if s[0] != -1.0 or s[-1] != 1.0:
                raise ValueError("tabulated breakpoints must span [-1, 1]")

    @classmethod
    def xi(cls) -> "SpeedFunction":
        return cls("xi")

    @classmethod
    def power(cls, alpha: float) -> "SpeedFunction":
        return cls("power", alpha=float(alpha))

    @classmethod
    def tabulated(cls, points) -> "SpeedFunction":
        pts = tuple((float(s), float(v)) for s, v in points)
        return cls("tabulated", breakpoints=pts)

    @classmethod
    def parse(cls, text: str) -> "SpeedFunction":
        """Parse ``xi`` or ``power:<alpha>``."""
        text = text.strip().lower()
        if text == "xi":
            return cls.xi()
        if text.startswith("power:"):
            return cls.power(float(text.split(":", 1)[1]))
        raise ValueError(f"cannot parse speed {text!r}; use 'xi' or 'power:<alpha>'")

    @property
    def label(self) -> str:
        if self.kind == "power":
            return f"power:{self.alpha:g}"
        return self.kind

    def kernel_args(self):
        """(kind code, alpha, table s, table values) for the compiled kernels."""
        if self.kind == "xi":
            return XI, 0.0, _EMPTY, _EMPTY
        if self.kind == "power":
            return POWER, self.alpha, _EMPTY, _EMPTY
        tab = np.array(self.breakpoints, dtype=np.float64)
        return TABULATED, 0.0, np.ascontiguousarray(tab[:, 0]), np.ascontiguousarray(tab[:, 1])

    def __call__(self, s):
        arr = np.asarray(s, dtype=np.float64)
        if np.any(np.abs(arr) > 1.0) or not np.all(np.isfinite(arr)):
            raise ValueError("speed functions are defined on [-1, 1]")
        out = _k.speed_values(*self.kernel_args(), np.ascontiguousarray(arr.reshape(-1)))
        out = out.reshape(arr.shape)
        return float(out) if out.ndim == 0 else out


def xi(s):
    """sqrt(2/pi) * exp(-q^2 / 2) with q the Gaussian quantile of (1 - s)/2."""
    return SpeedFunction.xi()(s)


def power_speed(alpha: float, s):
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    return SpeedFunction.power(alpha)(s)


def load_tabulated(path) -> SpeedFunction:
    """Read a two-column ``s value`` file (``#`` comments allowed)."""
    points = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 's value', got {raw!r}")
        points.append((float(parts[0]), float(parts[1])))
    return SpeedFunction.tabulated(points)


@dataclass
class ValidationReport:
    passed: bool
    grid_size: int
    max_jump: float
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


def validate(speed: SpeedFunction, grid_size: int = 10001, max_jump: float = 0.05) -> ValidationReport:
    """Check zero endpoints, interior positivity and a grid continuity modulus.

    Adjacent-point jumps above ``max_jump`` are re-examined on a 8x finer
    sub-grid; a jump that does not shrink is reported as a discontinuity.

    Failures are collected as ``(s, value, reason)`` rather than raised.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    grid = np.linspace(-1.0, 1.0, grid_size)
    grid[0], grid[-1] = -1.0, 1.0
    vals = speed(grid)
    violations = []
    for idx in (0, grid_size - 1):
        if vals[idx] != 0.0:
            violations.append((float(grid[idx]), float(vals[idx]), "nonzero endpoint"))
    inner = vals[1:-1]
    for idx in np.nonzero(~(inner > 0.0))[0]:
        violations.append((float(grid[idx + 1]), float(inner[idx]), "not positive"))
    jumps = np.abs(np.diff(vals))
    worst = float(jumps.max()) if jumps.size else 0.0
    if not np.all(np.isfinite(vals)):
        violations.append((float("nan"), float("nan"), "non-finite value"))
    elif worst > max_jump:
        # a continuous speed's largest jump shrinks when the cell is refined
        k = int(np.argmax(jumps))
        fine = speed(np.linspace(grid[k], grid[k + 1], 9))
        if np.abs(np.diff(fine)).max() > 0.99 * worst:
            violations.append((float(grid[k]), float(vals[k]),
                               f"jump {worst:.3g} does not shrink under refinement"))
    return ValidationReport(passed=not violations, grid_size=grid_size, max_jump=worst,
                            violations=violations)


@lru_cache(maxsize=64)
def is_admissible(speed: SpeedFunction) -> bool:
    return validate(speed).passed
