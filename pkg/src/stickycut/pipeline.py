"""MAXCUT workflow: relax, round, score, and check against exact answers."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .diffusion import (DiffusionConfig, Embedding, SignAssignment,
                        sticky_replicas)
from .kernels import active as _k
from .oracle import arcsin_law, hyperplane_replicas, pair_correlation
from .sdp import SdpConfig, WeightedGraph, mixing_method, sdp_objective
from .speed import SpeedFunction

MAX_BRUTE_FORCE_N = 24
RHO_STREAM_SHIFT = 40
CLAMP_TOL = 1e-9


def _sigma_of(signs) -> np.ndarray:
    return signs.sigma if isinstance(signs, SignAssignment) else np.asarray(signs)


def cut_value(g: WeightedGraph, signs) -> float:
    sigma = _sigma_of(signs)
    if sigma.shape != (g.n,):
        raise ValueError(f"expected {g.n} signs, got shape {sigma.shape}")
    return float(sum(w * (1 - int(sigma[i]) * int(sigma[j])) / 2 for i, j, w in g.edges))


def cut_values(g: WeightedGraph, sigma: np.ndarray) -> np.ndarray:
    """Cut value of every row of a (replicas, n) sign array."""
    ei, ej, ew = g.arrays()
    s = np.asarray(sigma, dtype=np.float64)
    return ((1.0 - s[:, ei] * s[:, ej]) * 0.5) @ ew


def brute_force_maxcut(g: WeightedGraph) -> tuple[float, SignAssignment]:
    """Exhaustive search with vertex 0 fixed to +1.

    Patterns are scanned in lexicographic order of (sigma_1, ..., sigma_{n-1})
    with +1 before -1; the first maximum wins.
    """
    if g.n > MAX_BRUTE_FORCE_N:
        raise ValueError(f"brute force refused: n = {g.n} exceeds {MAX_BRUTE_FORCE_N}")
    if g.n == 1:
        return 0.0, SignAssignment(np.ones(1))
    ei, ej, ew = g.arrays()
    best, mask = _k.brute_force(g.n, ei, ej, ew, 0, 1 << (g.n - 1))
    bits = [(mask >> (g.n - 1 - v)) & 1 for v in range(1, g.n)]
    sigma = np.array([1] + [-1 if b else 1 for b in bits], dtype=np.int8)
    return float(best), SignAssignment(sigma)


def expected_cut_arcsin(g: WeightedGraph, emb: Embedding) -> float:
    """Expected cut of any rounding whose pair correlations follow the arcsin law."""
    if emb.n != g.n:
        raise ValueError(f"embedding has {emb.n} rows, graph {g.n} vertices")
    V = emb.vectors
    total = 0.0
    for i, j, w in g.edges:
        rho = float(V[i] @ V[j])
        if abs(rho) > 1.0 + CLAMP_TOL:
            raise ValueError(f"inner product {rho} of ({i}, {j}) is outside [-1, 1]")
        total += w * (1.0 - arcsin_law(min(1.0, max(-1.0, rho)))) / 2.0
    return total


# ------------------------------------------------------------- GW constant

def _gw_ratio(theta: float) -> float:
    return (2.0 * theta / math.pi) / (1.0 - math.cos(theta))


def gw_minimizer(tol: float = 1e-10) -> tuple[float, float]:
    """(theta*, alpha_GW) by golden-section search on (0, pi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = 1e-3, math.pi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = _gw_ratio(c), _gw_ratio(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = _gw_ratio(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = _gw_ratio(d)
    theta = 0.5 * (a + b)
    return theta, _gw_ratio(theta)


def gw_constant() -> float:
    return gw_minimizer()[1]


# --------------------------------------------------------- identity check

@dataclass
class IdentityReport:
    rho_grid: list
    estimates: list
    targets: list
    max_abs_deviation_in_se_units: float
    unabsorbed_fraction: list = field(default_factory=list)
    scheme: str = "xi"

    def deviations(self) -> list:
        return [est - tgt for (est, _, _), tgt in zip(self.estimates, self.targets)]

    def passes(self, abs_tol: float = 0.01, n_se: float = 3.0) -> bool:
        return all(abs(dev) <= max(n_se * se, abs_tol)
                   for dev, (_, se, _) in zip(self.deviations(), self.estimates))


def _dev_in_se(dev: float, se: float) -> float:
    if se > 0.0:
        return dev / se
    return 0.0 if dev == 0.0 else math.copysign(math.inf, dev)


def verify_identity(rho_grid: Sequence[float], replicas: int, cfg: DiffusionConfig = DiffusionConfig(),
                    seed: int = 0, speed: SpeedFunction = SpeedFunction.xi(),
                    workers: int = 1) -> IdentityReport:
    """Estimate E[sigma_u sigma_v] at each rho and compare to the arcsin law.

    Grid entry k runs on streams ``(k << 40) + r`` so entries are independent.
    """
    estimates, targets, unabsorbed, worst = [], [], [], 0.0
    for k, rho in enumerate(rho_grid):
        emb = Embedding.pair(float(rho))
        run = sticky_replicas(emb, speed, cfg, seed, replicas,
                              stream0=k << RHO_STREAM_SHIFT, workers=workers)
        mean, se = pair_correlation(run.sigma)
        target = arcsin_law(float(rho))
        estimates.append((mean, se, replicas))
        targets.append(target)
        unabsorbed.append(float(np.mean(run.absorbed_at < 0)))
        worst = max(worst, abs(_dev_in_se(mean - target, se)))
    return IdentityReport([float(r) for r in rho_grid], estimates, targets, worst,
                          unabsorbed, speed.label)


# ---------------------------------------------------------------- rounding

def parse_scheme(text: str):
    """'hyperplane' or a speed name ('xi', 'power:<alpha>')."""
    if text.strip().lower() == "hyperplane":
        return "hyperplane"
    return SpeedFunction.parse(text)


def scheme_label(scheme) -> str:
    return scheme if isinstance(scheme, str) else scheme.label


def round_replicas(emb: Embedding, scheme, cfg: DiffusionConfig, seed: int, replicas: int,
                   *, stream0: int = 0, workers: int = 1) -> np.ndarray:
    """(replicas, n) signs from independent rounding trials."""
    if scheme == "hyperplane":
        return hyperplane_replicas(emb, seed, replicas, stream0=stream0)
    return sticky_replicas(emb, scheme, cfg, seed, replicas, stream0=stream0,
                           workers=workers).sigma


@dataclass
class CutResult:
    signs: SignAssignment
    cut_value: float
    sdp_value: float
    expected_cut_arcsin: float
    ratio_vs_sdp: float
    ratio_vs_exact: Optional[float]
    scheme: str = ""
    trials: int = 0
    mean_cut: float = 0.0
    mean_cut_se: float = 0.0
    exact_value: Optional[float] = None


def run_pipeline(g: WeightedGraph, scheme, trials: int, sdp_cfg: SdpConfig = SdpConfig(),
                 diff_cfg: DiffusionConfig = DiffusionConfig(), seed: int = 0,
                 workers: int = 1, exact=None,
                 embedding: Optional[Embedding] = None) -> CutResult:
    """Solve the relaxation, round ``trials`` times, keep the best cut.

    ``exact`` is a bool (run brute force or not; default: n <= 16) or an
    already known optimum. A precomputed ``embedding`` skips the solver.
    """
    if isinstance(scheme, str) and scheme != "hyperplane":
        scheme = parse_scheme(scheme)
    emb = embedding if embedding is not None else mixing_method(g, sdp_cfg).embedding
    sdp_value = sdp_objective(g, emb)
    sigma = round_replicas(emb, scheme, diff_cfg, seed, trials, workers=workers)
    cuts = cut_values(g, sigma)
    best = int(np.argmax(cuts))
    if exact is None:
        exact = g.n <= 16
    if isinstance(exact, bool):
        exact_value = brute_force_maxcut(g)[0] if exact else None
    else:
        exact_value = float(exact)
    cut = float(cuts[best])
    return CutResult(
        signs=SignAssignment(sigma[best]),
        cut_value=cut,
        sdp_value=sdp_value,
        expected_cut_arcsin=expected_cut_arcsin(g, emb),
        ratio_vs_sdp=cut / sdp_value if sdp_value > 0 else float("nan"),
        ratio_vs_exact=(cut / exact_value if exact_value else None),
        scheme=scheme_label(scheme),
        trials=trials,
        mean_cut=float(cuts.mean()),
        mean_cut_se=float(cuts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0,
        exact_value=exact_value,
    )


def compare_schemes(g: WeightedGraph, schemes: Sequence, replicas: int,
                    sdp_cfg: SdpConfig = SdpConfig(), diff_cfg: DiffusionConfig = DiffusionConfig(),
                    seed: int = 0, workers: int = 1, exact: Optional[bool] = None) -> dict:
    """Mean and best cut per scheme on one shared SDP embedding."""
    emb = mixing_method(g, sdp_cfg).embedding
    if exact is None:
        exact = g.n <= 16
    exact_value = brute_force_maxcut(g)[0] if exact else False
    results = {}
    for k, scheme in enumerate(schemes):
        if isinstance(scheme, str):
            scheme = parse_scheme(scheme)
        # a distinct master seed per scheme keeps their estimates independent
        res = run_pipeline(g, scheme, replicas, sdp_cfg, diff_cfg, seed + k, workers,
                           exact=exact_value, embedding=emb)
        results[res.scheme] = res
    return results
