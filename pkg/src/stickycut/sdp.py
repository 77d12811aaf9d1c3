"""Low-rank MAXCUT relaxation solved by block-coordinate (mixing) ascent."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diffusion import Embedding
from .kernels import active as _k
from .numerics import RngStream

SDP_INIT_STREAM = 1 << 62


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected graph with nonnegative weights; edges stored with i < j."""

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        seen = set()
        clean = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if i > j:
                i, j = j, i
            if i < 0 or j >= self.n:
                raise ValueError(f"edge ({i}, {j}) outside vertex range [0, {self.n})")
            if not (math.isfinite(w) and w >= 0.0):
                raise ValueError(f"edge ({i}, {j}) has invalid weight {w}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            clean.append((i, j, w))
        object.__setattr__(self, "edges", tuple(clean))

    @property
    def total_weight(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def arrays(self):
        if not self.edges:
            return (np.empty(0, dtype=np.int64),) * 2 + (np.empty(0),)
        e = np.array(self.edges, dtype=np.float64)
        return e[:, 0].astype(np.int64), e[:, 1].astype(np.int64), e[:, 2].copy()

    def dense(self) -> np.ndarray:
        W = np.zeros((self.n, self.n))
        for i, j, w in self.edges:
            W[i, j] = W[j, i] = w
        return W

    @classmethod
    def cycle(cls, n: int) -> "WeightedGraph":
        return cls(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)))

    @classmethod
    def complete(cls, n: int) -> "WeightedGraph":
        return cls(n, tuple((i, j, 1.0) for i in range(n) for j in range(i + 1, n)))

    @classmethod
    def random(cls, n: int, p: float, seed: int) -> "WeightedGraph":
        """Erdos-Renyi G(n, p) with unit weights, drawn from the keyed stream."""
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        u = RngStream(seed, SDP_INIT_STREAM + 1).uniforms(len(pairs))
        return cls(n, tuple((i, j, 1.0) for (i, j), x in zip(pairs, u) if x < p))


def parse_graph(text: str, source: str = "<string>") -> WeightedGraph:
    """Edge list with one ``i j w`` per line, 0-based, ``#`` comments.

    A missing weight defaults to 1. Vertices are 0..max index.
    """
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ValueError(f"{source}:{lineno}: expected 'i j w', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError as exc:
            raise ValueError(f"{source}:{lineno}: {exc}") from None
        edges.append((i, j, w))
    if not edges:
        raise ValueError(f"{source}: no edges")
    n = max(max(i, j) for i, j, _ in edges) + 1
    return WeightedGraph(n, tuple(edges))


def read_graph(path) -> WeightedGraph:
    path = Path(path)
    return parse_graph(path.read_text(), str(path))


def default_rank(n: int) -> int:
    return max(2, math.ceil(math.sqrt(2 * n)))


@dataclass(frozen=True)
class SdpConfig:
    rank_r: int | None = None
    max_sweeps: int = 10_000
    tol: float = 1e-9
    init_seed: int = 0

    def __post_init__(self):
        if self.rank_r is not None and self.rank_r < 1:
            raise ValueError("rank_r must be positive")
        if self.max_sweeps < 1 or not self.tol > 0.0:
            raise ValueError("max_sweeps and tol must be positive")

    def rank_for(self, n: int) -> int:
        return self.rank_r if self.rank_r is not None else default_rank(n)


@dataclass
class SdpResult:
    embedding: Embedding
    objective: float
    sweeps: int
    history: np.ndarray = field(repr=False)


def mixing_method(g: WeightedGraph, cfg: SdpConfig = SdpConfig()) -> SdpResult:
    """Run the coordinate ascent and keep the per-sweep objective history."""
    if not g.total_weight > 0.0:
        raise ValueError("graph has zero total weight")
    r = cfg.rank_for(g.n)
    V = RngStream(cfg.init_seed, SDP_INIT_STREAM).normals(g.n * r).reshape(g.n, r)
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    history = np.zeros(cfg.max_sweeps + 1)
    sweeps = int(_k.sdp_sweeps(g.dense(), V, cfg.max_sweeps, cfg.tol, history))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    emb = Embedding(V)
    return SdpResult(emb, sdp_objective(g, emb), sweeps, history[: sweeps + 1])


def solve_maxcut_sdp(g: WeightedGraph, cfg: SdpConfig = SdpConfig()) -> Embedding:
    """Unit vectors v_i maximizing sum w_ij (1 - <v_i, v_j>) / 2 in rank r.

    Each vertex in turn is set to minus the normalized weighted sum of its
    neighbours' vectors (kept unchanged when that sum is zero) until a sweep
    gains less than ``tol``.
    """
    return mixing_method(g, cfg).embedding


def sdp_objective(g: WeightedGraph, emb: Embedding) -> float:
    if emb.n != g.n:
        raise ValueError(f"embedding has {emb.n} rows, graph {g.n} vertices")
    V = emb.vectors
    return float(sum(w * (1.0 - float(V[i] @ V[j])) / 2.0 for i, j, w in g.edges))
