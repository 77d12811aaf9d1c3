import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stickycut import (DiffusionConfig, Embedding, SdpConfig, SpeedFunction, WeightedGraph,
                       solve_maxcut_sdp)
from stickycut.diffusion import SignAssignment
from stickycut.kernels import load
from stickycut.pipeline import (brute_force_maxcut, compare_schemes, cut_value, cut_values,
                                expected_cut_arcsin, gw_constant, gw_minimizer, run_pipeline,
                                verify_identity)
from stickycut.sdp import sdp_objective

from conftest import gw_grid_oracle


def enumerate_cuts(g):
    """Every sign pattern with its cut, by direct edge counting."""
    out = []
    for bits in itertools.product((1, -1), repeat=g.n - 1):
        sigma = (1,) + bits
        out.append((sum(w for i, j, w in g.edges if sigma[i] != sigma[j]), sigma))
    return out


EDGE = WeightedGraph(2, ((0, 1, 2.5),))


def test_cut_value_examples():
    c5 = WeightedGraph.cycle(5)
    assert cut_value(c5, np.ones(5)) == 0.0
    assert cut_value(EDGE, SignAssignment(np.array([1, -1]))) == 2.5
    sigma = (1, -1, 1, -1, 1)
    by_hand = sum(1 for i in range(5) if sigma[i] != sigma[(i + 1) % 5])
    assert by_hand == 4 and cut_value(c5, np.array(sigma)) == 4.0
    with pytest.raises(ValueError):
        cut_value(c5, np.ones(4))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(0, 10**6), st.data())
def test_cut_value_bounds_and_vectorized_form(n, seed, data):
    g = WeightedGraph.random(n, 0.6, seed)
    sig = np.array(data.draw(st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n)))
    c = cut_value(g, sig)
    assert 0.0 <= c <= g.total_weight
    assert c == cut_value(g, -sig)
    assert cut_values(g, sig[None, :])[0] == pytest.approx(c, abs=1e-12)


def test_brute_force_examples():
    assert brute_force_maxcut(EDGE)[0] == 2.5
    value, signs = brute_force_maxcut(WeightedGraph.complete(3))
    assert value == 2.0
    assert signs.sigma.tolist() == [1, 1, -1]  # first maximum with + ordered before -
    c5 = WeightedGraph.cycle(5)
    cuts = enumerate_cuts(c5)
    assert len(cuts) == 16 and max(c for c, _ in cuts) == 4
    assert brute_force_maxcut(c5)[0] == 4.0
    assert brute_force_maxcut(WeightedGraph(1))[0] == 0.0


def test_brute_force_refuses_large_graphs():
    with pytest.raises(ValueError, match="refused"):
        brute_force_maxcut(WeightedGraph.cycle(25))


@pytest.mark.parametrize("seed", range(10))
def test_brute_force_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    g = WeightedGraph(n, tuple((i, j, float(rng.integers(1, 4))) for i, j in pairs))
    value, signs = brute_force_maxcut(g)
    cuts = enumerate_cuts(g)
    best = max(c for c, _ in cuts)
    first = next(s for c, s in cuts if c == best)
    assert value == best and tuple(signs.sigma.tolist()) == first
    assert cut_value(g, signs) == value


def test_brute_force_backends_agree():
    g = WeightedGraph.random(14, 0.5, 7)
    ei, ej, ew = g.arrays()
    a = load("numba").brute_force(g.n, ei, ej, ew, 0, 1 << 13)
    b = load("numpy").brute_force(g.n, ei, ej, ew, 0, 1 << 13)
    assert a[0] == b[0] and int(a[1]) == int(b[1])


def test_expected_cut_arcsin_examples():
    w = 3.0
    g = WeightedGraph(2, ((0, 1, w),))
    assert expected_cut_arcsin(g, Embedding(np.array([[1.0, 0], [-1.0, 0]]))) == w
    assert expected_cut_arcsin(g, Embedding(np.eye(2))) == pytest.approx(w / 2)
    assert expected_cut_arcsin(g, Embedding.pair(0.5)) == pytest.approx(w / 3)
    # slightly-over-one inner products within tolerance are clamped
    v = np.array([[1.0, 0.0], [1.0, 5e-10]])
    assert expected_cut_arcsin(g, Embedding(v, norm_tol=1e-9)) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        expected_cut_arcsin(WeightedGraph.cycle(3), Embedding.pair(0.1))


def test_gw_constant_against_grid():
    theta, alpha = gw_minimizer()
    g_theta, g_alpha = gw_grid_oracle()
    assert abs(alpha - g_alpha) <= 1e-6
    assert abs(alpha - 0.8785672) <= 1e-6
    assert abs(theta - g_theta) <= 1e-4 and theta == pytest.approx(2.3311, abs=1e-4)
    assert gw_constant() == alpha
    assert (2 * math.pi / math.pi) / (1 - math.cos(math.pi)) == 1.0


def test_verify_identity_endpoints_exact():
    cfg = DiffusionConfig(step_h=4e-3)
    rep = verify_identity([1.0, -1.0], 1000, cfg, seed=3)
    (m1, se1, n1), (m2, se2, n2) = rep.estimates
    assert m1 == 1.0 and m2 == -1.0 and se1 == se2 == 0.0 and n1 == 1000
    assert rep.targets == [1.0, -1.0]
    assert rep.max_abs_deviation_in_se_units == 0.0 and rep.passes()


def test_verify_identity_grid_entries_independent():
    cfg = DiffusionConfig(step_h=4e-3)
    a = verify_identity([0.3, 0.3], 2000, cfg, seed=1)
    assert a.estimates[0] != a.estimates[1]
    b = verify_identity([0.3], 2000, cfg, seed=1)
    assert b.estimates[0] == a.estimates[0]


def test_run_pipeline_single_edge():
    for scheme in ("xi", "power:2", "hyperplane"):
        res = run_pipeline(EDGE, scheme, 8, seed=4)
        assert res.cut_value == 2.5
        assert res.ratio_vs_sdp == pytest.approx(1.0, abs=1e-9)
        assert res.ratio_vs_exact == 1.0


def test_run_pipeline_c5_hyperplane():
    res = run_pipeline(WeightedGraph.cycle(5), "hyperplane", 200, seed=1)
    assert res.cut_value == 4.0 and res.exact_value == 4.0 and res.ratio_vs_exact == 1.0
    assert res.ratio_vs_sdp == pytest.approx(4 / res.sdp_value)


def test_run_pipeline_c5_xi():
    res = run_pipeline(WeightedGraph.cycle(5), SpeedFunction.xi(), 200, seed=2)
    assert res.cut_value == 4.0
    # the planar optimum makes every rounding cut exactly 4, so SE is 0 up to rounding
    assert abs(res.mean_cut - res.expected_cut_arcsin) <= max(3 * res.mean_cut_se, 1e-9)
    assert res.scheme == "xi" and res.trials == 200


@pytest.mark.parametrize("seed", range(4))
def test_sandwich(seed):
    g = WeightedGraph.random(9, 0.5, 40 + seed)
    emb = solve_maxcut_sdp(g)
    exact = brute_force_maxcut(g)[0]
    res = run_pipeline(g, "xi", 64, seed=seed, embedding=emb, exact=exact,
                       diff_cfg=DiffusionConfig(step_h=4e-3))
    # the solver stops on per-sweep gain, so its value may sit ~1e-7 under the optimum
    assert res.cut_value <= exact <= sdp_objective(g, emb) + 1e-6
    assert 0 <= res.mean_cut <= res.cut_value


def test_compare_schemes_shares_embedding():
    out = compare_schemes(WeightedGraph.cycle(5), ["xi", "hyperplane", "power:1"], 300,
                          diff_cfg=DiffusionConfig(step_h=4e-3))
    assert list(out) == ["xi", "hyperplane", "power:1"]
    assert len({r.sdp_value for r in out.values()}) == 1
    assert len({r.expected_cut_arcsin for r in out.values()}) == 1
    assert all(r.exact_value == 4.0 for r in out.values())


@pytest.mark.slow
def test_unbiased_mean_cut():
    g = WeightedGraph.random(10, 0.5, 5)
    res = run_pipeline(g, "xi", 10_000, seed=8)
    assert abs(res.mean_cut - res.expected_cut_arcsin) <= 3 * res.mean_cut_se
    assert res.mean_cut >= (gw_constant() - 0.01) * res.sdp_value
