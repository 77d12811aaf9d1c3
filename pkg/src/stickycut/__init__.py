"""Sticky Brownian motion rounding for MAXCUT.

The diffusion dW = xi(W) <u, dB> driven by one Brownian motion shared across
all unit vectors yields signs whose pair correlations follow
(2/pi) arcsin <u, v>, the same law as hyperplane rounding.
"""
from .diffusion import (BrownianIncrements, DiffusionConfig, Embedding,
                        SignAssignment, TrajectoryBatch, absorption_stats,
                        krivine_discrete, simulate_sticky, sticky_replicas)
from .kernels import BACKEND
from .numerics import RngStream, normal_cdf, normal_quantile, sample_gaussian
from .oracle import (arcsin_law, closed_form_m, hyperplane_round,
                     pair_correlation, simulate_z)
from .pipeline import (brute_force_maxcut, cut_value, expected_cut_arcsin,
                       gw_constant, run_pipeline, verify_identity)
from .sdp import (SdpConfig, WeightedGraph, read_graph, sdp_objective,
                  solve_maxcut_sdp)
from .speed import SpeedFunction, power_speed, validate, xi

__version__ = "0.1.0"
