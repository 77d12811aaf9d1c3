"""Command line entry point: ``stickycut <command> ...``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import reports
from .diffusion import DiffusionConfig
from .pipeline import (brute_force_maxcut, compare_schemes, gw_constant,
                       parse_scheme, run_pipeline, verify_identity)
from .sdp import SdpConfig, mixing_method, read_graph
from .speed import SpeedFunction

DEFAULT_RHO_GRID = "-0.95,-0.5,0,0.3,0.5,0.7071,0.95"
# some embeddings make every rounding cut the same amount, leaving SE = 0
SE_FLOOR = 1e-9


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _diffusion_cfg(args):
    return DiffusionConfig(step_h=args.h, t_max=args.tmax, absorb_eps=args.eps)


def _sdp_cfg(args):
    return SdpConfig(rank_r=args.rank, max_sweeps=args.max_sweeps, tol=args.tol,
                     init_seed=args.seed)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_verify_identity(args) -> bool:
    speed = SpeedFunction.parse(args.scheme)
    rep = verify_identity(_float_list(args.rho_grid), args.replicas, _diffusion_cfg(args),
                          args.seed, speed, args.workers)
    out = _outdir(args)
    reports.write_json(out / "report.json", {
        "command": "verify-identity",
        "config": {"h": args.h, "tmax": args.tmax, "eps": args.eps, "seed": args.seed,
                   "replicas": args.replicas, "scheme": speed.label},
        "identity": rep,
        "passes": rep.passes(),
    })
    (out / "identity.csv").write_text(reports.identity_csv(rep))
    if args.svg:
        (out / "identity.svg").write_text(reports.identity_svg(rep))
    for rho, est, se, tgt, dev in reports.identity_rows(rep):
        print(f"rho={rho:+.4f}  estimate={est:+.5f}  se={se:.5f}  target={tgt:+.5f}  dev={dev:+.2f} SE")
    return rep.passes()


def cmd_solve(args) -> bool:
    g = read_graph(args.graph)
    res = mixing_method(g, _sdp_cfg(args))
    hist = res.history
    monotone = bool(all(b >= a - 1e-12 for a, b in zip(hist, hist[1:])))
    reports.write_json(_outdir(args) / "report.json", {
        "command": "solve",
        "n": g.n, "rank": res.embedding.d, "objective": res.objective,
        "sweeps": res.sweeps, "monotone": monotone,
        "vectors": res.embedding.vectors,
    })
    print(f"sdp objective {res.objective:.10f} after {res.sweeps} sweeps (rank {res.embedding.d})")
    return monotone


def _gw_check(res) -> bool:
    return res.mean_cut + 3 * res.mean_cut_se >= (gw_constant() - 0.01) * res.sdp_value


def cmd_round(args) -> bool:
    g = read_graph(args.graph)
    res = run_pipeline(g, parse_scheme(args.scheme), args.trials, _sdp_cfg(args),
                       _diffusion_cfg(args), args.seed, args.workers)
    reports.write_json(_outdir(args) / "report.json", {"command": "round", "result": res})
    print(f"{res.scheme}: best cut {res.cut_value:g}  mean {res.mean_cut:.4f} +- {res.mean_cut_se:.4f}  "
          f"sdp {res.sdp_value:.6f}  ratio {res.ratio_vs_sdp:.4f}")
    return _gw_check(res)


def cmd_compare(args) -> bool:
    g = read_graph(args.graph)
    schemes = [s for s in args.schemes.split(",") if s.strip()]
    results = compare_schemes(g, schemes, args.replicas, _sdp_cfg(args), _diffusion_cfg(args),
                              args.seed, args.workers)
    ok = True
    for name, res in results.items():
        within = abs(res.mean_cut - res.expected_cut_arcsin) <= max(3 * res.mean_cut_se, SE_FLOOR)
        if name in ("xi", "hyperplane"):
            ok &= within
        print(f"{name:>12}: mean {res.mean_cut:.4f} +- {res.mean_cut_se:.4f}  "
              f"arcsin {res.expected_cut_arcsin:.4f}  best {res.cut_value:g}")
    reports.write_json(_outdir(args) / "report.json", {"command": "compare", "results": results})
    return bool(ok)


def cmd_exact(args) -> bool:
    g = read_graph(args.graph)
    value, signs = brute_force_maxcut(g)
    reports.write_json(_outdir(args) / "report.json", {
        "command": "exact", "n": g.n, "value": value, "sigma": signs.sigma})
    print(f"max cut {value:g}")
    return True


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stickycut", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, diffusion=True, sdp=True):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default=".", help="directory for report files")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--check", action="store_true",
                        help="exit with status 1 if the command's check fails")
        if diffusion:
            sp.add_argument("--h", type=float, default=1e-3, help="Euler step")
            sp.add_argument("--tmax", type=float, default=12.0, help="time horizon")
            sp.add_argument("--eps", type=float, default=1e-6, help="absorption band")
        if sdp:
            sp.add_argument("--rank", type=int, default=None)
            sp.add_argument("--max-sweeps", type=int, default=10_000)
            sp.add_argument("--tol", type=float, default=1e-9)

    sp = sub.add_parser("verify-identity", help="simulate pair correlations against the arcsin law")
    sp.add_argument("--rho-grid", default=DEFAULT_RHO_GRID)
    sp.add_argument("--replicas", type=int, default=200_000)
    sp.add_argument("--scheme", default="xi", help="xi or power:<alpha>")
    sp.add_argument("--svg", action="store_true")
    common(sp, sdp=False)
    sp.set_defaults(func=cmd_verify_identity)

    sp = sub.add_parser("solve", help="solve the MAXCUT relaxation")
    sp.add_argument("--graph", required=True)
    common(sp, diffusion=False)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("round", help="relax and round, keeping the best of K trials")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--scheme", default="xi", help="xi, power:<alpha> or hyperplane")
    sp.add_argument("--trials", type=int, default=100)
    common(sp)
    sp.set_defaults(func=cmd_round)

    sp = sub.add_parser("compare", help="compare rounding schemes on one embedding")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--schemes", default="xi,hyperplane")
    sp.add_argument("--replicas", type=int, default=2000)
    common(sp)
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("exact", help="brute-force maximum cut (n <= 24)")
    sp.add_argument("--graph", required=True)
    common(sp, diffusion=False, sdp=False)
    sp.set_defaults(func=cmd_exact)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        ok = args.func(args)
    except (ValueError, OSError) as exc:
        print(f"stickycut: error: {exc}", file=sys.stderr)
        return 2
    if args.check and not ok:
        print("stickycut: check failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
