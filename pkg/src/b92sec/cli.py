"""Command-line surface: every analysis as a batch command emitting CSV.

Angles are accepted in degrees and converted at this boundary.  Grids use
the syntax ``start:stop:count`` (inclusive linspace).  Exit codes: 0 ok,
2 domain error, 3 infeasible or inconsistent inputs, 4 oracle mismatch.
``B92SEC_THREADS`` sets the worker count for the oracle check.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .errors import (
    B92Error,
    DomainError,
    EstimationInfeasibleError,
    OracleInfeasibleError,
    UnreachableChannelError,
)
from .estimation import ChannelTriple
from .evebound import build_matrices, eve_max_gain
from .infobounds import shannon_upper_bound
from .keyrate import (
    LINK_PRESETS,
    PhysicalLink,
    distance_sweep,
    optimal_angle,
    secret_key_gain,
)
from .oracle import backend_name, oracle_min_overlap_lossy
from .simulate import SimConfig, closed_loop_report

SCHEMAS = {
    "infogain": "eps,q_min,i_gc,i_gc_shannon,i_s_upper",
    "region": "alpha_deg,eps,full_info",
    "keygain": "eps,p_conc,e,i_gc,i_gf,g_correct,g_flipped,g,g_clipped",
    "optangle": "eps,alpha_opt_deg,g_opt",
    "distance": "l_km,g_b92,g_bb84,log10_g_b92,log10_g_bb84",
    "oracle-check": "sample,alpha_deg,theta_deg,eps,T,analytic,oracle,diff",
    "simulate": "(JSON result; --counts-csv writes the estimator's count record)",
}

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_INFEASIBLE = 3
EXIT_MISMATCH = 4


def _grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must be start:stop:count, got {text!r}")
    start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise argparse.ArgumentTypeError("grid count must be at least 1")
    return np.linspace(start, stop, count)


def _emit(args, header: str, rows) -> None:
    lines = [header] + [",".join(str(c) for c in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _maybe_schema(args) -> bool:
    if args.schema:
        print(f"{args.command} v{__version__}: {SCHEMAS[args.command]}")
        return True
    return False


def cmd_infogain(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    alpha = math.radians(args.alpha)
    alpha_prime = math.radians(args.alpha_prime if args.alpha_prime is not None
                               else args.alpha)
    theta = math.radians(args.theta)
    bound_applies = args.theta == 0.0 and math.isclose(alpha, alpha_prime)
    rows = []
    for eps in args.eps_grid:
        triple = ChannelTriple(theta, float(eps), args.T)
        res = eve_max_gain(alpha_prime, alpha, triple)
        upper = math.nan
        if bound_applies:
            upper = shannon_upper_bound(alpha, float(eps), args.T).upper_bound
        rows.append((float(eps), res.overlap_min, res.info_gain,
                     res.info_gain_shannon, upper))
    _emit(args, SCHEMAS["infogain"], rows)
    return EXIT_OK


def cmd_region(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    rows = []
    for alpha_deg in args.alpha_grid:
        alpha = math.radians(float(alpha_deg))
        for eps in args.eps_grid:
            res = eve_max_gain(alpha, alpha, ChannelTriple(0.0, float(eps), args.T))
            rows.append((float(alpha_deg), float(eps),
                         int(res.overlap_min <= 1e-9)))
    _emit(args, SCHEMAS["region"], rows)
    return EXIT_OK


def cmd_keygain(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    alpha = math.radians(args.alpha)
    rows = []
    for eps in args.eps_grid:
        rep = secret_key_gain(alpha, ChannelTriple(0.0, float(eps), args.T),
                              args.mode)
        # raw gain kept for root finding; the clipped copy is the usable rate
        rows.append((float(eps), rep.p_conc, rep.error_rate, rep.info_correct,
                     rep.info_flipped, rep.gain_correct, rep.gain_flipped,
                     rep.gain, max(rep.gain, 0.0)))
    _emit(args, SCHEMAS["keygain"], rows)
    return EXIT_OK


def cmd_optangle(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    rows = []
    for eps in args.eps_grid:
        alpha_star, gain_star = optimal_angle(
            ChannelTriple(0.0, float(eps), args.T), args.mode)
        rows.append((float(eps), math.degrees(alpha_star), gain_star))
    _emit(args, SCHEMAS["optangle"], rows)
    return EXIT_OK


def cmd_distance(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    if args.preset:
        link = LINK_PRESETS[args.preset]
    else:
        link = PhysicalLink(length_km=0.0, channel_loss_db_km=args.channel_loss,
                            receiver_loss_db=args.receiver_loss,
                            dark_mean=args.dark_mean,
                            det_efficiency=args.efficiency)
    points = distance_sweep(link, args.l_grid, math.radians(args.alpha),
                            args.mode)

    def log10_or_nan(x: float) -> float:
        return math.log10(x) if x > 0.0 else math.nan

    rows = [(p.length_km, p.gain_b92, p.gain_bb84,
             log10_or_nan(p.gain_b92), log10_or_nan(p.gain_bb84))
            for p in points]
    _emit(args, SCHEMAS["distance"], rows)
    return EXIT_OK


def cmd_simulate(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    config = SimConfig.from_file(args.config)
    result, report = closed_loop_report(config, args.mode)
    record = json.loads(result.to_json())
    record["key_gain"] = {
        "alpha_deg": math.degrees(report.alpha),
        "g": report.gain,
        "g_correct": report.gain_correct,
        "g_flipped": report.gain_flipped,
        "p_conc": report.p_conc,
        "e": report.error_rate,
        "mode": report.mode,
    }
    payload = json.dumps(record)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(payload + "\n")
    else:
        sys.stdout.write(payload + "\n")
    if args.counts_csv:
        with open(args.counts_csv, "w") as fh:
            fh.write(result.counts.to_csv())
    return EXIT_OK


def _oracle_sample(k: int, rng: np.random.Generator, resolution: int):
    while True:
        alpha = rng.uniform(math.radians(2.0), math.radians(80.0))
        theta = rng.uniform(math.radians(-30.0), math.radians(30.0))
        eps = rng.uniform(0.01, 0.9)
        transmission = rng.uniform(0.2, 1.0)
        triple = ChannelTriple(theta, eps, transmission)
        try:
            analytic = eve_max_gain(alpha, alpha, triple).overlap_min
        except UnreachableChannelError:
            continue  # inconsistent observed channel; resample
        a, b = build_matrices(alpha, theta, eps)
        oracle = oracle_min_overlap_lossy(a, b, alpha, transmission,
                                          resolution=resolution).value
        return (k, math.degrees(alpha), math.degrees(theta), eps, transmission,
                analytic, oracle, abs(analytic - oracle))


def cmd_oracle_check(args) -> int:
    if _maybe_schema(args):
        return EXIT_OK
    rng = np.random.default_rng(args.seed)
    # pre-draw per-sample generators so threading cannot change the samples
    sample_rngs = rng.spawn(args.samples)
    threads = int(os.environ.get("B92SEC_THREADS", "1"))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(
                lambda kr: _oracle_sample(kr[0], kr[1], args.resolution),
                enumerate(sample_rngs)))
    else:
        rows = [_oracle_sample(k, r, args.resolution)
                for k, r in enumerate(sample_rngs)]
    _emit(args, SCHEMAS["oracle-check"], rows)
    worst = max(row[-1] for row in rows)
    print(f"# backend={backend_name()} worst_diff={worst:.3e}", file=sys.stderr)
    if worst > args.tol:
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="b92sec",
        description="Eavesdropper bounds and key rates for the modified "
                    "two-state QKD protocol (angles in degrees, grids as "
                    "start:stop:count)")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        p.add_argument("--output", help="write CSV here instead of stdout")
        p.add_argument("--schema", action="store_true",
                       help="print the column contract and exit")
        return p

    p = add("infogain", cmd_infogain,
            "Eve's maximum information gain over a noise grid")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--alpha-prime", type=float, default=None)
    p.add_argument("--theta", type=float, default=0.0)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--eps-grid", required=True, type=_grid)

    p = add("region", cmd_region, "full-information region scan")
    p.add_argument("--alpha-grid", required=True, type=_grid)
    p.add_argument("--eps-grid", required=True, type=_grid)
    p.add_argument("--T", type=float, default=1.0)

    p = add("keygain", cmd_keygain, "secret-key gain over a noise grid")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--eps-grid", required=True, type=_grid)
    p.add_argument("--mode", choices=("collision", "shannon"),
                   default="collision")

    p = add("optangle", cmd_optangle, "optimal signal angle over a noise grid")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--eps-grid", required=True, type=_grid)
    p.add_argument("--mode", choices=("collision", "shannon"),
                   default="collision")

    p = add("distance", cmd_distance, "distance sweep against BB84")
    p.add_argument("--preset", choices=sorted(LINK_PRESETS))
    p.add_argument("--channel-loss", type=float, default=0.2,
                   help="dB/km (ignored with --preset)")
    p.add_argument("--receiver-loss", type=float, default=1.0, help="dB")
    p.add_argument("--dark-mean", type=float, default=2e-4, help="per pulse")
    p.add_argument("--efficiency", type=float, default=0.18)
    p.add_argument("--alpha", type=float, default=11.0)
    p.add_argument("--l-grid", default="0:60:61", type=_grid)
    p.add_argument("--mode", choices=("collision", "shannon"),
                   default="collision")

    p = add("simulate", cmd_simulate, "Monte-Carlo protocol run from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--counts-csv", help="also write the estimator count record")
    p.add_argument("--mode", choices=("collision", "shannon"),
                   default="collision")

    p = add("oracle-check", cmd_oracle_check,
            "compare the analytic bound against the brute-force oracle")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--seed", type=int, default=20240811)
    p.add_argument("--tol", type=float, default=1e-3)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (EstimationInfeasibleError, UnreachableChannelError,
            OracleInfeasibleError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except B92Error as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
