"""Command-line front end.

Subcommands
-----------

``dueck-sim``
    Round-trip the two-phase conference scheme on the collapse channel and
    report decode statistics.  Exit status 0 means no decode errors.
``sigma1-curve``
    Tabulate the dependence-constrained information curve as CSV.
``bounds``
    Certified lower and upper estimates for the curve at one budget,
    optionally folded into sum-capacity bounds for given conference rates.
``outer-bound``
    The closed-form single-letter maximization for the collapse channel.
``wringing``
    Run coordinate extraction on a stored word-level distribution.
``sqrt-law``
    Membership check and budget-inversion curve for a channel/input triple.

Seeds resolve as ``--seed``, then the ``CFMAC_SEED`` environment variable,
then a fixed default, so runs are reproducible unless asked otherwise.
Exit codes: 0 success, 1 a well-formed run with a negative outcome
(decode errors, infeasible input, non-membership), 2 configuration errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

from . import __version__
from .bounds import (
    check_cstar,
    continuity_envelope,
    dueck_outer_bound,
    sigma1,
    sqrt_law_curve,
    sum_capacity_bounds,
    wringing_extract,
    wringing_upper_bound,
)
from .codebooks import gen_codebook
from .errors import (
    CfmacError,
    InfeasibleInputError,
    InversionFailedError,
    ListOverflowError,
    NotInCstarError,
)
from .io import (
    FORMAT_VERSION,
    canonical_json,
    load_joint,
    load_mac,
    load_word_distribution,
    write_json,
    write_sigma_csv,
)
from .mac import dueck_mac
from .scheme import derive_params, run_scheme
from .solver import SolverConfig

DEFAULT_SEED = 20240801

_OUTER_REFERENCE = 2.1632  # commonly quoted 4-digit evaluation of the same maximum

_DATA_ERRORS = (InfeasibleInputError, NotInCstarError, InversionFailedError, ListOverflowError)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    env = os.environ.get("CFMAC_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError as exc:
            raise CfmacError(f"CFMAC_SEED is not an integer: {env!r}") from exc
    return DEFAULT_SEED


def _emit(report: dict, out: str | None) -> None:
    text = canonical_json(report)
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _load_channel(args):
    if getattr(args, "mac", None):
        return load_mac(args.mac)
    return dueck_mac()


def _solver_config(args, seed: int) -> SolverConfig:
    return SolverConfig(
        restarts=getattr(args, "restarts", 64),
        max_iters=getattr(args, "max_iters", 10_000),
        seed=seed,
        u_size=getattr(args, "u_size", 2),
    )


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise CfmacError(f"could not parse {what}: {text!r}") from exc


# --- subcommands ----------------------------------------------------------------


def _cmd_dueck_sim(args) -> int:
    seed = _resolve_seed(args)
    params = derive_params(args.n, args.epsilon, args.delta)
    codebook = gen_codebook(params.n1, params.m1, seed, backend=args.backend)
    if args.dump_codebook:
        if codebook.backend != "explicit":
            raise CfmacError("only the explicit backend can be dumped to a file")
        codebook.dump(args.dump_codebook)
    stats = run_scheme(
        codebook,
        params,
        mode=args.mode,
        samples=args.samples,
        seed=seed,
        workers=args.workers,
    )
    report = {
        "format_version": FORMAT_VERSION,
        "command": "dueck-sim",
        "seed": seed,
        "backend": codebook.backend,
        "params": {
            "n": params.n,
            "epsilon": params.epsilon,
            "delta": params.delta,
            "n1": params.n1,
            "n2": params.n2,
            "log2_m1": params.log2_m1,
            "log2_m2": params.log2_m2,
            "ell": params.ell,
            "k": params.k,
            "rate_sum": params.rate_sum,
            "rate_sum_phase1": params.rate_sum_phase1,
        },
        "stats": stats.to_dict(),
    }
    _emit(report, args.out)
    return 0 if stats.decode_errors == 0 else 1


def _cmd_sigma1_curve(args) -> int:
    seed = _resolve_seed(args)
    mac = _load_channel(args)
    cfg = _solver_config(args, seed)
    deltas = _parse_float_list(args.deltas, "--deltas")
    seen = set()
    unique = []
    for d in deltas:
        if d in seen:
            print(f"warning: duplicate delta {d:g} dropped", file=sys.stderr)
            continue
        seen.add(d)
        unique.append(d)
    rows = []
    for d in unique:
        point = sigma1(mac, d, cfg)
        rows.append((point.delta, point.value, point.feasibility_slack, point.restarts))
    for (d0, v0, _, _), (d1, v1, _, _) in zip(rows, rows[1:]):
        if d1 > d0 and v1 < v0 - 1e-6:
            print(
                f"warning: curve decreases from delta={d0:g} to delta={d1:g}; "
                "consider more restarts",
                file=sys.stderr,
            )
    if args.out:
        write_sigma_csv(args.out, rows)
    else:
        sys.stdout.write("delta,value,slack,restarts\n")
        for d, v, s, r in rows:
            sys.stdout.write(f"{d:.12g},{v:.12g},{s:.12g},{r:d}\n")
    return 0


def _cmd_bounds(args) -> int:
    seed = _resolve_seed(args)
    mac = _load_channel(args)
    cfg = _solver_config(args, seed)
    delta = float(args.delta)
    lo_point = sigma1(mac, delta, cfg)
    sigma_lo = lo_point.value
    candidates: dict[str, float] = {"output_entropy_cap": math.log2(mac.y_size)}
    if delta == 0.0:
        sigma_hi = sigma_lo
        candidates["zero_budget"] = sigma_lo
    else:
        for eps in (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5):
            candidates[f"extraction_eps_{eps:g}"] = wringing_upper_bound(mac, delta, eps, cfg)
        zero = sigma1(mac, 0.0, cfg).value
        try:
            candidates["continuity_envelope"] = continuity_envelope(mac, delta, zero)
        except CfmacError:
            pass
        sigma_hi = min(candidates.values())
    report = {
        "format_version": FORMAT_VERSION,
        "command": "bounds",
        "seed": seed,
        "delta": delta,
        "sigma_lower": sigma_lo,
        "sigma_upper": sigma_hi,
        "feasibility_slack": lo_point.feasibility_slack,
        "upper_candidates": candidates,
    }
    if args.cout1 is not None or args.cout2 is not None:
        if args.cout1 is None or args.cout2 is None:
            raise CfmacError("--cout1 and --cout2 must be given together")
        lo, hi = sum_capacity_bounds(sigma_lo, sigma_hi, args.cout1, args.cout2)
        report["cout1"] = args.cout1
        report["cout2"] = args.cout2
        report["sum_capacity_lower"] = lo
        report["sum_capacity_upper"] = hi
    _emit(report, args.out)
    return 0


def _cmd_outer_bound(args) -> int:
    p_star, value = dueck_outer_bound(grid_step=args.grid_step)
    report = {
        "format_version": FORMAT_VERSION,
        "command": "outer-bound",
        "grid_step": args.grid_step,
        "p_star": p_star,
        "value": value,
        "reference_value": _OUTER_REFERENCE,
    }
    _emit(report, args.out)
    return 0


def _cmd_wringing(args) -> int:
    cj, n, s1, s2 = load_word_distribution(args.input)
    result = wringing_extract(cj, n, s1, s2, args.epsilon, args.delta, cap=args.cap)
    report = {
        "format_version": FORMAT_VERSION,
        "command": "wringing",
        "n": result.n,
        "epsilon": result.epsilon,
        "delta": result.delta,
        "T": list(result.T),
        "bound": result.bound,
        "residuals": {str(t): v for t, v in sorted(result.residuals.items())},
    }
    _emit(report, args.out)
    return 0


def _cmd_sqrt_law(args) -> int:
    seed = _resolve_seed(args)
    mac = _load_channel(args)
    p_ind = load_joint(args.p_ind)
    p_dep = load_joint(args.p_dep)
    cstar = check_cstar(
        mac,
        p_ind,
        p_dep,
        verify_ind_optimal=args.verify_ind_optimal,
        solver_cfg=_solver_config(args, seed) if args.verify_ind_optimal else None,
    )
    report = {
        "format_version": FORMAT_VERSION,
        "command": "sqrt-law",
        "seed": seed,
        "cstar": cstar.to_dict(),
        "curve": None,
    }
    if not cstar.member:
        _emit(report, args.out)
        return 1
    deltas = _parse_float_list(args.deltas, "--deltas")
    curve = sqrt_law_curve(mac, p_ind, p_dep, eps_tilde=args.eps_tilde, deltas=deltas)
    report["curve"] = curve.to_dict()
    _emit(report, args.out)
    return 0


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfmac",
        description="Conference-aided multiple-access coding: simulation and bounds.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dueck-sim", help="round-trip the two-phase conference scheme")
    p.add_argument("--n", type=int, required=True, help="total blocklength")
    p.add_argument("--epsilon", type=float, required=True, help="phase-2 fraction")
    p.add_argument("--delta", type=float, required=True, help="rate back-off / list knob")
    p.add_argument("--mode", choices=["sample", "exhaustive"], default="sample")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--backend", choices=["auto", "explicit", "keyed"], default="auto")
    p.add_argument("--dump-codebook", metavar="PATH", help="write the codeword list (explicit only)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH", help="also write the JSON report here")
    p.set_defaults(func=_cmd_dueck_sim)

    p = sub.add_parser("sigma1-curve", help="tabulate the constrained-information curve")
    p.add_argument("--deltas", required=True, help="comma-separated budgets")
    p.add_argument("--mac", metavar="PATH", help="channel file (default: collapse channel)")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=10_000)
    p.add_argument("--u-size", dest="u_size", type=int, default=2)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    p.set_defaults(func=_cmd_sigma1_curve)

    p = sub.add_parser("bounds", help="certified curve bounds, optionally sum-capacity")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cout1", type=float)
    p.add_argument("--cout2", type=float)
    p.add_argument("--mac", metavar="PATH")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--max-iters", dest="max_iters", type=int, default=10_000)
    p.add_argument("--u-size", dest="u_size", type=int, default=2)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("outer-bound", help="closed-form collapse-channel maximization")
    p.add_argument("--grid-step", dest="grid_step", type=float, default=1e-3)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_outer_bound)

    p = sub.add_parser("wringing", help="coordinate extraction on a stored distribution")
    p.add_argument("--input", required=True, metavar="PATH")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--cap", type=int, default=1 << 22)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_wringing)

    p = sub.add_parser("sqrt-law", help="dependence-gain membership and inversion curve")
    p.add_argument("--mac", metavar="PATH", help="channel file (default: collapse channel)")
    p.add_argument("--p-ind", dest="p_ind", required=True, metavar="PATH")
    p.add_argument("--p-dep", dest="p_dep", required=True, metavar="PATH")
    p.add_argument("--eps-tilde", dest="eps_tilde", type=float, default=1e-3)
    p.add_argument("--deltas", default="1e-6,1e-5,1e-4")
    p.add_argument("--verify-ind-optimal", dest="verify_ind_optimal", action="store_true")
    p.add_argument("--restarts", type=int, default=24)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=_cmd_sqrt_law)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CfmacError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
