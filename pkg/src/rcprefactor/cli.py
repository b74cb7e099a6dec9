"""Command-line front end.

Exit codes: 0 success, 1 I/O error, 2 validation error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import bounds as bnd
from .density import (build_density_table, competitor_spectrum, forward_spectrum,
                      reverse_spectrum, tilt)
from .errors import BudgetExceeded, DegenerateFit, RCPrefactorError, ValidationError
from .exponents import Regime, error_exponent
from .laws import convolve_n
from .montecarlo import SIM_CSV_HEADER, prefactor_fit, rcu_monte_carlo, simulate_pe
from .regularity import regularity_report
from .scenario import load_scenario

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_BUDGET = 0, 1, 2, 3

DEFAULT_FIT_GRID = "60,120,240,480"


@dataclass(frozen=True)
class RunConfig:
    command: str
    scenario_path: Path
    rate: float | None = None
    n_values: tuple[int, ...] = ()
    trials: int = 1
    seed: int | None = None
    s: float | None = None
    delta: float | None = None
    output: Path | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be >= 1")
        if self.command in ("bounds", "prefactor") and not self.n_values:
            raise ValidationError("blocklength grid is empty")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("blocklengths must be positive integers")
    return vals


def _mc_trials(text: str) -> int:
    text = text.removeprefix("trials=")
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected trials=N, got {text!r}")


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _emit_json(doc: dict, output: Path | None) -> None:
    _emit(json.dumps(_json_safe(doc), indent=2) + "\n", output)


def _load(args) -> "Scenario":
    rate = args.rate
    if rate is not None and args.bits:
        rate *= math.log(2)
    return load_scenario(args.scenario, rate)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def analyze_doc(sc, delta: float | None = None) -> dict:
    report = error_exponent(sc)
    reg = regularity_report(sc, report.rho_hat, report.s_star, delta)
    doc = report.to_dict()
    doc.update(reg.to_dict())
    return doc


def cmd_analyze(args) -> int:
    sc = _load(args)
    _emit_json(analyze_doc(sc, args.delta), args.output)
    return EXIT_OK


def cmd_bounds(args) -> int:
    sc = _load(args)
    report = error_exponent(sc)
    s = report.s_star if args.s is None else args.s
    kinds = [k.strip() for k in args.kind.split(",")]
    rows = []
    for kind in kinds:
        if kind == "rcu" and args.mc is not None:
            if args.seed is None:
                raise ValidationError("--mc requires --seed")
            vals = []
            for n in args.n:
                est = rcu_monte_carlo(sc, s, n, args.mc, args.seed)
                vals.append(math.log(est.p_hat) if est.p_hat > 0 else -math.inf)
            curve = bnd.BoundCurve(args.n, tuple(vals), bnd.BoundKind.RCU_MC)
        elif kind == "rcu":
            try:
                curve = bnd.rcu_curve(sc, s, args.n)
            except BudgetExceeded as exc:
                raise BudgetExceeded(f"{exc}; rerun with --mc trials=N --seed S") from exc
        elif kind == "gallager":
            curve = bnd.gallager_curve(report, args.n)
        elif kind == "shape":
            curve = bnd.theorem_shape(report, args.n)
        else:
            raise ValidationError(f"unknown bound kind {kind!r} (rcu, gallager, shape)")
        rows.append(curve.to_csv(header=False))
    _emit("n,log_bound,kind\n" + "".join(rows), args.output)
    return EXIT_OK


def default_tolerance(regime: Regime) -> float:
    return 0.10 if regime is Regime.IRR_LOW else 0.15


def prefactor_doc(sc, n_values, s=None, tolerance=None, mc=None, seed=None) -> dict:
    report = error_exponent(sc)
    s = report.s_star if s is None else s
    if len(set(n_values)) < 4:
        raise DegenerateFit(f"need at least 4 distinct blocklengths, got {len(set(n_values))}")
    if mc is not None:
        if seed is None:
            raise ValidationError("--mc requires --seed")
        vals = tuple(math.log(rcu_monte_carlo(sc, s, n, mc, seed).p_hat) for n in n_values)
        curve = bnd.BoundCurve(tuple(n_values), vals, bnd.BoundKind.RCU_MC)
    else:
        curve = bnd.rcu_curve(sc, s, n_values)
    fit = prefactor_fit(curve, report.e_r, report.alpha_order)
    tol = default_tolerance(report.regime) if tolerance is None else tolerance
    doc = fit.to_dict()
    doc.update({
        "tolerance": tol,
        "status": "PASS" if fit.deviation <= tol else "FAIL",
        "regime": report.regime.value,
        "n_values": list(curve.n_values),
        "log_bound": list(curve.log_bound),
        "e_r": report.e_r,
        "rho_hat": report.rho_hat,
        "s": s,
    })
    return doc


def cmd_prefactor(args) -> int:
    sc = _load(args)
    doc = prefactor_doc(sc, args.n, args.s, args.tolerance, args.mc, args.seed)
    _emit_json(doc, args.output)
    return EXIT_OK


def cmd_simulate(args) -> int:
    sc = _load(args)
    M = sc.num_codewords(args.n) if args.M is None else args.M
    est = simulate_pe(sc, args.n, args.trials, args.seed, M=M)
    if args.format == "csv":
        _emit(SIM_CSV_HEADER + "\n" + est.csv_row(args.n) + "\n", args.output)
    else:
        doc = est.to_dict()
        doc.update({"n": args.n, "M": M})
        _emit_json(doc, args.output)
    return EXIT_OK


def _symbol(sc, text: str) -> int:
    if sc.labels_y is not None and text in sc.labels_y:
        return sc.labels_y.index(text)
    try:
        y = int(text)
    except ValueError:
        raise ValidationError(f"unknown output symbol {text!r}")
    if not 0 <= y < sc.ny:
        raise ValidationError(f"output symbol {y} out of range")
    return y


def cmd_spectrum(args) -> int:
    sc = _load(args)
    report = None
    s = args.s
    if s is None:
        report = error_exponent(sc)
        s = report.s_star
    table = build_density_table(sc, s)
    if args.which == "forward":
        law = forward_spectrum(table, sc)
    elif args.which in ("competitor", "reverse"):
        if args.y is None:
            raise ValidationError(f"--y is required for the {args.which} spectrum")
        y = _symbol(sc, args.y)
        law = (competitor_spectrum(table, sc, y) if args.which == "competitor"
               else reverse_spectrum(table, y))
    else:  # tilted
        report = report or error_exponent(sc)
        base = forward_spectrum(table, sc).negate_shift(sc.rate)
        law = tilt(base, report.rho_hat, report.e_r).z
    if args.n is not None and args.n != 1:
        law = convolve_n(law, args.n)
    _emit(law.to_csv(), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rcprefactor",
        description="Random-coding exponents, RCU bounds and prefactor checks for DMCs.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("scenario", type=Path, help="scenario JSON file")
        p.add_argument("--rate", type=float, help="rate (nats/use unless --bits); overrides R")
        p.add_argument("--bits", action="store_true", help="interpret --rate in bits/use")
        p.add_argument("-o", "--output", type=Path, help="write to file instead of stdout")

    p = sub.add_parser("analyze", help="exponent and regularity report (JSON)")
    common(p)
    p.add_argument("--delta", type=float, help="override the delta selection rule")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bounds", help="bound curves as CSV (n,log_bound,kind)")
    common(p)
    p.add_argument("--n", type=_int_list, required=True, help="comma-separated blocklengths")
    p.add_argument("--kind", default="rcu", help="comma-separated: rcu, gallager, shape")
    p.add_argument("--s", type=float, help="override s (default: optimal s)")
    p.add_argument("--mc", type=_mc_trials, metavar="trials=N",
                   help="Monte Carlo RCU with N trials instead of exact evaluation")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("prefactor", help="fit the prefactor order against the theory")
    common(p)
    p.add_argument("--n", type=_int_list, default=_int_list(DEFAULT_FIT_GRID))
    p.add_argument("--s", type=float)
    p.add_argument("--tolerance", type=float,
                   help="PASS threshold on |slope - predicted| (default 0.15; 0.10 for IRR_LOW)")
    p.add_argument("--mc", type=_mc_trials, metavar="trials=N")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_prefactor)

    p = sub.add_parser("simulate", help="simulate the random-coding ensemble")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--M", type=int, help="number of codewords (default ceil(exp(nR)))")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("spectrum", help="dump a discrete law as CSV (value,prob)")
    common(p)
    p.add_argument("--which", choices=("forward", "competitor", "reverse", "tilted"),
                   default="forward")
    p.add_argument("--s", type=float)
    p.add_argument("--y", help="output symbol (index or label)")
    p.add_argument("--n", type=int, help="n-fold convolution of the law")
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "trials", 1) is not None and getattr(args, "trials", 1) < 1:
        parser.error("--trials must be >= 1")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValidationError, DegenerateFit, RCPrefactorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
