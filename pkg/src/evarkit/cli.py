"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 internal inconsistency
(primal/dual disagreement, Kusuoka residual, failed verification, solver fault).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import __version__
from .dist import DiscreteDistribution, DistributionError, RiskLevel, independent_sum, read_distribution
from .distortion import (
    DistortionFunction,
    cvar,
    in_scenario_set,
    noncomonotone_witness,
    sandwich,
    u_lambda,
)
from .entropy_dual import ENTROPY_TOL, evar_dual
from .errors import InconsistencyError, SolverError
from .indicator import ROOT_TOL, LambdaCurve, lambda_derivative, lambda_values
from .kusuoka import kusuoka_from_dual
from .primal import evar_primal

SCHEMA_VERSION = 1
EXIT_OK, EXIT_USAGE, EXIT_INCONSISTENT = 0, 1, 2
PRIMAL_DUAL_TOL = 1e-6
KUSUOKA_TOL = 1e-5
COHERENCE_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which we reserve
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    input: str | None = None
    weighted: bool = False
    output: str = "table"
    tol_entropy: float = ENTROPY_TOL
    tol_root: float = ROOT_TOL
    points: int = 101
    witness: tuple[float, float] | None = None
    interpolate: bool = False

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise UsageError(f"--alpha must lie strictly inside (0, 1), got {self.alpha!r}")
        if self.points < 2:
            raise UsageError("--points must be at least 2")
        for name in ("tol_entropy", "tol_root"):
            if not getattr(self, name) > 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")

    @property
    def level(self) -> RiskLevel:
        return RiskLevel(self.alpha)

    @property
    def curve(self) -> LambdaCurve:
        return LambdaCurve(self.level, memoize=self.interpolate, tol=self.tol_root)

    def load(self) -> DiscreteDistribution:
        if self.input is None:
            raise UsageError("--input is required")
        return read_distribution(self.input, self.weighted)


def fmt(x: float | None) -> str:
    if x is None:
        return ""
    return format(float(x), ".15g")


def _num(x):
    """JSON-ready float; repr-based output is round-trip exact."""
    return None if x is None else float(x)


def _color(text: str, code: str) -> str:
    if os.environ.get("NO_COLOR") is not None or not sys.stdout.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def eval_report(cfg: RunConfig, d: DiscreteDistribution) -> dict:
    level = cfg.level
    dual = evar_dual(d, level, tol=cfg.tol_entropy)
    primal = evar_primal(d, level)
    sw = sandwich(d, level, evar_value=dual.value, curve=cfg.curve)
    return {
        "schema_version": SCHEMA_VERSION,
        "alpha": level.alpha,
        "mean": d.mean(),
        "ess_inf": d.ess_inf(),
        "evar_primal": primal.value,
        "evar_dual": dual.value,
        "cvar": sw.cvar_value,
        "u_lambda": sw.ulambda_value,
        "gap_cvar_evar": sw.gaps[0],
        "gap_evar_ulambda": sw.gaps[1],
        "primal_dual_diff": abs(primal.value - dual.value),
        "degenerate": dual.degenerate,
        "z_star_dual": dual.z_star,
        "z_star_primal": primal.z_star,
        "entropy": dual.entropy,
        "beta": level.beta,
        "iterations_dual": dual.iterations,
        "iterations_primal": primal.iterations,
    }


def _emit_record(record: dict, as_json: bool, out) -> None:
    if as_json:
        clean = {k: (_num(v) if isinstance(v, float) else v) for k, v in record.items()}
        out.write(json.dumps(clean, indent=2) + "\n")
        return
    width = max(len(k) for k in record)
    for key, val in record.items():
        if isinstance(val, bool) or val is None or isinstance(val, int):
            shown = "" if val is None else str(val).lower()
        else:
            shown = fmt(val)
        out.write(f"{key:<{width}}  {shown}".rstrip() + "\n")


def cmd_eval(cfg: RunConfig, out) -> int:
    record = eval_report(cfg, cfg.load())
    _emit_record(record, cfg.output == "json", out)
    if record["primal_dual_diff"] > PRIMAL_DUAL_TOL:
        print(
            f"internal inconsistency: primal and dual differ by {fmt(record['primal_dual_diff'])}",
            file=sys.stderr,
        )
        return EXIT_INCONSISTENT
    return EXIT_OK


def cmd_lambda_curve(cfg: RunConfig, out) -> int:
    curve = cfg.curve
    grid = np.arange(cfg.points) / (cfg.points - 1)
    if cfg.interpolate:
        lam = np.array([curve.interpolate(float(a)) for a in grid])
    else:
        lam = lambda_values(curve, grid)
    out.write("a,lambda,dlambda_da\n")
    for a, v in zip(grid, lam):
        a = float(a)
        slope = lambda_derivative(curve, a) if curve.threshold < a < 1.0 else None
        out.write(f"{fmt(a)},{fmt(v)},{fmt(slope)}\n")
    return EXIT_OK


def cmd_kusuoka(cfg: RunConfig, out) -> int:
    d = cfg.load()
    dual = evar_dual(d, cfg.level, tol=cfg.tol_entropy)
    report = kusuoka_from_dual(d, cfg.level, dual)
    record = {
        "schema_version": SCHEMA_VERSION,
        "alpha": cfg.alpha,
        "nu": [{"level": x, "mass": m} for x, m in report.measure.atoms],
        "mixture": report.mixture_value,
        "evar": report.evar_value,
        "difference": report.mixture_value - report.evar_value,
        "density_entropy_bound": cfg.level.beta,
        "degenerate": report.degenerate,
    }
    if report.degenerate:
        record["note"] = "alpha <= P[xi = ess inf]: entropy constraint slack, mixture equals ess inf"
    out.write(json.dumps(record, indent=2) + "\n")
    if report.residual > KUSUOKA_TOL:
        print(f"internal inconsistency: Kusuoka residual {fmt(report.residual)}", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def verify_checks(cfg: RunConfig, d: DiscreteDistribution) -> list[tuple[str, bool | None, float | None]]:
    """(name, passed, margin) triples; passed is None for a skipped check."""
    level = cfg.level
    curve = cfg.curve

    def evar(law: DiscreteDistribution) -> float:
        return evar_dual(law, level, tol=cfg.tol_entropy).value

    checks: list[tuple[str, bool | None, float | None]] = []
    dual = evar_dual(d, level, tol=cfg.tol_entropy)
    primal = evar_primal(d, level)
    diff = abs(primal.value - dual.value)
    checks.append(("primal_dual_agreement", diff <= PRIMAL_DUAL_TOL, PRIMAL_DUAL_TOL - diff))

    # computed piecewise: sandwich() raises on a violation, here we report it
    gaps = (cvar(d, level.alpha) - dual.value, dual.value - u_lambda(d, level, curve))
    checks.append(("sandwich_cvar_ge_evar", gaps[0] >= -1e-9, gaps[0]))
    checks.append(("sandwich_evar_ge_ulambda", gaps[1] >= -1e-9, gaps[1]))
    if len(d) > 2 and not dual.degenerate:
        checks.append(("strict_gap_support_gt_2", gaps[1] > 1e-6, gaps[1]))
    else:
        checks.append(("strict_gap_support_gt_2", None, None))

    ku = kusuoka_from_dual(d, level, dual)
    checks.append(("kusuoka_mixture_identity", ku.residual <= KUSUOKA_TOL, KUSUOKA_TOL - ku.residual))

    if len(d) <= 12:
        member = in_scenario_set(dual.scenario, d, DistortionFunction.from_curve(curve), tol=1e-9)
        checks.append(("dual_optimizer_in_S_lambda", member, None))
    else:
        checks.append(("dual_optimizer_in_S_lambda", None, None))

    base = dual.value
    shift = evar(d.shift(1.0)) - (base + 1.0)
    checks.append(("translation", abs(shift) <= COHERENCE_TOL, COHERENCE_TOL - abs(shift)))
    homog = evar(d.scale(2.0)) - 2.0 * base
    checks.append(("positive_homogeneity", abs(homog) <= COHERENCE_TOL, COHERENCE_TOL - abs(homog)))
    mono = evar(_raise_upper_half(d)) - base
    checks.append(("monotonicity", mono >= -COHERENCE_TOL, mono))
    if len(d) <= 200:
        sup = evar(independent_sum(d, d)) - 2.0 * base
        checks.append(("superadditivity_independent_copy", sup >= -COHERENCE_TOL, sup))
    else:
        checks.append(("superadditivity_independent_copy", None, None))

    if cfg.witness is not None:
        a, b = cfg.witness
        w = noncomonotone_witness(level, a, b, curve)
        for name, ok in w.checks().items():
            margin = w.gap if name == "strict_gap" else None
            checks.append((f"witness_{name}", ok, margin))
    return checks


def _raise_upper_half(d: DiscreteDistribution) -> DiscreteDistribution:
    """A law dominating d pointwise: atoms above the median moved up by 1."""
    median = d.quantile(0.5)
    vals = np.where(d.values > median, d.values + 1.0, d.values)
    return DiscreteDistribution(vals, d.probs)


def cmd_verify(cfg: RunConfig, out) -> int:
    checks = verify_checks(cfg, cfg.load())
    as_json = cfg.output == "json"
    failed = [name for name, ok, _ in checks if ok is False]
    if as_json:
        record = {
            "schema_version": SCHEMA_VERSION,
            "alpha": cfg.alpha,
            "checks": [
                {"name": n, "status": "skip" if ok is None else ("pass" if ok else "fail"), "margin": _num(m)}
                for n, ok, m in checks
            ],
            "passed": not failed,
        }
        out.write(json.dumps(record, indent=2) + "\n")
    else:
        width = max(len(n) for n, _, _ in checks)
        for name, ok, margin in checks:
            if ok is None:
                tag = _color("SKIP", "33")
            else:
                tag = _color("PASS", "32") if ok else _color("FAIL", "31")
            out.write(f"{tag}  {name:<{width}}  {fmt(margin)}\n".rstrip() + "\n")
    if failed:
        print(f"verification failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


def _witness(text: str) -> tuple[float, float]:
    try:
        a, b = (float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected a,b") from None
    return a, b


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="evarkit", description="Entropic value-at-risk toolkit for discrete laws.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: argparse.ArgumentParser, needs_input: bool = True) -> None:
        p.add_argument("--alpha", type=float, required=True, help="level alpha in (0, 1)")
        if needs_input:
            p.add_argument("--input", required=True, help="CSV file of samples or value,weight rows")
            p.add_argument("--weighted", action="store_true", help="input rows are value,weight")
        p.add_argument("--tol-entropy", type=float, default=ENTROPY_TOL, help="dual entropy-matching tolerance")
        p.add_argument("--tol-root", type=float, default=ROOT_TOL, help="Lambda root tolerance")

    p = sub.add_parser("eval", help="all measures for one input")
    common(p)
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")

    p = sub.add_parser("lambda-curve", help="CSV of a, Lambda(a), dLambda/da")
    common(p, needs_input=False)
    p.add_argument("--points", type=int, default=101, help="grid size on [0, 1] (default 101)")
    p.add_argument("--interpolate", action="store_true", help="use the memoized interpolant")

    p = sub.add_parser("kusuoka", help="CVaR-mixture representation of the dual optimizer (JSON)")
    common(p)

    p = sub.add_parser("verify", help="run the property checks on one input")
    common(p)
    p.add_argument(
        "--witness", type=_witness, default=None, metavar="A,B", help="also check the three-point witness at masses a < b"
    )
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    return parser


COMMANDS = {
    "eval": cmd_eval,
    "lambda-curve": cmd_lambda_curve,
    "kusuoka": cmd_kusuoka,
    "verify": cmd_verify,
}


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            alpha=args.alpha,
            input=getattr(args, "input", None),
            weighted=getattr(args, "weighted", False),
            output="json" if getattr(args, "json", False) else "table",
            tol_entropy=args.tol_entropy,
            tol_root=args.tol_root,
            points=getattr(args, "points", 101),
            witness=getattr(args, "witness", None),
            interpolate=getattr(args, "interpolate", False),
        )
        return COMMANDS[args.command](cfg, out)
    except (UsageError, DistributionError, ValueError) as exc:
        print(f"evarkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, InconsistencyError) as exc:
        print(f"evarkit: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INCONSISTENT


if __name__ == "__main__":
    sys.exit(main())
