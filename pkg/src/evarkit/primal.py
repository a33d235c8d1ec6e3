"""Primal side of EVaR: sup over z > 0 of -(1/z) log(E[exp(-z xi)] / alpha).

Kept deliberately independent from :mod:`evarkit.entropy_dual` so the two
solvers can check each other. The objective is maximized by golden-section
search on t = log z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .dist import DiscreteDistribution, RiskLevel, min_mass
from .errors import SolverError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
LOGZ_TOL = 1e-10
MAX_ITER = 500
MAX_EXPANSIONS = 200


@dataclass(frozen=True)
class PrimalSolution:
    value: float
    z_star: float | None  # None marks the boundary regime (sup not attained)
    iterations: int = 0
    objective_trace: tuple[tuple[float, float], ...] | None = None

    @property
    def boundary(self) -> bool:
        return self.z_star is None


def primal_objective(d: DiscreteDistribution, level: RiskLevel, z: float) -> float:
    """-(1/z) log E[exp(-z xi)] + (1/z) log(alpha)."""
    if not z > 0:
        raise ValueError(f"z must be positive, got {z!r}")
    vmin = d.values[0]
    # factor out exp(-z vmin) so every exponent is <= 0
    log_mgf = logsumexp(np.log(d.probs) - z * (d.values - vmin))
    return float(vmin - (log_mgf + level.beta) / z)


def _bracket(f, t0: float, step: float = 1.0) -> tuple[float, float, float, int]:
    """Grow a (lo, mid, hi) bracket in log z with f(mid) >= f(lo), f(hi)."""
    a, b = t0, t0 + step
    fa, fb = f(a), f(b)
    if fb < fa:
        a, b, fa, fb = b, a, fb, fa
        step = -step
    calls = 2
    for _ in range(MAX_EXPANSIONS):
        step *= 2.0
        c = b + step
        fc = f(c)
        calls += 1
        if fc <= fb:
            lo, hi = (a, c) if a < c else (c, a)
            return lo, b, hi, calls
        a, b, fa, fb = b, c, fb, fc
    raise SolverError("could not bracket the primal maximizer", t=b, objective=fb)


def evar_primal(
    d: DiscreteDistribution,
    level: RiskLevel,
    tol: float = LOGZ_TOL,
    trace: bool = False,
) -> PrimalSolution:
    if d.is_constant:
        return PrimalSolution(float(d.values[0]), None)
    if level.alpha <= min_mass(d):
        # the objective keeps increasing towards ess inf as z -> infinity
        return PrimalSolution(float(d.values[0]), None)

    points: list[tuple[float, float]] = []

    def f(t: float) -> float:
        val = primal_objective(d, level, math.exp(t))
        if trace:
            points.append((math.exp(t), val))
        return val

    lo, _, hi, calls = _bracket(f, -math.log(d.value_range))
    c = hi - INV_PHI * (hi - lo)
    e = lo + INV_PHI * (hi - lo)
    fc, fe = f(c), f(e)
    it = 0
    while hi - lo > tol:
        it += 1
        if it > MAX_ITER:
            raise SolverError("golden-section search hit its iteration cap", lo=lo, hi=hi)
        if fc >= fe:
            hi, e, fe = e, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + INV_PHI * (hi - lo)
            fe = f(e)
    t_star, value = (c, fc) if fc >= fe else (e, fe)
    return PrimalSolution(
        value,
        math.exp(t_star),
        it + calls,
        tuple(points) if trace else None,
    )
