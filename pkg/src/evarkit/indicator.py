"""EVaR of indicators and the implicit distortion Lambda.

For an event of mass a, the optimal scenario is constant on A and on its
complement, so e_alpha(1_A) reduces to the smallest lam with
F(lam, a) <= -log(alpha), where F is the entropy of the two-point density
(lam/a on A, (1-lam)/(1-a) off A). Lambda(a) is that lam.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import xlogy

from .dist import RiskLevel
from .errors import SolverError

ROOT_TOL = 1e-12
MAX_BISECTIONS = 200
MEMO_POINTS = 4096


def F(lam: float, a: float) -> float:
    """Relative entropy of the two-point density with weight lam on a set of mass a."""
    if not (0.0 <= lam <= 1.0 and 0.0 <= a <= 1.0):
        raise ValueError(f"F needs lam, a in [0, 1], got lam={lam!r}, a={a!r}")
    return float(
        xlogy(lam, lam) + xlogy(1.0 - lam, 1.0 - lam) - xlogy(lam, a) - xlogy(1.0 - lam, 1.0 - a)
    )


def F_partials(lam: float, a: float) -> tuple[float, float, np.ndarray]:
    """First partials (dF/dlam, dF/da) and the Hessian [[F_ll, F_la], [F_la, F_aa]]."""
    if not (0.0 < lam < 1.0 and 0.0 < a < 1.0):
        raise ValueError(f"F_partials needs interior arguments, got lam={lam!r}, a={a!r}")
    d_lam = math.log(lam / (1.0 - lam)) - math.log(a / (1.0 - a))
    d_a = (a - lam) / (a * (1.0 - a))
    f_ll = 1.0 / lam + 1.0 / (1.0 - lam)
    f_la = -1.0 / a - 1.0 / (1.0 - a)
    f_aa = lam / a**2 + (1.0 - lam) / (1.0 - a) ** 2
    return d_lam, d_a, np.array([[f_ll, f_la], [f_la, f_aa]])


@dataclass(frozen=True)
class IndicatorPoint:
    a: float
    lam: float

    def __post_init__(self) -> None:
        if not (0.0 < self.a < 1.0):
            raise ValueError(f"mass a must lie in (0, 1), got {self.a!r}")
        if not (0.0 <= self.lam < self.a):
            raise ValueError(f"lam must lie in [0, a), got {self.lam!r}")

    def density(self) -> tuple[float, float]:
        """Values of dQ/dP on A and on its complement."""
        return self.lam / self.a, (1.0 - self.lam) / (1.0 - self.a)


@dataclass(frozen=True)
class LambdaCurve:
    """Lambda(a) = e_alpha(1_A) with P[A] = a, at a fixed level.

    With ``memoize=True`` a monotone cubic interpolant over a uniform grid on
    [1 - alpha, 1] is built once at construction; it is only used by
    :meth:`interpolate` (curve export). :func:`lambda_of` always root-solves.
    """

    level: RiskLevel
    memoize: bool = False
    tol: float = ROOT_TOL
    _interp: PchipInterpolator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.memoize:
            grid = np.linspace(1.0 - self.level.alpha, 1.0, MEMO_POINTS)
            vals = [lambda_of(self, float(x)) for x in grid]
            object.__setattr__(self, "_interp", PchipInterpolator(grid, vals))

    @property
    def alpha(self) -> float:
        return self.level.alpha

    @property
    def threshold(self) -> float:
        """Mass 1 - alpha at and below which Lambda vanishes."""
        return 1.0 - self.level.alpha

    def __call__(self, a: float) -> float:
        return lambda_of(self, a)

    def interpolate(self, a: float) -> float:
        if self._interp is None:
            return lambda_of(self, a)
        if a <= self.threshold:
            return 0.0
        return float(np.clip(self._interp(a), 0.0, 1.0))

    def derivative(self, a: float) -> float:
        return lambda_derivative(self, a)

    def second_derivative(self, a: float) -> float:
        return lambda_second_derivative(self, a)


def _F_array(lam: np.ndarray, a: np.ndarray) -> np.ndarray:
    return xlogy(lam, lam) + xlogy(1.0 - lam, 1.0 - lam) - xlogy(lam, a) - xlogy(1.0 - lam, 1.0 - a)


def _solve(a: np.ndarray, beta: float, tol: float) -> np.ndarray:
    """Vectorized bisection for F(lam, a) = beta on (0, a), then Newton polish."""
    lo = np.zeros_like(a)
    hi = a.copy()
    lam = 0.5 * a
    active = np.ones(a.shape, dtype=bool)
    for _ in range(MAX_BISECTIONS):
        lam = np.where(active, 0.5 * (lo + hi), lam)
        g = _F_array(lam, a) - beta
        done = (np.abs(g) <= tol) | (lam <= lo) | (lam >= hi)
        active &= ~done
        if not active.any():
            break
        lo = np.where(active & (g > 0), lam, lo)
        hi = np.where(active & (g <= 0), lam, hi)
    else:
        raise SolverError("Lambda root bisection hit its iteration cap", unresolved=int(active.sum()))

    # F is strictly convex in lam and its slope blows up at 0, so Newton is
    # only applied well inside (0, a) and only kept when the residual shrinks
    polish = (lam > 1e-6) & (lam < a - 1e-6)
    for _ in range(2):
        resid = _F_array(lam, a) - beta
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.log(lam / (1.0 - lam)) - np.log(a / (1.0 - a))
            step = np.clip(lam - resid / slope, 0.0, a)
        better = polish & (np.abs(_F_array(step, a) - beta) < np.abs(resid))
        lam = np.where(better, step, lam)
    return lam


def lambda_values(curve: LambdaCurve, a) -> np.ndarray:
    """Lambda evaluated elementwise on an array of masses in [0, 1]."""
    arr = np.asarray(a, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)) or np.any(np.isnan(arr)):
        raise ValueError("masses must lie in [0, 1]")
    beta = curve.level.beta
    out = np.zeros(arr.shape)
    out[arr >= 1.0] = 1.0
    with np.errstate(divide="ignore"):
        zero_region = (arr <= curve.threshold) | (-np.log1p(-arr) <= beta)
    inner = ~zero_region & (arr < 1.0)
    if inner.any():
        out[inner] = _solve(arr[inner], beta, curve.tol)
    return out


def lambda_of(curve: LambdaCurve, a: float) -> float:
    """Root lam in [0, a) of F(lam, a) = -log(alpha), or 0 below the threshold."""
    if not (0.0 <= a <= 1.0):
        raise ValueError(f"a must lie in [0, 1], got {a!r}")
    return float(lambda_values(curve, np.array([a]))[0])


def _check_interior(curve: LambdaCurve, a: float) -> None:
    if not (curve.threshold < a < 1.0):
        raise ValueError(f"a must lie in ({curve.threshold!r}, 1), got {a!r}")


def lambda_derivative(curve: LambdaCurve, a: float) -> float:
    """dLambda/da = -F_a / F_lam at (Lambda(a), a), by implicit differentiation."""
    _check_interior(curve, a)
    lam = lambda_of(curve, a)
    if lam <= 0.0:
        return 0.0
    d_lam, d_a, _ = F_partials(lam, a)
    return -d_a / d_lam


def lambda_second_derivative(curve: LambdaCurve, a: float) -> float:
    """Curvature from differentiating F_a + F_lam * Lambda' = 0 once more in a.

    The Hessian quadratic form in the direction (Lambda', 1) equals
    -F_lam * Lambda''.
    """
    _check_interior(curve, a)
    lam = lambda_of(curve, a)
    if lam <= 0.0:
        return 0.0
    d_lam, d_a, hess = F_partials(lam, a)
    slope = -d_a / d_lam
    direction = np.array([slope, 1.0])
    form = float(direction @ hess @ direction)
    return form / -d_lam
