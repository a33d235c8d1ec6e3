"""Comonotone (Choquet) utilities built from convex distortions.

A convex f on [0, 1] with f(0) = 0 and f(1) = 1 defines the scenario set
S_f = {Q : Q[A] >= f(P[A]) for every event A} and the utility
u_f(xi) = inf_{Q in S_f} E_Q[xi]. On a discrete law the infimum is the step
sum  sum_i v_i (f(T_{i-1}) - f(T_i)),  T_i = P[xi > v_i].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .dist import DiscreteDistribution, RiskLevel, quantile, quantile_integral
from .entropy_dual import ScenarioDensity, evar_dual
from .errors import InconsistencyError
from .indicator import LambdaCurve, lambda_derivative, lambda_values

CONVEXITY_TOL = 1e-12
SANDWICH_SLACK = 1e-9
MAX_SUBSET_ATOMS = 20
TAIL_CUT = 1e-9


@dataclass(frozen=True, eq=False)
class DistortionFunction:
    """Convex distortion; build with :meth:`cvar`, :meth:`from_curve`,
    :meth:`identity` or :meth:`tabulated`."""

    kind: str
    alpha: float | None = None
    curve: LambdaCurve | None = None
    knots: tuple[np.ndarray, np.ndarray] | None = field(default=None, repr=False)

    @classmethod
    def identity(cls) -> "DistortionFunction":
        return cls("identity")

    @classmethod
    def cvar(cls, alpha: float) -> "DistortionFunction":
        if not (0.0 < alpha <= 1.0):
            raise ValueError(f"CVaR level must lie in (0, 1], got {alpha!r}")
        return cls("cvar", alpha=float(alpha))

    @classmethod
    def from_curve(cls, curve: LambdaCurve) -> "DistortionFunction":
        return cls("lambda", alpha=curve.alpha, curve=curve)

    @classmethod
    def tabulated(cls, xs, ys) -> "DistortionFunction":
        """Piecewise-linear distortion through the points (xs, ys)."""
        x = np.asarray(xs, dtype=float)
        y = np.asarray(ys, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("need at least two matching grid points")
        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
            raise ValueError("grid must increase strictly from 0 to 1")
        if y[0] != 0.0 or y[-1] != 1.0:
            raise ValueError("tabulated distortion must satisfy f(0) = 0 and f(1) = 1")
        slopes = np.diff(y) / np.diff(x)
        if np.any(np.diff(slopes) < -CONVEXITY_TOL):
            raise ValueError("tabulated distortion is not convex")
        return cls("tabulated", knots=(x, y))

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        if self.kind == "identity":
            out = arr.copy()
        elif self.kind == "cvar":
            out = np.maximum(0.0, (arr - 1.0 + self.alpha) / self.alpha)
            out = np.where(arr >= 1.0, 1.0, out)
        elif self.kind == "lambda":
            out = lambda_values(self.curve, arr)
        else:
            out = np.interp(arr, *self.knots)
        return float(out) if out.ndim == 0 else out

    def breakpoints(self) -> np.ndarray | None:
        """Kinks of a piecewise-linear distortion, or None when f is curved."""
        if self.kind == "identity":
            return np.array([0.0, 1.0])
        if self.kind == "cvar":
            return np.unique([0.0, 1.0 - self.alpha, 1.0])
        if self.kind == "tabulated":
            return self.knots[0]
        return None

    def slope(self, x: float) -> float:
        """Right-hand derivative (left-hand at 1) of a piecewise-linear distortion."""
        knots = self.breakpoints()
        if knots is None:
            return lambda_derivative(self.curve, x)
        ys = self(knots)
        k = min(int(np.searchsorted(knots, x, side="right")) - 1, knots.size - 2)
        return float((ys[k + 1] - ys[k]) / (knots[k + 1] - knots[k]))


def _tails(d: DiscreteDistribution) -> np.ndarray:
    """T_0..T_n with T_i = P[xi > v_i]; T_0 = 1, T_n = 0."""
    tail = np.concatenate((np.cumsum(d.probs[::-1])[::-1], [0.0]))
    tail[0] = 1.0
    return tail


def choquet_weights(d: DiscreteDistribution, f: DistortionFunction) -> np.ndarray:
    """Probabilities of the comonotone-extreme scenario in S_f."""
    ft = f(_tails(d))
    return ft[:-1] - ft[1:]


def choquet_utility(d: DiscreteDistribution, f: DistortionFunction) -> float:
    return float(np.dot(d.values, choquet_weights(d, f)))


def _lambda_slope(t: float, curve: LambdaCurve) -> float:
    """Lambda'(a) da/dt at a = 1 - exp(-t)."""
    a = -np.expm1(-t)
    if not (curve.threshold < a < 1.0):
        return 0.0
    return lambda_derivative(curve, a) * np.exp(-t)


def quantile_utility(d: DiscreteDistribution, f: DistortionFunction) -> float:
    """u_f as the integral of q(u) f'(1 - u) over (0, 1].

    Cells are bounded by the cdf steps and the kinks of f, so piecewise-linear
    distortions are integrated exactly. The curved Lambda distortion is
    integrated with adaptive quadrature of its implicit derivative.
    """
    cuts = set(d.cdf.tolist()) | {0.0}
    knots = f.breakpoints()
    if knots is not None:
        cuts |= {1.0 - k for k in knots.tolist()}
        edges = np.unique(np.clip(sorted(cuts), 0.0, 1.0))
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid = 0.5 * (lo + hi)
            total += quantile(d, mid) * f.slope(1.0 - mid) * (hi - lo)
        return total

    curve = f.curve
    edges = np.unique(np.clip(sorted(cuts | {curve.alpha}), 0.0, 1.0))
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo >= curve.alpha:
            continue  # 1 - u <= 1 - alpha, where Lambda' vanishes
        mid = 0.5 * (lo + hi)
        # Lambda'(a) blows up like 1/((1-a) log^2(1-a)) at a = 1; with
        # a = 1 - exp(-t) the integrand decays like 1/t^2. That decay is too
        # slow to reach a = 1 in floating point, so the piece above
        # 1 - TAIL_CUT is closed with Lambda(1) = 1.
        t_lo = -np.log(min(hi, curve.alpha))
        t_hi = -np.log(max(lo, TAIL_CUT))
        inner, _ = integrate.quad(_lambda_slope, t_lo, t_hi, args=(curve,), limit=200)
        if lo < TAIL_CUT:
            inner += 1.0 - curve(1.0 - TAIL_CUT)
        total += quantile(d, mid) * inner
    return total


def cvar(d: DiscreteDistribution, alpha: float) -> float:
    """Average of the lowest alpha-tail of xi (alpha = 1 gives the mean).

    Evaluated through the distortion c(x) = max(0, (x - 1 + alpha)/alpha) and,
    independently, as (1/alpha) times the quantile integral over (0, alpha].
    """
    via_distortion = choquet_utility(d, DistortionFunction.cvar(alpha))
    via_tail = quantile_integral(d, 0.0, alpha) / alpha
    scale = max(1.0, float(np.max(np.abs(d.values))))
    if abs(via_distortion - via_tail) > 1e-12 * scale:
        raise InconsistencyError(
            f"CVaR routes disagree at alpha={alpha!r}: {via_distortion!r} vs {via_tail!r}"
        )
    return via_distortion


def u_lambda(d: DiscreteDistribution, level: RiskLevel, curve: LambdaCurve | None = None) -> float:
    """Choquet utility of the Lambda distortion: the largest comonotone
    utility that EVaR dominates."""
    curve = curve or LambdaCurve(level)
    return choquet_utility(d, DistortionFunction.from_curve(curve))


def in_scenario_set(
    q: ScenarioDensity,
    p: DiscreteDistribution,
    f: DistortionFunction,
    tol: float = 1e-12,
) -> bool:
    """Check Q[A] >= f(P[A]) - tol for all 2^n events on the atoms."""
    n = len(p)
    if len(q) != n:
        raise ValueError("scenario and distribution are not aligned")
    if n > MAX_SUBSET_ATOMS:
        raise ValueError(f"exhaustive event check supports at most {MAX_SUBSET_ATOMS} atoms, got {n}")
    shifts = np.arange(n)
    chunk = 1 << 16
    for start in range(0, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n))
        bits = ((masks[:, None] >> shifts) & 1).astype(float)
        q_mass = bits @ q.probs
        p_mass = np.clip(bits @ p.probs, 0.0, 1.0)
        if np.any(q_mass < f(p_mass) - tol):
            return False
    return True


@dataclass(frozen=True)
class SandwichReport:
    cvar_value: float
    evar_value: float
    ulambda_value: float

    @property
    def gaps(self) -> tuple[float, float]:
        return self.cvar_value - self.evar_value, self.evar_value - self.ulambda_value

    @property
    def ordered(self) -> bool:
        return min(self.gaps) >= -SANDWICH_SLACK


def sandwich(
    d: DiscreteDistribution,
    level: RiskLevel,
    evar_value: float | None = None,
    curve: LambdaCurve | None = None,
) -> SandwichReport:
    """CVaR_alpha >= e_alpha >= u_Lambda, checked within 1e-9.

    Raises :class:`InconsistencyError` when the ordering fails; that can only
    come from a solver bug.
    """
    if evar_value is None:
        evar_value = evar_dual(d, level).value
    report = SandwichReport(cvar(d, level.alpha), evar_value, u_lambda(d, level, curve))
    if not report.ordered:
        raise InconsistencyError(f"sandwich ordering violated: {report}")
    return report


@dataclass(frozen=True)
class WitnessReport:
    alpha: float
    a: float
    b: float
    evar_value: float
    ulambda_value: float
    lambda_a: float
    lambda_b: float
    choquet_value: float

    @property
    def gap(self) -> float:
        return self.evar_value - self.ulambda_value

    @property
    def ratio_inner(self) -> float:
        """|Lambda(a)/a - Lambda(b)/b|: density on A vs density on B."""
        return abs(self.lambda_a / self.a - self.lambda_b / self.b)

    @property
    def ratio_outer(self) -> float:
        """|Lambda(b)/b - (1 - Lambda(a))/(1 - a)|: density on B minus A."""
        return abs(self.lambda_b / self.b - (1.0 - self.lambda_a) / (1.0 - self.a))

    def checks(self, margin: float = 1e-6) -> dict[str, bool]:
        return {
            "strict_gap": self.gap > margin,
            "choquet_additive": abs(self.choquet_value - self.ulambda_value) <= 1e-10,
            "ratio_inner_differs": self.ratio_inner > 1e-9,
            "ratio_outer_differs": self.ratio_outer > 1e-9,
            "lambda_below_identity": self.lambda_a < self.a,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks().values())


def noncomonotone_witness(
    level: RiskLevel,
    a: float,
    b: float,
    curve: LambdaCurve | None = None,
) -> WitnessReport:
    """Compare e_alpha and u_Lambda on xi = 1_A + 1_B with A inside B.

    A common minimizer for both indicators would need the same density on
    A and on B, and on B minus A, which forces Lambda(a) = a; the report
    carries both density ratios alongside the value gap.
    """
    if not (1.0 - level.alpha < a < b < 1.0):
        raise ValueError(f"need 1 - alpha < a < b < 1, got alpha={level.alpha!r}, a={a!r}, b={b!r}")
    curve = curve or LambdaCurve(level)
    law = DiscreteDistribution(np.array([0.0, 1.0, 2.0]), np.array([1.0 - b, b - a, a]))
    lam_a, lam_b = curve(a), curve(b)
    return WitnessReport(
        alpha=level.alpha,
        a=a,
        b=b,
        evar_value=evar_dual(law, level).value,
        ulambda_value=lam_a + lam_b,
        lambda_a=lam_a,
        lambda_b=lam_b,
        choquet_value=u_lambda(law, level, curve),
    )
