"""CVaR mixtures and decreasing densities.

A nonincreasing probability density eta on [0, 1] and a probability nu on
(0, 1] determine each other through eta(x) = integral over (x, 1] of
(1/a) nu(da). For step densities nu is atomic, with mass x_j (eta_j -
eta_{j+1}) at each drop x_j, and integral q(u) eta(u) du = sum_j nu_j CVaR_{x_j}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import xlogy

from .dist import DiscreteDistribution, RiskLevel, quantile_integral
from .distortion import cvar
from .entropy_dual import DualSolution, ScenarioDensity, evar_dual


@dataclass(frozen=True, eq=False)
class DecreasingDensity:
    """Step density: height ``heights[j]`` on (endpoints[j-1], endpoints[j]]."""

    endpoints: np.ndarray
    heights: np.ndarray

    def __post_init__(self) -> None:
        x = np.array(self.endpoints, dtype=float)
        h = np.array(self.heights, dtype=float)
        if x.ndim != 1 or x.shape != h.shape or x.size == 0:
            raise ValueError("endpoints and heights must be matching nonempty vectors")
        if x[-1] != 1.0 or x[0] <= 0.0 or np.any(np.diff(x) <= 0):
            raise ValueError("endpoints must increase strictly inside (0, 1] and end at 1")
        if np.any(h < 0) or np.any(np.diff(h) > 0):
            raise ValueError("heights must be nonnegative and nonincreasing")
        total = float(np.dot(h, self.lengths_of(x)))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"density integrates to {total!r}, not 1")
        x.setflags(write=False)
        h.setflags(write=False)
        object.__setattr__(self, "endpoints", x)
        object.__setattr__(self, "heights", h)

    @staticmethod
    def lengths_of(endpoints: np.ndarray) -> np.ndarray:
        return np.diff(endpoints, prepend=0.0)

    @property
    def lengths(self) -> np.ndarray:
        return self.lengths_of(self.endpoints)

    def __call__(self, x):
        """eta at x in [0, 1); the left-continuous version is used at jumps."""
        idx = np.searchsorted(self.endpoints, x, side="left")
        return self.heights[np.minimum(idx, self.heights.size - 1)]


@dataclass(frozen=True, eq=False)
class KusuokaMeasure:
    """Atomic probability nu on (0, 1] weighting CVaR levels."""

    levels: np.ndarray
    masses: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        x = np.array(self.levels, dtype=float)
        m = np.array(self.masses, dtype=float)
        if x.ndim != 1 or x.shape != m.shape or x.size == 0:
            raise ValueError("levels and masses must be matching nonempty vectors")
        if np.any(x <= 0) or np.any(x > 1) or np.any(np.diff(x) <= 0):
            raise ValueError("levels must increase strictly inside (0, 1]")
        if np.any(m <= 0):
            raise ValueError("masses must be positive")
        if abs(m.sum() - 1.0) > 1e-12:
            raise ValueError(f"masses sum to {m.sum()!r}, not 1")
        x.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "levels", x)
        object.__setattr__(self, "masses", m)

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(x), float(m)) for x, m in zip(self.levels, self.masses)]


def decreasing_rearrangement(q: ScenarioDensity, p: DiscreteDistribution) -> DecreasingDensity:
    """Sort dQ/dP into nonincreasing order, each value spread over its P-mass."""
    if len(q) != len(p):
        raise ValueError("scenario and distribution are not aligned")
    ratio = q.probs / p.probs
    order = np.argsort(-ratio, kind="stable")
    ends = np.cumsum(p.probs[order])
    ends[-1] = 1.0
    return DecreasingDensity(ends, ratio[order])


def density_entropy(eta: DecreasingDensity) -> float:
    """Integral of eta log eta over [0, 1]."""
    return float(np.dot(xlogy(eta.heights, eta.heights), eta.lengths))


def density_to_measure(eta: DecreasingDensity) -> KusuokaMeasure:
    drops = eta.heights - np.append(eta.heights[1:], 0.0)
    mass = eta.endpoints * drops
    keep = mass > 0
    return KusuokaMeasure(eta.endpoints[keep], mass[keep])


def measure_to_density(nu: KusuokaMeasure) -> DecreasingDensity:
    """eta(x) = sum of nu_j / x_j over atoms x_j > x."""
    contrib = nu.masses / nu.levels
    heights = np.cumsum(contrib[::-1])[::-1]
    ends = nu.levels
    if ends[-1] < 1.0:
        ends = np.append(ends, 1.0)
        heights = np.append(heights, 0.0)
    return DecreasingDensity(ends, heights)


def cvar_mixture(d: DiscreteDistribution, nu: KusuokaMeasure) -> float:
    return float(sum(m * cvar(d, x) for x, m in nu.atoms))


def density_expectation(d: DiscreteDistribution, eta: DecreasingDensity) -> float:
    """Integral of q(u) eta(u) du over (0, 1], summed exactly cell by cell."""
    starts = np.concatenate(([0.0], eta.endpoints[:-1]))
    return float(
        sum(h * quantile_integral(d, lo, hi) for lo, hi, h in zip(starts, eta.endpoints, eta.heights))
    )


@dataclass(frozen=True)
class KusuokaReport:
    evar_value: float
    mixture_value: float
    measure: KusuokaMeasure
    density: DecreasingDensity = field(repr=False)
    dual: DualSolution = field(repr=False)

    @property
    def residual(self) -> float:
        return abs(self.mixture_value - self.evar_value)

    @property
    def degenerate(self) -> bool:
        return self.dual.degenerate


def kusuoka_from_dual(
    d: DiscreteDistribution,
    level: RiskLevel,
    dual: DualSolution | None = None,
) -> KusuokaReport:
    """Rearrange the optimal scenario, convert it to nu and evaluate the mixture.

    The tilt's density is decreasing in the atom value, so the rearrangement
    pairs the largest density with the lowest quantiles and the mixture
    reproduces E_Q[xi] at the optimum.
    """
    dual = dual or evar_dual(d, level)
    eta = decreasing_rearrangement(dual.scenario, d)
    nu = density_to_measure(eta)
    return KusuokaReport(dual.value, cvar_mixture(d, nu), nu, eta, dual)
