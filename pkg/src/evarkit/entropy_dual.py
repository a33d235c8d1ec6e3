"""Dual side of EVaR: minimize E_Q[xi] over the relative-entropy ball.

The minimizer over {Q : H(Q|P) <= beta} is an exponential tilt
q_i ~ p_i exp(-z v_i); z is fixed by making the constraint bind. Bisection
on z works globally because H(tilt(z)) is nondecreasing in z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .dist import DiscreteDistribution, RiskLevel, min_mass
from .errors import SolverError

ENTROPY_TOL = 1e-12
MAX_BISECTIONS = 200
MAX_DOUBLINGS = 1000
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ScenarioDensity:
    """Probability vector Q on the atoms of a reference distribution."""

    probs: np.ndarray

    def __post_init__(self) -> None:
        q = np.array(self.probs, dtype=float)
        if q.ndim != 1 or q.size == 0:
            raise ValueError("scenario must be a nonempty 1-d vector")
        if np.any(q < 0) or not np.all(np.isfinite(q)):
            raise ValueError("scenario probabilities must be finite and nonnegative")
        if abs(q.sum() - 1.0) > 1e-12:
            raise ValueError(f"scenario probabilities sum to {q.sum()!r}, not 1")
        q.setflags(write=False)
        object.__setattr__(self, "probs", q)

    def __len__(self) -> int:
        return self.probs.size

    def expectation(self, d: DiscreteDistribution) -> float:
        _check_aligned(self, d)
        return float(np.dot(self.probs, d.values))


@dataclass(frozen=True)
class DualSolution:
    value: float
    scenario: ScenarioDensity = field(repr=False)
    z_star: float | None  # None marks the degenerate (non-binding) regime
    entropy: float
    iterations: int

    @property
    def degenerate(self) -> bool:
        return self.z_star is None


def _check_aligned(q: ScenarioDensity, p: DiscreteDistribution) -> None:
    if len(q) != len(p):
        raise ValueError(f"scenario has {len(q)} entries but the distribution has {len(p)} atoms")


def relative_entropy(q: ScenarioDensity, p: DiscreteDistribution) -> float:
    """H(Q|P) = sum q_i log(q_i / p_i), with 0 log 0 = 0."""
    _check_aligned(q, p)
    qs = q.probs
    pos = qs > 0
    h = float(np.sum(qs[pos] * (np.log(qs[pos]) - np.log(p.probs[pos]))))
    return max(h, 0.0)


def _tilt(d: DiscreteDistribution, z: float) -> tuple[np.ndarray, float, float]:
    """Tilted probabilities, their entropy and E_Q[xi - ess inf]."""
    w = d.values - d.values[0]
    logw = np.log(d.probs) - z * w
    top = logw.max()
    e = np.exp(logw - top)
    s = e.sum()
    q = e / s
    log_norm = top + math.log(s)
    shifted_mean = float(np.dot(q, w))
    h = -z * shifted_mean - log_norm
    return q, max(float(h), 0.0), shifted_mean


def gibbs_tilt(p: DiscreteDistribution, z: float) -> ScenarioDensity:
    """Exponential reweighting q_i proportional to p_i exp(-z v_i)."""
    if not (z >= 0) or not math.isfinite(z):
        raise ValueError(f"tilt parameter must be finite and >= 0, got {z!r}")
    q, _, _ = _tilt(p, z)
    return ScenarioDensity(q)


def tilt_entropy(d: DiscreteDistribution, z: float) -> float:
    return _tilt(d, z)[1]


def entropy_profile(d: DiscreteDistribution, z_grid: Iterable[float]) -> list[tuple[float, float]]:
    zs = [float(z) for z in z_grid]
    if any(z < 0 for z in zs) or any(b < a for a, b in zip(zs, zs[1:])):
        raise ValueError("z grid must be nonnegative and increasing")
    return [(z, _tilt(d, z)[1]) for z in zs]


def minimum_scenario(d: DiscreteDistribution) -> ScenarioDensity:
    """P conditioned on {xi = ess inf}."""
    lowest = d.values <= d.values[0] + TIE_TOL
    q = np.where(lowest, d.probs, 0.0)
    return ScenarioDensity(q / q.sum())


def evar_dual(
    d: DiscreteDistribution,
    level: RiskLevel,
    tol: float = ENTROPY_TOL,
    max_iter: int = MAX_BISECTIONS,
) -> DualSolution:
    """Entropic value at risk as min E_Q[xi] subject to H(Q|P) <= -log(alpha).

    When alpha <= P[xi = ess inf], the conditional law on the minimum is
    feasible (its entropy is -log P[xi = ess inf] <= beta) and attains the
    lower bound ess inf, so the constraint does not bind and no tilt is
    searched. This covers constants and, for indicators, masses a <= 1 - alpha.
    """
    beta = level.beta
    vmin = float(d.values[0])
    if d.is_constant or level.alpha <= min_mass(d):
        q = minimum_scenario(d)
        return DualSolution(vmin, q, None, relative_entropy(q, d), 0)

    iterations = 0
    lo, hi = 0.0, 1.0 / d.value_range
    while _tilt(d, hi)[1] < beta:
        lo, hi = hi, 2.0 * hi
        iterations += 1
        if iterations > MAX_DOUBLINGS or not math.isfinite(hi):
            raise SolverError("could not bracket the entropy-matching tilt", beta=beta, z_hi=hi)

    z = hi
    q, h, m = _tilt(d, z)
    for _ in range(max_iter):
        z = 0.5 * (lo + hi)
        q, h, m = _tilt(d, z)
        iterations += 1
        if abs(h - beta) <= tol or z <= lo or z >= hi:
            break
        if h < beta:
            lo = z
        else:
            hi = z
    else:
        raise SolverError(
            "entropy bisection hit its iteration cap",
            beta=beta, entropy=h, z_lo=lo, z_hi=hi, iterations=iterations,
        )
    return DualSolution(vmin + m, ScenarioDensity(q), z, h, iterations)
