"""Discrete laws of bounded random variables.

Every measure in this package is law invariant, so a finite list of
(value, probability) atoms is the only input type the numerical code needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MERGE_TOL = 1e-12


class DistributionError(ValueError):
    """Raised for inputs that cannot form a valid discrete distribution."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """Sorted atoms with strictly positive probabilities summing to one.

    Use :func:`from_samples` or :func:`from_weighted` rather than the raw
    constructor; they canonicalize (sort, merge, normalize) the input.
    """

    values: np.ndarray
    probs: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if values.ndim != 1 or values.shape != probs.shape or values.size == 0:
            raise DistributionError("values and probs must be nonempty 1-d arrays of equal length")
        if not np.all(np.isfinite(values)):
            raise DistributionError("atom values must be finite")
        if np.any(probs <= 0):
            raise DistributionError("atom probabilities must be positive")
        if np.any(np.diff(values) <= 0):
            raise DistributionError("atom values must be strictly increasing")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise DistributionError(f"probabilities sum to {probs.sum()!r}, not 1")
        object.__setattr__(self, "values", _readonly(values.copy()))
        object.__setattr__(self, "probs", _readonly(probs.copy()))

    def __len__(self) -> int:
        return self.values.size

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiscreteDistribution):
            return NotImplemented
        return np.array_equal(self.values, other.values) and np.array_equal(self.probs, other.probs)

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.probs.tobytes()))

    def __repr__(self) -> str:
        atoms = ", ".join(f"({v:g}, {p:g})" for v, p in self.atoms)
        return f"DiscreteDistribution([{atoms}])"

    @property
    def atoms(self) -> list[tuple[float, float]]:
        return [(float(v), float(p)) for v, p in zip(self.values, self.probs)]

    @property
    def cdf(self) -> np.ndarray:
        """Cumulative probabilities F_1..F_n, with F_n pinned to exactly 1."""
        c = np.cumsum(self.probs)
        c[-1] = 1.0
        return c

    @property
    def is_constant(self) -> bool:
        return self.values.size == 1

    @property
    def value_range(self) -> float:
        return float(self.values[-1] - self.values[0])

    def mean(self) -> float:
        return mean(self)

    def ess_inf(self) -> float:
        return ess_inf(self)

    def min_mass(self) -> float:
        return min_mass(self)

    def quantile(self, u: float) -> float:
        return quantile(self, u)

    def shift(self, c: float) -> "DiscreteDistribution":
        """Law of xi + c."""
        return from_weighted(zip(self.values + c, self.probs))

    def scale(self, lam: float) -> "DiscreteDistribution":
        """Law of lam * xi for lam > 0."""
        if lam <= 0:
            raise DistributionError("scale factor must be positive")
        return from_weighted(zip(self.values * lam, self.probs))


@dataclass(frozen=True)
class RiskLevel:
    """Level alpha in (0, 1) together with the entropy budget -log(alpha)."""

    alpha: float

    def __post_init__(self) -> None:
        a = float(self.alpha)
        if not (0.0 < a < 1.0) or math.isnan(a):
            raise ValueError(f"alpha must lie strictly inside (0, 1), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def beta(self) -> float:
        return -math.log(self.alpha)


def _canonical(values: np.ndarray, weights: np.ndarray) -> DiscreteDistribution:
    order = np.argsort(values, kind="stable")
    v = values[order]
    w = weights[order]
    # chain-merge neighbours closer than MERGE_TOL; the group keeps its first value
    starts = np.concatenate(([True], np.diff(v) > MERGE_TOL))
    group = np.cumsum(starts) - 1
    merged_w = np.bincount(group, weights=w)
    merged_v = v[starts]
    return DiscreteDistribution(merged_v, merged_w / merged_w.sum())


def from_samples(values: Iterable[float]) -> DiscreteDistribution:
    """Empirical law placing mass 1/n on each sample."""
    vals = [float(x) for x in values]
    if not vals:
        raise DistributionError("cannot build a distribution from an empty sample")
    for i, x in enumerate(vals):
        if not math.isfinite(x):
            raise DistributionError(f"sample {i} is not finite: {x!r}")
    arr = np.asarray(vals, dtype=float)
    return _canonical(arr, np.full(arr.size, 1.0 / arr.size))


def from_weighted(pairs: Iterable[Sequence[float]]) -> DiscreteDistribution:
    """Law from (value, weight) pairs; weights need not be normalized."""
    vals: list[float] = []
    wts: list[float] = []
    for i, pair in enumerate(pairs):
        v, w = (float(x) for x in pair)
        if not math.isfinite(v):
            raise DistributionError(f"pair {i}: value is not finite: {v!r}")
        if not math.isfinite(w) or w <= 0:
            raise DistributionError(f"pair {i}: weight must be positive and finite, got {w!r}")
        vals.append(v)
        wts.append(w)
    if not vals:
        raise DistributionError("cannot build a distribution from no pairs")
    w_arr = np.asarray(wts)
    if w_arr.sum() <= 0:
        raise DistributionError("total weight must be positive")
    return _canonical(np.asarray(vals), w_arr)


def quantile(d: DiscreteDistribution, u: float) -> float:
    """Left-continuous quantile: smallest atom value v with P[xi <= v] >= u."""
    if not (0.0 < u <= 1.0):
        raise ValueError(f"quantile level must lie in (0, 1], got {u!r}")
    idx = int(np.searchsorted(d.cdf, u, side="left"))
    return float(d.values[min(idx, len(d) - 1)])


def quantile_integral(d: DiscreteDistribution, lo: float = 0.0, hi: float = 1.0) -> float:
    """Exact integral of the quantile function over [lo, hi] as a step sum."""
    lo = max(lo, 0.0)
    hi = min(hi, 1.0)
    if hi <= lo:
        return 0.0
    right = d.cdf
    left = np.concatenate(([0.0], right[:-1]))
    overlap = np.clip(np.minimum(right, hi) - np.maximum(left, lo), 0.0, None)
    return float(np.dot(d.values, overlap))


def mean(d: DiscreteDistribution) -> float:
    return float(np.dot(d.values, d.probs))


def ess_inf(d: DiscreteDistribution) -> float:
    return float(d.values[0])


def min_mass(d: DiscreteDistribution) -> float:
    """P[xi = ess inf xi]."""
    return float(d.probs[0])


def independent_sum(x: DiscreteDistribution, y: DiscreteDistribution) -> DiscreteDistribution:
    """Law of xi + eta for independent xi ~ x, eta ~ y (product law)."""
    vals = np.add.outer(x.values, y.values).ravel()
    wts = np.multiply.outer(x.probs, y.probs).ravel()
    return from_weighted(zip(vals, wts))


class InputError(DistributionError):
    """Malformed distribution file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None) -> None:
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


def parse_rows(lines: Iterable[str], weighted: bool = False) -> DiscreteDistribution:
    """Parse one value per line, or ``value,weight`` rows when ``weighted``.

    Blank lines and lines starting with ``#`` are skipped.
    """
    values: list[float] = []
    weights: list[float] = []
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        fields = [f.strip() for f in text.split(",")]
        want = 2 if weighted else 1
        if len(fields) != want:
            kind = "value,weight" if weighted else "a single value"
            raise InputError(f"expected {kind}, got {text!r}", lineno)
        try:
            nums = [float(f) for f in fields]
        except ValueError:
            raise InputError(f"not a number: {text!r}", lineno) from None
        if not all(math.isfinite(x) for x in nums):
            raise InputError(f"non-finite entry: {text!r}", lineno)
        if weighted and nums[1] <= 0:
            raise InputError(f"weight must be positive: {text!r}", lineno)
        values.append(nums[0])
        if weighted:
            weights.append(nums[1])
    if not values:
        raise InputError("no data rows")
    if weighted:
        return from_weighted(zip(values, weights))
    return from_samples(values)


def read_distribution(path: str, weighted: bool = False) -> DiscreteDistribution:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_rows(fh, weighted)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
