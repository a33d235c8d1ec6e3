import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evarkit import (
    DistributionError,
    InputError,
    RiskLevel,
    ess_inf,
    from_samples,
    from_weighted,
    mean,
    min_mass,
    parse_rows,
    quantile,
    quantile_integral,
)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
samples = st.lists(finite, min_size=1, max_size=30)


def test_from_samples_merges_and_sorts():
    d = from_samples([3.0, 1.0, 3.0])
    assert d.values.tolist() == [1.0, 3.0]
    assert d.probs == pytest.approx([1 / 3, 2 / 3], abs=1e-15)


def test_from_samples_singleton_and_pair():
    assert from_samples([5.0]).atoms == [(5.0, 1.0)]
    assert from_samples([0.0, 1.0]).atoms == [(0.0, 0.5), (1.0, 0.5)]


@pytest.mark.parametrize(
    "pairs, expected",
    [
        ([(0, 1), (1, 1), (2, 2)], [(0, 0.25), (1, 0.25), (2, 0.5)]),
        ([(1, 2), (1, 3)], [(1, 1.0)]),
        ([(2, 1), (0, 1)], [(0, 0.5), (2, 0.5)]),
    ],
)
def test_from_weighted(pairs, expected):
    assert from_weighted(pairs).atoms == expected


def test_merge_tolerance():
    d = from_samples([1.0, 1.0 + 1e-13, 2.0])
    assert len(d) == 2
    assert d.probs[0] == pytest.approx(2 / 3)


@pytest.mark.parametrize("bad", [[], [1.0, math.inf], [math.nan]])
def test_from_samples_rejects(bad):
    with pytest.raises(DistributionError):
        from_samples(bad)


def test_nonfinite_reports_index():
    with pytest.raises(DistributionError, match="sample 2"):
        from_samples([0.0, 1.0, math.inf])


@pytest.mark.parametrize("pairs", [[(0, 0)], [(0, -1), (1, 2)], []])
def test_from_weighted_rejects(pairs):
    with pytest.raises(DistributionError):
        from_weighted(pairs)


def test_quantile_left_continuous():
    d = from_weighted([(1, 0.5), (3, 0.5)])
    assert quantile(d, 0.5) == 1
    assert quantile(d, 0.75) == 3
    assert quantile(d, 1.0) == 3
    c = from_samples([5.0])
    assert all(quantile(c, u) == 5 for u in (1e-9, 0.3, 1.0))
    for u in (0.0, -0.1, 1.1):
        with pytest.raises(ValueError):
            quantile(d, u)


@pytest.mark.parametrize(
    "pairs, m, lo, mm",
    [
        ([(0, 0.5), (1, 0.5)], 0.5, 0, 0.5),
        ([(5, 1)], 5, 5, 1),
        ([(-1, 0.25), (0, 0.25), (4, 0.5)], 1.75, -1, 0.25),
    ],
)
def test_moments(pairs, m, lo, mm):
    d = from_weighted(pairs)
    assert mean(d) == pytest.approx(m, abs=1e-15)
    assert ess_inf(d) == lo
    assert min_mass(d) == pytest.approx(mm, abs=1e-15)


def test_risk_level():
    lv = RiskLevel(0.25)
    assert lv.beta == -math.log(0.25)
    for bad in (0.0, 1.0, -0.1, 2.0, math.nan):
        with pytest.raises(ValueError):
            RiskLevel(bad)


@given(samples, st.lists(st.floats(min_value=1e-6, max_value=1.0), min_size=2, max_size=40, unique=True))
@settings(max_examples=100, deadline=None)
def test_quantile_nondecreasing(xs, grid):
    d = from_samples(xs)
    qs = [quantile(d, u) for u in sorted(grid)]
    assert all(a <= b for a, b in zip(qs, qs[1:]))
    assert set(qs) <= set(d.values.tolist())


@given(samples)
@settings(max_examples=100, deadline=None)
def test_quantile_integral_is_mean(xs):
    d = from_samples(xs)
    assert quantile_integral(d) == pytest.approx(mean(d), abs=1e-10)
    assert ess_inf(d) <= mean(d) + 1e-12 <= d.values[-1] + 2e-12


@given(samples)
@settings(max_examples=100, deadline=None)
def test_roundtrip_idempotent(xs):
    d = from_samples(xs)
    again = from_weighted(d.atoms)
    assert np.array_equal(again.values, d.values)
    assert np.allclose(again.probs, d.probs, rtol=0, atol=1e-15)


def test_immutable():
    d = from_samples([1.0, 2.0])
    with pytest.raises(ValueError):
        d.values[0] = 7.0


def test_parse_rows_samples_and_weighted():
    d = parse_rows(["# header", "", "3", "1", "3"])
    assert d.values.tolist() == [1.0, 3.0]
    w = parse_rows(["0,0.1", " 1 , 0.9 "], weighted=True)
    assert w.atoms == [(0.0, 0.1), (1.0, 0.9)]


@pytest.mark.parametrize(
    "rows, weighted, line",
    [
        (["1", "x"], False, 2),
        (["1,2"], False, 1),
        (["# c", "1"], True, 2),
        (["1,0"], True, 1),
        (["1", "nan"], False, 2),
    ],
)
def test_parse_rows_line_numbers(rows, weighted, line):
    with pytest.raises(InputError) as exc:
        parse_rows(rows, weighted)
    assert exc.value.line == line


def test_parse_rows_empty():
    with pytest.raises(InputError):
        parse_rows(["# nothing"])
