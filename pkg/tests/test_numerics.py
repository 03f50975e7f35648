import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rislink.numerics import (
    ParameterError,
    RngStream,
    percentile,
    q_function,
    q_inverse,
    sample_circular_gaussian,
    summarize_db,
)


def _q_inverse_oracle(eps):
    mpmath.mp.dps = 40
    return float(mpmath.sqrt(2) * mpmath.erfinv(1 - 2 * mpmath.mpf(eps)))


def test_circular_gaussian_power_is_variance():
    x = sample_circular_gaussian(RngStream(5), 1_000_000, 1.0)
    power = np.abs(x) ** 2
    # |x|^2 is exponential(1): std of the mean is 1/sqrt(n).
    assert abs(power.mean() - 1.0) < 3 / np.sqrt(x.size)
    assert abs(power.mean() - 1.0) < 0.01


@pytest.mark.parametrize("variance", [0.25, 3.0])
def test_circular_gaussian_scaling_and_circularity(variance):
    x = sample_circular_gaussian(RngStream(9), 200_000, variance)
    n = x.size
    assert abs(np.mean(np.abs(x) ** 2) - variance) < 3 * variance / np.sqrt(n)
    # Circular symmetry: pseudo-covariance E[x^2] vanishes.
    assert abs(np.mean(x**2)) < 5 * variance / np.sqrt(n)
    assert abs(x.mean()) < 5 * np.sqrt(variance / n)


@pytest.mark.parametrize("variance", [0.0, -1.0, np.inf])
def test_circular_gaussian_rejects_bad_variance(variance):
    with pytest.raises(ParameterError):
        sample_circular_gaussian(RngStream(1), 10, variance)


def test_streams_are_deterministic_and_distinct():
    a = sample_circular_gaussian(RngStream(42, 3), 100)
    b = sample_circular_gaussian(RngStream(42, 3), 100)
    c = sample_circular_gaussian(RngStream(42, 4), 100)
    np.testing.assert_array_equal(a, b)
    assert not np.allclose(a, c)
    # Independent streams: sample correlation near zero.
    x = sample_circular_gaussian(RngStream(42, 3), 100_000)
    y = sample_circular_gaussian(RngStream(42, 4), 100_000)
    assert abs(np.vdot(x, y)) / x.size < 5 / np.sqrt(x.size)


def test_substreams_do_not_collide():
    root = RngStream(7)
    ids = {root.substream(i).stream_id for i in range(1000)}
    ids |= {root.substream(0).substream(i).stream_id for i in range(1000)}
    assert len(ids) == 2000


def test_rng_stream_validation():
    with pytest.raises(ParameterError):
        RngStream(-1)
    with pytest.raises(ParameterError):
        RngStream(2**64)
    with pytest.raises(ParameterError):
        RngStream(0, -2)


@pytest.mark.parametrize(
    "values,p,expected",
    [([1, 2, 3, 4, 5], 0.5, 3.0), ([1, 2], 0.5, 1.5), ([5, 1, 4, 2, 3], 0.0, 1.0), ([5, 1, 4, 2, 3], 1.0, 5.0)],
)
def test_percentile_examples(values, p, expected):
    assert percentile(values, p) == expected


def test_percentile_empty():
    with pytest.raises(ParameterError):
        percentile([], 0.5)


@given(st.floats(-1e6, 1e6), st.integers(1, 20), st.floats(0, 1))
def test_percentile_constant(x, k, p):
    assert percentile([x] * k, p) == x


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50), st.floats(0, 1), st.floats(0, 1))
def test_percentile_monotone_and_bounded(values, p1, p2):
    lo, hi = sorted((p1, p2))
    assert percentile(values, lo) <= percentile(values, hi) + 1e-9
    assert min(values) - 1e-9 <= percentile(values, p1) <= max(values) + 1e-9


def test_percentile_matches_numpy_linear():
    x = np.random.default_rng(0).normal(size=997)
    for p in (0.001, 0.25, 0.5, 0.999):
        assert percentile(x, p) == pytest.approx(np.percentile(x, 100 * p, method="linear"), abs=1e-12)


def test_summary_stats():
    s = summarize_db(np.arange(1001.0))
    assert s.median_db == 500.0
    assert s.range_db == pytest.approx(998.0)
    assert s.samples == 1001


def test_q_inverse_half():
    assert q_inverse(0.5) == 0.0


def test_q_inverse_1e6():
    assert q_inverse(1e-6) == pytest.approx(4.7534, abs=1e-4)
    assert q_inverse(1e-6) == pytest.approx(_q_inverse_oracle(1e-6), rel=1e-12)


@pytest.mark.parametrize("k", range(1, 10))
def test_q_inverse_round_trip(k):
    eps = 10.0**-k
    assert q_function(q_inverse(eps)) == pytest.approx(eps, rel=1e-9)
    assert q_inverse(eps) == pytest.approx(_q_inverse_oracle(eps), rel=1e-9)


@pytest.mark.parametrize("eps", [0.0, 1.0, -0.1, 1.5])
def test_q_inverse_domain(eps):
    with pytest.raises(ParameterError):
        q_inverse(eps)


@settings(max_examples=50)
@given(st.floats(1e-12, 0.999))
def test_q_inverse_decreasing(eps):
    assert q_inverse(eps) >= q_inverse(min(eps * 1.01, 0.9999))


def test_quantiles_agree_with_percentile():
    from rislink.numerics import quantiles

    x = np.random.default_rng(2).exponential(size=1001)
    ps = np.linspace(0, 1, 37)
    np.testing.assert_allclose(quantiles(x, ps), [percentile(x, p) for p in ps], rtol=1e-12)
