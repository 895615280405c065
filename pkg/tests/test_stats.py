import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from netgt.stats import (DomainError, RngStream, binary_entropy, binom_sample,
                         binom_samples, one_minus_pow, stream_id_for, summarize)


def hb_oracle(x):
    x = mpmath.mpf(x)
    return float(-x * mpmath.log(x, 2) - (1 - x) * mpmath.log(1 - x, 2))


def test_binary_entropy_values():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(1.0) == 0.0
    with mpmath.workdps(40):
        expected = hb_oracle("0.1")
    assert expected == pytest.approx(0.4689955935892812, abs=1e-15)
    assert binary_entropy(0.1) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("bad", [-0.01, 1.5, float("nan")])
def test_binary_entropy_domain(bad):
    with pytest.raises(DomainError):
        binary_entropy(bad)


@given(st.floats(0, 1))
def test_binary_entropy_symmetric_and_bounded(x):
    h = binary_entropy(x)
    assert 0.0 <= h <= 1.0
    assert h == pytest.approx(binary_entropy(1 - x), abs=1e-12)


def test_binary_entropy_concave():
    gen = np.random.default_rng(11)
    a, b, lam = gen.random(1000), gen.random(1000), gen.random(1000)
    mix = binary_entropy(lam * a + (1 - lam) * b)
    chord = lam * binary_entropy(a) + (1 - lam) * binary_entropy(b)
    assert np.all(mix >= chord - 1e-12)


def test_binary_entropy_vectorised_matches_scalar():
    xs = np.linspace(0, 1, 11)
    assert np.allclose(binary_entropy(xs), [binary_entropy(float(x)) for x in xs])


def test_one_minus_pow_corners():
    assert one_minus_pow(1.0, 0) == 1.0
    assert one_minus_pow(1.0, 3) == 0.0
    assert one_minus_pow(0.001, 1000) == pytest.approx(0.999 ** 1000, rel=1e-12)


def test_stream_reproducible():
    a = RngStream(42, 7).generator().random(5)
    b = RngStream(42, 7).generator().random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, RngStream(42, 8).generator().random(5))


def test_streams_uncorrelated():
    root = RngStream(2024)
    u = root.derive("a").generator().random(100_000)
    v = root.derive("b").generator().random(100_000)
    assert abs(np.corrcoef(u, v)[0, 1]) < 0.01


def test_stream_id_is_64_bit_and_stable():
    sid = stream_id_for("trial", 3, 4)
    assert 0 <= sid < 2 ** 64
    assert sid == stream_id_for("trial", 3, 4)
    assert sid != stream_id_for("trial", 4, 3)


def test_stream_rejects_negative_seed():
    with pytest.raises(DomainError):
        RngStream(-1)


@pytest.mark.parametrize("k", [1, 10, 64, 65, 1000])
def test_binom_extremes(k):
    gen = np.random.default_rng(0)
    assert binom_sample(k, 0.0, gen) == 0
    assert binom_sample(k, 1.0, gen) == k


def test_binom_domain():
    with pytest.raises(DomainError):
        binom_sample(5, 1.2, np.random.default_rng(0))


def test_binom_large_mean():
    draws = binom_samples(10 ** 6, 0.3, RngStream(5), size=10_000)
    st_ = summarize(draws)
    assert abs(st_.mean - 3e5) < 3 * st_.std_error


@pytest.mark.parametrize("trials", [100, 40])
def test_binom_variance(trials):
    # 40 trials goes through the Bernoulli-sum path, 100 through numpy's sampler
    draws = binom_samples(trials, 0.3, RngStream(9), size=100_000)
    target = trials * 0.3 * 0.7
    assert abs(draws.var(ddof=1) - target) < 0.05 * target
    assert draws.max() <= trials


def test_binom_bitwise_reproducible():
    a = binom_samples(50, 0.2, RngStream(3, 1), size=1000)
    b = binom_samples(50, 0.2, RngStream(3, 1), size=1000)
    assert np.array_equal(a, b)
    assert binom_sample(200, 0.4, RngStream(1)) == binom_sample(200, 0.4, RngStream(1))


def test_summarize_examples():
    s = summarize([5, 5, 5])
    assert (s.count, s.mean, s.std_dev) == (3, 5.0, 0.0)
    s = summarize([0, 2])
    assert s.mean == 1.0
    assert s.std_dev == pytest.approx(math.sqrt(2))
    assert s.std_error == pytest.approx(1.0)
    s = summarize([7])
    assert (s.mean, s.std_dev, s.std_error) == (7.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        summarize([])


@settings(max_examples=50)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=30))
def test_summarize_stderr_relation(values):
    s = summarize(values)
    assert s.std_dev >= 0
    assert s.std_error == pytest.approx(s.std_dev / math.sqrt(s.count))
