import math

import numpy as np
import pytest

from fflsync.errors import InvalidArgumentError
from fflsync.signals import (
    Series,
    SpikeTrain,
    amplitude,
    detect_peaks,
    gaussian_kernel,
    gaussian_smooth,
    phase,
)

from oracles import brute_force_prominent_peaks


def test_series_validation():
    with pytest.raises(InvalidArgumentError):
        Series(np.array([]), 0.1)
    with pytest.raises(InvalidArgumentError):
        Series(np.array([1.0, math.nan]), 0.1)


def test_spike_train_isis():
    t = SpikeTrain([1.0, 2.5, 4.0])
    np.testing.assert_allclose(t.isis, [1.5, 1.5])
    assert len(t.isis) == len(t) - 1
    with pytest.raises(InvalidArgumentError):
        SpikeTrain([1.0, 1.0])


def test_kernel_default_width():
    k = gaussian_kernel(100)
    assert k.size == 101
    # sigma = (101 - 1) / 5 = 20 samples
    assert k[50 + 20] / k[50] == pytest.approx(math.exp(-0.5))


def test_smooth_constant():
    s = Series(np.full(300, 2.5), 0.01)
    np.testing.assert_allclose(gaussian_smooth(s).values, 2.5, rtol=1e-14)


def test_smooth_window_one_is_identity():
    v = np.random.default_rng(0).normal(size=50)
    np.testing.assert_array_equal(gaussian_smooth(Series(v, 1.0), 1).values, v)


def test_smooth_impulse_gives_kernel():
    v = np.zeros(501)
    v[250] = 1.0
    out = gaussian_smooth(Series(v, 1.0), 100).values
    k = gaussian_kernel(100)
    np.testing.assert_allclose(out[200:301], k / k.sum(), rtol=1e-12)
    assert out.sum() == pytest.approx(1.0)


def test_smooth_window_too_large():
    with pytest.raises(InvalidArgumentError):
        gaussian_smooth(Series(np.ones(50), 1.0), 100)


def test_smooth_even_window_rounds_up():
    v = np.random.default_rng(1).normal(size=200)
    s = Series(v, 1.0)
    np.testing.assert_array_equal(gaussian_smooth(s, 10).values, gaussian_smooth(s, 11).values)


def test_peaks_of_sinusoid():
    dt = 0.01
    t = np.arange(0, 10 * math.pi, dt)
    train = detect_peaks(Series(np.sin(2 * t), dt), 0.5)
    assert len(train) == 10
    np.testing.assert_allclose(train.isis, math.pi, atol=dt)


def test_monotone_has_no_peaks():
    assert len(detect_peaks(Series(np.linspace(0, 1, 100), 1.0), 0.0)) == 0


def test_peaks_match_brute_force_prominence():
    dt = 0.01
    t = np.arange(0, 20, dt)
    v = np.sin(2 * t) + 0.3 * np.sin(0.5 * t) + 0.02 * np.sin(40 * t)
    for prom in (0.0, 0.01, 0.05, 0.5, 1.2):
        expected = brute_force_prominent_peaks(v.tolist(), prom)
        got = detect_peaks(Series(v, dt), prom).peak_times
        np.testing.assert_allclose(got, np.array(expected) * dt)
    # the 0.5 threshold keeps only the large oscillation
    big = brute_force_prominent_peaks(v.tolist(), 0.5)
    assert 5 <= len(big) <= 7


def test_peaks_need_three_samples():
    with pytest.raises(InvalidArgumentError):
        detect_peaks(Series(np.ones(2), 1.0), 0.1)


def test_amplitude_examples():
    assert amplitude(Series(np.full(10, -3.0), 1.0)) == 3.0
    t = np.linspace(0, 4 * math.pi, 40001)[:-1]
    assert amplitude(Series(np.sin(t), t[1])) == pytest.approx(2 / math.pi, rel=1e-6)


@pytest.mark.parametrize("x, y, expected", [(1, 0, 0.0), (0, 1, math.pi / 2), (-1, 0, math.pi)])
def test_phase_quadrants(x, y, expected):
    out = phase(Series([x], 1.0), Series([y], 1.0)).values
    assert out[0] == pytest.approx(expected)


def test_phase_range_and_zero_carry():
    x = Series([1.0, 0.0, -1.0, 0.0, -1.0], 1.0)
    y = Series([1.0, 0.0, -0.0, 0.0, -1e-300], 1.0)
    out = phase(x, y).values
    assert out[1] == out[0]
    assert out[2] == pytest.approx(math.pi)
    assert out[3] == out[2]
    assert np.all((out > -math.pi) & (out <= math.pi))
