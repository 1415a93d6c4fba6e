"""Series utilities: Gaussian smoothing, peaks/ISIs, amplitude and phase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from .errors import InvalidArgumentError

DEFAULT_WINDOW = 100
DEFAULT_PROMINENCE_FRACTION = 0.25


@dataclass(frozen=True, eq=False)
class Series:
    values: np.ndarray
    dt: float
    t0: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise InvalidArgumentError("series must be a non-empty 1-D array")
        if not np.all(np.isfinite(v)):
            raise InvalidArgumentError("series values must be finite")
        if not self.dt > 0:
            raise InvalidArgumentError("dt must be positive")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.values.size) * self.dt


@dataclass(frozen=True, eq=False)
class SpikeTrain:
    peak_times: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.peak_times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) <= 0):
            raise InvalidArgumentError("peak times must be strictly increasing")
        object.__setattr__(self, "peak_times", t)

    @property
    def isis(self) -> np.ndarray:
        return np.diff(self.peak_times)

    def __len__(self):
        return self.peak_times.size


def gaussian_kernel(window: int, sigma: float | None = None) -> np.ndarray:
    """Unnormalized Gaussian weights over an odd-length window.

    Even windows are rounded up to the next odd size. The default width is
    ``sigma = (window - 1) / 5`` samples.
    """
    if window < 1:
        raise InvalidArgumentError("window must be >= 1")
    window = int(window) | 1
    if window == 1:
        return np.ones(1)
    if sigma is None:
        sigma = (window - 1) / 5
    half = window // 2
    k = np.arange(-half, half + 1)
    return np.exp(-0.5 * (k / sigma) ** 2)


def gaussian_smooth(s: Series, window: int = DEFAULT_WINDOW, sigma: float | None = None) -> Series:
    """Gaussian-weighted moving average, renormalized where the window is truncated."""
    kernel = gaussian_kernel(window, sigma)
    if kernel.size > len(s):
        raise InvalidArgumentError(f"window {kernel.size} exceeds series length {len(s)}")
    num = np.convolve(s.values, kernel, mode="same")
    den = np.convolve(np.ones(len(s)), kernel, mode="same")
    return Series(num / den, s.dt, s.t0)


def detect_peaks(s: Series, min_prominence: float) -> SpikeTrain:
    """Times of strict local maxima with topographic prominence >= ``min_prominence``."""
    v = s.values
    if v.size < 3:
        raise InvalidArgumentError("need at least 3 samples to detect peaks")
    idx, _ = sps.find_peaks(v, prominence=max(float(min_prominence), 0.0))
    # find_peaks reports the middle of flat tops; keep only strict maxima
    idx = idx[(v[idx - 1] < v[idx]) & (v[idx + 1] < v[idx])]
    return SpikeTrain(s.t0 + idx * s.dt)


def amplitude(s: Series) -> float:
    """Time-averaged absolute value (rectangle rule)."""
    return float(np.mean(np.abs(s.values)))


def phase(x: Series, y: Series) -> Series:
    """Four-quadrant phase angle in (-pi, pi].

    A sample where both coordinates are exactly zero inherits the previous
    sample's phase (0 if it is the first).
    """
    if len(x) != len(y):
        raise InvalidArgumentError("x and y must have equal length")
    phi = np.arctan2(y.values, x.values)
    phi[phi == -np.pi] = np.pi
    zero = (x.values == 0) & (y.values == 0)
    if zero.any():
        idx = np.where(zero, 0, np.arange(phi.size))
        np.maximum.accumulate(idx, out=idx)
        phi = phi[idx]  # arctan2(0, 0) == 0 covers a leading zero sample
    return Series(phi, x.dt, x.t0)
