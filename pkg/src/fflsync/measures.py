"""Synchrony and regularity statistics for one trial.

Undefined values (quiescent nodes, too few spikes) are reported as NaN so
that ensemble code can drop and count them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError
from .sde import Trajectory, analysis_window
from .signals import (
    DEFAULT_PROMINENCE_FRACTION,
    DEFAULT_WINDOW,
    Series,
    SpikeTrain,
    amplitude,
    detect_peaks,
    gaussian_smooth,
    phase,
)

METRIC_NAMES = ("A1", "A2", "A3", "sigma", "gamma", "R")


@dataclass(frozen=True)
class MetricOptions:
    """Knobs for :func:`trial_metrics`.

    ``prominence`` overrides the scale-free default of
    ``prominence_fraction * amplitude(filtered x3)``. ``min_amplitude`` is the
    level below which a node counts as quiescent and sigma is undefined.
    """

    smooth_window: int = DEFAULT_WINDOW
    kernel_sigma: float | None = None
    prominence_fraction: float = DEFAULT_PROMINENCE_FRACTION
    prominence: float | None = None
    filter_measures: bool = False
    min_amplitude: float = 1e-6


@dataclass(frozen=True, eq=False)
class CoherenceMetrics:
    amplitudes: np.ndarray
    sigma: float
    gamma_pc: float
    r_cv: float
    spike_count: int
    peak_times: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)

    @property
    def isis(self) -> np.ndarray:
        return np.diff(self.peak_times)

    def as_array(self) -> np.ndarray:
        """Values in :data:`METRIC_NAMES` order."""
        return np.array([*self.amplitudes, self.sigma, self.gamma_pc, self.r_cv])


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, Series) else np.asarray(s, dtype=float)


def rms_deviation(x_series, amplitudes, min_amplitude: float = 0.0) -> float:
    """Time-averaged spread of the amplitude-normalized node signals.

    At each sample the population standard deviation of ``x_i / A_i`` over the
    nodes is taken (two-pass, so identical signals give exactly 0); the result
    is its mean over the window.
    """
    amplitudes = np.asarray(amplitudes, dtype=float)
    xs = np.vstack([_values(s) for s in x_series])
    if xs.shape[0] != amplitudes.size:
        raise InvalidArgumentError("one amplitude per series required")
    if np.any(amplitudes <= min_amplitude):
        raise DegenerateInputError(f"quiescent node: amplitudes {amplitudes}")
    u = xs / amplitudes[:, None]
    return float(np.mean(np.std(u, axis=0)))


def mean_phase_coherence(phi1, phi3) -> float:
    """Length of the mean resultant vector of ``phi1 - phi3``, clamped to [0, 1]."""
    a, b = _values(phi1), _values(phi3)
    if a.shape != b.shape:
        raise InvalidArgumentError("phase series must have equal length")
    dphi = a - b
    g = math.hypot(np.mean(np.sin(dphi)), np.mean(np.cos(dphi)))
    return min(max(g, 0.0), 1.0)


def cv_isi(train: SpikeTrain | np.ndarray) -> float:
    """Coefficient of variation of the inter-spike intervals.

    Moments use 1/(K-1) weights over the K-1 intervals, i.e. the population
    standard deviation of the ISI list. NaN with fewer than two intervals.
    """
    isis = train.isis if isinstance(train, SpikeTrain) else np.asarray(train, dtype=float)
    if isis.size < 2:
        return math.nan
    return float(np.std(isis) / np.mean(isis))


def output_spikes(x: Series, opts: MetricOptions = MetricOptions()) -> SpikeTrain:
    """Peaks of the low-pass filtered series."""
    smooth = gaussian_smooth(x, opts.smooth_window, opts.kernel_sigma)
    if opts.prominence is not None:
        prom = opts.prominence
    else:
        prom = opts.prominence_fraction * amplitude(smooth)
    return detect_peaks(smooth, prom)


def trial_metrics(traj: Trajectory, opts: MetricOptions = MetricOptions()) -> CoherenceMetrics:
    win = analysis_window(traj)
    dt, t0 = win.dt, float(win.times[0])
    n = win.states.shape[1] // 2
    xs = [Series(win.x(i), dt, t0) for i in range(n)]
    amps = np.array([amplitude(s) for s in xs])

    sig_in = [gaussian_smooth(s, opts.smooth_window, opts.kernel_sigma) for s in xs] if opts.filter_measures else xs
    try:
        sig_amps = amps if not opts.filter_measures else np.array([amplitude(s) for s in sig_in])
        sigma = rms_deviation(sig_in, sig_amps, opts.min_amplitude)
    except DegenerateInputError:
        sigma = math.nan

    phi_in = phase(xs[0], Series(win.y(0), dt, t0))
    phi_out = phase(xs[-1], Series(win.y(n - 1), dt, t0))
    gamma = mean_phase_coherence(phi_in, phi_out)

    if amps[-1] > opts.min_amplitude:
        train = output_spikes(xs[-1], opts)
    else:
        train = SpikeTrain(np.empty(0))
    return CoherenceMetrics(
        amplitudes=amps,
        sigma=sigma,
        gamma_pc=gamma,
        r_cv=cv_isi(train),
        spike_count=len(train),
        peak_times=train.peak_times,
    )
