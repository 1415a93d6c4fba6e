"""Monte-Carlo ensembles and parameter sweeps.

Trial ``k`` of every ensemble draws from the stream keyed by
``(base_seed, k)``; the same trial seeds are reused at every grid point. Work
is reduced by ``(grid index, trial index)``, so results do not depend on the
number of worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError, NoResultError
from .measures import METRIC_NAMES, MetricOptions, trial_metrics
from .model import MotifKind, NetworkConfig, OscillatorParams, build_motif
from .sde import SimParams, simulate

AXIS_NAMES = ("delta1", "delta_all", "coupling_d", "lambda0")
OPTIMUM_SENSE = {"sigma": "min", "gamma": "max", "R": "min"}


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise InvalidArgumentError(f"unknown axis {self.name!r}; expected one of {AXIS_NAMES}")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise InvalidArgumentError(f"axis {self.name} has an empty grid")
        if not all(math.isfinite(v) for v in vals):
            raise InvalidArgumentError(f"axis {self.name} has non-finite values")
        diffs = np.diff(vals)
        if len(vals) > 1 and not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise InvalidArgumentError(f"axis {self.name} grid must be strictly monotone")
        object.__setattr__(self, "values", vals)

    @classmethod
    def logspace(cls, name, lo, hi, n):
        return cls(name, tuple(np.geomspace(lo, hi, int(n))))

    @classmethod
    def linspace(cls, name, lo, hi, n):
        return cls(name, tuple(np.linspace(lo, hi, int(n))))

    def __len__(self):
        return len(self.values)


def default_delta1_axis(n: int = 40, hi: float = 10**0.5) -> Axis:
    return Axis.logspace("delta1", 1e-3, hi, n)


@dataclass(frozen=True)
class SweepSpec:
    base_config: NetworkConfig
    axes: tuple[Axis, ...]
    motif: MotifKind | None = None
    sim: SimParams = field(default_factory=SimParams)
    n_trials: int = 200
    base_seed: int = 0
    options: MetricOptions = field(default_factory=MetricOptions)

    def __post_init__(self):
        object.__setattr__(self, "axes", tuple(self.axes))
        if not 1 <= len(self.axes) <= 2:
            raise InvalidArgumentError("a sweep has one or two axes")
        if len({a.name for a in self.axes}) != len(self.axes):
            raise InvalidArgumentError("axes must be distinct")
        if self.n_trials < 1:
            raise InvalidArgumentError("n_trials must be >= 1")
        if self.motif is not None:
            object.__setattr__(self, "motif", MotifKind(self.motif))
        if any(a.name == "coupling_d" for a in self.axes):
            if self.motif is None:
                raise InvalidArgumentError("sweeping coupling_d requires a motif kind")
            if min(min(a.values) for a in self.axes if a.name == "coupling_d") <= 0:
                raise InvalidArgumentError("coupling_d grid must be positive")
        for a in self.axes:
            if a.name in ("delta1", "delta_all") and min(a.values) < 0:
                raise InvalidArgumentError(f"{a.name} grid must be non-negative")
        if {"delta1", "delta_all"} <= {a.name for a in self.axes}:
            raise InvalidArgumentError("delta1 and delta_all cannot be swept together")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.axes)

    def config_at(self, point: Sequence[float]) -> NetworkConfig:
        cfg = self.base_config
        osc, coupling, delta = cfg.oscillator, cfg.coupling, np.array(cfg.noise_intensities)
        for axis, value in zip(self.axes, point):
            if axis.name == "delta1":
                delta[0] = value
            elif axis.name == "delta_all":
                delta[:] = value
            elif axis.name == "coupling_d":
                coupling = build_motif(self.motif, value)
            else:
                osc = replace(osc, lambda0=value)
        return NetworkConfig(osc, coupling, delta)


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    """Per-trial metrics of one ensemble, rows ordered by trial index."""

    trials: np.ndarray
    values: np.ndarray
    spike_counts: np.ndarray
    isis: tuple[np.ndarray, ...] | None = None

    @property
    def n_trials(self) -> int:
        return self.trials.size

    @property
    def n_defined(self) -> np.ndarray:
        return np.sum(np.isfinite(self.values), axis=0)

    @property
    def exclusions(self) -> np.ndarray:
        return self.n_trials - self.n_defined

    @property
    def mean(self) -> np.ndarray:
        n = self.n_defined
        total = np.where(np.isfinite(self.values), self.values, 0.0).sum(axis=0)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n > 0, total / np.maximum(n, 1), np.nan)

    @property
    def stderr(self) -> np.ndarray:
        n = self.n_defined
        mu = self.mean
        dev = np.where(np.isfinite(self.values), self.values - mu, 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            var = (dev * dev).sum(axis=0) / np.maximum(n - 1, 1)
            se = np.sqrt(var / np.maximum(n, 1))
        se = np.where(n > 1, se, 0.0)
        return np.where(n > 0, se, np.nan)

    def metric(self, name: str) -> tuple[float, float]:
        k = METRIC_NAMES.index(name)
        return float(self.mean[k]), float(self.stderr[k])

    def pooled_isis(self) -> np.ndarray:
        if self.isis is None:
            raise InvalidArgumentError("ensemble was run without keep_isis")
        return np.concatenate(self.isis) if self.isis else np.empty(0)


def pool(*parts: EnsembleResult) -> EnsembleResult:
    """Merge ensembles over disjoint trial ranges into one ensemble."""
    trials = np.concatenate([p.trials for p in parts])
    if np.unique(trials).size != trials.size:
        raise InvalidArgumentError("pooled ensembles must cover disjoint trials")
    order = np.argsort(trials, kind="stable")
    isis = None
    if all(p.isis is not None for p in parts):
        flat = [a for p in parts for a in p.isis]
        isis = tuple(flat[i] for i in order)
    return EnsembleResult(
        trials[order],
        np.concatenate([p.values for p in parts])[order],
        np.concatenate([p.spike_counts for p in parts])[order],
        isis,
    )


def _run_trial(cfg, sp, trial, opts):
    m = trial_metrics(simulate(cfg, sp, trial), opts)
    return m.as_array(), m.spike_count, m.isis


def _run_tasks(tasks, threads):
    """Evaluate ``(cfg, sp, trial, opts)`` tasks, preserving task order."""
    if threads is None or threads <= 1:
        return [_run_trial(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool_:
        return list(pool_.map(lambda t: _run_trial(*t), tasks, chunksize=1))


def _collect(rows, trials, keep_isis):
    return EnsembleResult(
        np.asarray(trials, dtype=np.int64),
        np.array([r[0] for r in rows]).reshape(len(rows), len(METRIC_NAMES)),
        np.array([r[1] for r in rows], dtype=np.int64),
        tuple(r[2] for r in rows) if keep_isis else None,
    )


def ensemble_average(
    cfg: NetworkConfig,
    sp: SimParams,
    n_trials: int = 200,
    base_seed: int | None = None,
    opts: MetricOptions = MetricOptions(),
    trial_start: int = 0,
    threads: int = 1,
    keep_isis: bool = False,
) -> EnsembleResult:
    """Run trials ``trial_start .. trial_start + n_trials - 1`` and collect metrics."""
    if n_trials < 1:
        raise InvalidArgumentError("n_trials must be >= 1")
    if base_seed is not None:
        sp = replace(sp, seed=base_seed)
    trials = range(trial_start, trial_start + n_trials)
    rows = _run_tasks([(cfg, sp, k, opts) for k in trials], threads)
    return _collect(rows, trials, keep_isis)


def _median3(v: np.ndarray) -> np.ndarray:
    out = v.copy()
    if v.size >= 3:
        out[1:-1] = np.median(np.stack([v[:-2], v[1:-1], v[2:]]), axis=0)
    return out


def find_optimum(x, values, sense: str = "min", smooth: bool = True) -> tuple[float, float]:
    """Grid point of the smallest (or largest) ensemble mean.

    Undefined (NaN) points are skipped. With ``smooth`` the search runs on a
    3-point moving median, endpoints kept as-is; the returned value is the raw
    mean at the chosen point. The median flattens a sharp vertex into a tie
    with its neighbours, so ties on the smoothed curve are settled by the raw
    values, and any remaining tie goes to the smaller ``x``.
    """
    if sense not in ("min", "max"):
        raise InvalidArgumentError("sense must be 'min' or 'max'")
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=float)
    if x.shape != values.shape or x.size == 0:
        raise InvalidArgumentError("x and values must be non-empty and equal length")
    ok = np.isfinite(values)
    if not ok.any():
        raise NoResultError("no defined points on the curve")
    order = np.argsort(x[ok], kind="stable")
    xs, vs = x[ok][order], values[ok][order]
    search = _median3(vs) if smooth else vs
    sign = 1.0 if sense == "min" else -1.0
    tied = np.flatnonzero(sign * search == np.min(sign * search))
    k = int(tied[np.argmin(sign * vs[tied])])
    return float(xs[k]), float(vs[k])


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Ensemble means over a grid.

    ``mean``/``stderr``/``n_defined`` have shape ``grid + (len(METRIC_NAMES),)``.
    For one axis ``optima[metric]`` is ``(x*, value*)``; for two axes it is a
    list of those, one per value of the second axis (optimized along the first).
    """

    spec: SweepSpec
    mean: np.ndarray
    stderr: np.ndarray
    n_defined: np.ndarray
    optima: dict = field(default_factory=dict)
    noise_averaged: dict = field(default_factory=dict)

    @property
    def axes(self) -> tuple[Axis, ...]:
        return self.spec.axes

    def metric(self, name: str) -> np.ndarray:
        return self.mean[..., METRIC_NAMES.index(name)]

    def metric_stderr(self, name: str) -> np.ndarray:
        return self.stderr[..., METRIC_NAMES.index(name)]

    @property
    def exclusion_counts(self) -> np.ndarray:
        return self.spec.n_trials - self.n_defined


def run_grid(spec: SweepSpec, threads: int = 1) -> SweepResult:
    """Ensemble means at every grid point, without optima."""
    points = list(product(*(range(len(a)) for a in spec.axes)))
    sp = replace(spec.sim, seed=spec.base_seed)
    tasks, keys = [], []
    for idx in points:
        cfg = spec.config_at([a.values[i] for a, i in zip(spec.axes, idx)])
        for k in range(spec.n_trials):
            tasks.append((cfg, sp, k, spec.options))
            keys.append(idx)
    rows = _run_tasks(tasks, threads)
    n_m = len(METRIC_NAMES)
    mean = np.empty(spec.shape + (n_m,))
    se = np.empty_like(mean)
    nd = np.empty(spec.shape + (n_m,), dtype=np.int64)
    for p, idx in enumerate(points):
        chunk = rows[p * spec.n_trials : (p + 1) * spec.n_trials]
        ens = _collect(chunk, range(spec.n_trials), False)
        mean[idx], se[idx], nd[idx] = ens.mean, ens.stderr, ens.n_defined
    return SweepResult(spec, mean, se, nd)


def _curve_optima(x, res_slice, metrics, smooth):
    out = {}
    for name in metrics:
        vals = res_slice[..., METRIC_NAMES.index(name)]
        try:
            out[name] = find_optimum(x, vals, OPTIMUM_SENSE[name], smooth)
        except NoResultError:
            out[name] = (math.nan, math.nan)
    return out


def sweep_1d(spec: SweepSpec, metrics=("sigma", "gamma", "R"), smooth: bool = True, threads: int = 1) -> SweepResult:
    if len(spec.axes) != 1:
        raise InvalidArgumentError("sweep_1d needs exactly one axis")
    res = run_grid(spec, threads)
    optima = _curve_optima(spec.axes[0].values, res.mean, metrics, smooth)
    return replace(res, optima=optima)


def _slice_optima(spec, mean, metrics, smooth):
    x = spec.axes[0].values
    optima = {name: [] for name in metrics}
    for j in range(len(spec.axes[1])):
        for name, opt in _curve_optima(x, mean[:, j], metrics, smooth).items():
            optima[name].append(opt)
    return optima


def sweep_2d(spec: SweepSpec, metrics=("sigma", "R"), smooth: bool = True, threads: int = 1) -> SweepResult:
    """delta1 x coupling_d grid; optima taken along delta1 for each d."""
    if [a.name for a in spec.axes] != ["delta1", "coupling_d"]:
        raise InvalidArgumentError("sweep_2d needs axes (delta1, coupling_d)")
    res = run_grid(spec, threads)
    return replace(res, optima=_slice_optima(spec, res.mean, metrics, smooth))


def sweep_lambda(spec: SweepSpec, metrics=("sigma", "R"), smooth: bool = True, threads: int = 1) -> SweepResult:
    """delta1 x lambda0 grid: noise-averaged metrics and optimal delta1 per lambda0."""
    if [a.name for a in spec.axes] != ["delta1", "lambda0"]:
        raise InvalidArgumentError("sweep_lambda needs axes (delta1, lambda0)")
    if max(spec.axes[1].values) >= 0:
        raise InvalidArgumentError("lambda0 grid must be negative")
    res = run_grid(spec, threads)
    averaged = {name: np.nanmean(res.metric(name), axis=0) for name in metrics}
    return replace(res, optima=_slice_optima(spec, res.mean, metrics, smooth), noise_averaged=averaged)


@dataclass(frozen=True, eq=False)
class IsiDensity:
    bin_edges: np.ndarray
    densities: np.ndarray
    n_isis: int = 0

    @property
    def bin_mass(self) -> np.ndarray:
        return self.densities * np.diff(self.bin_edges)

    @property
    def modal_mass(self) -> float:
        return float(self.bin_mass.max())


def density_from_isis(isis, bins=60, range_=None) -> IsiDensity:
    isis = np.asarray(isis, dtype=float)
    if isis.size == 0:
        raise NoResultError("no inter-spike intervals to histogram")
    if np.ndim(bins) == 0 and int(bins) < 2:
        raise InvalidArgumentError("need at least 2 bins")
    if range_ is not None:
        isis = isis[(isis >= range_[0]) & (isis <= range_[1])]
        if isis.size == 0:
            raise NoResultError("no inter-spike intervals inside the histogram range")
    dens, edges = np.histogram(isis, bins=bins, range=range_, density=True)
    return IsiDensity(edges, dens, int(isis.size))


def isi_density(
    cfg: NetworkConfig,
    sp: SimParams,
    n_trials: int = 200,
    base_seed: int | None = None,
    bins=60,
    range_=(0.0, 12.0),
    opts: MetricOptions = MetricOptions(),
    threads: int = 1,
) -> IsiDensity:
    """Normalized histogram of output-node ISIs pooled over an ensemble."""
    ens = ensemble_average(cfg, sp, n_trials, base_seed, opts, threads=threads, keep_isis=True)
    return density_from_isis(ens.pooled_isis(), bins, range_)


def motif_config(kind, d=0.1, delta=(0.01, 0.01, 0.01), **osc) -> NetworkConfig:
    """Shorthand for a preset motif with shared oscillator parameters."""
    return NetworkConfig(OscillatorParams(**osc), build_motif(kind, d), np.asarray(delta, dtype=float))
