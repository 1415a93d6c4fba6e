"""Euler-Maruyama integration of the noisy FFL network.

Random numbers come from a Philox stream keyed by ``(seed, trial)``. Within a
trial the first six draws are the initial condition and draw ``6 + 3*k + i``
is the Wiener increment of node ``i`` at step ``k``, so a trajectory depends
only on its inputs, never on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numba
import numpy as np

from .errors import DivergenceError, InvalidArgumentError
from .model import N_NODES, NetworkConfig, drift

STATE_DIM = 2 * N_NODES
CSV_HEADER = "t,x1,y1,x2,y2,x3,y3"


@dataclass(frozen=True)
class SimParams:
    dt: float = 0.01
    t_end: float = 200.0
    t_analysis_start: float = 50.0
    init_std: float = 0.008
    seed: int = 0

    def __post_init__(self):
        for name in ("dt", "t_end", "t_analysis_start", "init_std"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidArgumentError(f"{name} must be finite")
        if not 0 < self.dt <= self.t_analysis_start < self.t_end:
            raise InvalidArgumentError(
                "need 0 < dt <= t_analysis_start < t_end, got "
                f"dt={self.dt}, t_analysis_start={self.t_analysis_start}, t_end={self.t_end}"
            )
        if self.init_std < 0:
            raise InvalidArgumentError("init_std must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidArgumentError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def analysis_index(self) -> int:
        """Index of the first sample at or after ``t_analysis_start``."""
        return int(math.ceil(self.t_analysis_start / self.dt - 1e-9))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    cfg: NetworkConfig
    sp: SimParams
    trial: int = 0

    @property
    def dt(self) -> float:
        return self.sp.dt

    def x(self, node: int) -> np.ndarray:
        return self.states[:, 2 * node]

    def y(self, node: int) -> np.ndarray:
        return self.states[:, 2 * node + 1]

    def to_csv(self, path) -> None:
        table = np.column_stack([self.times, self.states])
        np.savetxt(path, table, delimiter=",", header=CSV_HEADER, comments="", fmt="%.17g")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial),))
    return np.random.Generator(np.random.Philox(ss))


def em_step(state, cfg: NetworkConfig, dt: float, gaussians) -> np.ndarray:
    """One Euler-Maruyama step; noise enters the x-components only."""
    if dt <= 0:
        raise InvalidArgumentError("dt must be positive")
    state = np.asarray(state, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        nxt = state + drift(state, cfg) * dt
        nxt[0::2] += cfg.noise_intensities * math.sqrt(dt) * np.asarray(gaussians, dtype=float)
    bad = np.flatnonzero(~np.isfinite(nxt))
    if bad.size:
        raise DivergenceError(f"state diverged at index {bad[0]}", step=0, index=int(bad[0]))
    return nxt


@numba.njit(cache=True, nogil=True)
def _integrate(out, weights, noise_scale, lam0, alpha, gq, om0, om1, dt, gaussians):
    """Fill ``out[1:]`` from ``out[0]``. Returns -1, or the failing step index."""
    n = out.shape[0] - 1
    m = weights.shape[0]
    insum = np.zeros(m)
    for i in range(m):
        for j in range(m):
            insum[i] += weights[j, i]
    x = np.empty(m)
    y = np.empty(m)
    for k in range(n):
        for i in range(m):
            x[i] = out[k, 2 * i]
            y[i] = out[k, 2 * i + 1]
        ok = True
        for i in range(m):
            r2 = x[i] * x[i] + y[i] * y[i]
            lam = lam0 + alpha * r2 + gq * r2 * r2
            om = om0 + om1 * r2
            cx = -insum[i] * x[i]
            cy = -insum[i] * y[i]
            for j in range(m):
                w = weights[j, i]
                if w != 0.0:
                    cx += w * x[j]
                    cy += w * y[j]
            nx = x[i] + (lam * x[i] - om * y[i] + cx) * dt + noise_scale[i] * gaussians[k, i]
            ny = y[i] + (om * x[i] + lam * y[i] + cy) * dt
            out[k + 1, 2 * i] = nx
            out[k + 1, 2 * i + 1] = ny
            if not (math.isfinite(nx) and math.isfinite(ny)):
                ok = False
        if not ok:
            return k
    return -1


def integrate(state0, cfg: NetworkConfig, dt: float, gaussians) -> np.ndarray:
    """Run ``len(gaussians)`` Euler-Maruyama steps from ``state0``.

    Returns the ``(n_steps + 1, 6)`` state history including ``state0``.
    """
    gaussians = np.ascontiguousarray(gaussians, dtype=float)
    out = np.empty((gaussians.shape[0] + 1, STATE_DIM))
    out[0] = state0
    p = cfg.oscillator
    failed = _integrate(
        out,
        np.ascontiguousarray(cfg.coupling.weights),
        cfg.noise_intensities * math.sqrt(dt),
        p.lambda0, p.alpha, p.gamma_quintic, p.omega0, p.omega1,
        dt,
        gaussians,
    )
    if failed >= 0:
        row = out[failed + 1]
        idx = int(np.flatnonzero(~np.isfinite(row))[0])
        raise DivergenceError(
            f"state diverged at step {failed} (t={(failed + 1) * dt:g}), component {idx}",
            step=int(failed),
            index=idx,
        )
    return out


def simulate(cfg: NetworkConfig, sp: SimParams, trial: int = 0) -> Trajectory:
    """Simulate one trial over ``[0, t_end]``; bit-reproducible from ``(cfg, sp, trial)``."""
    rng = trial_rng(sp.seed, trial)
    state0 = rng.standard_normal(STATE_DIM) * sp.init_std
    gaussians = rng.standard_normal((sp.n_steps, N_NODES))
    states = integrate(state0, cfg, sp.dt, gaussians)
    times = np.arange(sp.n_steps + 1) * sp.dt
    return Trajectory(times, states, cfg, sp, trial)


def analysis_window(traj: Trajectory, start: float | None = None) -> Trajectory:
    """Drop the transient: keep samples with ``t >= start``.

    ``start`` defaults to ``traj.sp.t_analysis_start``.
    """
    if start is None:
        start = traj.sp.t_analysis_start
    if start >= traj.times[-1]:
        raise InvalidArgumentError(
            f"analysis window [{start}, {traj.times[-1]}] is empty"
        )
    k = int(np.searchsorted(traj.times, start - 1e-9 * traj.sp.dt, side="left"))
    return replace(traj, times=traj.times[k:], states=traj.states[k:])
