"""Lambda-omega oscillators wired as three-node feed-forward loops.

Edge convention: ``weights[j, i]`` is the strength of the signal sent from
node ``j`` into node ``i`` (0-based). Node 0 is the input layer and node 2 the
output layer.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, InvalidArgumentError

N_NODES = 3


@dataclass(frozen=True)
class OscillatorParams:
    lambda0: float = -0.1
    alpha: float = -0.2
    gamma_quintic: float = -0.2
    omega0: float = 2.0
    omega1: float = 0.0

    def __post_init__(self):
        for name in ("lambda0", "alpha", "gamma_quintic", "omega0", "omega1"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgumentError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.alpha >= 0 or self.gamma_quintic >= 0:
            warnings.warn(
                "alpha >= 0 or gamma_quintic >= 0: outside the supercritical regime",
                RuntimeWarning,
                stacklevel=3,
            )


class MotifKind(str, enum.Enum):
    T1 = "T1"
    T2 = "T2"


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class CouplingMatrix:
    weights: np.ndarray

    def __post_init__(self):
        w = _frozen(self.weights)
        if w.shape != (N_NODES, N_NODES):
            raise InvalidArgumentError(f"coupling must be 3x3, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise InvalidArgumentError("coupling weights must be finite")
        if np.any(np.diag(w) != 0):
            raise InvalidArgumentError("coupling matrix must have a zero diagonal")
        object.__setattr__(self, "weights", w)

    def __eq__(self, other):
        if not isinstance(other, CouplingMatrix):
            return NotImplemented
        return bool(np.array_equal(self.weights, other.weights))

    def __hash__(self):
        return hash(self.weights.tobytes())

    @property
    def is_ffl(self) -> bool:
        """Node 1 receives nothing and node 3 sends nothing."""
        return bool(np.all(self.weights[:, 0] == 0) and np.all(self.weights[2, :] == 0))

    def edges(self) -> dict[tuple[int, int], float]:
        """Nonzero edges as ``{(source, target): weight}`` with 1-based node labels."""
        src, dst = np.nonzero(self.weights)
        return {(int(j) + 1, int(i) + 1): float(self.weights[j, i]) for j, i in zip(src, dst)}


def build_motif(kind: MotifKind | str, d: float) -> CouplingMatrix:
    """Coupling matrix for the T1 (coherent) or T2 (incoherent) feed-forward loop.

    ``d`` is the common edge magnitude; the sign of the 2->3 edge comes from
    ``kind``.
    """
    kind = MotifKind(kind)
    if not math.isfinite(d) or d <= 0:
        raise InvalidArgumentError(f"motif coupling magnitude must be > 0, got {d!r}")
    w = np.zeros((N_NODES, N_NODES))
    w[0, 1] = d
    w[0, 2] = d
    w[1, 2] = d if kind is MotifKind.T1 else -d
    return CouplingMatrix(w)


@dataclass(frozen=True, eq=False)
class NetworkConfig:
    oscillator: OscillatorParams = field(default_factory=OscillatorParams)
    coupling: CouplingMatrix = field(default_factory=lambda: build_motif("T1", 0.1))
    noise_intensities: np.ndarray = field(default_factory=lambda: np.full(N_NODES, 0.01))

    def __post_init__(self):
        delta = _frozen(self.noise_intensities)
        if delta.shape != (N_NODES,):
            raise InvalidArgumentError(f"need {N_NODES} noise intensities, got shape {delta.shape}")
        if not np.all(np.isfinite(delta)) or np.any(delta < 0):
            raise InvalidArgumentError(f"noise intensities must be finite and >= 0, got {delta}")
        object.__setattr__(self, "noise_intensities", delta)

    def __eq__(self, other):
        if not isinstance(other, NetworkConfig):
            return NotImplemented
        return (
            self.oscillator == other.oscillator
            and self.coupling == other.coupling
            and bool(np.array_equal(self.noise_intensities, other.noise_intensities))
        )

    def __hash__(self):
        return hash((self.oscillator, self.coupling, self.noise_intensities.tobytes()))

    def with_noise(self, delta) -> "NetworkConfig":
        return NetworkConfig(self.oscillator, self.coupling, delta)


def _check_amplitude(r):
    r = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(r)):
        raise InvalidArgumentError("amplitude must be finite")
    if np.any(r < 0):
        raise InvalidArgumentError("amplitude must be non-negative")
    return r


def lambda_fn(r, p: OscillatorParams):
    """Radial growth rate ``lambda0 + alpha r^2 + gamma_quintic r^4``."""
    r = _check_amplitude(r)
    r2 = r * r
    out = p.lambda0 + p.alpha * r2 + p.gamma_quintic * r2 * r2
    return float(out) if out.ndim == 0 else out


def omega_fn(r, p: OscillatorParams):
    """Angular frequency ``omega0 + omega1 r^2``."""
    r = _check_amplitude(r)
    out = p.omega0 + p.omega1 * r * r
    return float(out) if out.ndim == 0 else out


def drift(state, cfg: NetworkConfig) -> np.ndarray:
    """Deterministic part of the SDE for the flat state ``(x1, y1, x2, y2, x3, y3)``."""
    state = np.asarray(state, dtype=float)
    bad = np.flatnonzero(~np.isfinite(state))
    if bad.size:
        raise DivergenceError(f"non-finite state at index {bad[0]}", index=int(bad[0]))
    p = cfg.oscillator
    w = cfg.coupling.weights
    x, y = state[0::2], state[1::2]
    out = np.empty_like(state)
    with np.errstate(over="ignore", invalid="ignore"):
        r2 = x * x + y * y
        lam = p.lambda0 + p.alpha * r2 + p.gamma_quintic * r2 * r2
        om = p.omega0 + p.omega1 * r2
        # sum_j w[j, i] * (x_j - x_i)
        cx = w.T @ x - w.sum(axis=0) * x
        cy = w.T @ y - w.sum(axis=0) * y
        out[0::2] = lam * x - om * y + cx
        out[1::2] = om * x + lam * y + cy
    return out
