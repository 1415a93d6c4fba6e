import math

import numpy as np
import pytest

from fflsync.errors import DivergenceError, InvalidArgumentError
from fflsync.model import (
    CouplingMatrix,
    MotifKind,
    NetworkConfig,
    OscillatorParams,
    build_motif,
    drift,
    lambda_fn,
    omega_fn,
)

from oracles import naive_drift

REFERENCE = OscillatorParams(lambda0=-0.3, alpha=-0.2, gamma_quintic=-0.2, omega0=2.0, omega1=0.0)


def test_lambda_fn_examples():
    assert lambda_fn(0.0, REFERENCE) == -0.3
    assert lambda_fn(1.0, REFERENCE) == pytest.approx(-0.7)
    p = OscillatorParams(lambda0=-0.1)
    assert lambda_fn(math.sqrt(2), p) == pytest.approx(-1.3)


def test_omega_fn_examples():
    assert omega_fn(3.7, REFERENCE) == 2.0
    assert omega_fn(0.0, OscillatorParams(omega0=2, omega1=5)) == 2.0
    assert omega_fn(2.0, OscillatorParams(omega0=1, omega1=0.5)) == pytest.approx(3.0)


@pytest.mark.parametrize("r", [math.nan, math.inf, -1.0])
def test_modulation_rejects_bad_amplitude(r):
    with pytest.raises(InvalidArgumentError):
        lambda_fn(r, REFERENCE)
    with pytest.raises(InvalidArgumentError):
        omega_fn(r, REFERENCE)


def test_non_finite_params_rejected():
    with pytest.raises(InvalidArgumentError):
        OscillatorParams(lambda0=math.nan)


def test_subcritical_params_warn():
    with pytest.warns(RuntimeWarning):
        OscillatorParams(alpha=0.2)


@pytest.mark.parametrize(
    "kind, d, expected",
    [
        ("T1", 0.1, {(1, 2): 0.1, (1, 3): 0.1, (2, 3): 0.1}),
        ("T2", 0.1, {(1, 2): 0.1, (1, 3): 0.1, (2, 3): -0.1}),
        ("T1", 0.01, {(1, 2): 0.01, (1, 3): 0.01, (2, 3): 0.01}),
    ],
)
def test_build_motif_edges(kind, d, expected):
    c = build_motif(kind, d)
    assert c.edges() == expected
    assert c.is_ffl


@pytest.mark.parametrize("d", [0.0, -0.1, math.nan])
def test_build_motif_rejects_non_positive(d):
    with pytest.raises(InvalidArgumentError):
        build_motif(MotifKind.T1, d)


def test_coupling_validation():
    w = np.zeros((3, 3))
    w[1, 1] = 0.1
    with pytest.raises(InvalidArgumentError):
        CouplingMatrix(w)
    with pytest.raises(InvalidArgumentError):
        CouplingMatrix(np.zeros((2, 2)))


def test_network_config_validation():
    with pytest.raises(InvalidArgumentError):
        NetworkConfig(noise_intensities=[0.1, -0.1, 0.0])
    with pytest.raises(InvalidArgumentError):
        NetworkConfig(noise_intensities=[0.1, 0.1])


def test_config_is_immutable():
    cfg = NetworkConfig()
    with pytest.raises(ValueError):
        cfg.noise_intensities[0] = 1.0
    with pytest.raises(ValueError):
        cfg.coupling.weights[0, 1] = 1.0


def test_drift_origin_is_equilibrium():
    cfg = NetworkConfig(REFERENCE, build_motif("T2", 0.1), [0.1, 0.1, 0.1])
    assert np.all(drift(np.zeros(6), cfg) == 0)


def test_drift_single_node_substitution():
    cfg = NetworkConfig(REFERENCE, CouplingMatrix(np.zeros((3, 3))), [0, 0, 0])
    out = drift([1.0, 0.0, 0, 0, 0, 0], cfg)
    np.testing.assert_allclose(out[:2], [-0.7, 2.0])


@pytest.mark.parametrize("kind", ["T1", "T2"])
def test_drift_matches_naive_transcription(kind):
    cfg = NetworkConfig(REFERENCE, build_motif(kind, 0.01), [0, 0, 0])
    rng = np.random.default_rng(7)
    d = cfg.coupling.weights.tolist()
    for _ in range(50):
        s = rng.normal(0, 0.6, 6)
        expected = naive_drift(s.tolist(), -0.3, -0.2, -0.2, 2.0, 0.0, d)
        np.testing.assert_allclose(drift(s, cfg), expected, rtol=1e-13, atol=1e-15)


def test_drift_non_finite_reports_index():
    with pytest.raises(DivergenceError) as err:
        drift([0, 0, 0, math.inf, 0, 0], NetworkConfig())
    assert err.value.index == 3


def test_uncoupled_drift_decomposes():
    cfg = NetworkConfig(REFERENCE, CouplingMatrix(np.zeros((3, 3))), [0, 0, 0])
    s = np.array([0.3, -0.2, 0.5, 0.1, -0.4, 0.7])
    full = drift(s, cfg)
    for i in range(3):
        alone = np.zeros(6)
        alone[2 * i : 2 * i + 2] = s[2 * i : 2 * i + 2]
        np.testing.assert_allclose(full[2 * i : 2 * i + 2], drift(alone, cfg)[2 * i : 2 * i + 2])
