"""Randomised model invariants, 1000 generated cases across four properties."""

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hris_sim.arrays import Direction, PlanarArray, steering_vector
from hris_sim.channels import cascade
from hris_sim.hris import HrisConfig, build_signals, reflect, sense

import oracles

_SETTINGS = dict(max_examples=250, derandomize=True, deadline=None)

_angle = st.floats(0.0, 2.0 * np.pi - 1e-9, allow_nan=False)
_unit = st.floats(0.0, 1.0, allow_nan=False)
_amp = st.floats(-2.0, 2.0, allow_nan=False)


@st.composite
def hris_configs(draw, max_atoms=16):
    n = draw(st.integers(1, max_atoms))
    n_rf = draw(st.integers(1, n))
    rho = np.array(draw(st.lists(_unit, min_size=n, max_size=n)))
    rphase = np.array(draw(st.lists(_angle, min_size=n, max_size=n)))
    sphase = np.array(draw(st.lists(_angle, min_size=n, max_size=n)))
    cphase = np.array(draw(st.lists(_angle, min_size=n_rf * n, max_size=n_rf * n)))
    return HrisConfig(n_atoms=n, rho=rho, reflect_phase=rphase,
                      sense_phase=sphase, n_rf_chains=n_rf,
                      combiner=np.exp(1j * cphase.reshape(n_rf, n)))


@st.composite
def complex_vectors(draw, length):
    re = draw(st.lists(_amp, min_size=length, max_size=length))
    im = draw(st.lists(_amp, min_size=length, max_size=length))
    return np.array(re) + 1j * np.array(im)


@st.composite
def config_and_incidents(draw):
    cfg = draw(hris_configs())
    a = draw(complex_vectors(cfg.n_atoms))
    b = draw(complex_vectors(cfg.n_atoms))
    scale = complex(draw(_amp), draw(_amp))
    return cfg, a, b, scale


@settings(**_SETTINGS)
@given(hris_configs())
def test_per_atom_power_conservation(cfg):
    """Reflected and sensed power fractions always sum to one per atom."""
    signals = build_signals(cfg)
    reflected_power = np.abs(signals.reflected_gain) ** 2
    sensed_power = np.abs(signals.sensed_map[0]) ** 2  # unit-modulus combiner row
    np.testing.assert_allclose(reflected_power + sensed_power,
                               np.ones(cfg.n_atoms), atol=1e-12)


@settings(**_SETTINGS)
@given(config_and_incidents())
def test_sense_and_reflect_are_linear(case):
    cfg, a, b, scale = case
    signals = build_signals(cfg)
    lhs = sense(signals, a + scale * b, 0.0)
    rhs = sense(signals, a, 0.0) + scale * sense(signals, b, 0.0)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
    lhs_r = reflect(signals, a + scale * b)
    rhs_r = reflect(signals, a) + scale * reflect(signals, b)
    np.testing.assert_allclose(lhs_r, rhs_r, atol=1e-12)


@settings(**_SETTINGS)
@given(n_h=st.integers(1, 8), n_v=st.integers(1, 8),
       spacing=st.floats(1e-4, 0.02), wavelength=st.floats(1e-3, 0.1),
       elevation=st.floats(0.0, np.pi / 2.0 - 1e-9), azimuth=_angle)
def test_steering_vectors_unit_modulus(n_h, n_v, spacing, wavelength,
                                       elevation, azimuth):
    arr = PlanarArray(n_h, n_v, spacing, wavelength)
    a = steering_vector(arr, Direction(elevation, azimuth))
    np.testing.assert_allclose(np.abs(a), np.ones(arr.n_elements), atol=1e-12)


@st.composite
def cascade_instances(draw):
    n_bs = draw(st.integers(1, 4))
    n_atoms = draw(st.integers(1, 3))
    n_users = draw(st.integers(1, 2))
    H = draw(complex_vectors(n_atoms * n_users)).reshape(n_atoms, n_users)
    G = draw(complex_vectors(n_bs * n_atoms)).reshape(n_bs, n_atoms)
    rho = np.array(draw(st.lists(_unit, min_size=n_atoms, max_size=n_atoms)))
    phase = np.array(draw(st.lists(_angle, min_size=n_atoms, max_size=n_atoms)))
    return H, G, rho, phase


@settings(**_SETTINGS)
@given(cascade_instances())
def test_cascade_matches_brute_force(instance):
    """Vectorised cascade equals the triple-loop reference on small systems."""
    H, G, rho, phase = instance
    n_atoms = H.shape[0]
    cfg = HrisConfig(n_atoms=n_atoms, rho=rho, reflect_phase=phase,
                     sense_phase=np.zeros(n_atoms), n_rf_chains=1,
                     combiner=np.ones((1, n_atoms), dtype=complex))
    np.testing.assert_allclose(cascade(H, G, cfg),
                               oracles.cascade_loops(H, G, rho, phase),
                               atol=1e-12)
