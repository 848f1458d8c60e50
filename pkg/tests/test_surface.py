import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from efas_mimo.errors import ConfigError, DegenerateChannelError, DimensionError, NumericalDomainError
from efas_mimo.surface import (
    EPS0,
    MU0,
    RelaySpec,
    SurfaceConfig,
    SurfaceImpedanceSpec,
    SurfaceWaveParams,
    build_surface_channel,
    effective_noise_variance,
    omega_eq,
    omega_sw,
    propagation_constant,
    surface_wave_envelope,
)

from oracles import GAMMA_Z_100_J100, GAMMA_Z_J100, K0_30GHZ

ETA0 = math.sqrt(MU0 / EPS0)


def random_unitary(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def spec(z) -> SurfaceImpedanceSpec:
    return SurfaceImpedanceSpec.from_frequency_ghz(z, 30.0)


def test_free_space_wavenumber():
    assert spec(0).k0 == pytest.approx(K0_30GHZ, rel=1e-14)


def test_zero_impedance_gives_free_space():
    g = propagation_constant(spec(0))
    assert g.real == 0.0
    assert g.imag == pytest.approx(spec(0).k0, rel=1e-15)


def test_reactive_impedance_is_lossless_and_slow():
    g = propagation_constant(spec(100j))
    assert g.real == pytest.approx(0.0, abs=1e-9)
    assert g.imag == pytest.approx(GAMMA_Z_J100.imag, rel=1e-13)
    assert g.imag / spec(0).k0 == pytest.approx(math.sqrt(1 + (100 / ETA0) ** 2), rel=1e-13)
    assert g.imag / spec(0).k0 == pytest.approx(1.03464, abs=1e-5)


def test_lossy_impedance_golden():
    g = propagation_constant(spec(100 + 100j))
    assert g.real == pytest.approx(GAMMA_Z_100_J100.real, rel=1e-12)
    assert g.imag == pytest.approx(GAMMA_Z_100_J100.imag, rel=1e-13)
    assert g.real > 0 and g.imag > spec(0).k0


@given(st.floats(min_value=0.0, max_value=2000.0), st.floats(min_value=-2000.0, max_value=2000.0))
def test_propagation_root_is_passive_and_solves_dispersion(r, x):
    s = spec(complex(r, x))
    g = propagation_constant(s)
    assert g.real >= 0
    lhs = g * g
    rhs = -(s.omega ** 2) * s.mu0 * s.eps0 - (-1j * s.omega * s.eps0 * s.z_sur) ** 2
    assert abs(lhs - rhs) <= 1e-12 * max(abs(rhs), 1.0)


def test_bad_frequency_rejected():
    with pytest.raises(NumericalDomainError):
        SurfaceImpedanceSpec(z_sur=0, omega=0.0)


def test_envelope_examples():
    assert surface_wave_envelope(SurfaceWaveParams(gamma=1 + 2j, a0=0.7 - 0.2j, d=0.0)) == 0.7 - 0.2j
    e = surface_wave_envelope(SurfaceWaveParams.from_constants(0.1, 0.0, 1.0, 10.0))
    assert e == pytest.approx(math.exp(-1), abs=1e-15)
    assert e == pytest.approx(0.367879, abs=1e-6)
    assert surface_wave_envelope(SurfaceWaveParams.from_constants(0.0, math.pi, 1.0, 1.0)) == pytest.approx(-1, abs=1e-15)


def test_negative_distance_rejected():
    with pytest.raises(NumericalDomainError):
        SurfaceWaveParams(gamma=1j, d=-1.0)


@given(st.floats(min_value=0, max_value=50), st.floats(min_value=0, max_value=1e3),
       st.floats(min_value=0, max_value=0.5), st.floats(min_value=0, max_value=0.5))
def test_envelope_magnitude_decays_multiplicatively(alpha, beta, d1, d2):
    def env(d):
        return surface_wave_envelope(SurfaceWaveParams.from_constants(alpha, beta, 1.0, d))
    assert abs(env(d1 + d2)) == pytest.approx(abs(env(d1)) * abs(env(d2)), rel=1e-12)
    assert abs(env(d1)) == pytest.approx(math.exp(-alpha * d1), rel=1e-12)


def test_surface_channel_examples():
    ch = build_surface_channel(SurfaceWaveParams(gamma=0j), np.eye(4))
    np.testing.assert_allclose(ch.h_sur, np.eye(4))
    half = SurfaceWaveParams.from_constants(0.0, math.pi / 2, 0.5, 1.0)
    np.testing.assert_allclose(build_surface_channel(half, np.eye(4)).h_sur, -0.5j * np.eye(4), atol=1e-15)
    perm = np.eye(5)[[3, 0, 4, 1, 2]]
    wave = SurfaceWaveParams.from_constants(2.0, 7.0, 1.3, 0.2)
    ch = build_surface_channel(wave, perm)
    assert np.linalg.norm(ch.h_sur) == pytest.approx(abs(ch.h_sw_scalar) * math.sqrt(5), rel=1e-14)


def test_surface_channel_rejects_bad_routing():
    with pytest.raises(DimensionError):
        build_surface_channel(SurfaceWaveParams(gamma=0j), np.ones((2, 3)))
    with pytest.raises(NumericalDomainError):
        build_surface_channel(SurfaceWaveParams(gamma=0j), np.array([[np.nan]]))


def test_relay_validation():
    with pytest.raises(ConfigError):
        RelaySpec(1.0, np.ones((2, 2)))
    with pytest.raises(ConfigError):
        RelaySpec(1.0, np.array([[1, 1], [0, 0]]), "selection")
    with pytest.raises(ConfigError):
        RelaySpec(1.0, np.eye(2), "mystery")
    sel = RelaySpec(1.0, np.eye(3, 5), "selection")
    assert (sel.n_l, sel.n_s) == (3, 5)
    semi = RelaySpec(2.0, random_unitary(6, 1)[:, :4])
    assert (semi.n_l, semi.n_s) == (6, 4)


def test_omega_sw_identity_examples():
    eye = np.eye(8)
    relay = RelaySpec.identity(8)
    assert omega_sw(1, 1, eye, relay, 4, "paper") == pytest.approx(2.0)
    assert omega_sw(1, 1, eye, relay, 4, "unnormalized") == pytest.approx(8.0)
    for norm in ("paper", "unnormalized"):
        assert omega_sw(1, 1, np.zeros((8, 8)), relay, 4, norm) == 0.0
    with pytest.raises(ValueError):
        omega_sw(1, 1, eye, relay, 4, "other")


@given(st.complex_numbers(max_magnitude=3.0), st.floats(0, 20), st.floats(0, 50), st.floats(0, 0.2),
       st.integers(1, 8), st.integers(1, 64))
def test_omega_sw_scalar_identity_closed_form(alpha_r, alpha, beta, d, n_s, m):
    wave = SurfaceWaveParams.from_constants(alpha, beta, 0.8, d)
    surf = SurfaceConfig(wave=wave, relay=RelaySpec.identity(n_s, alpha_r))
    expected = abs(alpha_r) ** 2 * 0.64 * math.exp(-2 * alpha * d) * n_s / m
    assert omega_sw(1, 1, surf.h_sur, surf.relay, m, "paper") == pytest.approx(expected, rel=1e-12, abs=1e-300)


@given(st.integers(0, 10_000), st.floats(0, 5), st.floats(0, 5))
@settings(max_examples=30)
def test_omega_sw_unitary_invariance_and_linearity(seed, b_bs, b_lu):
    rng = np.random.default_rng(seed)
    h = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    base = omega_sw(1, 1, h, RelaySpec.identity(5, 1.5), 7)
    rotated = omega_sw(1, 1, h, RelaySpec(1.5, random_unitary(5, seed + 1)), 7)
    assert rotated == pytest.approx(base, rel=1e-12)
    assert omega_sw(b_bs, b_lu, h, RelaySpec.identity(5, 1.5), 7) == pytest.approx(b_bs * b_lu * base, rel=1e-12)


def test_omega_sw_dimension_checks():
    with pytest.raises(DimensionError):
        omega_sw(1, 1, np.eye(3), RelaySpec.identity(4), 4)
    with pytest.raises(NumericalDomainError):
        omega_sw(-1, 1, np.eye(4), RelaySpec.identity(4), 4)


def test_omega_eq_examples():
    assert omega_eq(5, 0.01) == pytest.approx(5.01)
    assert omega_eq(0, 0.01) == 0.01
    assert omega_eq(3.2, 0) == 3.2
    with pytest.raises(DegenerateChannelError):
        omega_eq(0, 0)


def test_effective_noise_examples():
    assert effective_noise_variance(1, 0.1, 1, RelaySpec.identity(4)) == pytest.approx(1.4)
    assert effective_noise_variance(2.5, 0.0, 3, RelaySpec.identity(4, 7.0)) == 2.5
    assert effective_noise_variance(1, 0.05, 2, RelaySpec.identity(8, 2.0)) == pytest.approx(4.2)


def test_surface_config_defaults_and_cascade():
    wave = SurfaceWaveParams.from_constants(1.0, 3.0, 1.0, 0.1)
    cfg = SurfaceConfig(wave=wave, relay=RelaySpec(2.0, np.eye(3, 4), "selection"))
    np.testing.assert_allclose(cfg.g_path, np.eye(4))
    env = surface_wave_envelope(wave)
    np.testing.assert_allclose(cfg.cascade(), 2.0 * env * np.eye(3, 4))
    with pytest.raises(DimensionError):
        SurfaceConfig(wave=wave, relay=RelaySpec.identity(3), g_path=np.eye(4))
    assert cmath.isclose(cfg.channel.h_sw_scalar, env)
