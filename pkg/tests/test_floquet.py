import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from floquet_lab.floquet import (
    ModelParams,
    SplitStepper,
    band_margin,
    bessel_band_margin,
    build_floquet,
    build_generic_floquet,
    build_linear_floquet,
    build_standard_floquet,
    grid_size,
    propagate,
    sample_kick_profile,
    split_step_apply,
)
from floquet_lab.hilbert import BasisSpec, momentum_eigenstate, superposition


def quadrature_kick(v, basis, m=512):
    """<n|exp(-i v(theta))|m> by the periodic trapezoid rule (spectrally exact)."""
    th = 2 * np.pi * np.arange(m) / m
    n = basis.labels
    f = np.exp(-1j * v(th))
    # (1/2pi) int exp(-i (n - m') theta) f(theta) d theta
    waves = np.exp(-1j * np.multiply.outer(n[:, None] - n[None, :], th))
    return (waves * f).mean(axis=-1)


def test_zero_kick_is_diagonal_free_phase():
    b = BasisSpec(6)
    U = build_standard_floquet(ModelParams("standard", 0.0, 0.9), b)
    n = b.labels
    assert np.allclose(U.entries, np.diag(np.exp(-1j * n**2 * 0.9 / 2)), atol=1e-15)


@pytest.mark.parametrize("k,tau", [(0.5, 0.7), (2.0, 1.0), (5.0, 2.1)])
def test_standard_matches_quadrature(k, tau):
    b = BasisSpec(14)
    U = build_standard_floquet(ModelParams("standard", k, tau), b)
    kick = quadrature_kick(lambda th: k * np.cos(th), b)
    free = np.exp(-1j * b.labels**2 * tau / 2)
    assert np.max(np.abs(U.entries - kick * free[None, :])) < 1e-13


def test_phase_sign_paper_conjugates_free_phase():
    b = BasisSpec(8)
    d = build_standard_floquet(ModelParams("standard", 0.0, 1.3), b).entries
    p = build_standard_floquet(ModelParams("standard", 0.0, 1.3, phase_sign="paper"), b).entries
    assert np.allclose(p, d.conj(), atol=1e-15)


def test_linear_formula_against_scipy():
    b = BasisSpec(10)
    k, phi = 1.5, 0.7
    U = build_linear_floquet(ModelParams("linear", k, phi_free=phi), b).entries
    n = b.labels
    q = n[None, :] - n[:, None]
    ref = np.exp(-1j * n[None, :] * phi) * (1j) ** q * scipy.special.jv(q, k)
    assert np.max(np.abs(U - ref)) < 1e-13
    # i^(m-n) J_{m-n}(k) is the kick exp(+i k cos theta)
    kick = quadrature_kick(lambda th: -k * np.cos(th), b)
    assert np.max(np.abs(U - kick * np.exp(-1j * n * phi)[None, :])) < 1e-13


def test_generic_cosine_reproduces_standard():
    b = BasisSpec(12)
    k, tau = 2.0, 1.0
    prof = sample_kick_profile(lambda th: k * np.cos(th), grid_size(b))
    G = build_generic_floquet(ModelParams("generic", k, tau, kick_profile=prof), b)
    S = build_standard_floquet(ModelParams("standard", k, tau), b)
    assert np.max(np.abs(G.entries - S.entries)) < 1e-13


def test_generic_sine_kick_is_shifted_bessel():
    # exp(-i k sin theta) has <n|.|m> = J_{m-n}(k), i.e. (-i)^q relative to the cosine kick
    b = BasisSpec(12)
    k = 1.7
    prof = sample_kick_profile(lambda th: k * np.sin(th), grid_size(b))
    G = build_generic_floquet(ModelParams("generic", k, 0.0, kick_profile=prof), b).entries
    n = b.labels
    q = n[None, :] - n[:, None]
    assert np.max(np.abs(G - scipy.special.jv(q, k))) < 1e-13


def test_generic_alias_guard():
    b = BasisSpec(20)
    prof = sample_kick_profile(lambda th: 30.0 * np.cos(th), grid_size(b))
    with pytest.raises(ValueError, match="not resolved"):
        build_generic_floquet(ModelParams("generic", 30.0, 1.0, kick_profile=prof), b)
    with pytest.raises(ValueError, match="samples"):
        build_generic_floquet(ModelParams("generic", 1.0, 1.0, kick_profile=np.zeros(16)), b)


@pytest.mark.parametrize("bad", [
    dict(kind="quadratic"),
    dict(kind="standard", k_kick=1.0),
    dict(kind="linear", k_kick=1.0),
    dict(kind="standard", k_kick=-1.0, tau_free=1.0),
    dict(kind="standard", k_kick=1.0, tau_free=1.0, phase_sign="other"),
    dict(kind="generic", k_kick=1.0, tau_free=1.0),
    dict(kind="generic", k_kick=1.0, tau_free=1.0, kick_profile=np.zeros(12)),
])
def test_model_params_validation(bad):
    with pytest.raises(ValueError):
        ModelParams(**bad)


def test_with_kick():
    p = ModelParams("standard", 1.0, 0.5).with_kick(2.0)
    assert p.k_kick == 2.0 and p.tau_free == 0.5
    with pytest.raises(ValueError):
        ModelParams("generic", 1.0, 1.0, kick_profile=np.zeros(16)).with_kick(2.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 60.0))
def test_band_margin_bounds_bessel_tail(k):
    b = bessel_band_margin(k)
    q = np.arange(b + 1, b + 200)
    assert np.all(np.abs(scipy.special.jv(q, k)) < 1e-14)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 8.0), st.floats(0.1, 6.3))
def test_interior_unitarity(k, tau):
    p = ModelParams("standard", k, tau)
    b = BasisSpec.for_kick(k)
    U = build_floquet(p, b)
    assert U.interior_columns().any()
    assert U.interior_unitarity_error() < 1e-12


def test_generic_band_margin():
    b = BasisSpec(30)
    prof = sample_kick_profile(lambda th: 2.0 * np.cos(th), grid_size(b))
    gm = band_margin(ModelParams("generic", 2.0, 1.0, kick_profile=prof))
    assert abs(gm - bessel_band_margin(2.0)) <= 2


def test_split_step_matches_dense_matrix():
    p = ModelParams("standard", 3.0, 1.0)
    b = BasisSpec(60)
    psi = superposition(b, {0: 1.0, 2: 0.5j})
    U = build_floquet(p, b)
    stepper = SplitStepper(p, b)
    dense = propagate(U, psi, 5).amplitudes
    amps = psi.amplitudes
    for _ in range(5):
        amps = stepper.step_amplitudes(amps)
    assert np.max(np.abs(dense - amps)) < 1e-12
    assert not split_step_apply(p, psi).flags


def test_split_step_flags_edge_contamination():
    p = ModelParams("standard", 3.0, 1.0)
    b = BasisSpec(30)
    edge = momentum_eigenstate(b, 29)
    assert "edge-contamination" in split_step_apply(p, edge).flags
    with pytest.raises(ValueError):
        SplitStepper(ModelParams("linear", 1.0, phi_free=1.0), b)


def test_propagate_guards():
    b = BasisSpec(5)
    U = build_floquet(ModelParams("standard", 1.0, 1.0), b)
    with pytest.raises(ValueError):
        propagate(U, momentum_eigenstate(BasisSpec(4), 0), 1)
    with pytest.raises(ValueError):
        propagate(U, momentum_eigenstate(b, 0), -1)
    assert np.array_equal(propagate(U, momentum_eigenstate(b, 0), 0).amplitudes,
                          momentum_eigenstate(b, 0).amplitudes)
