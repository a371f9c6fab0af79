import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from floquet_lab.analytic import (
    E2Element,
    e2_compose,
    e2_power,
    e2_representation,
    linear_echo_closed_form,
    linear_propagator_closed_form,
    linear_rotor_element,
    linear_wigner_closed_form,
)
from floquet_lab.diagnostics import loschmidt_echo_direct, wigner
from floquet_lab.floquet import ModelParams, bessel_band_margin, build_linear_floquet, propagate
from floquet_lab.hilbert import BasisSpec, momentum_eigenstate

angles = st.floats(-7.0, 7.0)
lengths = st.floats(0.0, 5.0)
CATALOG = [(0.5, 0.7), (0.5, 1.3), (1.5, 0.7), (1.5, 1.3)]


def oracle_basis(k, phi, interior=10):
    k_eff = k / abs(math.sin(phi / 2))
    m = bessel_band_margin(k_eff)
    return BasisSpec(interior + 2 * m), np.abs(np.arange(-interior - 2 * m, interior + 2 * m + 1)) <= interior


@settings(max_examples=60, deadline=None)
@given(angles, lengths, angles, angles, lengths, angles)
def test_composition_matches_homogeneous_matrices(r1, a1, d1, r2, a2, d2):
    g1, g2 = E2Element(r1, a1, d1), E2Element(r2, a2, d2)
    ref = g2.homogeneous() @ g1.homogeneous()
    assert np.max(np.abs(e2_compose(g2, g1).homogeneous() - ref)) < 1e-12


@settings(max_examples=40, deadline=None)
@given(angles, lengths, angles, st.integers(0, 25))
def test_power_matches_repeated_products(r, a, d, j):
    g = E2Element(r, a, d)
    acc = E2Element()
    for _ in range(j):
        acc = e2_compose(g, acc)
    assert np.max(np.abs(e2_power(g, j).homogeneous() - acc.homogeneous())) < 1e-11


def test_canonical_form_and_resonance():
    g = E2Element(-0.5, -2.0, 0.3)
    assert g.trans_mag == 2.0 and g.trans_dir == pytest.approx(0.3 + math.pi)
    assert 0 <= g.rot < 2 * math.pi
    assert E2Element(1.0, 0.0, 2.0).trans_dir == 0.0
    t = e2_power(E2Element(0.0, 1.5, 0.4), 4)
    assert t.trans_mag == pytest.approx(6.0) and t.trans_dir == pytest.approx(0.4)
    with pytest.raises(ValueError):
        e2_power(t, -1)


def test_rotor_element_representation_is_the_floquet_matrix():
    p = ModelParams("linear", 1.5, phi_free=0.7)
    b = BasisSpec(20)
    rep = e2_representation(linear_rotor_element(p), b)
    assert np.max(np.abs(rep - build_linear_floquet(p, b).entries)) < 1e-15
    with pytest.raises(ValueError):
        linear_rotor_element(ModelParams("standard", 1.0, 1.0))


@settings(max_examples=15, deadline=None)
@given(angles, st.floats(0.0, 2.0), angles, angles, st.floats(0.0, 2.0), angles)
def test_representation_homomorphism(r1, a1, d1, r2, a2, d2):
    g1, g2 = E2Element(r1, a1, d1), E2Element(r2, a2, d2)
    b = BasisSpec(60)
    inner = np.abs(b.labels) <= 20
    lhs = e2_representation(g1, b) @ e2_representation(g2, b)
    rhs = e2_representation(e2_compose(g1, g2), b)
    assert np.max(np.abs(lhs - rhs)[np.ix_(inner, inner)]) < 1e-12


@pytest.mark.parametrize("k,phi", CATALOG)
def test_closed_form_propagator(k, phi):
    p = ModelParams("linear", k, phi_free=phi)
    b, inner = oracle_basis(k, phi)
    u = build_linear_floquet(p, b).entries
    power = np.eye(b.dim, dtype=complex)
    for j in range(1, 21):
        power = u @ power
        closed = linear_propagator_closed_form(p, j, b).entries
        assert np.max(np.abs(closed - power)[np.ix_(inner, inner)]) < 1e-8


def test_resonant_propagator_falls_back():
    p = ModelParams("linear", 1.0, phi_free=2 * math.pi)
    b = BasisSpec(30)
    out = linear_propagator_closed_form(p, 3, b)
    assert "resonant" in out.note
    assert np.allclose(out.entries, np.linalg.matrix_power(build_linear_floquet(p, b).entries, 3))
    with pytest.raises(ValueError, match="resonant"):
        linear_echo_closed_form(0.1, 2 * math.pi, 3)


@pytest.mark.parametrize("k,phi", CATALOG)
def test_closed_form_echo(k, phi):
    p = ModelParams("linear", k, phi_free=phi)
    b, _ = oracle_basis(k + 0.2, phi)
    s = loschmidt_echo_direct(p, 0.2, momentum_eigenstate(b, 0), 20)
    assert not s.flags
    closed = [linear_echo_closed_form(0.2, phi, j) for j in s.times]
    assert np.max(np.abs(s.values - closed)) < 1e-8
    assert linear_echo_closed_form(0.2, phi, 0) == 1.0


@pytest.mark.parametrize("k,phi", CATALOG)
def test_closed_form_wigner(k, phi):
    p = ModelParams("linear", k, phi_free=phi)
    b, inner = oracle_basis(k, phi, interior=6)
    u = build_linear_floquet(p, b)
    n_theta = 2 * b.dim
    for j in (0, 1, 4, 11):
        g = wigner(propagate(u, momentum_eigenstate(b, 1), j), n_theta)
        for p_l in b.labels[inner]:
            ref = linear_wigner_closed_form(1, p, j, g.theta, int(p_l), b)
            assert np.max(np.abs(g.values[:, b.index(p_l)] - ref)) < 1e-8


def test_closed_form_wigner_scalar_and_unbounded():
    p = ModelParams("linear", 0.5, phi_free=0.7)
    val = linear_wigner_closed_form(0, p, 3, 0.4, 0)
    assert isinstance(val, float)
    b = BasisSpec(60)
    assert val == pytest.approx(linear_wigner_closed_form(0, p, 3, 0.4, 0, b), abs=1e-14)
    with pytest.raises(ValueError):
        linear_wigner_closed_form(0, ModelParams("standard", 1.0, 1.0), 1, 0.0, 0)
