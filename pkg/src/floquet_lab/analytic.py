r"""Closed-form dynamics of the linear kicked rotor.

The one-period operator of the rotor with ``H_0 = alpha P`` is a unitary
irreducible representation of the Euclidean group E(2),

.. math::
    \mathcal{U}(\theta, a, \phi)_{nm} = e^{-i m \theta} e^{i (m-n) \phi} J_{m-n}(a),

evaluated at rotation ``theta = phi_free``, translation ``a = k_kick`` and
direction ``phi = pi/2``. Products of operators follow the plane group law
``(R_2, a_2)(R_1, a_1) = (R_2 R_1, R_2 a_1 + a_2)``, so ``j`` kicks collapse
to a single group element: rotation ``j theta`` and translation of length
``a sin(j theta/2) / sin(theta/2)`` pointing along ``phi + (j-1) theta/2``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .bessel import bessel_j_symmetric, bessel_j_table
from .floquet import FloquetMatrix, build_linear_floquet

TWO_PI = 2.0 * math.pi
RESONANCE_TOL = 1e-12
IMAG_TOL = 1e-10


def _wrap(angle):
    a = math.fmod(angle, TWO_PI)
    if a < 0:
        a += TWO_PI
    return 0.0 if a >= TWO_PI else a


@dataclass(frozen=True)
class E2Element:
    """Rotation by ``rot`` followed by translation of length ``trans_mag`` along ``trans_dir``."""

    rot: float = 0.0
    trans_mag: float = 0.0
    trans_dir: float = 0.0

    def __post_init__(self):
        rot, mag, d = float(self.rot), float(self.trans_mag), float(self.trans_dir)
        if mag < 0:
            mag, d = -mag, d + math.pi
        if mag == 0.0:
            d = 0.0
        object.__setattr__(self, "rot", _wrap(rot))
        object.__setattr__(self, "trans_mag", mag)
        object.__setattr__(self, "trans_dir", _wrap(d))

    @property
    def translation(self):
        return np.array([self.trans_mag * math.cos(self.trans_dir), self.trans_mag * math.sin(self.trans_dir)])

    @classmethod
    def from_vector(cls, rot, vec):
        x, y = float(vec[0]), float(vec[1])
        return cls(rot, math.hypot(x, y), math.atan2(y, x))

    def homogeneous(self):
        """3x3 affine matrix acting on ``(x, y, 1)``."""
        c, s = math.cos(self.rot), math.sin(self.rot)
        tx, ty = self.translation
        return np.array([[c, -s, tx], [s, c, ty], [0.0, 0.0, 1.0]])


def linear_rotor_element(params):
    """Group element whose representation is the linear rotor's one-period operator."""
    if params.kind != "linear":
        raise ValueError("only the linear rotor is an E(2) representation")
    return E2Element(params.phi_free, params.k_kick, math.pi / 2)


def e2_compose(g2, g1):
    """Group product ``g2 g1`` (``g1`` acts first)."""
    c, s = math.cos(g2.rot), math.sin(g2.rot)
    t1 = g1.translation
    vec = np.array([c * t1[0] - s * t1[1], s * t1[0] + c * t1[1]]) + g2.translation
    return E2Element.from_vector(g2.rot + g1.rot, vec)


def e2_power(g, j):
    """``g^j`` in closed form, falling back to repeated products when ``sin(theta/2) = 0``."""
    j = int(j)
    if j < 0:
        raise ValueError("j must be non-negative")
    half = math.sin(g.rot / 2.0)
    if abs(half) < RESONANCE_TOL:
        out = E2Element()
        for _ in range(j):
            out = e2_compose(g, out)
        return out
    ratio = math.sin(j * g.rot / 2.0) / half
    # signed magnitude; E2Element folds a negative length into the direction
    return E2Element(j * g.rot, g.trans_mag * ratio, g.trans_dir + (j - 1) * g.rot / 2.0)


def e2_representation(g, basis):
    """Matrix ``exp(-i m theta) exp(i (m-n) phi) J_{m-n}(a)`` on the basis (rows ``n``)."""
    n = basis.labels
    q = n[None, :] - n[:, None]
    top = 2 * basis.cutoff
    jq = bessel_j_symmetric(top, g.trans_mag)[q + top]
    return np.exp(-1j * n[None, :] * g.rot) * np.exp(1j * q * g.trans_dir) * jq


def _dense_power(params, j, basis):
    return np.linalg.matrix_power(build_linear_floquet(params, basis).entries, j)


def linear_propagator_closed_form(params, j, basis):
    """``U_F^j`` of the linear rotor as one representation matrix.

    ``(U_j)_{nm} = exp(-i (j+1) m phi / 2) exp(-i (j-1) n phi / 2) i^{m-n}
    J_{m-n}(k sin(j phi/2) / sin(phi/2))``. At resonance (``sin(phi/2) = 0``)
    the dense power is returned instead, with a note on the result.
    """
    if params.kind != "linear":
        raise ValueError("closed-form propagator exists for the linear rotor only")
    j = int(j)
    phi = params.phi_free
    half = math.sin(phi / 2.0)
    if abs(half) < RESONANCE_TOL:
        return FloquetMatrix(_dense_power(params, j, basis), params, basis,
                             note="resonant phi_free: dense matrix power")
    arg = params.k_kick * math.sin(j * phi / 2.0) / half
    n = basis.labels
    q = n[None, :] - n[:, None]
    top = 2 * basis.cutoff
    jq = bessel_j_symmetric(top, arg)[q + top]
    ipow = np.array([1.0, 1.0j, -1.0, -1.0j])[q % 4]
    col = np.exp(-0.5j * (j + 1) * n * phi)
    row = np.exp(-0.5j * (j - 1) * n * phi)
    return FloquetMatrix(row[:, None] * ipow * jq * col[None, :], params, basis,
                         note=f"closed form, j={j}")


def linear_echo_closed_form(delta_k, phi_free, j):
    """``J_0^2(|dk| sin(j theta0) / sin(theta0))`` with ``theta0 = phi_free / 2``."""
    theta0 = phi_free / 2.0
    s = math.sin(theta0)
    if abs(s) < RESONANCE_TOL:
        raise ValueError("resonant phi_free (sin(phi_free/2) = 0): use the numeric echo instead")
    x = abs(delta_k) * math.sin(j * theta0) / s
    return float(bessel_j_table(0, x)[0] ** 2)


def linear_wigner_closed_form(n_init, params, j, theta, p_l, basis=None):
    """Wigner function of ``U_F^j |n_init>`` for the linear rotor.

    With ``g^j`` translating by length ``A`` along ``Phi``:
    ``W = (1/pi) sum_r exp(2 i r (theta - Phi)) J_{n-p-r}(A) J_{n-p+r}(A)``.
    When ``basis`` is given the momenta ``p +- r`` are restricted to it, as in
    the numeric Wigner function of a truncated state.
    """
    if params.kind != "linear":
        raise ValueError("closed-form Wigner function exists for the linear rotor only")
    if basis is not None:
        basis.index(n_init)
        basis.index(p_l)
    g = e2_power(linear_rotor_element(params), j)
    amp, direction = g.trans_mag, g.trans_dir
    d = int(n_init) - int(p_l)
    if basis is not None:
        rmax = basis.cutoff - abs(int(p_l))
    else:
        rmax = abs(d) + int(math.ceil(amp + 8 * math.sqrt(amp))) + 40
    r = np.arange(-rmax, rmax + 1)
    top = abs(d) + rmax
    jq = bessel_j_symmetric(top, amp)
    weights = jq[d - r + top] * jq[d + r + top]
    th = np.asarray(theta, dtype=float)
    terms = np.exp(2j * np.multiply.outer(th - direction, r)) * weights
    total = terms.sum(axis=-1) / math.pi
    scale = max(1.0, float(np.abs(weights).sum()))
    worst = float(np.max(np.abs(np.imag(total))))
    if worst > IMAG_TOL * scale:
        raise ValueError(f"closed-form Wigner value has imaginary residue {worst:.3e}")
    return float(total.real) if th.ndim == 0 else total.real
