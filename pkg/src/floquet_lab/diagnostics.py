"""Chaos diagnostics of stroboscopic Floquet dynamics.

Most quantities come in two routes: direct propagation of states and
matrices, and sums over the Floquet eigensystem. The eigensystem routes form
``<mu_m| P_0 |mu_n>`` once, so that each further kick only costs diagonal
phase scalings.
"""

from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j_symmetric
from .floquet import SplitStepper, band_margin, build_floquet
from .hilbert import p_squared_expectation

ECHO_EDGE_TOL = 1e-6
IMAG_TOL = 1e-10
AUTOCORR_IMAG_TOL = 1e-9
OTOC_FORM_TOL = 1e-8

SERIES_KINDS = ("echo", "A_j", "sff", "otoc", "p2")


class DiagnosticError(RuntimeError):
    """A consistency check inside a diagnostic failed."""


@dataclass(frozen=True, eq=False)
class DiagnosticSeries:
    """Kick-indexed values of one diagnostic with provenance metadata.

    ``flags`` lists non-fatal conditions, e.g. ``"edge-contamination"`` when
    a series was cut short because the state reached the cutoff.
    """

    kind: str
    times: np.ndarray
    values: np.ndarray
    method: str = "direct"
    metadata: dict = field(default_factory=dict)
    flags: tuple = ()

    def __post_init__(self):
        if self.kind not in SERIES_KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        object.__setattr__(self, "times", np.asarray(self.times, dtype=int))
        object.__setattr__(self, "values", np.asarray(self.values))

    def __len__(self):
        return self.times.size


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """``values[i, l]`` is ``W(theta_i, p_l)`` on a uniform grid in ``[0, 2 pi)``."""

    theta: np.ndarray
    p_labels: np.ndarray
    values: np.ndarray
    j: int = 0
    imag_residue: float = 0.0

    def marginal(self):
        """``int_0^{2 pi} W d theta`` per momentum label (periodic trapezoid)."""
        return self.values.sum(axis=0) * (2 * np.pi / self.theta.size)


def _state_label(psi):
    nz = np.flatnonzero(np.abs(psi.amplitudes) > 0)
    if nz.size == 1 and abs(abs(psi.amplitudes[nz[0]]) - 1) < 1e-12:
        return f"|{int(psi.basis.labels[nz[0]])}>"
    return "custom"


def _params_meta(params):
    meta = {"kind": params.kind, "k_kick": params.k_kick, "phase_sign": params.phase_sign}
    if params.tau_free is not None:
        meta["tau_free"] = params.tau_free
    if params.phi_free is not None:
        meta["phi_free"] = params.phi_free
    return meta


# -- Loschmidt echo -----------------------------------------------------------------


def echo_single_kick(n_init, k, k_prime, basis):
    """``|sum_{m'} J_{n-m'}(k') J_{n-m'}(k)|^2`` over the basis momenta ``m'``.

    The free phases of a single kick cancel, so only the Bessel overlap of
    the two kick factors remains.
    """
    basis.index(n_init)
    q = n_init - basis.labels
    top = 2 * basis.cutoff
    jk = bessel_j_symmetric(top, k)[q + top]
    jkp = bessel_j_symmetric(top, k_prime)[q + top]
    return float(np.dot(jkp, jk) ** 2)


def _edge_guard(state, margin, tol):
    return state.edge_weight(margin) > tol


def loschmidt_echo_direct(params, delta_k, psi0, j_max):
    """``L(j) = |<psi0| U'^{dagger j} U^j |psi0>|^2`` by two propagations.

    ``U'`` has kick strength ``k_kick + delta_k``. If either state carries
    more than 1e-6 probability within a band margin of the cutoff, the
    series stops at that kick and is flagged.
    """
    basis = psi0.basis
    u = build_floquet(params, basis).entries
    p_prime = params.with_kick(params.k_kick + delta_k)
    u_prime = build_floquet(p_prime, basis).entries
    margin = max(band_margin(params), band_margin(p_prime))

    a = psi0.amplitudes
    b = psi0.amplitudes
    values = [1.0 if delta_k == 0 else abs(np.vdot(b, a)) ** 2]
    flags = ()
    # identical operators: U'^dagger U = 1 exactly, so skip the rounding of |<a|a>|^2
    same = delta_k == 0
    for _ in range(int(j_max)):
        a = u @ a
        b = u_prime @ b
        if (
            _edge_guard(psi0.with_amplitudes(a), margin, ECHO_EDGE_TOL)
            or _edge_guard(psi0.with_amplitudes(b), margin, ECHO_EDGE_TOL)
        ):
            flags = ("edge-contamination",)
            break
        values.append(1.0 if same else abs(np.vdot(b, a)) ** 2)
    meta = _params_meta(params) | {"delta_k": delta_k, "initial_state": _state_label(psi0), "dim": basis.dim}
    return DiagnosticSeries("echo", np.arange(len(values)), np.array(values), "direct", meta, flags)


def loschmidt_echo_floquet(es_k, es_kp, psi0, j_max):
    """Echo from two eigensystems.

    ``<E>_j = sum_{m,m'} conj(c'_{m'} mu'_{m'}^j) <mu'_{m'}|mu_m> c_m mu_m^j``
    with ``c = <mu|psi0>``. The overlap matrix between the two mode sets is
    formed once.
    """
    if es_k.basis.dim != es_kp.basis.dim:
        raise ValueError("eigensystems live on different bases")
    c = es_k.coefficients(psi0)
    cp = es_kp.coefficients(psi0)
    overlap = es_kp.modes.conj().T @ es_k.modes
    a = c.copy()
    b = cp.copy()
    values = np.empty(int(j_max) + 1)
    for j in range(int(j_max) + 1):
        values[j] = abs(np.vdot(b, overlap @ a)) ** 2
        a = a * es_k.eigenvalues
        b = b * es_kp.eigenvalues
    meta = {"initial_state": _state_label(psi0), "dim": es_k.dim}
    if es_k.params is not None:
        meta = _params_meta(es_k.params) | meta
    return DiagnosticSeries("echo", np.arange(values.size), values, "eigensystem", meta)


# -- Wigner function ----------------------------------------------------------------


def _wigner_from_amplitudes(amps, basis, n_theta, j):
    if n_theta < 2 * basis.dim or n_theta % 2:
        raise ValueError(f"n_theta must be even and >= 2*dim = {2 * basis.dim}, got {n_theta}")
    n_cut = basis.cutoff
    dim = basis.dim
    r = np.arange(-n_cut, n_cut + 1)
    # corr[l, r] = Psi(p_l + r) conj(Psi(p_l - r)), zero outside the basis
    plus = np.arange(dim)[:, None] + r[None, :]
    minus = np.arange(dim)[:, None] - r[None, :]
    valid = (plus >= 0) & (plus < dim) & (minus >= 0) & (minus < dim)
    corr = np.where(
        valid,
        amps[np.clip(plus, 0, dim - 1)] * np.conj(amps[np.clip(minus, 0, dim - 1)]),
        0.0,
    )
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    waves = np.exp(2j * np.outer(theta, r))
    w = waves @ corr.T / np.pi
    residue = float(np.abs(w.imag).max()) if w.size else 0.0
    if residue > IMAG_TOL:
        raise DiagnosticError(f"Wigner function has imaginary residue {residue:.3e}")
    return WignerGrid(theta, basis.labels.copy(), w.real.copy(), int(j), residue)


def wigner(state, n_theta, j=0):
    """Discrete-momentum Wigner function on the cylinder.

    ``W(theta, p) = (1/pi) sum_r Psi(p + r) conj(Psi(p - r)) exp(2 i r theta)``
    at integer labels ``p``.
    """
    return _wigner_from_amplitudes(state.amplitudes, state.basis, n_theta, j)


def wigner_from_eigensystem(es, coeffs, j, n_theta):
    """Wigner function after ``j`` kicks from eigendata and initial overlaps ``c_n``.

    The momentum wavefunction is rebuilt as ``sum_n c_n mu_n^j <m|mu_n>``
    and inserted in the discrete Wigner sum with the ``1/pi`` normalisation.
    """
    amps = es.modes @ (np.asarray(coeffs) * es.eigenvalues**j)
    return _wigner_from_amplitudes(amps, es.basis, n_theta, j)


# -- spectral functions -------------------------------------------------------------


def spectral_autocorr(es, j):
    """``A_j = sum_{m,n} |<mu_m|P_0|mu_n>|^2 (conj(mu_n) mu_m)^j``; real by hermiticity."""
    p = es.momentum_in_modes()
    mu_j = es.eigenvalues ** int(j) if j >= 0 else np.conj(es.eigenvalues) ** int(-j)
    total = np.sum(np.abs(p) ** 2 * (mu_j[:, None] * np.conj(mu_j)[None, :]))
    scale = max(1.0, abs(total))
    if abs(total.imag) > AUTOCORR_IMAG_TOL * scale:
        raise DiagnosticError(f"A_{j} has imaginary part {total.imag:.3e}")
    return float(total.real)


def spectral_form_factor(es, j):
    """``S(j) = |sum_n exp(-i eps_n j)|^2``."""
    z = np.sum(np.exp(-1j * es.quasi_energies * j))
    return float(abs(z) ** 2)


# -- OTOC ---------------------------------------------------------------------------


def heisenberg_p_matrix(es, j):
    """``P_j = U^{dagger j} P_0 U^j`` in the momentum basis, from eigendata.

    ``<m|P_j|n> = sum_{k,l} <m|mu_k> conj(mu_k)^j <mu_k|P_0|mu_l> mu_l^j <mu_l|n>``.
    """
    mu_j = es.eigenvalues ** int(j)
    inner = np.conj(mu_j)[:, None] * es.momentum_in_modes() * mu_j[None, :]
    return es.modes @ inner @ es.modes.conj().T


def heisenberg_p_element(es, m, n, j):
    v = es.modes
    im, i_n = es.basis.index(m), es.basis.index(n)
    mu_j = es.eigenvalues ** int(j)
    left = v[im, :] * np.conj(mu_j)
    right = mu_j * np.conj(v[i_n, :])
    return complex(left @ es.momentum_in_modes() @ right)


def otoc_alternative(es, n, j):
    """``hbar^2 sum_m (n - m)^2 |<m|P_j|n>|^2`` for the initial state ``|n>``."""
    col = heisenberg_p_matrix(es, j)[:, es.basis.index(n)]
    diff = (n - es.basis.labels) * es.basis.hbar_eff
    return float(np.sum(diff**2 * np.abs(col) ** 2))


def otoc(es, psi0, j):
    """``C_j = -<psi0|[P_j, P_0]^2|psi0> = ||[P_j, P_0] psi0||^2``.

    For a momentum eigenstate the result is checked against the alternative
    single-sum form; a disagreement raises :class:`DiagnosticError`.
    """
    norm2 = float(np.vdot(psi0.amplitudes, psi0.amplitudes).real)
    if abs(norm2 - 1) > 1e-6:
        raise ValueError("otoc needs a normalised initial state")
    pj = heisenberg_p_matrix(es, j)
    p0 = es.basis.momenta
    psi = psi0.amplitudes
    comm_psi = pj @ (p0 * psi) - p0 * (pj @ psi)
    value = float(np.vdot(comm_psi, comm_psi).real)

    label = _state_label(psi0)
    if label != "custom":
        n = int(label[1:-1])
        alt = otoc_alternative(es, n, j)
        if abs(alt - value) > OTOC_FORM_TOL * max(1.0, abs(value)):
            raise DiagnosticError(
                f"OTOC forms disagree at j={j}: commutator {value!r} vs single-sum {alt!r}"
            )
    return value


def otoc_series(es, psi0, j_max):
    values = [otoc(es, psi0, j) for j in range(int(j_max) + 1)]
    meta = {"initial_state": _state_label(psi0), "dim": es.dim}
    return DiagnosticSeries("otoc", np.arange(len(values)), np.array(values), "eigensystem", meta)


def autocorr_series(es, j_max):
    values = [spectral_autocorr(es, j) for j in range(int(j_max) + 1)]
    return DiagnosticSeries("A_j", np.arange(len(values)), np.array(values, dtype=complex), "eigensystem", {"dim": es.dim})


def sff_series(es, j_max):
    values = [spectral_form_factor(es, j) for j in range(int(j_max) + 1)]
    return DiagnosticSeries("sff", np.arange(len(values)), np.array(values), "eigensystem", {"dim": es.dim})


# -- energy growth ------------------------------------------------------------------


def energy_growth(params, psi0, j_max):
    """``<P^2>`` after each kick by split-step propagation.

    Stops early, with an ``edge-contamination`` flag, once the state carries
    more than 1e-8 probability within a band margin of the cutoff.
    """
    step = SplitStepper(params, psi0.basis)
    amps = psi0.amplitudes
    state = psi0
    values = [p_squared_expectation(state)]
    flags = ()
    for _ in range(int(j_max)):
        if step.edge_weight(state) > 1e-8:
            flags = ("edge-contamination",)
            break
        amps = step.step_amplitudes(amps)
        state = psi0.with_amplitudes(amps)
        values.append(p_squared_expectation(state))
    meta = _params_meta(params) | {"initial_state": _state_label(psi0), "dim": psi0.basis.dim,
                                   "hbar_eff": psi0.basis.hbar_eff}
    return DiagnosticSeries("p2", np.arange(len(values)), np.array(values), "direct", meta, flags)
