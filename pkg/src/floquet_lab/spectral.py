"""Floquet eigensystems, quasi-energies and the Hermitian Toeplitz picture.

A truncated Floquet matrix is unitary only away from the cutoff: columns
within a band margin of the edge lose weight to the discarded momenta.
:func:`diagonalize` therefore works on the unitary polar factor of the
truncated matrix. Since ``U^dagger U - I`` vanishes outside the edge block,
the polar factor agrees with ``U`` on every interior column; the change
made at the edges is reported as ``edge_deviation``.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.linalg

from .floquet import FloquetMatrix, ModelParams, free_phases, theta_grid

INTERIOR_TOL = 1e-10
RESIDUAL_FAIL = 1e-6
CLUSTER_TOL = 1e-10
POLE_GAP = 1e-6
POLE_TOL = 1e-3


class SpectralError(RuntimeError):
    """Raised when an eigen-decomposition or root scan does not meet its contract."""


@dataclass(frozen=True, eq=False)
class FloquetEigensystem:
    """Eigenvalues ``mu_n`` and orthonormal mode columns of a Floquet operator.

    ``operator`` is the unitary matrix that was actually diagonalised; it
    coincides with the truncated Floquet matrix on interior columns.
    """

    eigenvalues: np.ndarray
    modes: np.ndarray
    operator: np.ndarray
    basis: object
    params: ModelParams = None
    residual: float = 0.0
    orthonormality_error: float = 0.0
    edge_deviation: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return self.eigenvalues.size

    @property
    def quasi_energies(self):
        return quasi_energies(self.eigenvalues)

    def momentum_in_modes(self):
        """Matrix ``<mu_m| P_0 |mu_n>``, computed once per eigensystem."""
        if "p0" not in self._cache:
            v = self.modes
            self._cache["p0"] = v.conj().T @ (self.basis.momenta[:, None] * v)
        return self._cache["p0"]

    def coefficients(self, state):
        """Overlaps ``c_n = <mu_n|psi>``."""
        return self.modes.conj().T @ state.amplitudes

    def rephased(self, phases):
        """Same eigensystem with mode ``n`` multiplied by ``phases[n]``."""
        return FloquetEigensystem(
            self.eigenvalues,
            self.modes * np.asarray(phases)[None, :],
            self.operator,
            self.basis,
            self.params,
            self.residual,
            self.orthonormality_error,
            self.edge_deviation,
        )

    def reconstruct(self, j=1):
        """``V diag(mu^j) V^dagger``."""
        return (self.modes * self.eigenvalues**j) @ self.modes.conj().T


def unitary_closure(entries):
    """Nearest unitary matrix (polar factor) of ``entries``."""
    w, _, vh = np.linalg.svd(entries)
    return w @ vh


def _phase_clusters(phases, tol):
    """Group sorted phases whose neighbours are within ``tol`` (circularly)."""
    n = phases.size
    if n == 0:
        return []
    gaps = np.diff(phases)
    groups = [[0]]
    for i, g in enumerate(gaps, start=1):
        if g <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    if len(groups) > 1 and (phases[0] + 2 * np.pi - phases[-1]) <= tol:
        groups[0] = groups.pop() + groups[0]
    return [g for g in groups if len(g) > 1]


def _fix_gauge(modes):
    """Make each column's largest component real and positive."""
    idx = np.argmax(np.abs(modes), axis=0)
    lead = modes[idx, np.arange(modes.shape[1])]
    return modes * (np.abs(lead) / lead)[None, :]


def diagonalize(U):
    """Full eigensystem of a Floquet matrix via complex Schur decomposition.

    For a unitary (hence normal) matrix the Schur form is diagonal up to
    rounding and the Schur vectors are the eigenvectors, orthonormal by
    construction. Modes are ordered by quasi-energy and gauge-fixed so that
    each column's largest component is real positive.
    """
    interior = U.interior_unitarity_error()
    if interior > INTERIOR_TOL:
        raise SpectralError(
            f"interior column norms deviate from 1 by {interior:.3e} (> {INTERIOR_TOL:g}); "
            "the Floquet matrix is not unitary away from the cutoff"
        )
    ent = U.entries
    if U.unitarity_defect() > 1e-14:
        closed = unitary_closure(ent)
    else:
        closed = ent
    edge_dev = float(np.abs(closed - ent).max())

    t, z = scipy.linalg.schur(closed, output="complex")
    mu = np.diag(t).copy()
    eps = quasi_energies(mu)
    order = np.lexsort((np.arange(mu.size), eps))
    mu, z, eps = mu[order], z[:, order], eps[order]

    for group in _phase_clusters(eps, CLUSTER_TOL):
        q, _ = np.linalg.qr(z[:, group])
        z[:, group] = q
    z = _fix_gauge(z)

    residual = float(np.abs(closed @ z - z * mu[None, :]).max())
    orth = float(np.abs(z.conj().T @ z - np.eye(mu.size)).max())
    if residual > RESIDUAL_FAIL:
        raise SpectralError(
            f"eigen-decomposition residual {residual:.3e} exceeds {RESIDUAL_FAIL:g}; "
            f"Schur off-diagonal mass {np.abs(np.triu(t, 1)).max():.3e}"
        )
    return FloquetEigensystem(
        mu, z, closed, U.basis, U.params, residual, orth, edge_dev
    )


def quasi_energies(es):
    """Dimensionless quasi-energies ``-arg(mu)`` folded into ``[0, 2 pi)``.

    Accepts an eigensystem or a bare array of eigenvalues. Multiply by
    ``hbar / T`` to obtain energies.
    """
    mu = es.eigenvalues if isinstance(es, FloquetEigensystem) else np.asarray(es)
    eps = np.mod(-np.angle(mu), 2 * np.pi)
    eps[eps >= 2 * np.pi] = 0.0
    return eps


# -- Cayley / Toeplitz reformulation ------------------------------------------------


@dataclass(frozen=True, eq=False)
class ToeplitzSystem:
    """Fourier coefficients ``f_k`` of ``tan(v(theta)/2)`` for ``|k| <= max_order``.

    ``coeffs[k + max_order]`` holds ``f_k``.
    """

    coeffs: np.ndarray
    tau_free: float = 0.0
    lambda_grid: int = 10_000
    phase_sign: str = "derived"
    kick_profile: np.ndarray = field(default=None, repr=False)

    @property
    def max_order(self):
        return (self.coeffs.size - 1) // 2

    def f(self, k):
        k = int(k)
        if abs(k) > self.max_order:
            return 0.0
        return self.coeffs[k + self.max_order]

    def as_dict(self):
        return {k: self.f(k) for k in range(-self.max_order, self.max_order + 1)}

    def with_offset(self, shift):
        """System for ``tan(v/2) + shift``, i.e. ``f_0 -> f_0 + shift``."""
        c = self.coeffs.copy()
        c[self.max_order] += shift
        return ToeplitzSystem(c, self.tau_free, self.lambda_grid, self.phase_sign, None)

    def matrix(self, basis):
        """Hermitian Toeplitz section ``F[m, n] = f_{m-n}`` on the basis."""
        n = basis.labels
        q = n[:, None] - n[None, :]
        padded = np.zeros(4 * basis.cutoff + 1, dtype=np.complex128)
        top = min(self.max_order, 2 * basis.cutoff)
        mid = 2 * basis.cutoff
        padded[mid - top : mid + top + 1] = self.coeffs[self.max_order - top : self.max_order + top + 1]
        return padded[q + mid]

    def _sign(self):
        return 1.0 if self.phase_sign == "derived" else -1.0

    def diagonal_phases(self, basis):
        """``s m^2 tau / 4``, the shifts inside the diagonal tangent."""
        return self._sign() * basis.labels.astype(float) ** 2 * self.tau_free / 4.0

    def hermitian_matrix(self, basis, lam):
        """``M(lambda) = F - diag(tan(lambda/2 - s m^2 tau/4))``."""
        return self.matrix(basis) - np.diag(np.tan(lam / 2.0 - self.diagonal_phases(basis)))


def cayley_coefficients(kick_profile, max_order, tau_free=0.0, lambda_grid=10_000, phase_sign="derived"):
    """Fourier coefficients of ``tan(v/2)`` for a sampled ``v = V/hbar``."""
    v = np.asarray(kick_profile, dtype=float)
    m = v.size
    if m <= 2 * max_order:
        raise ValueError(f"{m} samples cannot resolve Fourier orders up to {max_order}")
    r = np.mod(v / 2.0 - np.pi / 2.0, np.pi)
    dist = np.minimum(r, np.pi - r)
    bad = np.nonzero(dist < POLE_TOL)[0]
    if bad.size:
        thetas = ", ".join(f"{t:.6f}" for t in theta_grid(m)[bad[:8]])
        raise ValueError(
            f"tan(V/2hbar) within {POLE_TOL:g} of a pole at {bad.size} samples, theta = {thetas}"
        )
    c = np.fft.fft(np.tan(v / 2.0)) / m
    k = np.arange(-max_order, max_order + 1)
    f = c[k % m]
    f = 0.5 * (f + np.conj(f[::-1]))
    return ToeplitzSystem(f, float(tau_free), int(lambda_grid), phase_sign, v)


def cayley_floquet(sys, basis):
    """Floquet matrix ``(1 - iF)(1 + iF)^{-1} U_0`` built from the truncated Toeplitz section.

    It is exactly unitary on the basis and shares its eigenphases with the
    roots of :func:`hermitian_scan`.
    """
    f = sys.matrix(basis)
    eye = np.eye(basis.dim)
    kick = np.linalg.solve((eye + 1j * f).T, (eye - 1j * f).T).T
    params = ModelParams("generic", 0.0, sys.tau_free, None, _profile_for(sys), sys.phase_sign)
    free = free_phases(basis, params)
    return FloquetMatrix(kick * free[None, :], params, basis, note="cayley")


def _profile_for(sys):
    if sys.kick_profile is not None and sys.kick_profile.size & (sys.kick_profile.size - 1) == 0:
        return sys.kick_profile
    # rebuild v = 2 arctan(f(theta)) on a power-of-two grid
    m = 1 << max(2, int(np.ceil(np.log2(4 * sys.coeffs.size))))
    th = theta_grid(m)
    k = np.arange(-sys.max_order, sys.max_order + 1)
    w = np.real(np.exp(1j * np.outer(th, k)) @ sys.coeffs)
    return 2.0 * np.arctan(w)


def _negative_count(sys, basis, lam):
    return int(np.count_nonzero(np.linalg.eigvalsh(sys.hermitian_matrix(basis, lam)) < 0.0))


def _bisect_level(sys, basis, lo, hi, level, tol):
    """Smallest ``lambda`` in ``(lo, hi]`` where the negative count reaches ``level``."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _negative_count(sys, basis, mid) >= level:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _scan_interval(sys, basis, a, b, grid, tol):
    """Roots in ``[a, b]`` where ``M(lambda)`` has no poles.

    Every eigenvalue of ``M`` decreases strictly with ``lambda`` between
    poles, so the count of negative eigenvalues only grows and each unit
    step marks one root.
    """
    pts = np.concatenate([[a], grid[(grid > a) & (grid < b)], [b]])
    counts = [_negative_count(sys, basis, x) for x in pts]
    roots = []
    for x0, x1, c0, c1 in zip(pts[:-1], pts[1:], counts[:-1], counts[1:]):
        for level in range(c0 + 1, c1 + 1):
            roots.append(_bisect_level(sys, basis, x0, x1, level, tol))
    return roots, counts[0], counts[-1]


def hermitian_scan(sys, basis, tol=1e-10):
    """Eigenphases ``lambda`` (``mu = exp(-i lambda)``) from the Hermitian Toeplitz problem.

    Returns the sorted roots in ``[0, 2 pi)``. Multiple roots are repeated.
    Raises :class:`SpectralError` if fewer than ``dim`` roots are located.
    """
    if basis.dim > 101:
        raise ValueError(f"hermitian_scan is a desk-scale method (dim <= 101), got dim={basis.dim}")
    two_pi = 2 * np.pi
    pole_locs = np.mod(2.0 * sys.diagonal_phases(basis) + np.pi, two_pi)
    poles = np.unique(np.round(pole_locs, 12))
    grid = np.linspace(0.0, two_pi, sys.lambda_grid, endpoint=False)

    roots = []
    for i, p in enumerate(poles):
        a = p
        b = poles[i + 1] if i + 1 < poles.size else poles[0] + two_pi
        g = np.mod(grid - a, two_pi) + a
        found, _, _ = _scan_interval(sys, basis, a + POLE_GAP, b - POLE_GAP, np.sort(g), tol)
        roots.extend(found)
        # both sides of the pole at b: roots hidden inside the excluded gap
        gap_found, _, _ = _scan_interval(sys, basis, b - POLE_GAP, b - 1e-13, np.array([]), tol)
        roots.extend(gap_found)
        gap_found, _, _ = _scan_interval(sys, basis, b + 1e-13, b + POLE_GAP, np.array([]), tol)
        roots.extend(gap_found)

    roots = np.sort(np.mod(np.array(roots, dtype=float), two_pi))
    if roots.size != basis.dim:
        sig = [
            float(np.min(np.abs(np.linalg.eigvalsh(sys.hermitian_matrix(basis, x)))))
            for x in grid[:: max(1, grid.size // 64)]
        ]
        raise SpectralError(
            f"hermitian_scan located {roots.size} roots, expected {basis.dim}; "
            f"smallest |eigenvalue| minima on a coarse grid: {sorted(sig)[:5]}"
        )
    return roots


# -- Szego averages -----------------------------------------------------------------

SZEGO_FUNCTIONS = {
    "x": lambda x: x,
    "x^2": lambda x: x**2,
    "|x|": np.abs,
    "cos": np.cos,
}
_ALIASES = {"x2": "x^2", "x**2": "x^2", "abs": "|x|"}


def szego_average(symbol_coeffs, func, n):
    """Finite-section eigenvalue average against its Szego limit.

    ``symbol_coeffs`` maps ``k`` to ``f_k`` of a real symbol; ``func`` names
    one of ``x``, ``x^2``, ``|x|``, ``cos``. Returns ``(finite_avg, limit)``.
    """
    name = _ALIASES.get(func, func)
    if name not in SZEGO_FUNCTIONS:
        raise ValueError(f"unsupported function {func!r}; choose from {sorted(SZEGO_FUNCTIONS)}")
    if not 1 <= n <= 4096:
        raise ValueError("section size n must be in [1, 4096]")
    F = SZEGO_FUNCTIONS[name]
    coeffs = {int(k): complex(v) for k, v in symbol_coeffs.items()}
    for k, v in coeffs.items():
        if abs(coeffs.get(-k, 0.0) - np.conj(v)) > 1e-12:
            raise ValueError(f"symbol is not real: f_{-k} != conj(f_{k})")

    col = np.array([coeffs.get(k, 0.0) for k in range(n)])
    row = np.array([coeffs.get(-k, 0.0) for k in range(n)])
    lam = scipy.linalg.eigvalsh(scipy.linalg.toeplitz(col, row))
    finite = float(np.mean(F(lam)))

    ks = np.array(sorted(coeffs))
    fk = np.array([coeffs[k] for k in ks])

    def integrand(theta):
        return float(F(np.real(np.sum(fk * np.exp(1j * ks * theta)))))

    limit, _ = scipy.integrate.quad(integrand, 0.0, 2 * np.pi, epsabs=1e-12, epsrel=1e-12, limit=400)
    return finite, limit / (2 * np.pi)
