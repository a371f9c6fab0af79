r"""One-period evolution operators of kicked rotors.

All parameters are dimensionless: ``k_kick = K/hbar``, ``tau_free = hbar T``
(quadratic rotor) and ``phi_free = alpha T`` (linear rotor). In the momentum
basis the operators read

* standard: ``U[n, m] = exp(-i s m^2 tau/2) (-i)^(m-n) J_{m-n}(k)``
* linear:   ``U[n, m] = exp(-i m phi) i^(m-n) J_{m-n}(k)``
* generic:  ``U = <n| exp(-i v(theta)) |m> exp(-i s m^2 tau/2)``

where ``s = +1`` for the ``"derived"`` phase convention, which follows from
``U_0 = exp(-i P^2 T / 2 hbar)``, and ``s = -1`` for the ``"paper"``
convention, which flips the sign of the free phase.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j_symmetric

KINDS = ("standard", "linear", "generic")
PHASE_SIGNS = {"derived": 1.0, "paper": -1.0}

EDGE_WEIGHT_TOL = 1e-8
ALIAS_TOL = 1e-12
# Fourier tails of the kick factor below this are treated as outside the band
_BAND_TAIL = 1e-16

_POW_MINUS_I = np.array([1.0, -1.0j, -1.0, 1.0j])
_POW_I = np.array([1.0, 1.0j, -1.0, -1.0j])


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Kicked-rotor model in dimensionless units.

    ``kick_profile`` holds ``V(theta)/hbar`` sampled on the uniform grid
    ``theta_k = 2 pi k / M``; it is only used by the generic kind.
    """

    kind: str
    k_kick: float = 0.0
    tau_free: float = None
    phi_free: float = None
    kick_profile: np.ndarray = field(default=None, repr=False)
    phase_sign: str = "derived"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown rotor kind {self.kind!r}; expected one of {KINDS}")
        if self.phase_sign not in PHASE_SIGNS:
            raise ValueError(f"phase_sign must be 'derived' or 'paper', got {self.phase_sign!r}")
        if self.k_kick < 0:
            raise ValueError("k_kick must be non-negative")
        if self.kind in ("standard", "generic") and self.tau_free is None:
            raise ValueError(f"{self.kind} rotor requires tau_free")
        if self.kind == "linear" and self.phi_free is None:
            raise ValueError("linear rotor requires phi_free")
        if self.kind == "generic":
            if self.kick_profile is None:
                raise ValueError("generic rotor requires kick_profile")
            prof = np.asarray(self.kick_profile, dtype=float)
            m = prof.size
            if prof.ndim != 1 or m < 4 or m & (m - 1):
                raise ValueError(f"kick_profile needs a power-of-two sample count, got {m}")
            prof = prof.copy()
            prof.setflags(write=False)
            object.__setattr__(self, "kick_profile", prof)

    @property
    def sign(self):
        return PHASE_SIGNS[self.phase_sign]

    def with_kick(self, k_kick):
        """Same model with a different kick strength (standard and linear kinds)."""
        if self.kind == "generic":
            raise ValueError("kick strength of a generic profile is not a single parameter")
        return ModelParams(self.kind, k_kick, self.tau_free, self.phi_free, None, self.phase_sign)


def theta_grid(n_samples):
    return 2.0 * np.pi * np.arange(n_samples) / n_samples


def grid_size(basis):
    """Smallest power of two holding at least ``4 * dim`` samples."""
    return 1 << max(2, math.ceil(math.log2(4 * basis.dim)))


def sample_kick_profile(func, n_samples):
    """Sample ``func(theta) = V(theta)/hbar`` on the uniform periodic grid."""
    return np.asarray(func(theta_grid(n_samples)), dtype=float)


def _bessel_tail_order(k):
    """Smallest ``b`` with ``(k/2)^q / q! < 1e-16`` for every ``q > b``."""
    if k == 0:
        return 0
    log_tol = math.log(_BAND_TAIL)
    q = max(1, int(k / 2))
    while (q + 1) * (math.log(k) - math.log(2.0)) - math.lgamma(q + 2.0) >= log_tol:
        q += 1
    return q


def kick_coefficients(profile):
    """Fourier coefficients ``g_q`` of ``exp(-i v(theta))`` in FFT order."""
    prof = np.asarray(profile, dtype=float)
    return np.fft.fft(np.exp(-1j * prof)) / prof.size


def band_margin(params):
    """Width beyond which off-diagonal Floquet entries are numerically zero.

    For Bessel bands this is ``ceil(k + 8 sqrt(k))`` widened, when needed,
    until the series bound on ``J_q(k)`` drops below 1e-16; small kicks need
    the widening because their Bessel tails decay slower than the
    ``k + 8 sqrt(k)`` estimate suggests.
    """
    if params.kind == "generic":
        g = np.abs(kick_coefficients(params.kick_profile))
        m = g.size
        q = np.fft.fftfreq(m, 1.0 / m).astype(int)
        above = np.abs(q[g >= _BAND_TAIL])
        return int(above.max()) if above.size else 0
    return bessel_band_margin(params.k_kick)


def bessel_band_margin(k):
    """Band margin of a Bessel band ``J_q(k)``."""
    k = abs(float(k))
    return max(int(math.ceil(k + 8.0 * math.sqrt(k))), _bessel_tail_order(k))


def free_phases(basis, params):
    """Diagonal of the free evolution over one period."""
    n = basis.labels
    if params.kind == "linear":
        return np.exp(-1j * n * params.phi_free)
    return np.exp(-1j * params.sign * n.astype(float) ** 2 * params.tau_free / 2.0)


@dataclass(frozen=True, eq=False)
class FloquetMatrix:
    """Dense one-period operator; row ``n`` and column ``m`` shifted by ``+cutoff``."""

    entries: np.ndarray
    params: ModelParams
    basis: object
    note: str = ""

    def __post_init__(self):
        ent = np.array(self.entries, dtype=np.complex128)
        if ent.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"entries must be {self.basis.dim}x{self.basis.dim}")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)

    @property
    def band_margin(self):
        return band_margin(self.params)

    def interior_columns(self):
        """Boolean mask of columns at least ``band_margin`` away from the cutoff."""
        return np.abs(self.basis.labels) <= self.basis.cutoff - self.band_margin

    def column_norm_deviation(self):
        """Per-column ``| ||U e_m|| - 1 |``."""
        return np.abs(np.linalg.norm(self.entries, axis=0) - 1.0)

    def interior_unitarity_error(self):
        dev = self.column_norm_deviation()[self.interior_columns()]
        return float(dev.max()) if dev.size else 0.0

    def unitarity_defect(self):
        """``max |U^dagger U - I|`` over the whole truncated matrix."""
        u = self.entries
        return float(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max())

    def power(self, j):
        return np.linalg.matrix_power(self.entries, j)


def _offsets(basis):
    n = basis.labels
    return n[None, :] - n[:, None]  # m - n with rows n, columns m


def build_standard_floquet(params, basis):
    if params.kind != "standard":
        raise ValueError(f"build_standard_floquet needs kind='standard', got {params.kind!r}")
    q = _offsets(basis)
    jq = bessel_j_symmetric(2 * basis.cutoff, params.k_kick)
    kick = _POW_MINUS_I[q % 4] * jq[q + 2 * basis.cutoff]
    return FloquetMatrix(kick * free_phases(basis, params)[None, :], params, basis)


def build_linear_floquet(params, basis):
    if params.kind != "linear":
        raise ValueError(f"build_linear_floquet needs kind='linear', got {params.kind!r}")
    q = _offsets(basis)
    jq = bessel_j_symmetric(2 * basis.cutoff, params.k_kick)
    kick = _POW_I[q % 4] * jq[q + 2 * basis.cutoff]
    return FloquetMatrix(kick * free_phases(basis, params)[None, :], params, basis)


def build_generic_floquet(params, basis):
    """Floquet matrix of an arbitrary sampled kick via its discrete Fourier series."""
    if params.kind != "generic":
        raise ValueError(f"build_generic_floquet needs kind='generic', got {params.kind!r}")
    m = params.kick_profile.size
    if m < 4 * basis.dim:
        raise ValueError(
            f"kick_profile has {m} samples; need a power of two >= 4*dim = {4 * basis.dim}"
        )
    g = kick_coefficients(params.kick_profile)
    freq = np.fft.fftfreq(m, 1.0 / m)
    tail = np.abs(g[np.abs(freq) > basis.dim])
    if tail.size and tail.max() > ALIAS_TOL:
        worst = int(abs(freq[np.abs(freq) > basis.dim][np.argmax(tail)]))
        raise ValueError(
            f"kick factor not resolved: Fourier coefficient {tail.max():.3e} at order {worst} "
            f"exceeds {ALIAS_TOL:g} beyond order dim={basis.dim}; enlarge the cutoff"
        )
    # <n| e^{-iv} |m> = g_{n-m}
    kick = g[(-_offsets(basis)) % m]
    return FloquetMatrix(kick * free_phases(basis, params)[None, :], params, basis)


def build_floquet(params, basis):
    """Dispatch on ``params.kind``."""
    builder = {
        "standard": build_standard_floquet,
        "linear": build_linear_floquet,
        "generic": build_generic_floquet,
    }[params.kind]
    return builder(params, basis)


def propagate(U, state, j):
    """Apply ``U`` to ``state`` ``j`` times; no renormalisation."""
    if state.basis.dim != U.basis.dim:
        raise ValueError("state and Floquet matrix live on different bases")
    if j < 0:
        raise ValueError("j must be non-negative")
    amps = state.amplitudes
    for _ in range(int(j)):
        amps = U.entries @ amps
    return state.with_amplitudes(amps)


class SplitStepper:
    """Reusable FFT propagator for one period of a standard or generic rotor.

    Free phases are applied in momentum space, the kick on a uniform angle
    grid of ``M >= 4 dim`` points.
    """

    def __init__(self, params, basis):
        if params.kind not in ("standard", "generic"):
            raise ValueError(f"split-step propagation supports standard/generic, not {params.kind!r}")
        self.params = params
        self.basis = basis
        if params.kind == "standard":
            self.m = grid_size(basis)
            v = params.k_kick * np.cos(theta_grid(self.m))
        else:
            self.m = params.kick_profile.size
            if self.m < 4 * basis.dim:
                raise ValueError(f"kick_profile needs >= {4 * basis.dim} samples, has {self.m}")
            v = params.kick_profile
        self.kick = np.exp(-1j * v)
        self.free = free_phases(basis, params)
        self.slots = basis.labels % self.m
        self.margin = band_margin(params)

    def edge_weight(self, state):
        return state.edge_weight(self.margin)

    def step_amplitudes(self, amps):
        buf = np.zeros(self.m, dtype=np.complex128)
        buf[self.slots] = amps * self.free
        psi = np.fft.ifft(buf) * self.m
        out = np.fft.fft(psi * self.kick) / self.m
        return out[self.slots]

    def __call__(self, state):
        flags = state.flags
        if self.edge_weight(state) > EDGE_WEIGHT_TOL and "edge-contamination" not in flags:
            flags = flags + ("edge-contamination",)
        return state.with_amplitudes(self.step_amplitudes(state.amplitudes), flags)


def split_step_apply(params, state):
    """One period by FFT; flags ``edge-contamination`` if the input nears the cutoff."""
    return SplitStepper(params, state.basis)(state)

