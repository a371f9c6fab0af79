"""Truncated momentum basis and states of the rotor.

Momentum quantum numbers run over ``n = -N, ..., N``; amplitude index ``i``
holds quantum number ``n = i - N``. Momentum eigenvalues are ``n * hbar_eff``
(mass and radius are set to one).
"""

import math
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-6


@dataclass(frozen=True)
class BasisSpec:
    """Symmetric momentum cutoff ``[-cutoff, cutoff]`` with effective Planck constant."""

    cutoff: int
    hbar_eff: float = 1.0

    def __post_init__(self):
        if int(self.cutoff) != self.cutoff or self.cutoff < 0:
            raise ValueError(f"cutoff must be a non-negative integer, got {self.cutoff!r}")
        if not self.hbar_eff > 0:
            raise ValueError(f"hbar_eff must be positive, got {self.hbar_eff!r}")
        object.__setattr__(self, "cutoff", int(self.cutoff))
        object.__setattr__(self, "hbar_eff", float(self.hbar_eff))

    @property
    def dim(self):
        return 2 * self.cutoff + 1

    @property
    def labels(self):
        """Momentum quantum numbers in amplitude order."""
        return np.arange(-self.cutoff, self.cutoff + 1)

    @property
    def momenta(self):
        return self.labels * self.hbar_eff

    def index(self, n):
        n = int(n)
        if abs(n) > self.cutoff:
            raise ValueError(
                f"momentum quantum number {n} outside basis range [{-self.cutoff}, {self.cutoff}]"
            )
        return n + self.cutoff

    @classmethod
    def for_kick(cls, k_kick, hbar_eff=1.0, extra=0):
        """Basis sized by the default truncation rule, enlarged by ``extra``."""
        return cls(default_cutoff(k_kick) + int(extra), hbar_eff)


def default_cutoff(k_kick):
    """Heuristic cutoff ``ceil(k + 8 sqrt(k) + 20)`` for kick strength ``k = K/hbar``."""
    k = abs(float(k_kick))
    return int(math.ceil(k + 8.0 * math.sqrt(k) + 20.0))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Momentum-space amplitudes on a :class:`BasisSpec`.

    ``flags`` carries non-fatal warnings raised while the state was produced,
    e.g. ``"edge-contamination"`` from propagation near the cutoff.
    """

    amplitudes: np.ndarray
    basis: BasisSpec
    flags: tuple = field(default=())

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dim,):
            raise ValueError(f"expected {self.basis.dim} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self):
        return float(np.vdot(self.amplitudes, self.amplitudes).real) ** 0.5

    def amplitude(self, n):
        return self.amplitudes[self.basis.index(n)]

    def probabilities(self):
        return np.abs(self.amplitudes) ** 2

    def edge_weight(self, margin):
        """Probability carried by quantum numbers with ``|n| > cutoff - margin``."""
        prob = self.probabilities()
        inner = np.abs(self.basis.labels) > self.basis.cutoff - margin
        return float(prob[inner].sum())

    def with_amplitudes(self, amps, flags=None):
        return StateVector(amps, self.basis, self.flags if flags is None else tuple(flags))


def momentum_eigenstate(basis, n):
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[basis.index(n)] = 1.0
    return StateVector(amps, basis)


def uniform_state(basis):
    """The state uniform on the circle, i.e. ``|n=0>``."""
    return momentum_eigenstate(basis, 0)


def superposition(basis, weights):
    """Normalised superposition from a ``{n: amplitude}`` mapping."""
    amps = np.zeros(basis.dim, dtype=np.complex128)
    for n, w in weights.items():
        amps[basis.index(n)] += w
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValueError("superposition has zero norm")
    return StateVector(amps / norm, basis)


def p_squared_expectation(state):
    """``<P^2> = sum_n (n hbar)^2 |a_n|^2`` for a normalised state."""
    prob = state.probabilities()
    total = prob.sum()
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"state norm^2 {total:.12g} deviates from 1 by more than {NORM_TOL:g}")
    return float(np.dot(state.basis.momenta**2, prob))
