"""Classical Chirikov standard map and ensemble momentum diffusion (mass M = 1)."""

from dataclasses import dataclass

import numpy as np

from .diagnostics import DiagnosticSeries

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PhasePoint:
    theta: float
    momentum: float

    def __post_init__(self):
        object.__setattr__(self, "theta", float(np.mod(self.theta, TWO_PI)))
        object.__setattr__(self, "momentum", float(self.momentum))


def chirikov_arrays(theta, p, K, T):
    """Vectorised map step: the angle moves first and the kick uses the new angle."""
    theta = np.mod(theta + T * p, TWO_PI)
    return theta, p + K * np.sin(theta)


def chirikov_step(pt, K, T):
    theta, p = chirikov_arrays(pt.theta, pt.momentum, K, T)
    return PhasePoint(theta, p)


def chirikov_inverse_step(pt, K, T):
    p = pt.momentum - K * np.sin(pt.theta)
    return PhasePoint(pt.theta - T * p, p)


def step_jacobian(pt, K, T, h=1e-6):
    """Central finite-difference Jacobian of one step in unwrapped coordinates."""
    def f(x):
        th = x[0] + T * x[1]
        return np.array([th, x[1] + K * np.sin(th)])

    x0 = np.array([pt.theta, pt.momentum])
    jac = np.empty((2, 2))
    for i in range(2):
        dx = np.zeros(2)
        dx[i] = h
        jac[:, i] = (f(x0 + dx) - f(x0 - dx)) / (2 * h)
    return jac


def ensemble_second_moment(K, T, n_points, seed, j_max):
    """``<P^2>(j)`` for ``n_points`` trajectories started at ``P = 0`` with uniform angles.

    Angles come from ``numpy.random.default_rng(seed)``, so a fixed seed
    gives bit-identical series.
    """
    if n_points < 100:
        raise ValueError("ensemble needs at least 100 points")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, TWO_PI, int(n_points))
    p = np.zeros(int(n_points))
    values = np.empty(int(j_max) + 1)
    values[0] = 0.0
    for j in range(1, int(j_max) + 1):
        theta, p = chirikov_arrays(theta, p, K, T)
        values[j] = np.mean(p * p)
    meta = {"K": K, "T": T, "n_points": int(n_points), "seed": int(seed)}
    return DiagnosticSeries("p2", np.arange(values.size), values, "classical", meta)
