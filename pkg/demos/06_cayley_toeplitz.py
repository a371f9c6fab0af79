"""Cayley transform: the unitary eigenproblem as a Hermitian Toeplitz one.

For a Lloyd-type kick tan(V/2) = -(k cos theta - E) the Toeplitz symbol has
only three Fourier coefficients. Eigenphases follow from a scan for the
zeros of a Hermitian determinant.
"""

import numpy as np

from floquet_lab import BasisSpec, cayley_coefficients, diagonalize, hermitian_scan, szego_average
from floquet_lab.floquet import sample_kick_profile
from floquet_lab.spectral import cayley_floquet

k, energy, tau = 1.0, 0.3, 1.0
profile = sample_kick_profile(lambda th: -2 * np.arctan(k * np.cos(th) - energy), 256)
sys_ = cayley_coefficients(profile, 6, tau_free=tau)
print("f_k:", {q: round(complex(v).real, 12) for q, v in sys_.as_dict().items() if abs(v) > 1e-12})

basis = BasisSpec(5)
roots = hermitian_scan(sys_, basis)
es = diagonalize(cayley_floquet(sys_, basis))
phases = np.sort(np.mod(-np.angle(es.eigenvalues), 2 * np.pi))
print("scan roots      :", np.round(roots, 8))
print("eigenphases     :", np.round(phases, 8))

# Szego: eigenvalue averages of growing Toeplitz sections approach the symbol average
for n in (16, 64, 256, 512):
    fin, lim = szego_average({1: 0.5, -1: 0.5}, "x^2", n)
    print(f"n = {n:4d}: <x^2> = {fin:.6f}, limit {lim:.6f}")
