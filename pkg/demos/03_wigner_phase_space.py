"""Wigner function on the cylinder for a kicked momentum eigenstate."""

import numpy as np

from floquet_lab import BasisSpec, ModelParams, build_floquet, diagonalize, momentum_eigenstate, propagate, wigner
from floquet_lab.diagnostics import wigner_from_eigensystem

basis = BasisSpec(40)
params = ModelParams("standard", k_kick=1.5, tau_free=1.0)
U = build_floquet(params, basis)
psi0 = momentum_eigenstate(basis, 0)
n_theta = 2 * basis.dim

for j in (0, 1, 5):
    grid = wigner(propagate(U, psi0, j), n_theta, j)
    w = grid.values
    print(f"j={j}: W in [{w.min():+.3f}, {w.max():+.3f}], negative volume "
          f"{abs(w[w < 0].sum()) * 2 * np.pi / n_theta:.3f}, marginal error "
          f"{np.abs(grid.marginal() - 2 * np.abs(propagate(U, psi0, j).amplitudes) ** 2).max():.1e}")

# the same function from eigendata
es = diagonalize(U)
a = wigner_from_eigensystem(es, es.coefficients(psi0), 5, n_theta)
b = wigner(propagate(U, psi0, 5), n_theta, 5)
print(f"eigensystem vs propagation at j=5: {np.abs(a.values - b.values).max():.1e}")
