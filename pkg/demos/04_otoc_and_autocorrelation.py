"""Scrambling and spectral correlations from one eigensystem."""

import numpy as np

from floquet_lab import BasisSpec, ModelParams, build_floquet, diagonalize, momentum_eigenstate
from floquet_lab.diagnostics import autocorr_series, otoc_series, sff_series

basis = BasisSpec(25)
for k in (0.5, 5.0):
    es = diagonalize(build_floquet(ModelParams("standard", k, 1.0), basis))
    c = otoc_series(es, momentum_eigenstate(basis, 0), 10).values
    a = autocorr_series(es, 10).values.real
    s = sff_series(es, 40).values
    print(f"K = {k}")
    print("  OTOC C_j  :", np.array2string(c[:6], precision=2))
    print("  A_j / A_0 :", np.array2string(a[:6] / a[0], precision=3))
    print(f"  S(j), j = 1..40: mean {s[1:].mean():.1f} vs dim {basis.dim}")
