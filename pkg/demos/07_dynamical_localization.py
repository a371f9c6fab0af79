"""Quantum suppression of chaotic diffusion.

The classical standard map at K = 5 diffuses, <P^2> growing linearly; the
quantum rotor follows it briefly, then saturates.
"""

import numpy as np

from floquet_lab import BasisSpec, ModelParams, ensemble_second_moment, energy_growth, momentum_eigenstate

k = 5.0
quantum = energy_growth(ModelParams("standard", k, 1.0), momentum_eigenstate(BasisSpec(512), 0), 1000)
classical = ensemble_second_moment(k, 1.0, 10_000, seed=0, j_max=1000)


def rate(series, lo, hi):
    sel = (series.times >= lo) & (series.times <= hi)
    return np.polyfit(series.times[sel], series.values[sel], 1)[0]


for name, s in (("quantum", quantum), ("classical", classical)):
    early, late = rate(s, 0, 100), rate(s, 500, 1000)
    print(f"{name:9s}: <P^2>(1000) = {s.values[-1]:9.1f}, early rate {early:6.2f}, late rate {late:6.2f}, "
          f"ratio {late / early:.3f}")
print("flags:", quantum.flags or "none")
