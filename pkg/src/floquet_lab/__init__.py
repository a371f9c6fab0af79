"""Floquet operators, spectra and chaos diagnostics of delta-kicked quantum rotors."""

__version__ = "0.1.0"

from .analytic import (
    E2Element,
    e2_compose,
    e2_power,
    e2_representation,
    linear_echo_closed_form,
    linear_propagator_closed_form,
    linear_rotor_element,
    linear_wigner_closed_form,
)
from .bessel import bessel_j, bessel_j_symmetric, bessel_j_table
from .classical import PhasePoint, chirikov_step, ensemble_second_moment
from .diagnostics import (
    DiagnosticSeries,
    WignerGrid,
    energy_growth,
    loschmidt_echo_direct,
    loschmidt_echo_floquet,
    otoc,
    spectral_autocorr,
    spectral_form_factor,
    wigner,
    wigner_from_eigensystem,
)
from .floquet import (
    FloquetMatrix,
    ModelParams,
    band_margin,
    build_floquet,
    build_generic_floquet,
    build_linear_floquet,
    build_standard_floquet,
    propagate,
    split_step_apply,
)
from .hilbert import BasisSpec, StateVector, momentum_eigenstate, superposition, uniform_state
from .spectral import (
    FloquetEigensystem,
    ToeplitzSystem,
    cayley_coefficients,
    diagonalize,
    hermitian_scan,
    quasi_energies,
    szego_average,
)
