"""qdatabus: entanglement transfer through a ring of coupled oscillators.

A translation-invariant ring of unit-frequency harmonic oscillators acts as
a data bus between weakly attached probe oscillators.  The package builds
the quadratic Hamiltonians, evolves Gaussian states exactly through
symplectic propagators, reduces the dynamics to the single-excitation
(xy spin chain) sector, provides the analytic effective models and scaling
estimates, and ships scripted experiments behind the ``qdatabus`` CLI.
"""

__version__ = "0.1.0"

from .chain import (
    QUARTER_MODE_DETUNING,
    ChainSpec,
    DisorderSpec,
    ModeBasis,
    ProbeSpec,
    QuadraticHamiltonian,
    apply_disorder,
    attach_probes,
    build_ring_potential,
    numeric_normal_modes,
    ring_bond_strengths,
    ring_normal_modes,
)
from .effective import (
    EffectiveQuadraticModel,
    ScalingEstimate,
    ThreeProbeCoefficients,
    approx_hamiltonian,
    effective_single_excitation_hamiltonian,
    four_level_oracle,
    generalized_probe_hamiltonian,
    model_propagator,
    scaling_estimate,
    three_probe_coefficients,
)
from .excitation import (
    AmplitudeState,
    HoppingMatrix,
    amplitude_series,
    basis_state,
    evolve_amplitudes,
    rwa_hopping_matrix,
    site_populations,
    w_overlap,
    w_overlap_phase_optimized,
    xy_direct_matrix,
)
from .gaussian import (
    CovarianceState,
    SymplecticPropagator,
    UnphysicalStateError,
    evolve,
    is_physical,
    log_negativity,
    propagator,
    purity,
    reduce_modes,
    symplectic_eigenvalues,
    symplectic_form,
    two_mode_squeezed,
    vacuum_state,
)

__all__ = [
    "__version__",
    "ChainSpec", "ProbeSpec", "DisorderSpec", "QuadraticHamiltonian", "ModeBasis",
    "build_ring_potential", "attach_probes", "apply_disorder", "ring_normal_modes",
    "numeric_normal_modes", "ring_bond_strengths", "QUARTER_MODE_DETUNING",
    "CovarianceState", "SymplecticPropagator", "UnphysicalStateError",
    "symplectic_form", "vacuum_state", "two_mode_squeezed", "propagator", "evolve",
    "reduce_modes", "symplectic_eigenvalues", "log_negativity", "purity", "is_physical",
    "HoppingMatrix", "AmplitudeState", "rwa_hopping_matrix", "xy_direct_matrix",
    "basis_state", "evolve_amplitudes", "amplitude_series", "site_populations",
    "w_overlap", "w_overlap_phase_optimized",
    "EffectiveQuadraticModel", "ScalingEstimate", "ThreeProbeCoefficients",
    "approx_hamiltonian", "model_propagator", "scaling_estimate",
    "effective_single_excitation_hamiltonian", "three_probe_coefficients",
    "four_level_oracle", "generalized_probe_hamiltonian",
]
