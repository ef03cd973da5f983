"""Crosstalk between two GKP-encoded bosonic modes.

A beam splitter with rational transmissivity ``eta = q / (q + p*d1*d2)``
maps logical states of two GKP codes into a larger pair of codes that carry
an extra, maximally entangled gauge subsystem.  This package builds those
output states, decodes them by gauge fixing, and evaluates fidelities under
Gaussian displacement noise.
"""

from .channel import (
    CrosstalkParams,
    DiscreteState,
    build_multiplexed_epr_state,
    build_output_state,
    build_symmetric_output,
    gauge_group_order,
    output_basis_index,
    perfect_transmission_check,
    transform_displacement,
    verify_gauge_factorization,
)
from .decoder import (
    DecodeOutcome,
    apply_correction_and_reduce,
    decode,
    gauge_fix_permutation,
    gauge_index_from_outcome,
    simulate_ancilla_measurement,
)
from .modular import (
    classify_eta,
    enumerate_admissible_etas,
    eta_for,
    extended_gcd,
    mod_inverse,
)
from .noise import (
    FidelityBoundParams,
    NoiseParams,
    dv_baseline_fidelity,
    f_ideal,
    f_single,
    fidelity_upper_bound,
    mc_fidelity_estimate,
    sample_displacement,
    sample_eta_lognormal,
)
from .phase_space import (
    GkpCode,
    GkpLattice,
    PhaseVector,
    induced_partner_lattice,
    is_sublattice,
    lattice_contains,
    make_square_code,
    matching_scaling_matrix,
    symplectic_form,
)

__version__ = "0.1.0"
