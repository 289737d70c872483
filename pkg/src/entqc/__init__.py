"""Teleportation of unknown two-qubit states through four-qubit entangled
channels: exact state-vector simulation, channel validation, entanglement
analysis (PPT pairs, GHZ-structured triads, witness minimization), and a
deterministic verification report.
"""

from .channel import (
    BUILTIN_CHANNELS,
    CHANNEL_LABELS,
    ChannelSpec,
    GhzSpec,
    ResolvedChannel,
    bell_transform_matrix,
    builtin_channel,
    dressed_channel,
    epr_pair_channel,
    generalized_ghz,
    is_valid_channel,
    load_channel_json,
    resolve_channel,
)
from .entanglement import (
    CHANNEL_PAIRS,
    CHANNEL_TRIADS,
    PairReport,
    TriadReport,
    WitnessSearchResult,
    minimize_witness,
    pair_analysis,
    symmetric_w_state,
    three_tangle,
    triad_analysis,
    triad_component_states,
    witness_gradient,
    witness_state,
    witness_value,
)
from .tensor import (
    ContractError,
    DensityMatrix,
    LabelError,
    QubitRegister,
    StateVector,
    apply_unitary,
    fidelity_pure,
    haar_random_state,
    haar_random_unitary,
    hermitian_eigenvalues,
    kron,
    operator_schmidt_coefficients,
    operator_schmidt_rank,
    partial_inner,
    partial_trace,
    partial_transpose,
    reduced_density,
    schmidt_coefficients,
    schmidt_rank,
    tensor,
)
from .teleport import (
    CorrectionTable,
    MeasurementBasis,
    TeleportOutcome,
    UnknownState,
    corrections_from,
    invariance_transform,
    is_separable_basis,
    measurement_basis,
    partial_inner_transfer,
    pauli_pair,
    povm_check,
    run_protocol,
    series_form,
    standard_corrections,
    teleport_all_outcomes,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_CHANNELS",
    "CHANNEL_LABELS",
    "CHANNEL_PAIRS",
    "CHANNEL_TRIADS",
    "ChannelSpec",
    "ContractError",
    "CorrectionTable",
    "DensityMatrix",
    "GhzSpec",
    "LabelError",
    "MeasurementBasis",
    "PairReport",
    "QubitRegister",
    "ResolvedChannel",
    "StateVector",
    "TeleportOutcome",
    "TriadReport",
    "UnknownState",
    "WitnessSearchResult",
    "apply_unitary",
    "bell_transform_matrix",
    "builtin_channel",
    "corrections_from",
    "dressed_channel",
    "epr_pair_channel",
    "fidelity_pure",
    "generalized_ghz",
    "haar_random_state",
    "haar_random_unitary",
    "hermitian_eigenvalues",
    "invariance_transform",
    "is_separable_basis",
    "is_valid_channel",
    "kron",
    "load_channel_json",
    "measurement_basis",
    "minimize_witness",
    "operator_schmidt_coefficients",
    "operator_schmidt_rank",
    "pair_analysis",
    "partial_inner",
    "partial_inner_transfer",
    "partial_trace",
    "partial_transpose",
    "pauli_pair",
    "povm_check",
    "reduced_density",
    "resolve_channel",
    "run_protocol",
    "schmidt_coefficients",
    "schmidt_rank",
    "series_form",
    "standard_corrections",
    "symmetric_w_state",
    "teleport_all_outcomes",
    "tensor",
    "three_tangle",
    "triad_analysis",
    "triad_component_states",
    "witness_gradient",
    "witness_state",
    "witness_value",
]
