"""Teleportation of S-level pure states through L two-level EPR pairs.

The package is a small state-vector simulator for the register
C (one S-level qudit) x A (L qubits, Alice) x B (L qubits, Bob), the gate
kernels that act on it, the end-to-end protocol, and a brute-force oracle
that checks the kernels against dense matrices written from their
defining formulas.
"""

from .errors import (
    CapacityError,
    DistributionError,
    ImpossibleOutcomeError,
    InsufficientQubitsError,
    InvalidDimensionError,
    NormalizationError,
    RegisterIndexError,
    ShapeError,
    TeleportError,
)
from .hilbert import (
    PureState,
    SystemShape,
    basis_state,
    compose_index,
    decompose_index,
    fidelity,
    inner_product,
    make_shape,
)
from .gates import (
    GateKind,
    GateSpec,
    apply_ctrl_xor,
    apply_dft_qudit,
    apply_gate,
    apply_u_ac_decomposed,
    apply_u_ac_direct,
    bob_correction,
    f_index,
)
from .protocol import (
    Exhaustive,
    Forced,
    MeasurementRecord,
    ProtocolTranscript,
    Sampled,
    assemble_initial_state,
    collapse_on_outcome,
    mix_seed,
    outcome_distribution,
    prepare_epr_pairs,
    prepare_input_state,
    random_amplitudes,
    run_teleportation,
    sample_outcome,
)
from .oracle import (
    check_all,
    check_orthogonality,
    dense_from_kernel,
    dense_u_ac,
)

__version__ = "0.1.0"
