"""Exact multiparameter quantum Fisher information of thermal spin states.

The package computes QFI matrices of Gibbs states of finite qubit systems,
evaluates finite- and zero-temperature sensitivity bounds with their
saturation diagnostics, and solves the alternating-field Ising ring through
its transfer matrix.  See the ``thermoqfi`` CLI for the experiment runner.
"""

from .bounds import (
    BoundReport,
    DegenerateGroundStateError,
    FullyDegenerateSpectrumError,
    GhzSpec,
    covariance_matrix,
    energy_gap,
    evaluate_bounds,
    finite_temperature_bound,
    gamma_HL,
    gamma_HL_matrix,
    ghz_spec_for_direction,
    ghz_state,
    heisenberg_bound,
    zero_temperature_bound,
    zero_temperature_limit,
)
from .models import (
    IsingConfig,
    TransferResult,
    disjoint_blocks_model,
    ising_alternating,
    local_field_chain,
    single_qubit_xyz,
    transfer_lambdas,
    transfer_log_partition,
    transfer_qfi,
)
from .operators import (
    MAX_DENSE_QUBITS,
    DimensionMismatchError,
    HermitianOperator,
    NonHermitianError,
    ParamHamiltonian,
    PauliTerm,
    Spectrum,
    assemble,
    assemble_generator,
    commutator,
    eigendecompose,
    spectral_spread,
)
from .qfi import (
    AttainabilityReport,
    QfiMatrix,
    attainability,
    effective_generator,
    gibbs_derivative,
    log_partition,
    logZ_hessian_fd,
    optimal_measurement,
    qfi_matrix,
    qfi_oracle_fd,
    quadratic_form,
    sld,
)
from .thermal import (
    SuperopKind,
    ThermalState,
    apply_superoperator,
    bogoliubov_weight,
    gibbs,
    kmb_weight,
    trace_pair,
    weight_matrix,
)

__version__ = "0.1.0"
