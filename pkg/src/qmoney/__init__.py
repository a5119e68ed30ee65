"""Stabilizer quantum money workbench.

Subpackages by topic: pauli/stabilizer for the group algebra, money for
scheme generation and thresholded verification, clique and phase for the
two attacks, postselect for the collision-free construction with its
Markov-chain verifier, harness/cli for seeded experiments and files.
"""

from .errors import (
    AttackFailure,
    CapacityError,
    DimensionError,
    GroupContradictionError,
    InconsistentGeneratorsError,
    QMoneyError,
    SchemeFormatError,
    SoundnessWarning,
)
from .pauli import (
    DENSE_LIMIT,
    PauliOp,
    apply_pauli,
    commutation_matrix,
    commutes,
    dense_matrix,
    expectation,
    pauli_mul,
    random_pauli,
    symplectic_ip,
)
from .stabilizer import (
    StabilizerState,
    complete_to_stabilizer_state,
    dense_projector,
    dense_statevector,
    greedy_consistent_subset,
    random_stabilizer_element,
    random_stabilizer_state,
    stab_expectation,
)
from .money import (
    DenseMixedRegister,
    MoneyScheme,
    MoneyState,
    SchemeParams,
    SecretKey,
    StabilizerRegister,
    VerificationOutcome,
    completely_mixed_money,
    gen_scheme,
    honest_money,
    measure_register,
    register_expectation,
    verify,
)
from .clique import (
    CliqueAttackReport,
    CliqueAttackResult,
    CliqueResult,
    MeasurementGraph,
    SignedMatrix,
    attack_register,
    bootstrap_clique,
    build_graph,
    degree_sort_clique,
    exact_max_clique,
    forge_high_eps,
    max_eigenvalue_check,
    recover_register,
    run_clique_attack,
    second_eigenvector,
    spectral_clique,
)
from .phase import (
    PhaseEstimationParams,
    RegisterForgeRecord,
    RegisterHamiltonian,
    accept_window,
    eigenvalue_phases,
    forge_low_eps,
    forge_low_eps_with_records,
    generate_rho,
    moments,
    pe_distribution,
    pe_sample,
    register_fractions,
    register_hamiltonian,
    window_probability,
)
from .postselect import (
    BetaChainDiagnostics,
    ComponentAnalysis,
    LabelScheme,
    LabeledMoney,
    MarkovVerifier,
    apply_M,
    beta_chain_mixing,
    build_verifier,
    component_analysis,
    default_iteration_count,
    find_frozen_strings,
    kraus_equivalence_check,
    label,
    label_bits,
    label_table,
    make_label_scheme,
    mint,
    parse_label_bits,
    verify_money,
)
from .harness import (
    EXPERIMENT_KINDS,
    ExperimentConfig,
    LabelParams,
    ResultRecord,
    emit_results,
    load_note,
    load_scheme,
    run_experiment,
    save_note,
    save_scheme,
    summarize,
)

__version__ = "0.1.0"
