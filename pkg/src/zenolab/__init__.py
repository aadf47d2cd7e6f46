"""zenolab: a numerical laboratory for quantum Zeno dynamics, Fisher
information timescales, and cascaded Mach-Zehnder interferometry."""

__version__ = "0.1.0"

from .linalg import (
    DensityMatrix,
    EigenSystem,
    HermitianOperator,
    NumericalError,
    Projector,
    QuantumState,
    ValidationError,
    evolve_density,
    evolve_state,
    expectation,
    hermitian_eig,
    partial_trace,
    support_projector,
    tensor,
    variance,
)
from .zeno import (
    EstimateResult,
    TwoOutcomeLikelihood,
    ZenoReport,
    ZenoScenario,
    cramer_rao_interval,
    distinguishable_count,
    effective_hamiltonian,
    fisher_quadratic,
    fisher_two_outcome_numeric,
    likelihood_yes,
    quantum_fisher_pure,
    run_scenario,
    sample_and_estimate,
    survival_exact_projected,
    survival_exact_pure,
    survival_gaussian,
    survival_quadratic,
    zeno_time,
)
