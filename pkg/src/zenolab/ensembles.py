"""Builders for N-qubit collective dynamics and the state families compared
in the Zeno scaling study: GHZ, product-of-plus, and convex separable
mixtures.

Generator convention: the single-qubit generator is s_z = diag(1/2, -1/2),
so the collective Hamiltonian omega * sum_l s_z^(l) has spectrum spanning
[-N*omega/2, +N*omega/2] and the Fisher bounds N*omega^2 (separable) and
N^2*omega^2 (maximal) hold with equality at the saturating states.  The
plus/minus-1 Pauli convention is recovered by rescaling omega -> 2*omega.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .linalg import (
    DensityMatrix,
    HermitianOperator,
    QuantumState,
    ValidationError,
    tensor,
)

# SpinConvention: fixed in this artifact (see module docstring).
GENERATOR_SCALE = 0.5
S_Z = np.diag([0.5, -0.5]).astype(complex)

FULL_TENSOR = "full-tensor"
COLLECTIVE_SPIN = "collective-spin"
REPRESENTATIONS = (FULL_TENSOR, COLLECTIVE_SPIN)

GHZ = "ghz"
PRODUCT_PLUS = "product-plus"
SEPARABLE_MIXTURE = "separable-mixture"
FAMILIES = (GHZ, PRODUCT_PLUS, SEPARABLE_MIXTURE)

MAX_FULL_TENSOR_QUBITS = 12
WEIGHT_TOL = 1e-12


@dataclass(eq=False)
class MixtureSpec:
    """Branch weights p_k and per-branch, per-qubit local 2x2 density matrices."""

    weights: np.ndarray
    branch_locals: list[list[np.ndarray]]  # [branch][qubit] -> 2x2 density matrix

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValidationError("mixture weights must be a nonempty vector")
        if np.any(w < -WEIGHT_TOL):
            raise ValidationError("mixture weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_TOL:
            raise ValidationError(f"mixture weights sum to {w.sum()!r}, expected 1")
        if len(self.branch_locals) != w.size:
            raise ValidationError("one local-state list required per branch")
        for branch in self.branch_locals:
            for local in branch:
                local = np.asarray(local)
                if local.shape != (2, 2):
                    raise ValidationError("local states must be 2x2 density matrices")
                DensityMatrix(local)  # validates Hermiticity, trace, positivity
        self.weights = np.clip(w, 0.0, None)

    @property
    def n_branches(self) -> int:
        return int(self.weights.size)


@dataclass(eq=False)
class QubitEnsembleSpec:
    """N qubits precessing collectively at frequency omega, in one of the
    named state families."""

    n_qubits: int
    omega: float
    representation: str = FULL_TENSOR
    family: str = PRODUCT_PLUS
    mixture: MixtureSpec | None = None

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ValidationError("n_qubits must be >= 1")
        if not self.omega > 0:
            raise ValidationError("omega must be > 0")
        if self.representation not in REPRESENTATIONS:
            raise ValidationError(f"unknown representation {self.representation!r}")
        if self.family not in FAMILIES:
            raise ValidationError(f"unknown family {self.family!r}")
        if self.representation == FULL_TENSOR and self.n_qubits > MAX_FULL_TENSOR_QUBITS:
            raise ValidationError(
                f"full-tensor representation limited to N <= {MAX_FULL_TENSOR_QUBITS}"
            )
        if (self.family == SEPARABLE_MIXTURE) != (self.mixture is not None):
            raise ValidationError("mixture parameters required iff family is separable-mixture")
        if self.mixture is not None:
            if self.representation != FULL_TENSOR:
                raise ValidationError("separable mixtures require the full-tensor representation")
            for branch in self.mixture.branch_locals:
                if len(branch) != self.n_qubits:
                    raise ValidationError("each branch needs one local state per qubit")

    @property
    def dim(self) -> int:
        if self.representation == FULL_TENSOR:
            return 2**self.n_qubits
        return self.n_qubits + 1


def collective_hamiltonian(spec: QubitEnsembleSpec) -> HermitianOperator:
    """omega * sum_l s_z^(l), diagonal in the computational / Dicke basis."""
    n, omega = spec.n_qubits, spec.omega
    if spec.representation == FULL_TENSOR:
        # Diagonal entry for basis index i: omega * (N - 2*popcount(i)) / 2,
        # identical to summing I x ... x s_z x ... x I term by term.
        pop = np.array([bin(i).count("1") for i in range(2**n)])
        diag = omega * (n - 2 * pop) / 2.0
    else:
        j = n / 2.0
        diag = omega * (j - np.arange(n + 1))
    return HermitianOperator(np.diag(diag.astype(complex)))


def ghz_state(spec: QubitEnsembleSpec) -> QuantumState:
    """(|up^N> + |down^N>) / sqrt(2)."""
    amps = np.zeros(spec.dim, dtype=complex)
    amps[0] = 1 / np.sqrt(2)
    amps[-1] = 1 / np.sqrt(2)
    return QuantumState(amps)


def product_plus_state(spec: QubitEnsembleSpec) -> QuantumState:
    """|+>^N: uniform amplitudes in the full space, binomial in the Dicke basis."""
    n = spec.n_qubits
    if spec.representation == FULL_TENSOR:
        amps = np.full(2**n, 2.0 ** (-n / 2.0), dtype=complex)
    else:
        amps = np.array([np.sqrt(comb(n, k)) for k in range(n + 1)], dtype=complex)
        amps /= 2.0 ** (n / 2.0)
    return QuantumState(amps)


def separable_mixture(spec: QubitEnsembleSpec) -> DensityMatrix:
    """sum_k p_k rho_k^(1) x ... x rho_k^(N)."""
    if spec.mixture is None:
        raise ValidationError("spec carries no mixture parameters")
    dim = spec.dim
    rho = np.zeros((dim, dim), dtype=complex)
    for p_k, branch in zip(spec.mixture.weights, spec.mixture.branch_locals):
        prod = np.asarray(branch[0], dtype=complex)
        for local in branch[1:]:
            prod = tensor(prod, local)
        rho += p_k * prod
    return DensityMatrix(rho)


def build_state(spec: QubitEnsembleSpec):
    """Dispatch on the spec's family."""
    if spec.family == GHZ:
        return ghz_state(spec)
    if spec.family == PRODUCT_PLUS:
        return product_plus_state(spec)
    return separable_mixture(spec)


def fisher_bounds(spec: QubitEnsembleSpec) -> tuple[float, float]:
    """(separable bound N*omega^2, maximal bound N^2*omega^2)."""
    n, omega = spec.n_qubits, spec.omega
    return (n * omega**2, n**2 * omega**2)


def haar_random_qubit_density(rng: np.random.Generator) -> np.ndarray:
    """Density matrix of a Haar-random single-qubit pure state."""
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_separable_spec(
    n_qubits: int,
    omega: float,
    n_branches: int,
    rng: np.random.Generator,
) -> QubitEnsembleSpec:
    """A random separable-mixture spec: Dirichlet(1,...,1) weights over
    branches of Haar-random pure locals."""
    weights = rng.dirichlet(np.ones(n_branches))
    branch_locals = [
        [haar_random_qubit_density(rng) for _ in range(n_qubits)]
        for _ in range(n_branches)
    ]
    return QubitEnsembleSpec(
        n_qubits=n_qubits,
        omega=omega,
        representation=FULL_TENSOR,
        family=SEPARABLE_MIXTURE,
        mixture=MixtureSpec(weights=weights, branch_locals=branch_locals),
    )
