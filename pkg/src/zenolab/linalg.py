"""Dense complex linear algebra for finite-dimensional quantum systems.

All wrapped arrays are defensive copies with the writeable flag cleared, so
every value is immutable after construction and safe to share across
threads.  Operations are pure functions.  Matrix exponentials go through a
Hermitian eigendecomposition that is cached per operator, since parameter
scans propagate with the same generator for thousands of time steps.

Dense storage only; the intended working range is dim <= ~4096.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMITICITY_TOL = 1e-12
IDEMPOTENCE_TOL = 1e-10
NORM_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_CLAMP = 1e-10


class ValidationError(ValueError):
    """An input violates a structural invariant (shape, Hermiticity, norm, ...)."""


class NumericalError(RuntimeError):
    """A computation left its regime of validity (truncation leak, singular
    likelihood, eigenvalue below the PSD clamp, ...)."""


def frozen_array(values, dtype=complex) -> np.ndarray:
    """Copy into an immutable ndarray."""
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def max_asymmetry(matrix: np.ndarray) -> float:
    """Largest entrywise deviation between a matrix and its conjugate transpose."""
    if matrix.size == 0:
        return 0.0
    return float(np.max(np.abs(matrix - matrix.conj().T)))


def _check_square(m: np.ndarray, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"{what} must be a square matrix, got shape {m.shape}")


@dataclass(frozen=True)
class EigenSystem:
    """Spectral factorization A = V diag(eigenvalues) V^dagger.

    Eigenvalues are real and ascending; eigenvector columns are orthonormal.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class HermitianOperator:
    """A Hermitian matrix with a lazily cached eigendecomposition."""

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=complex)
        _check_square(m, "operator")
        scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
        asym = max_asymmetry(m)
        if asym > HERMITICITY_TOL * scale:
            raise ValidationError(
                f"matrix is not Hermitian: max asymmetry {asym:.3e}"
            )
        # Symmetrize so downstream eigh sees an exactly Hermitian input.
        self.matrix = frozen_array((m + m.conj().T) / 2)
        self._eig: EigenSystem | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eig(self) -> EigenSystem:
        if self._eig is None:
            self._eig = hermitian_eig(self)
        return self._eig

    def __repr__(self) -> str:  # pragma: no cover
        return f"{type(self).__name__}(dim={self.dim})"


class Projector(HermitianOperator):
    """A Hermitian idempotent measurement projection."""

    def __init__(self, matrix) -> None:
        super().__init__(matrix)
        p = self.matrix
        defect = float(np.max(np.abs(p @ p - p)))
        if defect > IDEMPOTENCE_TOL:
            raise ValidationError(
                f"matrix is not idempotent: max |P^2 - P| = {defect:.3e}"
            )

    @property
    def rank(self) -> int:
        return int(round(float(np.trace(self.matrix).real)))


class QuantumState:
    """A normalized pure-state amplitude vector."""

    def __init__(self, amplitudes) -> None:
        a = np.asarray(amplitudes, dtype=complex)
        if a.ndim != 1 or a.size == 0:
            raise ValidationError(f"state must be a nonempty vector, got shape {a.shape}")
        norm_sq = float(np.vdot(a, a).real)
        if abs(norm_sq - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized: |psi|^2 = {norm_sq!r}")
        self.amplitudes = frozen_array(a)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def density(self) -> "DensityMatrix":
        a = self.amplitudes
        return DensityMatrix(np.outer(a, a.conj()))

    def __repr__(self) -> str:  # pragma: no cover
        return f"QuantumState(dim={self.dim})"


class DensityMatrix:
    """A Hermitian, unit-trace, positive-semidefinite matrix.

    Eigenvalues in [-PSD_CLAMP, 0) are tolerated as roundoff zeros; anything
    more negative is a hard error.
    """

    def __init__(self, matrix) -> None:
        m = np.asarray(matrix, dtype=complex)
        _check_square(m, "density matrix")
        asym = max_asymmetry(m)
        if asym > HERMITICITY_TOL * max(1.0, float(np.max(np.abs(m)))):
            raise ValidationError(f"density matrix is not Hermitian: max asymmetry {asym:.3e}")
        m = (m + m.conj().T) / 2
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"density matrix trace is {tr!r}, expected 1")
        lo = float(np.min(np.linalg.eigvalsh(m)))
        if lo < -PSD_CLAMP:
            raise NumericalError(
                f"density matrix has eigenvalue {lo:.3e} below the PSD clamp {-PSD_CLAMP:.0e}"
            )
        self.matrix = frozen_array(m)
        self._eig: EigenSystem | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eig(self) -> EigenSystem:
        if self._eig is None:
            w, v = np.linalg.eigh(self.matrix)
            self._eig = EigenSystem(frozen_array(w, dtype=float), frozen_array(v))
        return self._eig

    def __repr__(self) -> str:  # pragma: no cover
        return f"DensityMatrix(dim={self.dim})"


State = QuantumState | DensityMatrix


def hermitian_eig(op: HermitianOperator) -> EigenSystem:
    """Eigendecomposition of a Hermitian operator, eigenvalues ascending."""
    w, v = np.linalg.eigh(op.matrix)
    return EigenSystem(frozen_array(w, dtype=float), frozen_array(v))


def _check_dim_match(dim_a: int, dim_b: int, what: str) -> None:
    if dim_a != dim_b:
        raise ValidationError(f"dimension mismatch in {what}: {dim_a} != {dim_b}")


def propagator(H: HermitianOperator, t: float) -> np.ndarray:
    """The unitary exp(-i H t) as a dense array (hbar = 1)."""
    es = H.eig
    v = es.eigenvectors
    return (v * np.exp(-1j * es.eigenvalues * t)) @ v.conj().T


def evolve_state(H: HermitianOperator, t: float, psi: QuantumState) -> QuantumState:
    """|psi(t)> = exp(-i H t) |psi>, hbar = 1."""
    _check_dim_match(H.dim, psi.dim, "evolve_state")
    if t == 0.0:
        return psi
    es = H.eig
    v = es.eigenvectors
    amps = v @ (np.exp(-1j * es.eigenvalues * t) * (v.conj().T @ psi.amplitudes))
    return QuantumState(amps)


def evolve_density(H: HermitianOperator, t: float, rho: DensityMatrix) -> DensityMatrix:
    """rho(t) = exp(-i H t) rho exp(+i H t)."""
    _check_dim_match(H.dim, rho.dim, "evolve_density")
    if t == 0.0:
        return rho
    u = propagator(H, t)
    return DensityMatrix(u @ rho.matrix @ u.conj().T)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, dimensions multiplied."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace_array(rho: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Partial trace on a raw bipartite array; see partial_trace."""
    d_a, d_b = dims
    if d_a * d_b != rho.shape[0]:
        raise ValidationError(
            f"cannot factor dimension {rho.shape[0]} as {d_a} x {d_b}"
        )
    r = rho.reshape(d_a, d_b, d_a, d_b)
    if keep == 0:
        return np.einsum("ijkj->ik", r)
    if keep == 1:
        return np.einsum("ijil->jl", r)
    raise ValidationError(f"keep must be 0 or 1, got {keep!r}")


def partial_trace(rho: DensityMatrix, dims: tuple[int, int], keep: int) -> DensityMatrix:
    """Trace out one factor of a bipartite density matrix.

    dims = (d_A, d_B) with d_A * d_B = rho.dim; keep selects the surviving
    subsystem (0 for A, 1 for B).
    """
    return DensityMatrix(partial_trace_array(rho.matrix, dims, keep))


def expectation(op: HermitianOperator, state: State) -> float:
    """<A> on a pure state or Tr[A rho] on a density matrix.

    The imaginary part of the raw trace must be negligible (it is for
    Hermitian inputs); it is checked and discarded.
    """
    _check_dim_match(op.dim, state.dim, "expectation")
    if isinstance(state, QuantumState):
        val = complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))
    else:
        val = complex(np.einsum("ij,ji->", op.matrix, state.matrix))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
        raise NumericalError(f"expectation has non-negligible imaginary part {val.imag:.3e}")
    return float(val.real)


def variance(op: HermitianOperator, state: State) -> float:
    """<A^2> - <A>^2, clamped to 0 when roundoff makes it barely negative."""
    _check_dim_match(op.dim, state.dim, "variance")
    if isinstance(state, QuantumState):
        phi = op.matrix @ state.amplitudes
        mean = float(np.vdot(state.amplitudes, phi).real)
        resid = phi - mean * state.amplitudes
        return float(np.vdot(resid, resid).real)
    mean = expectation(op, state)
    b = op.matrix - mean * np.eye(op.dim)
    second = float(np.einsum("ij,jk,ki->", b, state.matrix, b).real)
    if second < 0.0:
        scale = max(1.0, float(np.max(np.abs(op.matrix))) ** 2)
        if second >= -1e-12 * scale:
            return 0.0
        raise NumericalError(f"variance came out negative: {second!r}")
    return second


def support_projector(rho: DensityMatrix, tol: float = 1e-10) -> Projector:
    """Projector onto the span of the eigenvectors with eigenvalue > tol."""
    es = rho.eig
    cols = es.eigenvectors[:, es.eigenvalues > tol]
    if cols.shape[1] == 0:
        raise ValidationError("density matrix has no eigenvalue above the support tolerance")
    return Projector(cols @ cols.conj().T)
