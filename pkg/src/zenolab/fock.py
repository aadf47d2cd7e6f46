"""Truncated two-mode Fock space: coherent and number states, Schwinger
angular-momentum operators, and the Mach-Zehnder rotation exp(-i J_y theta).

The rotation generator J_y commutes exactly with the total number operator,
and every total-number sector with n_a + n_b <= n_max is complete in the
truncated space, so the rotation is evaluated blockwise per sector.  Only
sectors above n_max are distorted by the truncation; the leak checks bound
the state mass living there.

The Mach-Zehnder parameter is the dimensionless phase theta; hbar*omega
plays no role in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import (
    HermitianOperator,
    NumericalError,
    QuantumState,
    ValidationError,
)

COHERENT_TAIL_TOL = 1e-10
LEAK_TOL = 1e-10


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Fock:
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValidationError("Fock occupation must be >= 0")


@dataclass(frozen=True)
class Coherent:
    alpha: complex


ModeSpec = Vacuum | Fock | Coherent


def annihilation(n_max: int) -> np.ndarray:
    """Single-mode destruction operator on the (n_max + 1)-dim truncation."""
    if n_max < 0:
        raise ValidationError("n_max must be >= 0")
    return np.diag(np.sqrt(np.arange(1, n_max + 1)).astype(complex), k=1)


def required_coherent_n_max(alpha: complex, tail_tol: float = COHERENT_TAIL_TOL) -> int:
    """Smallest truncation whose Poisson tail mass is below tail_tol."""
    nbar = abs(alpha) ** 2
    if nbar == 0.0:
        return 0
    term = math.exp(-nbar)
    cumulative = term
    n = 0
    while 1.0 - cumulative >= tail_tol:
        n += 1
        term *= nbar / n
        cumulative += term
        if n > 100000:  # pragma: no cover
            raise NumericalError("coherent tail does not converge")
    return n


def coherent_state(alpha: complex, n_max: int) -> QuantumState:
    """|alpha> truncated at n_max, renormalized.

    The truncated tail mass must already be < 1e-10, otherwise the error
    names the truncation actually required.
    """
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[0] = 1.0
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / math.sqrt(n)
    amps *= math.exp(-abs(alpha) ** 2 / 2.0)
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail >= COHERENT_TAIL_TOL:
        raise NumericalError(
            f"coherent tail mass {tail:.3e} at n_max={n_max}; "
            f"need n_max >= {required_coherent_n_max(alpha)}"
        )
    amps /= np.linalg.norm(amps)
    return QuantumState(amps)


def fock_state(n: int, n_max: int) -> QuantumState:
    if not 0 <= n <= n_max:
        raise ValidationError(f"Fock occupation {n} outside truncation 0..{n_max}")
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[n] = 1.0
    return QuantumState(amps)


def mode_state(spec: ModeSpec, n_max: int) -> QuantumState:
    if isinstance(spec, Vacuum):
        return fock_state(0, n_max)
    if isinstance(spec, Fock):
        return fock_state(spec.n, n_max)
    return coherent_state(spec.alpha, n_max)


def mode_mean_number(spec: ModeSpec) -> float:
    if isinstance(spec, Vacuum):
        return 0.0
    if isinstance(spec, Fock):
        return float(spec.n)
    return abs(spec.alpha) ** 2


def _mode_required_n_max(spec: ModeSpec) -> int:
    if isinstance(spec, Vacuum):
        return 0
    if isinstance(spec, Fock):
        return spec.n
    a = abs(spec.alpha)
    return math.ceil(a * a + 10.0 * a + 20.0)


def _mode_margin(spec: ModeSpec) -> int:
    if isinstance(spec, Coherent):
        return math.ceil(4.0 * abs(spec.alpha) + 4.0)
    return 4


def auto_n_max(mode_a: ModeSpec, mode_b: ModeSpec) -> int:
    """Default truncation: the modes' requirements add, because the rotation
    conserves total number and redistributes quanta between the modes."""
    return _mode_required_n_max(mode_a) + _mode_required_n_max(mode_b)


@dataclass(eq=False)
class OpticalInputSpec:
    """Two-mode product input |psi_a> |psi_b> with its truncation."""

    mode_a: ModeSpec
    mode_b: ModeSpec
    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValidationError("n_max must be >= 1")
        # Enforce the coherent-tail invariant at construction time.
        for spec in (self.mode_a, self.mode_b):
            if isinstance(spec, Coherent):
                coherent_state(spec.alpha, self.n_max)
            if isinstance(spec, Fock) and spec.n > self.n_max:
                raise ValidationError(
                    f"Fock occupation {spec.n} exceeds truncation {self.n_max}"
                )

    @property
    def margin(self) -> int:
        return max(_mode_margin(self.mode_a), _mode_margin(self.mode_b))


class TwoModeFockSpace:
    """Operator cache for the truncated two-mode space.

    Basis ordering is row-major in (n_a, n_b): index = n_a * (n_max+1) + n_b.
    Large operators are kept sparse; dense Hermitian wrappers are built on
    demand.  Everything is immutable after construction.
    """

    def __init__(self, n_max: int) -> None:
        if n_max < 1:
            raise ValidationError("n_max must be >= 1")
        self.n_max = n_max
        d = n_max + 1
        self.dim = d * d
        a1 = sp.csr_matrix(annihilation(n_max))
        eye = sp.identity(d, dtype=complex, format="csr")
        self.a = sp.kron(a1, eye, format="csr")
        self.b = sp.kron(eye, a1, format="csr")
        ad, bd = self.a.conj().T.tocsr(), self.b.conj().T.tocsr()
        self.jx = ((ad @ self.b + bd @ self.a) / 2.0).tocsr()
        self.jy = ((ad @ self.b - bd @ self.a) / 2.0j).tocsr()
        n_a = np.repeat(np.arange(d), d).astype(float)
        n_b = np.tile(np.arange(d), d).astype(float)
        self.n_a_diag = n_a
        self.n_b_diag = n_b
        self.jz_diag = (n_a - n_b) / 2.0
        self.jz = sp.diags(self.jz_diag.astype(complex), format="csr")
        self.total_diag = (n_a + n_b).astype(int)
        # Index lists per total-number sector T = 0 .. 2 n_max.
        order = np.argsort(self.total_diag, kind="stable")
        bounds = np.searchsorted(self.total_diag[order], np.arange(2 * n_max + 2))
        self.sectors = [
            order[bounds[t] : bounds[t + 1]] for t in range(2 * n_max + 1)
        ]
        self._jy_sector_eigs: list[tuple[np.ndarray, np.ndarray]] | None = None
        self._dense: dict[str, HermitianOperator] = {}

    def dense_operator(self, name: str) -> HermitianOperator:
        """Dense Hermitian view of jx / jy / jz (cached)."""
        if name not in self._dense:
            mat = {"jx": self.jx, "jy": self.jy, "jz": self.jz}[name].toarray()
            self._dense[name] = HermitianOperator(mat)
        return self._dense[name]

    def _jy_eigs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        if self._jy_sector_eigs is None:
            eigs = []
            for idx in self.sectors:
                block = self.jy[idx][:, idx].toarray()
                w, v = np.linalg.eigh(block)
                eigs.append((w, v))
            self._jy_sector_eigs = eigs
        return self._jy_sector_eigs

    def rotation_blocks(self, theta: float) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-sector unitaries of exp(-i J_y theta)."""
        return [
            (idx, (v * np.exp(-1j * w * theta)) @ v.conj().T)
            for idx, (w, v) in zip(self.sectors, self._jy_eigs())
        ]

    def apply_blocks(
        self, blocks: list[tuple[np.ndarray, np.ndarray]], vec: np.ndarray
    ) -> np.ndarray:
        """Apply a blockwise unitary to a vector or a (dim, r) column stack."""
        out = np.array(vec, dtype=complex, copy=True)
        for idx, u in blocks:
            out[idx] = u @ out[idx]
        return out

    def apply_rotation(self, theta: float, vec: np.ndarray) -> np.ndarray:
        return self.apply_blocks(self.rotation_blocks(theta), vec)

    def sector_mass(self, vec: np.ndarray) -> np.ndarray:
        """Probability mass per total-number sector of a state vector."""
        mass = np.abs(np.asarray(vec)) ** 2
        return np.array([float(mass[idx].sum()) for idx in self.sectors])

    def shell_leak(self, vec: np.ndarray, margin: int) -> float:
        """Mass above total number n_max - margin (the distorted shells)."""
        cut = self.n_max - margin
        mass = np.abs(np.asarray(vec)) ** 2
        return float(mass[self.total_diag > cut].sum())


def input_state(spec: OpticalInputSpec) -> QuantumState:
    """The two-mode product vector |psi_a> x |psi_b>."""
    a = mode_state(spec.mode_a, spec.n_max).amplitudes
    b = mode_state(spec.mode_b, spec.n_max).amplitudes
    return QuantumState(np.kron(a, b))


def mz_unitary_apply(
    space: TwoModeFockSpace,
    theta: float,
    state: QuantumState,
    margin: int = 4,
) -> QuantumState:
    """exp(-i J_y theta) |state>, guarding against truncation-shell support."""
    if state.dim != space.dim:
        raise ValidationError(f"state dim {state.dim} != space dim {space.dim}")
    leak = space.shell_leak(state.amplitudes, margin)
    if leak >= LEAK_TOL:
        raise NumericalError(
            f"state mass {leak:.3e} within {margin} shells of the truncation "
            f"boundary n_max={space.n_max}; enlarge n_max"
        )
    return QuantumState(space.apply_rotation(theta, state.amplitudes))


def mz_mean_output(
    space: TwoModeFockSpace, input_spec: OpticalInputSpec, theta: float
) -> tuple[float, float, float]:
    """(jz_out, jx_in, jz_in) for one interferometer.

    jz_out is computed directly on the rotated state and cross-checked
    against jz_in*cos(theta) - jx_in*sin(theta); disagreement beyond 1e-8
    is a numerical error (truncation has bitten).
    """
    if input_spec.n_max != space.n_max:
        raise ValidationError("input spec and space disagree on n_max")
    psi = input_state(input_spec)
    amps = psi.amplitudes
    jz_in = float(np.sum(np.abs(amps) ** 2 * space.jz_diag))
    jx_in = float(np.vdot(amps, space.jx @ amps).real)
    out = mz_unitary_apply(space, theta, psi, margin=input_spec.margin)
    jz_direct = float(np.sum(np.abs(out.amplitudes) ** 2 * space.jz_diag))
    jz_formula = jz_in * math.cos(theta) - jx_in * math.sin(theta)
    if abs(jz_direct - jz_formula) > 1e-8:
        raise NumericalError(
            f"rotation identity violated: direct {jz_direct!r} vs "
            f"formula {jz_formula!r}"
        )
    return (jz_direct, jx_in, jz_in)
