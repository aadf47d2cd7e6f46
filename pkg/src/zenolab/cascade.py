"""Cascaded Mach-Zehnder setups.

Two topologies:

  connected  -- m interferometers in series, phase theta/m each; the output
                of stage j feeds stage j+1, so the net effect is a single
                rotation by theta.
  zeno-cut   -- the first output port of every stage is disconnected (its
                particles leave undetected, i.e. that mode is traced out)
                and the corresponding input port of the next stage is
                injected with a fresh copy of |psi_a>.

Two deviation diagnostics are tracked at the output of the last
interferometer (on the full two-mode state before the final trace, where
the detectors sit):

  deviation        -- relative deviation of the detected mean <J_z> from its
                      input value, with a floor guarding <J_z>_in ~ 0;
  state_deviation  -- 1 - fidelity of that state with the injected product
                      state |psi_a>|psi_b>.

The Zeno criterion uses the larger of the two.  The mean-only criterion is
degenerate for number-balanced inputs such as |N> |alpha> with N = |alpha|^2:
there <J_z>_in = <J_x>_in = 0 is a fixed point of the mean dynamics (the
fresh Fock injection keeps <a^dag b> = 0 every stage), so <J_z> stays zero
for every stage count and cannot witness the Zeno onset at all.  The state
fidelity recovers the onset, and reduces to the mean criterion's verdict
whenever the mean is informative.

The carried single-mode state is propagated as a weighted ensemble of pure
components (the eigendecomposition of the reduced density matrix); each
stage re-embeds the components with the fresh mode-a state, rotates them
blockwise per total-number sector, and re-reduces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import NumericalError, PSD_CLAMP, ValidationError
from .fock import (
    ModeSpec,
    OpticalInputSpec,
    TwoModeFockSpace,
    input_state,
    mode_state,
)

CONNECTED = "connected"
ZENO_CUT = "zeno-cut"

DEVIATION_FLOOR = 1e-6
COMPONENT_CUTOFF = 1e-14


@dataclass(eq=False)
class CascadeConfig:
    topology: str
    total_phase: float
    stages: int
    input: OpticalInputSpec
    fresh_a: ModeSpec | None = None
    zeno_epsilon: float = 0.05
    leak_tol: float = 1e-6
    leak_margin: int = 4
    postselect_vacuum: bool = False  # exploratory alternative to trace-out

    def __post_init__(self) -> None:
        if self.topology not in (CONNECTED, ZENO_CUT):
            raise ValidationError(f"unknown topology {self.topology!r}")
        if self.stages < 1:
            raise ValidationError("stage count must be >= 1")
        if (self.topology == ZENO_CUT) != (self.fresh_a is not None):
            raise ValidationError("fresh_a must be given iff topology is zeno-cut")
        if not 0 < self.zeno_epsilon < 1:
            raise ValidationError("zeno_epsilon must be in (0, 1)")

    @property
    def stage_phase(self) -> float:
        return self.total_phase / self.stages


@dataclass(frozen=True)
class StageRecord:
    index: int
    jz: float
    jx: float
    trace: float
    leak: float


@dataclass(frozen=True)
class CascadeReport:
    per_stage: list[StageRecord]
    jz_final: float
    jz_input: float
    deviation: float        # relative <J_z> deviation (floored denominator)
    state_deviation: float  # 1 - fidelity to the injected product state
    zeno_deviation: float   # max of the two; drives zeno_achieved
    zeno_achieved: bool
    carried_fidelity: float | None  # overlap of the carried mode with |psi_b>


@dataclass(frozen=True)
class ScanRow:
    m: int
    deviation: float
    state_deviation: float
    zeno_deviation: float
    zeno_achieved: bool


@dataclass(frozen=True)
class ScanResult:
    rows: list[ScanRow]
    m_star: int | None  # least m with deviation < epsilon (refined if requested)


def _deviation(jz_final: float, jz_input: float) -> float:
    return abs(jz_final - jz_input) / max(abs(jz_input), DEVIATION_FLOOR)


def run_connected(config: CascadeConfig, space: TwoModeFockSpace | None = None) -> CascadeReport:
    """Sequentially connected cascade: m rotations by theta/m on one state."""
    if config.topology != CONNECTED:
        raise ValidationError("config topology is not connected")
    if space is None:
        space = TwoModeFockSpace(config.input.n_max)
    psi = input_state(config.input).amplitudes
    jz_input = float(np.sum(np.abs(psi) ** 2 * space.jz_diag))
    blocks = space.rotation_blocks(config.stage_phase)
    records = []
    for j in range(1, config.stages + 1):
        leak = space.shell_leak(psi, config.leak_margin)
        if leak > config.leak_tol:
            raise NumericalError(
                f"truncation leak {leak:.3e} above {config.leak_tol:.0e} at stage {j}"
            )
        psi = space.apply_blocks(blocks, psi)
        jz = float(np.sum(np.abs(psi) ** 2 * space.jz_diag))
        jx = float(np.vdot(psi, space.jx @ psi).real)
        records.append(
            StageRecord(index=j, jz=jz, jx=jx, trace=float(np.vdot(psi, psi).real), leak=leak)
        )
    jz_final = records[-1].jz
    dev = _deviation(jz_final, jz_input)
    ref = input_state(config.input).amplitudes
    state_dev = 1.0 - float(np.abs(np.vdot(ref, psi)) ** 2)
    zeno_dev = max(dev, state_dev)
    return CascadeReport(
        per_stage=records,
        jz_final=jz_final,
        jz_input=jz_input,
        deviation=dev,
        state_deviation=state_dev,
        zeno_deviation=zeno_dev,
        zeno_achieved=zeno_dev < config.zeno_epsilon,
        carried_fidelity=None,
    )


def _reduce_to_mode_b(
    w_cols: np.ndarray, weights: np.ndarray, d: int, postselect_vacuum: bool
) -> np.ndarray:
    """Carried mode-b density matrix after discarding (or post-selecting) mode a."""
    parts = w_cols.reshape(d, d, -1)  # (n_a, n_b, component)
    if postselect_vacuum:
        kept = parts[0]  # amplitude rows with n_a = 0
        sigma = np.einsum("bk,ck,k->bc", kept, kept.conj(), weights)
        norm = float(np.trace(sigma).real)
        if norm <= 0.0:
            raise NumericalError("post-selection on vacuum has zero probability")
        return sigma / norm
    return np.einsum("abk,ack,k->bc", parts, parts.conj(), weights)


def _sigma_components(sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    sigma = (sigma + sigma.conj().T) / 2.0
    w, v = np.linalg.eigh(sigma)
    if float(w.min()) < -PSD_CLAMP:
        raise NumericalError(
            f"carried state eigenvalue {float(w.min()):.3e} below the PSD clamp"
        )
    keep = w > COMPONENT_CUTOFF
    return w[keep], v[:, keep]


def run_zeno_cut(config: CascadeConfig, space: TwoModeFockSpace | None = None) -> CascadeReport:
    """Zeno-cut cascade: trace out port c each stage, re-inject |psi_a>."""
    if config.topology != ZENO_CUT:
        raise ValidationError("config topology is not zeno-cut")
    n_max = config.input.n_max
    if space is None:
        space = TwoModeFockSpace(n_max)
    d = n_max + 1

    psi_a_first = mode_state(config.input.mode_a, n_max).amplitudes
    psi_b = mode_state(config.input.mode_b, n_max).amplitudes
    fresh = mode_state(config.fresh_a, n_max).amplitudes
    jz_input = float(
        np.sum(np.abs(np.kron(psi_a_first, psi_b)) ** 2 * space.jz_diag)
    )

    blocks = space.rotation_blocks(config.stage_phase)
    weights = np.array([1.0])
    cols = psi_b[:, None]  # carried mode-b ensemble, one column per component
    records = []
    sigma = None
    for j in range(1, config.stages + 1):
        psi_a = psi_a_first if j == 1 else fresh
        w_cols = np.einsum("a,bk->abk", psi_a, cols).reshape(d * d, -1)
        leak = float(
            np.sum(
                (np.abs(w_cols) ** 2 * weights[None, :]).sum(axis=1)[
                    space.total_diag > n_max - config.leak_margin
                ]
            )
        )
        if leak > config.leak_tol:
            raise NumericalError(
                f"truncation leak {leak:.3e} above {config.leak_tol:.0e} at stage {j}"
            )
        w_cols = space.apply_blocks(blocks, w_cols)
        if j == config.stages:
            ref = np.kron(psi_a, psi_b)
            overlaps = ref.conj() @ w_cols
            state_dev = 1.0 - float(np.sum(weights * np.abs(overlaps) ** 2))
        dens = np.abs(w_cols) ** 2
        jz = float(np.sum((dens * weights[None, :]).sum(axis=1) * space.jz_diag))
        jx = float(
            np.sum(weights * np.einsum("ik,ik->k", w_cols.conj(), space.jx @ w_cols).real)
        )
        trace = float(np.sum(weights * dens.sum(axis=0)))
        records.append(StageRecord(index=j, jz=jz, jx=jx, trace=trace, leak=leak))
        sigma = _reduce_to_mode_b(w_cols, weights, d, config.postselect_vacuum)
        weights, cols = _sigma_components(sigma)

    jz_final = records[-1].jz  # full two-mode state of the last stage, pre-trace
    dev = _deviation(jz_final, jz_input)
    zeno_dev = max(dev, state_dev)
    fidelity = float(np.vdot(psi_b, sigma @ psi_b).real)
    return CascadeReport(
        per_stage=records,
        jz_final=jz_final,
        jz_input=jz_input,
        deviation=dev,
        state_deviation=state_dev,
        zeno_deviation=zeno_dev,
        zeno_achieved=zeno_dev < config.zeno_epsilon,
        carried_fidelity=fidelity,
    )


def _with_stages(config: CascadeConfig, m: int) -> CascadeConfig:
    return CascadeConfig(
        topology=config.topology,
        total_phase=config.total_phase,
        stages=m,
        input=config.input,
        fresh_a=config.fresh_a,
        zeno_epsilon=config.zeno_epsilon,
        leak_tol=config.leak_tol,
        leak_margin=config.leak_margin,
        postselect_vacuum=config.postselect_vacuum,
    )


def default_scan_grid(m_cap: int = 1024) -> list[int]:
    """Powers of two 1, 2, 4, ..., up to m_cap."""
    grid = []
    m = 1
    while m <= m_cap:
        grid.append(m)
        m *= 2
    return grid


def zeno_threshold_scan(
    base_config: CascadeConfig,
    m_values: list[int],
    refine: bool = False,
    space: TwoModeFockSpace | None = None,
) -> ScanResult:
    """Deviation vs. stage count, and the least m achieving the Zeno criterion.

    With refine=True, a bracketing coarse crossing is sharpened by integer
    bisection (assumes the deviation crosses epsilon once inside the bracket).
    """
    if list(m_values) != sorted(set(m_values)) or not m_values:
        raise ValidationError("m_values must be ascending and nonempty")
    if any(m < 1 for m in m_values):
        raise ValidationError("stage counts must be >= 1")
    if space is None:
        space = TwoModeFockSpace(base_config.input.n_max)
    eps = base_config.zeno_epsilon

    def report_at(m: int):
        return run_zeno_cut(_with_stages(base_config, m), space=space)

    rows = []
    for m in m_values:
        rep = report_at(m)
        rows.append(
            ScanRow(
                m=m,
                deviation=rep.deviation,
                state_deviation=rep.state_deviation,
                zeno_deviation=rep.zeno_deviation,
                zeno_achieved=rep.zeno_achieved,
            )
        )

    m_star: int | None = None
    for i, row in enumerate(rows):
        if row.zeno_achieved:
            m_star = row.m
            if refine and i > 0 and not rows[i - 1].zeno_achieved:
                lo, hi = rows[i - 1].m, row.m  # dev(lo) >= eps > dev(hi)
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if report_at(mid).zeno_deviation < eps:
                        hi = mid
                    else:
                        lo = mid
                m_star = hi
            break
    return ScanResult(rows=rows, m_star=m_star)
