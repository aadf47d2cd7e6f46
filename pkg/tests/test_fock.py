"""Truncated two-mode Fock space, Schwinger operators, and the
Mach-Zehnder rotation with its mean-output identity."""

import math

import numpy as np
import pytest

from zenolab.linalg import NumericalError, QuantumState, ValidationError
from zenolab import fock


@pytest.fixture(scope="module")
def space20():
    return fock.TwoModeFockSpace(20)


class TestSingleModeStates:
    def test_zero_amplitude_is_vacuum(self):
        psi = fock.coherent_state(0.0, 10)
        np.testing.assert_allclose(psi.amplitudes, fock.fock_state(0, 10).amplitudes)

    def test_coherent_mean_number(self):
        psi = fock.coherent_state(2.0, 40)
        n = np.arange(41)
        mean = float(np.sum(np.abs(psi.amplitudes) ** 2 * n))
        assert mean == pytest.approx(4.0, abs=1e-9)

    def test_coherent_normalized(self):
        psi = fock.coherent_state(1.5 + 0.5j, 40)
        assert np.vdot(psi.amplitudes, psi.amplitudes).real == pytest.approx(1.0, abs=1e-12)

    def test_tail_error_names_required_truncation(self):
        with pytest.raises(NumericalError) as err:
            fock.coherent_state(3.0, 10)
        assert str(fock.required_coherent_n_max(3.0)) in str(err.value)

    def test_required_n_max_is_tight(self):
        n_req = fock.required_coherent_n_max(2.0)
        fock.coherent_state(2.0, n_req)
        with pytest.raises(NumericalError):
            fock.coherent_state(2.0, n_req - 1)

    def test_fock_state_bounds(self):
        with pytest.raises(ValidationError):
            fock.fock_state(11, 10)


class TestSchwingerOperators:
    def test_jz_is_diagonal_half_difference(self, space20):
        d = 21
        idx = 3 * d + 1  # |n_a=3, n_b=1>
        assert space20.jz_diag[idx] == pytest.approx(1.0)
        dense = space20.dense_operator("jz").matrix
        np.testing.assert_allclose(np.diag(space20.jz_diag), dense, atol=1e-14)

    def test_vacuum_coherent_means(self):
        n_max = 40
        space = fock.TwoModeFockSpace(n_max)
        spec = fock.OpticalInputSpec(fock.Vacuum(), fock.Coherent(2.0), n_max)
        amps = fock.input_state(spec).amplitudes
        jz = float(np.sum(np.abs(amps) ** 2 * space.jz_diag))
        jx = float(np.vdot(amps, space.jx @ amps).real)
        assert jz == pytest.approx(-2.0, abs=1e-9)
        assert jx == pytest.approx(0.0, abs=1e-12)

    def test_hermiticity(self, space20):
        for name in ("jx", "jy", "jz"):
            m = space20.dense_operator(name).matrix
            assert np.max(np.abs(m - m.conj().T)) < 1e-12

    def test_commutator_on_interior(self, space20):
        # [J_x, J_y] = i J_z on the subspace with total number <= n_max.
        jx = space20.dense_operator("jx").matrix
        jy = space20.dense_operator("jy").matrix
        jz = space20.dense_operator("jz").matrix
        interior = np.flatnonzero(space20.total_diag <= space20.n_max)
        comm = (jx @ jy - jy @ jx) - 1j * jz
        sub = comm[np.ix_(interior, interior)]
        assert np.linalg.norm(sub) < 1e-8


class TestMzRotation:
    def test_zero_phase_is_identity(self, space20):
        spec = fock.OpticalInputSpec(fock.Fock(2), fock.Fock(3), 20)
        psi = fock.input_state(spec)
        out = fock.mz_unitary_apply(space20, 0.0, psi)
        np.testing.assert_allclose(out.amplitudes, psi.amplitudes, atol=1e-14)

    def test_full_turn_on_two_particle_state(self, space20):
        spec = fock.OpticalInputSpec(fock.Fock(1), fock.Fock(1), 20)
        psi = fock.input_state(spec)
        out = fock.mz_unitary_apply(space20, 2.0 * math.pi, psi)
        assert abs(np.vdot(psi.amplitudes, out.amplitudes)) == pytest.approx(1.0, abs=1e-9)

    def test_norm_preserved(self, space20):
        rng = np.random.default_rng(9)
        interior = np.flatnonzero(space20.total_diag <= 10)
        v = np.zeros(space20.dim, dtype=complex)
        v[interior] = rng.normal(size=interior.size) + 1j * rng.normal(size=interior.size)
        psi = QuantumState(v / np.linalg.norm(v))
        out = fock.mz_unitary_apply(space20, 1.234, psi)
        assert np.vdot(out.amplitudes, out.amplitudes).real == pytest.approx(1.0, abs=1e-9)

    def test_rotation_composition(self, space20):
        spec = fock.OpticalInputSpec(fock.Fock(2), fock.Fock(1), 20)
        psi = fock.input_state(spec).amplitudes
        chained = space20.apply_rotation(0.8, space20.apply_rotation(0.5, psi))
        direct = space20.apply_rotation(1.3, psi)
        assert np.max(np.abs(chained - direct)) < 1e-9

    def test_shell_support_rejected(self, space20):
        psi = fock.input_state(fock.OpticalInputSpec(fock.Fock(19), fock.Vacuum(), 20))
        with pytest.raises(NumericalError, match="truncation"):
            fock.mz_unitary_apply(space20, 0.1, psi)


class TestMeanOutput:
    def test_vacuum_coherent_half_pi(self):
        n_max = 40
        space = fock.TwoModeFockSpace(n_max)
        spec = fock.OpticalInputSpec(fock.Vacuum(), fock.Coherent(2.0), n_max)
        jz_out, jx_in, jz_in = fock.mz_mean_output(space, spec, math.pi / 2.0)
        assert jz_in == pytest.approx(-2.0, abs=1e-9)
        assert jx_in == pytest.approx(0.0, abs=1e-12)
        assert jz_out == pytest.approx(0.0, abs=1e-8)

    def test_zero_phase(self, space20):
        spec = fock.OpticalInputSpec(fock.Fock(3), fock.Fock(1), 20)
        jz_out, _, jz_in = fock.mz_mean_output(space20, spec, 0.0)
        assert jz_out == pytest.approx(jz_in, abs=1e-12)

    def test_balanced_fock_pi(self, space20):
        spec = fock.OpticalInputSpec(fock.Fock(1), fock.Fock(1), 20)
        jz_out, jx_in, jz_in = fock.mz_mean_output(space20, spec, math.pi)
        assert jz_in == pytest.approx(0.0, abs=1e-12)
        assert jz_out == pytest.approx(-jz_in, abs=1e-10)
        formula = jz_in * math.cos(math.pi) - jx_in * math.sin(math.pi)
        assert jz_out == pytest.approx(formula, abs=1e-10)

    def test_identity_across_phase_grid(self):
        # The operation self-checks direct vs. formula at 1e-8 and raises on
        # disagreement; a clean pass over the grid is the assertion.
        n_max = 40
        space = fock.TwoModeFockSpace(n_max)
        inputs = [
            fock.OpticalInputSpec(fock.Vacuum(), fock.Coherent(2.0), n_max),
            fock.OpticalInputSpec(fock.Fock(4), fock.Coherent(2.0), n_max),
            fock.OpticalInputSpec(fock.Fock(3), fock.Fock(5), n_max),
        ]
        for spec in inputs:
            for theta in np.arange(0.0, 2.0 * math.pi + 1e-9, math.pi / 6.0):
                fock.mz_mean_output(space, spec, float(theta))


class TestTruncationSizing:
    def test_auto_n_max_accommodates_both_modes(self):
        n_max = fock.auto_n_max(fock.Fock(4), fock.Coherent(2.0))
        fock.OpticalInputSpec(fock.Fock(4), fock.Coherent(2.0), n_max)  # must not raise

    def test_margin_scales_with_alpha(self):
        small = fock.OpticalInputSpec(fock.Vacuum(), fock.Coherent(1.0), 40).margin
        large = fock.OpticalInputSpec(fock.Vacuum(), fock.Coherent(3.0), 60).margin
        assert large > small >= 4

    def test_spec_rejects_overfull_fock(self):
        with pytest.raises(ValidationError):
            fock.OpticalInputSpec(fock.Fock(30), fock.Vacuum(), 20)
