"""N-qubit collective Hamiltonians and the GHZ / product / separable-mixture
state families, in both representations."""

import numpy as np
import pytest

from zenolab.linalg import DensityMatrix, ValidationError, support_projector, variance
from zenolab import ensembles as ens
from zenolab.zeno import fisher_quadratic


def spec(n, omega=1.0, representation=ens.FULL_TENSOR, family=ens.PRODUCT_PLUS, mixture=None):
    return ens.QubitEnsembleSpec(
        n_qubits=n, omega=omega, representation=representation, family=family, mixture=mixture
    )


class TestCollectiveHamiltonian:
    def test_single_qubit(self):
        h = ens.collective_hamiltonian(spec(1))
        np.testing.assert_allclose(h.matrix, np.diag([0.5, -0.5]))

    def test_two_qubit_spectrum(self):
        omega = 1.3
        h = ens.collective_hamiltonian(spec(2, omega=omega))
        np.testing.assert_allclose(sorted(h.eig.eigenvalues), np.array([-1, 0, 0, 1]) * omega)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_representations_agree_on_symmetric_sector(self, n):
        full = ens.collective_hamiltonian(spec(n)).eig.eigenvalues
        coll = ens.collective_hamiltonian(
            spec(n, representation=ens.COLLECTIVE_SPIN)
        ).eig.eigenvalues
        # Every Dicke eigenvalue appears in the full spectrum.
        for lam in coll:
            assert np.min(np.abs(full - lam)) < 1e-12

    def test_spectrum_span(self):
        h = ens.collective_hamiltonian(spec(5, omega=2.0))
        assert h.eig.eigenvalues[0] == pytest.approx(-5.0)
        assert h.eig.eigenvalues[-1] == pytest.approx(5.0)

    def test_full_tensor_size_limit(self):
        with pytest.raises(ValidationError, match="full-tensor"):
            spec(13)


class TestStateFamilies:
    def test_ghz_single_qubit_is_plus(self):
        psi = ens.ghz_state(spec(1, family=ens.GHZ))
        np.testing.assert_allclose(psi.amplitudes, np.full(2, 1 / np.sqrt(2)))

    def test_ghz_three_qubit_support(self):
        psi = ens.ghz_state(spec(3, family=ens.GHZ))
        assert psi.amplitudes[0] == pytest.approx(1 / np.sqrt(2))
        assert psi.amplitudes[7] == pytest.approx(1 / np.sqrt(2))
        assert np.sum(np.abs(psi.amplitudes) > 0) == 2

    @pytest.mark.parametrize("n", [1, 2, 4, 8, 12])
    @pytest.mark.parametrize("rep", ens.REPRESENTATIONS)
    def test_ghz_variance(self, n, rep):
        omega = 1.0
        s = spec(n, omega=omega, representation=rep, family=ens.GHZ)
        v = variance(ens.collective_hamiltonian(s), ens.ghz_state(s))
        assert v == pytest.approx(n**2 * omega**2 / 4.0, rel=1e-12)

    def test_product_plus_two_qubit(self):
        psi = ens.product_plus_state(spec(2))
        np.testing.assert_allclose(psi.amplitudes, np.full(4, 0.5))

    @pytest.mark.parametrize("n", [1, 2, 4, 8, 12])
    @pytest.mark.parametrize("rep", ens.REPRESENTATIONS)
    def test_product_plus_variance(self, n, rep):
        s = spec(n, representation=rep)
        v = variance(ens.collective_hamiltonian(s), ens.product_plus_state(s))
        assert v == pytest.approx(n / 4.0, rel=1e-12)

    def test_representations_give_same_product_plus_moments(self):
        for n in range(1, 7):
            full = spec(n)
            dicke = spec(n, representation=ens.COLLECTIVE_SPIN)
            v_full = variance(ens.collective_hamiltonian(full), ens.product_plus_state(full))
            v_dicke = variance(ens.collective_hamiltonian(dicke), ens.product_plus_state(dicke))
            assert v_full == pytest.approx(v_dicke, rel=1e-12)


class TestSeparableMixture:
    def test_single_branch_plus_locals(self):
        plus = np.full((2, 2), 0.5, dtype=complex)
        mix = ens.MixtureSpec(weights=np.array([1.0]), branch_locals=[[plus, plus]])
        rho = ens.separable_mixture(spec(2, family=ens.SEPARABLE_MIXTURE, mixture=mix))
        psi = ens.product_plus_state(spec(2))
        np.testing.assert_allclose(
            rho.matrix, np.outer(psi.amplitudes, psi.amplitudes.conj()), atol=1e-12
        )

    def test_classical_up_down_mixture(self):
        up = np.diag([1.0, 0.0]).astype(complex)
        down = np.diag([0.0, 1.0]).astype(complex)
        mix = ens.MixtureSpec(
            weights=np.array([0.5, 0.5]), branch_locals=[[up, up], [down, down]]
        )
        rho = ens.separable_mixture(spec(2, family=ens.SEPARABLE_MIXTURE, mixture=mix))
        np.testing.assert_allclose(rho.matrix, np.diag([0.5, 0.0, 0.0, 0.5]), atol=1e-14)

    def test_random_mixtures_are_valid_densities(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            s = ens.random_separable_spec(3, 1.0, 4, rng)
            rho = ens.separable_mixture(s)
            assert isinstance(rho, DensityMatrix)

    def test_separable_fisher_bound(self):
        # The realized quadratic Fisher 4 Var(Hbar) with the support projector
        # stays below the shot-noise bound N (omega = 1).  The raw second
        # moment 4 Var(H, rho) does NOT obey this bound for mixed states (a
        # classical all-up/all-down mixture reaches N^2); the bound is about
        # the measurement Fisher, not the bare variance.
        rng = np.random.default_rng(2024)
        for _ in range(100):
            n = int(rng.integers(1, 7))
            s = ens.random_separable_spec(n, 1.0, int(rng.integers(1, 5)), rng)
            h = ens.collective_hamiltonian(s)
            rho = ens.separable_mixture(s)
            f = fisher_quadratic(h, support_projector(rho), rho)
            assert f <= n + 1e-9

    def test_weight_validation(self):
        up = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValidationError, match="sum"):
            ens.MixtureSpec(weights=np.array([0.7, 0.6]), branch_locals=[[up], [up]])
        with pytest.raises(ValidationError, match="nonnegative"):
            ens.MixtureSpec(weights=np.array([1.5, -0.5]), branch_locals=[[up], [up]])

    def test_mixture_requires_matching_family(self):
        with pytest.raises(ValidationError, match="mixture"):
            spec(2, family=ens.SEPARABLE_MIXTURE)


class TestFisherBounds:
    @pytest.mark.parametrize(
        "n,omega,expected",
        [(1, 1.0, (1.0, 1.0)), (4, 1.0, (4.0, 16.0)), (9, 2.0, (36.0, 324.0))],
    )
    def test_bound_values(self, n, omega, expected):
        assert ens.fisher_bounds(spec(n, omega=omega)) == pytest.approx(expected)

    @pytest.mark.parametrize("n", list(range(1, 13)))
    def test_bounds_saturated_by_the_named_families(self, n):
        s_ghz = spec(n, family=ens.GHZ)
        s_pp = spec(n)
        h = ens.collective_hamiltonian(s_pp)
        sep, top = ens.fisher_bounds(s_pp)
        assert 4.0 * variance(h, ens.ghz_state(s_ghz)) == pytest.approx(top, rel=1e-12)
        assert 4.0 * variance(h, ens.product_plus_state(s_pp)) == pytest.approx(sep, rel=1e-12)
