import numpy as np
import pytest
from scipy.linalg import expm

import spinaep as sa
from spinaep.errors import NumericError

from conftest import chain_ensemble


def random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (a + a.conj().T) / 2


class TestDiagonalize:
    def test_diagonal_matrix(self):
        spec = sa.diagonalize(np.diag([-2.0, 2.0]))
        np.testing.assert_allclose(spec.energies, [-2.0, 2.0])
        np.testing.assert_allclose(np.abs(spec.vectors), np.eye(2), atol=1e-14)

    def test_two_by_two_closed_form(self):
        spec = sa.diagonalize(np.array([[-2.0, -0.3], [-0.3, 2.0]]))
        root = np.sqrt(4.09)
        np.testing.assert_allclose(spec.energies, [-root, root], atol=1e-14)

    def test_reconstruction_random_six_qubit(self):
        h = random_hermitian(64, seed=42)
        spec = sa.diagonalize(h)
        rebuilt = (spec.vectors * spec.energies) @ spec.vectors.conj().T
        assert np.abs(rebuilt - h).max() <= 1e-9

    def test_energies_ascending(self):
        spec = sa.diagonalize(random_hermitian(32, seed=1))
        assert np.all(np.diff(spec.energies) >= 0)


class TestGibbsEnsemble:
    def test_zero_hamiltonian_is_maximally_mixed(self):
        ens = sa.gibbs_ensemble(np.zeros((8, 8)), beta=3.7)
        np.testing.assert_allclose(np.exp(ens.log_weights), np.full(8, 1 / 8), atol=1e-15)

    def test_single_site_closed_form(self):
        beta = 1.3
        ens = sa.gibbs_ensemble(np.diag([-2.0, 2.0]), beta)
        expected_up = 1.0 / (1.0 + np.exp(-4 * beta))
        assert np.exp(ens.log_weights[0]) == pytest.approx(expected_up, abs=1e-14)

    def test_matches_matrix_exponential_oracle(self):
        ens = chain_ensemble(6, 1.0, 0.5, 0.2, beta=2.0)
        rho = expm(-2.0 * np.asarray(ens.hamiltonian, dtype=complex))
        rho /= np.trace(rho).real
        oracle = np.sort(np.linalg.eigvalsh(rho))
        np.testing.assert_allclose(np.sort(np.exp(ens.log_weights)), oracle, atol=1e-8)

    def test_weights_normalized(self, grid_ensembles):
        for ens in grid_ensembles:
            assert abs(np.exp(ens.log_weights).sum() - 1.0) <= 1e-12

    def test_beta_must_be_positive(self):
        with pytest.raises(ValueError):
            sa.gibbs_ensemble(np.zeros((2, 2)), 0.0)

    def test_unitary_invariance_of_weights(self):
        h = np.asarray(chain_ensemble(4, 1.0, 0.5, 0.3, beta=1.1).hamiltonian, dtype=complex)
        rng = np.random.default_rng(8)
        q, _ = np.linalg.qr(rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16)))
        rotated = q @ h @ q.conj().T
        a = np.sort(sa.gibbs_ensemble(h, 1.1).log_weights)
        b = np.sort(sa.gibbs_ensemble(rotated, 1.1).log_weights)
        np.testing.assert_allclose(a, b, atol=1e-9)


class TestEigenvalueViaEnergy:
    def test_diagonal_exact(self):
        ens = sa.gibbs_ensemble(np.diag([-1.0, 0.0, 0.5, 2.0]), beta=0.9)
        for j in range(4):
            assert sa.eigenvalue_via_energy(ens, j) == pytest.approx(
                ens.log_weights[j], abs=1e-12
            )

    def test_zero_hamiltonian(self):
        ens = sa.gibbs_ensemble(np.zeros((16, 16)), beta=2.0)
        for j in (0, 7, 15):
            assert sa.eigenvalue_via_energy(ens, j) == pytest.approx(-4 * np.log(2), abs=1e-12)

    def test_consistency_sweep(self, grid_ensembles):
        for ens in grid_ensembles:
            worst = max(
                abs(sa.eigenvalue_via_energy(ens, j) - ens.log_weights[j])
                for j in range(ens.dim)
            )
            assert worst <= 1e-9


class TestEntropy:
    def test_maximally_mixed(self):
        ens = sa.gibbs_ensemble(np.zeros((32, 32)), beta=1.0)
        assert sa.entropy_bits(ens) == pytest.approx(5.0, abs=1e-12)

    def test_single_site_binary_entropy(self):
        beta = 0.8
        ens = sa.gibbs_ensemble(np.diag([-2.0, 2.0]), beta)
        p = 1.0 / (1.0 + np.exp(-4 * beta))
        expected = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
        assert sa.entropy_bits(ens) == pytest.approx(expected, abs=1e-12)

    def test_classical_chain_matches_enumeration(self):
        from oracles import classical_chain_entropy_bits

        ens = chain_ensemble(8, 1.0, 0.5, 0.0, beta=2.0)
        oracle = classical_chain_entropy_bits(8, 1.0, 0.5, 2.0)
        assert sa.entropy_bits(ens) == pytest.approx(oracle, abs=1e-10)

    def test_bounds(self, grid_ensembles):
        for ens in grid_ensembles:
            s = sa.entropy_bits(ens)
            assert 0.0 <= s <= ens.n_sites + 1e-12

    def test_nonincreasing_in_beta(self):
        entropies = [
            sa.entropy_bits(chain_ensemble(5, 1.0, 0.5, 0.2, beta))
            for beta in (0.5, 1.0, 2.0)
        ]
        assert entropies[0] >= entropies[1] >= entropies[2]


class TestExpectation:
    def test_identity_normalization(self):
        ens = chain_ensemble(4, 1.0, 0.5, 0.2, beta=1.5)
        assert sa.expectation(ens, np.eye(16)) == pytest.approx(1.0, abs=1e-12)

    def test_zero_hamiltonian_energy(self):
        ens = sa.gibbs_ensemble(np.zeros((8, 8)), beta=1.0)
        assert sa.expectation(ens, ens.hamiltonian) == pytest.approx(0.0, abs=1e-14)

    def test_energy_is_log_partition_derivative(self):
        beta, step = 1.5, 1e-5
        ens = chain_ensemble(6, 1.0, 0.5, 0.2, beta=beta)
        h = ens.hamiltonian
        up = sa.gibbs_ensemble(h, beta + step, spectrum=ens.spectrum).log_partition
        down = sa.gibbs_ensemble(h, beta - step, spectrum=ens.spectrum).log_partition
        oracle = -(up - down) / (2 * step)
        mine = sa.expectation(ens, h)
        assert abs(mine - oracle) / abs(oracle) <= 1e-5

    def test_dimension_mismatch(self):
        ens = sa.gibbs_ensemble(np.zeros((4, 4)), beta=1.0)
        with pytest.raises(ValueError):
            sa.expectation(ens, np.eye(8))


class TestCharacteristicFunction:
    def test_tau_zero_is_exactly_one(self, grid_ensembles):
        for ens in grid_ensembles:
            assert sa.characteristic_function(ens, 0.0) == 1.0 + 0.0j

    def test_zero_hamiltonian_constant(self):
        ens = sa.gibbs_ensemble(np.zeros((8, 8)), beta=1.0)
        for tau in (0.0, 0.3, 2.0, -11.0):
            assert sa.characteristic_function(ens, tau) == pytest.approx(1.0 + 0.0j, abs=1e-12)

    def test_matches_matrix_exponential_oracle(self):
        beta, tau = 2.0, 0.7
        ens = chain_ensemble(6, 1.0, 0.5, 0.2, beta=beta)
        h = np.asarray(ens.hamiltonian, dtype=complex)
        rho = expm(-beta * h)
        rho /= np.trace(rho).real
        oracle = np.trace(expm(1j * tau * h) @ rho)
        assert abs(sa.characteristic_function(ens, tau) - oracle) <= 1e-8

    def test_conjugate_symmetry_and_modulus(self):
        ens = chain_ensemble(5, 1.0, 0.5, 0.2, beta=0.7)
        for tau in (0.4, 1.9, 13.0):
            phi = sa.characteristic_function(ens, tau)
            assert phi == pytest.approx(np.conj(sa.characteristic_function(ens, -tau)), abs=1e-12)
            assert abs(phi) <= 1.0 + 1e-12


class TestThermoDensities:
    def test_zero_hamiltonian_closed_forms(self):
        beta = 1.7
        ens = sa.gibbs_ensemble(np.zeros((16, 16)), beta=beta)
        densities = sa.thermo_densities(ens)
        assert densities.f == pytest.approx(-np.log(2) / beta, abs=1e-14)
        assert densities.g == pytest.approx(0.0, abs=1e-14)
        assert densities.h_bits == pytest.approx(1.0, abs=1e-12)

    def test_single_site_closed_forms(self):
        beta = 0.9
        ens = sa.gibbs_ensemble(np.diag([-2.0, 2.0]), beta)
        densities = sa.thermo_densities(ens)
        xi = np.exp(2 * beta) + np.exp(-2 * beta)
        p = np.exp(2 * beta) / xi
        assert densities.f == pytest.approx(-np.log(xi) / beta, abs=1e-13)
        assert densities.g == pytest.approx(-2 * p + 2 * (1 - p), abs=1e-13)
        assert densities.h_bits == pytest.approx(
            -p * np.log2(p) - (1 - p) * np.log2(1 - p), abs=1e-12
        )

    def test_identity_residual_ten_sites(self):
        ens = chain_ensemble(10, 1.0, 0.5, 0.2, beta=2.0)
        assert sa.thermo_densities(ens).identity_residual <= 1e-10


class TestImmutability:
    def test_ensemble_arrays_are_read_only(self):
        ens = chain_ensemble(4, 1.0, 0.5, 0.2, beta=1.0)
        for array in (ens.log_weights, ens.hamiltonian, ens.weights,
                      ens.spectrum.energies, ens.spectrum.vectors):
            assert not array.flags.writeable
            with pytest.raises(ValueError):
                array[..., 0] = 0.0


class TestSpectrumValidation:
    def test_unsorted_energies_rejected(self):
        with pytest.raises(ValueError):
            sa.Spectrum(energies=np.array([1.0, 0.0]), vectors=np.eye(2))

    def test_spectrum_dimension_mismatch_rejected(self):
        spec = sa.diagonalize(np.diag([0.0, 1.0]))
        with pytest.raises(ValueError):
            sa.gibbs_ensemble(np.zeros((4, 4)), 1.0, spectrum=spec)

    def test_nan_input_rejected(self):
        bad = np.diag([np.nan, 1.0])
        with pytest.raises(NumericError):
            sa.diagonalize(bad)
