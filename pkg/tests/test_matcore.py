import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qswitch_thermo.errors import PreconditionError
from qswitch_thermo.matcore import (
    check_density_matrix,
    hermitian_eig,
    partial_trace_control,
    partial_trace_probe,
    tensor,
)

from conftest import random_density_matrix


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return a + a.conj().T


class TestHermitianEig:
    def test_identity(self):
        eig = hermitian_eig(np.eye(2))
        np.testing.assert_allclose(eig.eigenvalues, [1.0, 1.0], atol=1e-15)

    def test_diagonal_gives_standard_basis(self):
        eig = hermitian_eig(np.diag([2.0, 1.0]))
        np.testing.assert_allclose(eig.eigenvalues, [1.0, 2.0], atol=1e-15)
        np.testing.assert_allclose(np.abs(eig.eigenvectors), [[0, 1], [1, 0]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(5))
    def test_reconstruction_and_orthonormality(self, seed):
        a = random_hermitian(np.random.default_rng(seed), 4)
        eig = hermitian_eig(a)
        u = eig.eigenvectors
        assert np.all(np.diff(eig.eigenvalues) >= 0)
        np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(eig.reconstruct(), a, atol=1e-10, rtol=0)
        assert abs(eig.eigenvalues.sum() - np.trace(a).real) < 1e-10

    def test_non_square_rejected(self):
        with pytest.raises(PreconditionError, match="square"):
            hermitian_eig(np.zeros((2, 3)))

    def test_non_hermitian_names_asymmetry(self):
        with pytest.raises(PreconditionError, match="asymmetry 1.000e-03"):
            hermitian_eig(np.array([[1.0, 1e-3], [0.0, 1.0]]))

    @pytest.mark.parametrize("dim", [2, 4])
    def test_density_matrix_spectrum_is_psd(self, rng, dim):
        rho = random_density_matrix(rng, dim)
        assert hermitian_eig(rho).eigenvalues.min() >= -1e-12


class TestTensorAndPartialTrace:
    def test_identities(self):
        np.testing.assert_array_equal(tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_probe_major_convention(self):
        p = 0.3
        out = tensor(np.diag([p, 1 - p]), np.diag([1.0, 0.0]))
        np.testing.assert_array_equal(out, np.diag([p, 0.0, 1 - p, 0.0]))

    def test_product_state(self, rng):
        rho = random_density_matrix(rng)
        joint = tensor(rho, np.diag([1.0, 0.0]))
        np.testing.assert_allclose(partial_trace_control(joint), rho, atol=1e-15)
        np.testing.assert_allclose(partial_trace_probe(joint), np.diag([1.0, 0.0]), atol=1e-15)

    def test_maximally_mixed(self):
        np.testing.assert_allclose(partial_trace_control(np.eye(4) / 4), np.eye(2) / 2, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(PreconditionError):
            partial_trace_control(np.eye(3))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), scale=st.floats(0.1, 10.0))
    def test_trace_of_product_scales_first_factor(self, seed, scale):
        rng = np.random.default_rng(seed)
        rho = random_density_matrix(rng)
        sigma = scale * random_density_matrix(rng)
        out = partial_trace_control(tensor(rho, sigma))
        np.testing.assert_allclose(out, rho * np.trace(sigma), atol=1e-12)
        assert abs(np.trace(out) - np.trace(sigma)) < 1e-12


def test_check_density_matrix_rejects_bad_trace():
    with pytest.raises(PreconditionError, match="trace"):
        check_density_matrix(np.diag([0.5, 0.6]))


def test_check_density_matrix_rejects_negative_eigenvalue():
    with pytest.raises(PreconditionError, match="negative"):
        check_density_matrix(np.diag([1.1, -0.1]))
