import numpy as np
import pytest
from hypothesis import given, strategies as st

from fidmin.qlin import (
    DimensionError,
    NotHermitianError,
    haar_unitary,
    hermitian_eig,
    hs_inner,
    partial_trace,
    purity,
    tensor_product,
)
from conftest import PAULI

I2 = np.eye(2)


def _random_matrix(seed, shape):
    rng = np.random.default_rng(seed)
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _random_hermitian(seed, d):
    a = _random_matrix(seed, (d, d))
    return a + a.conj().T


class TestTensorProduct:
    def test_identity(self):
        assert np.array_equal(tensor_product(I2, I2), np.eye(4))

    def test_sigma_z_outer(self):
        assert np.array_equal(tensor_product(PAULI["z"], I2), np.diag([1, 1, -1, -1]))

    def test_projector_position(self):
        out = tensor_product(np.diag([1, 0]), np.diag([0, 1]))
        expected = np.zeros((4, 4))
        expected[1, 1] = 1
        assert np.array_equal(out, expected)

    @given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4))
    def test_trace_multiplicative(self, seed, da, db):
        a = _random_matrix(seed, (da, da))
        b = _random_matrix(seed + 1, (db, db))
        lhs = np.trace(tensor_product(a, b))
        rhs = np.trace(a) * np.trace(b)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


class TestPartialTrace:
    def test_product_state(self):
        ra, rb = np.diag([0.6, 0.4]), np.array([[0.5, 0.2j], [-0.2j, 0.5]])
        assert np.allclose(partial_trace(np.kron(ra, rb), (2, 2), "a"), ra, atol=1e-15)
        assert np.allclose(partial_trace(np.kron(ra, rb), (2, 2), "b"), rb, atol=1e-15)

    def test_bell_marginal(self, bell):
        assert np.allclose(partial_trace(bell.matrix, (2, 2), "a"), I2 / 2, atol=1e-15)

    def test_diagonal_blocks(self):
        rho = np.diag([0.5, 0.2, 0.2, 0.1])
        # oracle: keep=a sums each diagonal 2x2 block's trace
        expected = np.diag([np.trace(rho[:2, :2]), np.trace(rho[2:, 2:])])
        assert np.allclose(expected, np.diag([0.7, 0.3]))
        assert np.allclose(partial_trace(rho, (2, 2), "a"), expected, atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            partial_trace(np.eye(4), (2, 3))

    @given(st.integers(0, 10**6), st.integers(1, 4), st.integers(1, 4), st.sampled_from("ab"))
    def test_trace_preserved(self, seed, m, n, keep):
        rho = _random_matrix(seed, (m * n, m * n))
        out = partial_trace(rho, (m, n), keep)
        assert abs(np.trace(out) - np.trace(rho)) <= 1e-12 * max(1.0, abs(np.trace(rho)))


class TestHermitianEig:
    def test_sigma_z(self):
        assert np.allclose(hermitian_eig(PAULI["z"]).eigenvalues, [-1, 1])

    def test_identity(self):
        assert np.allclose(hermitian_eig(np.eye(3)).eigenvalues, 1)

    def test_sigma_x_vectors(self):
        res = hermitian_eig(PAULI["x"])
        assert np.allclose(res.eigenvalues, [-1, 1])
        expected = np.array([[1, 1], [-1, 1]]) / np.sqrt(2)
        for k in range(2):  # compare up to phase
            assert abs(abs(np.vdot(expected[:, k], res.eigenvectors[:, k])) - 1) < 1e-12

    def test_rejects_non_hermitian(self):
        with pytest.raises(NotHermitianError):
            hermitian_eig(np.array([[1, 1], [0, 1]]))

    @given(st.integers(0, 10**6), st.integers(1, 6))
    def test_reconstruction_and_order(self, seed, d):
        a = _random_hermitian(seed, d)
        res = hermitian_eig(a)
        v, w = res.eigenvectors, res.eigenvalues
        scale = np.linalg.norm(a)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - a) <= 1e-10 * scale
        assert np.linalg.norm(v.conj().T @ v - np.eye(d)) <= 1e-10
        for k in range(d):
            assert np.linalg.norm(a @ v[:, k] - w[k] * v[:, k]) <= 1e-10 * scale


class TestInnerProductAndPurity:
    def test_normalized_identity(self):
        assert hs_inner(I2 / np.sqrt(2), I2 / np.sqrt(2)) == pytest.approx(1)

    def test_pauli_orthogonal(self):
        assert hs_inner(PAULI["x"] / np.sqrt(2), PAULI["z"] / np.sqrt(2)) == 0

    def test_diag_state(self):
        rho = np.diag([0.7, 0.3])
        assert hs_inner(rho, rho).real == pytest.approx(0.58, abs=1e-15)
        assert purity(rho) == pytest.approx(0.58, abs=1e-15)

    def test_pure_and_mixed(self):
        assert purity(np.diag([1.0, 0, 0])) == 1.0
        assert purity(np.eye(5) / 5) == pytest.approx(0.2, abs=1e-15)

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            hs_inner(np.eye(2), np.eye(3))

    @given(st.integers(0, 10**6), st.integers(1, 6))
    def test_purity_is_self_inner_product(self, seed, d):
        a = _random_hermitian(seed, d)
        assert abs(purity(a) - hs_inner(a, a).real) <= 1e-12 * max(1.0, purity(a))


def test_haar_unitary_is_unitary():
    u = haar_unitary(4, np.random.default_rng(3))
    assert np.linalg.norm(u.conj().T @ u - np.eye(4)) < 1e-12
