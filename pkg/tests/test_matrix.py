import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levpivot.errors import DimensionMismatchError, NonSquareError, RankDeficientError
from levpivot.matrix import (
    as_matrix,
    orthonormal_basis,
    read_matrix_csv,
    spectral_deviation_from_identity,
    weighted_least_squares,
    write_matrix_csv,
)


def test_identity_basis_up_to_sign():
    u = orthonormal_basis(np.eye(4))
    np.testing.assert_allclose(np.abs(u), np.eye(4), atol=1e-15)


def test_ones_column_normalizes_to_half():
    u = orthonormal_basis(np.ones((4, 1)))
    np.testing.assert_allclose(np.abs(u[:, 0]), 0.5, atol=1e-15)


def test_random_basis_spans_input(gen):
    a = gen.standard_normal((5, 2))
    u = orthonormal_basis(a)
    assert np.max(np.abs(u.T @ u - np.eye(2))) <= 1e-10
    np.testing.assert_allclose(u @ (u.T @ a), a, atol=1e-9)


def test_rank_deficient_reports_rank(gen):
    a = gen.standard_normal((6, 2))
    a = np.column_stack([a, a[:, 0] + a[:, 1]])
    with pytest.raises(RankDeficientError) as info:
        orthonormal_basis(a)
    assert info.value.rank == 2


def test_rejects_empty_and_nonfinite():
    with pytest.raises(DimensionMismatchError):
        orthonormal_basis(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        as_matrix([[1.0, np.nan]])


def test_leverage_two_formulas_agree(gen):
    a = gen.standard_normal((30, 4)) * np.array([1.0, 10.0, 0.1, 3.0])
    u = orthonormal_basis(a)
    direct = np.einsum("ij,jk,ik->i", a, np.linalg.inv(a.T @ a), a)
    np.testing.assert_allclose((u**2).sum(axis=1), direct, atol=1e-8)


def test_wls_trivial_examples():
    sol = weighted_least_squares(np.eye(3), [1.0, 2.0, 3.0])
    np.testing.assert_allclose(sol.coefficients, [1, 2, 3], atol=1e-14)
    assert sol.residual_norm_sq == pytest.approx(0.0, abs=1e-24)

    sol = weighted_least_squares(np.ones((4, 1)), [0.0, 0.0, 2.0, 2.0])
    assert sol.coefficients[0] == pytest.approx(1.0)
    assert sol.residual_norm_sq == pytest.approx(4.0)


def test_wls_matches_normal_equations(gen):
    a = gen.standard_normal((50, 5))
    b = gen.standard_normal(50)
    x_ne = np.linalg.solve(a.T @ a, a.T @ b)
    r_ne = float(np.sum((a @ x_ne - b) ** 2))
    sol = weighted_least_squares(a, b)
    assert sol.residual_norm_sq == pytest.approx(r_ne, abs=1e-8)
    np.testing.assert_allclose(sol.coefficients, x_ne, atol=1e-8)


def test_wls_rank_deficient_gives_min_norm(gen):
    a = gen.standard_normal((10, 2))
    a = np.column_stack([a, a[:, 0]])
    b = gen.standard_normal(10)
    sol = weighted_least_squares(a, b)
    assert sol.rank_deficient
    np.testing.assert_allclose(sol.coefficients, np.linalg.pinv(a) @ b, atol=1e-10)


def test_wls_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        weighted_least_squares(np.eye(3), [1.0, 2.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(5, 40), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_wls_residual_orthogonal(n, d, seed):
    g = np.random.default_rng(seed)
    a = g.standard_normal((n, d))
    b = g.standard_normal(n) * 10
    x = weighted_least_squares(a, b).coefficients
    assert np.max(np.abs(a.T @ (a @ x - b))) <= 1e-8 * np.linalg.norm(b)


def test_spectral_trivial():
    assert spectral_deviation_from_identity(np.eye(5)) == 0.0
    assert spectral_deviation_from_identity(np.diag([1.3, 0.8])) == pytest.approx(0.3, rel=1e-8)


def test_spectral_matches_eigensolver(gen):
    m = gen.standard_normal((10, 10))
    m = (m + m.T) / 2
    oracle = np.max(np.abs(np.linalg.eigvalsh(m - np.eye(10))))
    assert spectral_deviation_from_identity(m) == pytest.approx(oracle, abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(0, 2**32 - 1))
def test_spectral_orthogonal_similarity_invariance(n, seed):
    g = np.random.default_rng(seed)
    m = g.standard_normal((n, n))
    m = (m + m.T) / 2 + np.eye(n)
    q, _ = np.linalg.qr(g.standard_normal((n, n)))
    a = spectral_deviation_from_identity(m)
    b = spectral_deviation_from_identity(q @ m @ q.T)
    assert a == pytest.approx(b, abs=1e-8 * max(1.0, a))


def test_spectral_rejects_non_square():
    with pytest.raises(NonSquareError):
        spectral_deviation_from_identity(np.ones((2, 3)))


def test_csv_roundtrip(tmp_path, gen):
    a = gen.standard_normal((7, 3))
    path = tmp_path / "a.csv"
    write_matrix_csv(path, a)
    np.testing.assert_array_equal(read_matrix_csv(path), a)
