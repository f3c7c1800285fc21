import numpy as np
import pytest

from specshield import NumericalError, frobenius_inner, reconstruct, svd


def test_identity_spectrum_and_vectors():
    f = svd(np.eye(3))
    assert np.allclose(f.s, [1.0, 1.0, 1.0])
    # Vectors form a signed permutation of the standard basis.
    assert np.allclose(np.abs(f.u), np.eye(3), atol=1e-12)
    assert np.allclose(np.abs(f.v), np.eye(3), atol=1e-12)
    assert f.degenerate  # repeated singular values


def test_diagonal_case_up_to_sign_convention():
    f = svd(np.diag([3.0, 2.0, 1.0]))
    assert np.allclose(f.s, [3.0, 2.0, 1.0])
    assert np.allclose(f.u, np.eye(3))
    assert np.allclose(f.v, np.eye(3))
    assert not f.degenerate


def test_reconstruction_oracle_random(rng):
    w = rng.standard_normal((8, 6))
    f = svd(w)
    # Direct triple-product evaluation, independent of reconstruct().
    triple = f.u[:, : f.rank] @ np.diag(f.s) @ f.v[:, : f.rank].T
    assert np.linalg.norm(triple - w) / np.linalg.norm(w) < 1e-10
    assert np.linalg.norm(reconstruct(f, range(f.rank)) - w) / np.linalg.norm(w) < 1e-10


@pytest.mark.parametrize("shape", [(5, 5), (17, 9), (9, 17), (1, 7), (64, 48)])
def test_invariants_across_shapes(rng, shape):
    w = rng.standard_normal(shape)
    f = svd(w)
    m, n = shape
    assert (np.diff(f.s) <= 0).all() and (f.s >= 0).all()
    assert np.abs(f.u.T @ f.u - np.eye(m)).max() < 1e-8
    assert np.abs(f.v.T @ f.v - np.eye(n)).max() < 1e-8
    full = reconstruct(f, range(f.rank))
    assert np.linalg.norm(full - w) / np.linalg.norm(w) < 1e-10


def test_sign_convention_bitwise_deterministic(rng):
    w = rng.standard_normal((12, 10))
    f1, f2 = svd(w), svd(w)
    assert np.array_equal(f1.u, f2.u)
    assert np.array_equal(f1.v, f2.v)
    assert np.array_equal(f1.s, f2.s)


def test_sign_convention_peak_entries_positive(rng):
    w = rng.standard_normal((9, 7))
    f = svd(w)
    for i in range(9):
        col = f.u[:, i]
        assert col[np.argmax(np.abs(col))] > 0.0


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        svd(np.array([[1.0, np.nan], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        svd(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_rejects_bad_shapes():
    with pytest.raises(ValueError):
        svd(np.ones(3))
    with pytest.raises(ValueError):
        svd(np.ones((0, 3)))


def test_degeneracy_flag():
    assert svd(np.zeros((3, 3)) + np.diag([1.0, 1.0, 0.5])).degenerate
    assert svd(np.zeros((2, 2))).degenerate
    assert not svd(np.diag([5.0, 1.0])).degenerate


def test_factorization_is_immutable(rng):
    f = svd(rng.standard_normal((4, 4)))
    with pytest.raises(ValueError):
        f.u[0, 0] = 7.0


def test_reconstruct_subsets():
    f = svd(np.diag([3.0, 2.0, 1.0]))
    assert np.array_equal(reconstruct(f, []), np.zeros((3, 3)))
    assert np.allclose(reconstruct(f, [0]), np.diag([3.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        reconstruct(f, [3])
    with pytest.raises(ValueError):
        reconstruct(f, [-1])


def test_frobenius_inner_identity_and_orthogonal():
    eye = np.eye(3)
    assert frobenius_inner(eye, eye) == 3.0
    e12 = np.zeros((3, 3))
    e12[0, 1] = 1.0
    e21 = np.zeros((3, 3))
    e21[1, 0] = 1.0
    assert frobenius_inner(e12, e21) == 0.0


def test_frobenius_inner_matches_entrywise_sum(rng):
    a = rng.standard_normal((4, 4))
    b = rng.standard_normal((4, 4))
    oracle = sum(a[i, j] * b[i, j] for i in range(4) for j in range(4))
    assert abs(frobenius_inner(a, b) - oracle) < 1e-12


def test_frobenius_inner_shape_mismatch():
    with pytest.raises(ValueError):
        frobenius_inner(np.ones((2, 3)), np.ones((3, 2)))


def test_numerical_error_is_distinct_type():
    assert issubclass(NumericalError, RuntimeError)
    assert not issubclass(NumericalError, ValueError)
