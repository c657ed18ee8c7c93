"""Numerical oracles: Jacobi eigendecomposition, SVD, inversion, determinants."""

import numpy as np
import pytest

from matseq import linalg
from matseq.errors import (
    NoConvergenceError,
    NotSymmetricError,
    ShapeError,
    SingularMatrixError,
)

from oracles import charpoly_eigenvalues

def _rng(seed=12345):
    return np.random.default_rng(seed)


RNG = _rng()


def random_symmetric(n, rng=None, amplitude=10.0):
    rng = RNG if rng is None else rng
    m = rng.uniform(-amplitude, amplitude, (n, n))
    return 0.5 * (m + m.T)


# --- elementary -------------------------------------------------------------

def test_transpose():
    m = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(linalg.transpose(m), [[1.0, 3.0], [2.0, 4.0]])
    r = RNG.uniform(-1, 1, (2, 3))
    assert linalg.transpose(r).shape == (3, 2)
    assert np.array_equal(linalg.transpose(linalg.transpose(r)), r)


def test_add():
    m = RNG.uniform(-1, 1, (3, 4))
    assert np.array_equal(linalg.add(m, np.zeros((3, 4))), m)
    with pytest.raises(ShapeError):
        linalg.add(m, np.zeros((4, 3)))


def test_matmul_and_matvec():
    m = RNG.uniform(-1, 1, (4, 3))
    assert np.allclose(linalg.matmul(np.eye(4), m), m)
    v = RNG.uniform(-1, 1, (3, 1))
    expected = np.array([[sum(m[i, k] * v[k, 0] for k in range(3))] for i in range(4)])
    assert np.allclose(linalg.matvec(m, v), expected)
    with pytest.raises(ShapeError):
        linalg.matmul(m, m)


# --- symmetric eigendecomposition -------------------------------------------

def test_eigen_2x2_analytic():
    res = linalg.sym_eigen([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(res.values, [3.0, 1.0])
    assert np.allclose(np.abs(res.vectors), np.full((2, 2), 1 / np.sqrt(2)))


def test_eigen_diagonal_input():
    d = np.diag([3.0, -1.0, 7.0])
    res = linalg.sym_eigen(d)
    assert np.array_equal(res.values, [7.0, 3.0, -1.0])
    # rows of Q are permuted identity rows with positive leading entries
    assert np.allclose(np.abs(res.vectors).sum(axis=1), 1.0)
    assert np.allclose(res.vectors @ d @ res.vectors.T, np.diag(res.values))


def test_eigen_residuals_random():
    for n in range(2, 11):
        mats = np.stack([random_symmetric(n) for _ in range(40)])
        values, vectors = linalg.sym_eigen_batch(mats)
        assert np.all(np.diff(values, axis=1) <= 1e-12)
        d = np.zeros_like(mats)
        idx = np.arange(n)
        d[:, idx, idx] = values
        recon = np.matmul(np.matmul(vectors, mats), vectors.transpose(0, 2, 1))
        resid = np.abs(recon - d).sum(axis=(1, 2)) / np.abs(d).sum(axis=(1, 2))
        assert resid.max() <= 1e-9
        gram = np.matmul(vectors, vectors.transpose(0, 2, 1)) - np.eye(n)
        assert np.abs(gram).max() <= 1e-10


def test_eigen_trace_and_determinant_conservation():
    for _ in range(60):
        n = int(RNG.integers(2, 8))
        m = random_symmetric(n)
        values = linalg.sym_eigen(m).values
        assert abs(values.sum() - np.trace(m)) <= 1e-8 * np.abs(values).sum()
        det = linalg.determinant(m)
        assert abs(np.prod(values) - det) <= 1e-6 * max(np.prod(np.abs(values)), 1e-300)


def test_eigen_matches_charpoly_oracle():
    for _ in range(40):
        n = int(RNG.integers(2, 6))
        m = random_symmetric(n)
        mine = np.sort(linalg.sym_eigen(m).values)
        oracle = charpoly_eigenvalues(m)
        assert np.max(np.abs(mine - oracle)) <= 1e-8


def test_eigen_matches_numpy():
    for n in (2, 5, 9):
        m = random_symmetric(n)
        assert np.allclose(np.sort(linalg.sym_eigen(m).values), np.linalg.eigvalsh(m),
                           atol=1e-9)


def test_eigen_sign_convention_deterministic():
    m = random_symmetric(6)
    a = linalg.sym_eigen(m).vectors
    b = linalg.sym_eigen(m.copy()).vectors
    assert np.array_equal(a, b)
    for row in a:
        lead = row[np.nonzero(row)[0][0]]
        assert lead > 0


def test_eigen_errors():
    with pytest.raises(NotSymmetricError):
        linalg.sym_eigen([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ShapeError):
        linalg.sym_eigen(np.ones((2, 3)))
    with pytest.raises(NoConvergenceError):
        linalg.sym_eigen(random_symmetric(5), max_sweeps=0)


def test_eigen_n1():
    res = linalg.sym_eigen([[4.0]])
    assert res.values[0] == 4.0 and res.vectors[0, 0] == 1.0


# --- singular values / SVD ---------------------------------------------------

def test_singular_values_symmetric_relation():
    m = random_symmetric(5)
    eig = np.sort(np.abs(linalg.sym_eigen(m).values))[::-1]
    sig = linalg.singular_values(m)
    assert np.allclose(sig, eig, atol=1e-8)


def test_singular_values_diag():
    assert np.allclose(linalg.singular_values(np.diag([3.0, -4.0])), [4.0, 3.0])


def test_svd_identity():
    res = linalg.svd(np.eye(3))
    assert np.allclose(res.singular, 1.0)
    assert np.allclose(res.u @ np.eye(3) @ res.v, np.eye(3))


def test_svd_rank_one():
    rng = _rng(77)
    u = rng.uniform(-1, 1, 4)
    v = rng.uniform(-1, 1, 4)
    m = np.outer(u, v)
    sig = linalg.svd(m).singular
    assert (sig >= 1e-9 * sig[0]).sum() == 1


def test_svd_reconstruction_random():
    rng = _rng(42)
    for _ in range(200):
        m = rng.uniform(-10, 10, (4, 4))
        res = linalg.svd(m)
        s = np.diag(res.singular)
        assert np.abs(res.u @ m @ res.v - s).sum() <= 1e-9 * np.abs(s).sum()
        assert np.all(np.diff(res.singular) <= 1e-12)
        assert np.abs(res.u @ res.u.T - np.eye(4)).max() <= 1e-10
        assert np.abs(res.v.T @ res.v - np.eye(4)).max() <= 1e-10


@pytest.mark.parametrize("shape", [(3, 5), (5, 3), (2, 2), (6, 4)])
def test_svd_rectangular(shape):
    m = RNG.uniform(-5, 5, shape)
    res = linalg.svd(m)
    k = min(shape)
    assert res.singular.shape == (k,)
    assert res.u.shape == (k, shape[0]) and res.v.shape == (shape[1], k)
    assert np.abs(res.u @ m @ res.v - np.diag(res.singular)).max() <= 1e-9
    assert np.allclose(res.singular, np.linalg.svd(m, compute_uv=False), atol=1e-9)


def test_svd_zero_matrix():
    res = linalg.svd(np.zeros((3, 3)))
    assert np.allclose(res.singular, 0.0)
    assert np.abs(res.u @ res.u.T - np.eye(3)).max() <= 1e-10


# --- inversion / determinant --------------------------------------------------

def test_invert_identity_and_adjugate():
    assert np.array_equal(linalg.invert(np.eye(4)), np.eye(4))
    m = np.array([[4.0, 7.0], [2.0, 6.0]])
    adj = np.array([[6.0, -7.0], [-2.0, 4.0]]) / 10.0
    assert np.allclose(linalg.invert(m), adj, atol=1e-14)


def test_invert_involution_and_residual():
    count = 0
    while count < 50:
        m = RNG.uniform(-10, 10, (5, 5))
        if linalg.condition_number(m) >= 1e3:
            continue
        count += 1
        inv = linalg.invert(m)
        assert np.abs(inv @ m - np.eye(5)).sum() / 5 <= 1e-10
        assert np.allclose(linalg.invert(inv), m, atol=1e-8)


def test_invert_singular():
    with pytest.raises(SingularMatrixError):
        linalg.invert(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(SingularMatrixError):
        linalg.invert(np.zeros((2, 2)))
    with pytest.raises(ShapeError):
        linalg.invert(np.ones((2, 3)))


def test_determinant():
    assert linalg.determinant(np.eye(3)) == 1.0
    assert abs(linalg.determinant([[1.0, 2.0], [3.0, 4.0]]) + 2.0) < 1e-14
    assert linalg.determinant([[1.0, 2.0], [2.0, 4.0]]) == 0.0
    m = RNG.uniform(-3, 3, (6, 6))
    assert np.isclose(linalg.determinant(m), np.linalg.det(m), rtol=1e-10)


# --- condition number ----------------------------------------------------------

def test_condition_number():
    q = linalg.sym_eigen(random_symmetric(5)).vectors  # orthogonal
    assert abs(linalg.condition_number(q) - 1.0) <= 1e-6
    assert np.isclose(linalg.condition_number(np.diag([10.0, 1.0])), 10.0)
    # a zero column gives an exactly-zero singular value
    assert linalg.condition_number(np.array([[1.0, 0.0], [1.0, 0.0]])) == np.inf
    # an exactly-dependent pair is only singular up to roundoff
    assert linalg.condition_number(np.array([[1.0, 1.0], [1.0, 1.0]])) > 1e12


def test_condition_number_vs_oracle():
    m = RNG.uniform(-5, 5, (3, 3))
    gram = m.T @ m
    roots = charpoly_eigenvalues(0.5 * (gram + gram.T))
    sig = np.sqrt(np.clip(np.sort(roots)[::-1], 0, None))
    assert np.isclose(linalg.condition_number(m), sig[0] / sig[-1], rtol=1e-6)
