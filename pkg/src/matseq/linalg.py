"""Self-contained numerical oracles for the nine matrix tasks.

Symmetric eigendecomposition uses cyclic Jacobi rotations (provably
convergent, directly testable orthogonality); SVD is built on it via the
Gram matrices; inversion is Gauss-Jordan with partial pivoting. A batched
Jacobi path exists because the statistical checks decompose 10^5 matrices
at a time. Speed beyond that scale is a non-goal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    NoConvergenceError,
    NotSymmetricError,
    ShapeError,
    SingularMatrixError,
)
from .serialize import as_matrix

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 60
PIVOT_TOL = 1e-12
SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues sorted descending; row i of `vectors` is the unit eigenvector of values[i]."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class SvdResult:
    """Descending singular values with U (k x m, rows = left vectors) and
    V (n x k, columns = right vectors) such that U @ M @ V = diag(singular)."""

    singular: np.ndarray
    u: np.ndarray
    v: np.ndarray


# ---------------------------------------------------------------------------
# Elementary operations


def transpose(m) -> np.ndarray:
    return as_matrix(m).T.copy()


def add(m, n) -> np.ndarray:
    m, n = as_matrix(m), as_matrix(n)
    if m.shape != n.shape:
        raise ShapeError(f"cannot add {m.shape} and {n.shape}")
    return m + n


def matmul(m, n) -> np.ndarray:
    m, n = as_matrix(m), as_matrix(n)
    if m.shape[1] != n.shape[0]:
        raise ShapeError(f"cannot multiply {m.shape} by {n.shape}")
    return m @ n


def matvec(m, v) -> np.ndarray:
    return matmul(m, v)


# ---------------------------------------------------------------------------
# Batched cyclic Jacobi


def _check_symmetric_batch(mats: np.ndarray) -> np.ndarray:
    scale = np.abs(mats).max(axis=(1, 2))
    drift = np.abs(mats - mats.transpose(0, 2, 1)).max(axis=(1, 2))
    bad = drift > SYMMETRY_TOL * np.maximum(scale, 1e-300)
    if np.any(bad):
        raise NotSymmetricError(
            f"{int(bad.sum())} of {len(mats)} matrices are not symmetric "
            f"(max relative asymmetry {float((drift / np.maximum(scale, 1e-300)).max()):.3e})"
        )
    return 0.5 * (mats + mats.transpose(0, 2, 1))


def _jacobi_batch(mats: np.ndarray, want_vectors: bool, tol: float, max_sweeps: int):
    """Diagonalise a (B, n, n) stack of symmetric matrices in lockstep.

    Returns (values, vectors_or_None, converged_mask); values are unsorted
    diagonals. Rotations follow the same cyclic (p, q) schedule for every
    matrix, with per-matrix angles; matrices whose off-diagonal entries are
    already below their threshold get identity rotations.
    """
    batch, n = mats.shape[0], mats.shape[1]
    # batch-last layout: every slice touched below is (nearly) contiguous
    a = np.ascontiguousarray(mats.transpose(1, 2, 0))
    vecs = None
    if want_vectors:
        vecs = np.zeros((n, n, batch))
        vecs[np.arange(n), np.arange(n), :] = 1.0
    fro = np.sqrt((mats * mats).sum(axis=(1, 2)))
    thresh = tol * fro
    iu = np.triu_indices(n, k=1)
    converged = np.zeros(batch, dtype=bool)
    if n == 1:
        values = a[0].copy().T
        if want_vectors:
            vecs = vecs.transpose(2, 0, 1).copy()
        return values, vecs, np.ones(batch, dtype=bool)
    new_p = np.empty((n, batch))
    new_q = np.empty((n, batch))
    tmp = np.empty((n, batch))
    for _ in range(max_sweeps):
        off = np.abs(a[iu[0], iu[1]]).max(axis=0)
        converged = off <= thresh
        if converged.all():
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q].copy()
                skip = np.abs(apq) <= thresh
                theta = 0.5 * np.arctan2(2.0 * apq, a[p, p] - a[q, q])
                c = np.cos(theta)
                s = np.sin(theta)
                c[skip] = 1.0
                s[skip] = 0.0
                rp, rq = a[p], a[q]
                # row mix (G @ A), then fix the (p, q) block for the column
                # mix; the remaining columns follow by symmetry.
                np.multiply(c, rp, out=new_p)
                np.multiply(s, rq, out=tmp)
                new_p += tmp
                np.multiply(c, rq, out=new_q)
                np.multiply(s, rp, out=tmp)
                new_q -= tmp
                bpp = c * new_p[p] + s * new_p[q]
                bqq = c * new_q[q] - s * new_q[p]
                zeroed = np.where(skip, apq, 0.0)
                new_p[p] = bpp
                new_p[q] = zeroed
                new_q[p] = zeroed
                new_q[q] = bqq
                a[p] = new_p
                a[q] = new_q
                a[:, p] = new_p
                a[:, q] = new_q
                if want_vectors:
                    vp, vq = vecs[p], vecs[q]
                    np.multiply(c, vp, out=new_p)
                    np.multiply(s, vq, out=tmp)
                    new_p += tmp
                    np.multiply(c, vq, out=new_q)
                    np.multiply(s, vp, out=tmp)
                    new_q -= tmp
                    vecs[p] = new_p
                    vecs[q] = new_q
    else:
        off = np.abs(a[iu[0], iu[1]]).max(axis=0)
        converged = off <= thresh
    values = a[np.arange(n), np.arange(n)].T.copy()
    if want_vectors:
        vecs = vecs.transpose(2, 0, 1).copy()
    return values, vecs, converged


def _sort_descending(values: np.ndarray, vectors: np.ndarray | None):
    order = np.argsort(-values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    if vectors is not None:
        vectors = np.take_along_axis(vectors, order[:, :, None], axis=1)
        # sign convention: first nonzero component of each eigenvector positive
        lead_idx = np.argmax(vectors != 0.0, axis=2)
        lead = np.take_along_axis(vectors, lead_idx[:, :, None], axis=2)[:, :, 0]
        flip = np.where(lead < 0.0, -1.0, 1.0)
        vectors = vectors * flip[:, :, None]
    return values, vectors


def sym_eigen_batch(mats, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS,
                    want_vectors: bool = True):
    """Eigen-decompose a (B, n, n) stack of symmetric matrices.

    Returns (values (B, n) descending, vectors (B, n, n) or None with rows as
    eigenvectors). Raises NoConvergenceError naming how many matrices missed
    the sweep cap.
    """
    mats = np.asarray(mats, dtype=float)
    if mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
        raise ShapeError(f"expected a (B, n, n) stack, got {mats.shape}")
    mats = _check_symmetric_batch(mats)
    values, vectors, converged = _jacobi_batch(mats, want_vectors, tol, max_sweeps)
    if not converged.all():
        raise NoConvergenceError(
            f"{int((~converged).sum())} of {len(mats)} matrices did not converge "
            f"within {max_sweeps} sweeps"
        )
    return _sort_descending(values, vectors)


def sym_eigen(m, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS) -> EigenResult:
    """Cyclic-Jacobi eigendecomposition of one symmetric matrix."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got {m.shape}")
    values, vectors = sym_eigen_batch(m[None], tol=tol, max_sweeps=max_sweeps)
    return EigenResult(values[0], vectors[0])


def sym_eigvals_batch(mats, *, tol: float = JACOBI_TOL,
                      max_sweeps: int = JACOBI_MAX_SWEEPS) -> np.ndarray:
    values, _ = sym_eigen_batch(mats, tol=tol, max_sweeps=max_sweeps, want_vectors=False)
    return values


# ---------------------------------------------------------------------------
# Singular values / SVD


def _gram(m: np.ndarray) -> np.ndarray:
    g = m.T @ m
    return 0.5 * (g + g.T)


def singular_values(m) -> np.ndarray:
    """Square roots of the clamped-nonnegative eigenvalues of M^T M, descending."""
    m = as_matrix(m)
    values, _ = sym_eigen_batch(_gram(m)[None], want_vectors=False)
    return np.sqrt(np.clip(values[0], 0.0, None))


def _complete_orthonormal(rows: np.ndarray, count: int, dim: int) -> np.ndarray:
    """Extend `rows` (r x dim, orthonormal) with `count` more orthonormal rows."""
    basis = list(rows)
    for cand in np.eye(dim):
        if len(basis) >= rows.shape[0] + count:
            break
        w = cand.copy()
        for b in basis:
            w -= (w @ b) * b
        nw = np.linalg.norm(w)
        if nw > 1e-8:
            basis.append(w / nw)
    return np.array(basis[rows.shape[0]:])


def svd(m, *, max_sweeps: int = JACOBI_MAX_SWEEPS) -> SvdResult:
    """Singular value decomposition with the U @ M @ V = S convention.

    One-sided Jacobi: rotate column pairs of M until all columns are mutually
    orthogonal; their norms are the singular values, with far better relative
    accuracy on ill-conditioned inputs than the Gram-matrix route.
    """
    m = as_matrix(m)
    rows, cols = m.shape
    if cols > rows:
        # orthogonalising more columns than dimensions cannot converge; work
        # on the transpose and swap the factor roles (V^T M U^T = S^T = S)
        inner = svd(m.T, max_sweeps=max_sweeps)
        return SvdResult(inner.singular, np.ascontiguousarray(inner.v.T),
                         np.ascontiguousarray(inner.u.T))
    k = min(rows, cols)
    w = m.astype(float).copy()
    v = np.eye(cols)
    scale = float(np.abs(m).max())
    tiny = (1e-14 * scale * math.sqrt(rows)) ** 2
    converged = scale == 0.0
    for _ in range(max_sweeps):
        if converged:
            break
        converged = True
        for i in range(cols - 1):
            for j in range(i + 1, cols):
                wi, wj = w[:, i], w[:, j]
                b = float(wi @ wj)
                a = float(wi @ wi)
                c = float(wj @ wj)
                if a <= tiny and c <= tiny:  # numerically zero columns
                    continue
                if abs(b) <= 1e-15 * math.sqrt(a * c):  # zero columns skip via b == 0
                    continue
                converged = False
                theta = 0.5 * math.atan2(2.0 * b, a - c)
                cs, sn = math.cos(theta), math.sin(theta)
                new_i = cs * wi + sn * wj
                new_j = cs * wj - sn * wi
                w[:, i], w[:, j] = new_i, new_j
                vi, vj = v[:, i].copy(), v[:, j].copy()
                v[:, i] = cs * vi + sn * vj
                v[:, j] = cs * vj - sn * vi
    if not converged:
        raise NoConvergenceError(f"one-sided rotations missed the cap of {max_sweeps} sweeps")
    norms = np.sqrt((w * w).sum(axis=0))
    order = np.argsort(-norms, kind="stable")[:k]
    sig = norms[order]
    cutoff = 1e-13 * max(float(sig[0]) if k else 0.0, 1e-300)
    u = np.zeros((k, rows))
    deferred = []
    for out_idx, col in enumerate(order):
        if norms[col] > cutoff:
            u[out_idx] = w[:, col] / norms[col]
        else:
            deferred.append(out_idx)
    if deferred:
        have = u[[i for i in range(k) if i not in deferred]]
        extra = _complete_orthonormal(have if have.size else np.zeros((0, rows)),
                                      len(deferred), rows)
        for j, out_idx in enumerate(deferred):
            u[out_idx] = extra[j]
            sig[out_idx] = 0.0
    return SvdResult(sig, u, np.ascontiguousarray(v[:, order]))


def condition_number(m) -> float:
    """Ratio of the largest to smallest singular value; inf when singular."""
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"condition number needs a square matrix, got {m.shape}")
    sig = singular_values(m)
    if sig[-1] == 0.0:
        return float("inf")
    return float(sig[0] / sig[-1])


# ---------------------------------------------------------------------------
# Inversion / determinant


def invert(m, *, pivot_tol: float = PIVOT_TOL) -> np.ndarray:
    """Gauss-Jordan elimination with partial pivoting."""
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"cannot invert a {m.shape} matrix")
    scale = float(np.abs(m).max())
    if scale == 0.0:
        raise SingularMatrixError("zero matrix")
    aug = np.hstack([m.astype(float), np.eye(n)])
    for col in range(n):
        piv = col + int(np.argmax(np.abs(aug[col:, col])))
        if abs(aug[piv, col]) <= pivot_tol * scale:
            raise SingularMatrixError(f"pivot {aug[piv, col]:.3e} below {pivot_tol:g} * max|m|")
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        aug[col] /= aug[col, col]
        others = np.arange(n) != col
        aug[others] -= np.outer(aug[others, col], aug[col])
    return aug[:, n:]


def determinant(m) -> float:
    """Determinant via LU with partial pivoting (0.0 for singular input)."""
    m = as_matrix(m)
    n = m.shape[0]
    if m.shape[0] != m.shape[1]:
        raise ShapeError(f"determinant needs a square matrix, got {m.shape}")
    lu = m.astype(float).copy()
    det = 1.0
    for col in range(n):
        piv = col + int(np.argmax(np.abs(lu[col:, col])))
        if lu[piv, col] == 0.0:
            return 0.0
        if piv != col:
            lu[[col, piv]] = lu[[piv, col]]
            det = -det
        det *= lu[col, col]
        if col + 1 < n:
            factors = lu[col + 1:, col] / lu[col, col]
            lu[col + 1:, col:] -= np.outer(factors, lu[col, col:])
    return float(det)
