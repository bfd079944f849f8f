"""Small dense linear algebra and log-domain special functions.

Everything here is a pure function of its arguments. Matrices are plain
2-D float64 ``numpy.ndarray`` objects in row-major layout; vectors are 1-D
arrays. Rank decisions use a relative singular-value cutoff.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

from .errors import NotSPD, RankDeficient

#: Default relative rank cutoff: singular values below DEFAULT_TOL times the
#: largest singular value count as zero.
DEFAULT_TOL = 1e-10


def as_matrix(rows: int, cols: int, entries) -> np.ndarray:
    """Build an (rows, cols) float64 matrix from a flat row-major sequence.

    Raises ValueError when the entry count does not match or any entry is
    not finite.
    """
    a = np.asarray(entries, dtype=float).reshape(-1)
    if a.size != rows * cols:
        raise ValueError(
            f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {a.size}"
        )
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must all be finite")
    return a.reshape(rows, cols)


def kernel_onb(m: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the null space of ``m``.

    Returns an (n, n - r) matrix whose columns are orthonormal and span
    ker(m), where r is the numerical rank of ``m`` at the relative cutoff
    ``tol``. The basis may be empty (zero columns) for full column rank.
    Column order and signs are arbitrary; callers must only rely on the
    spanned subspace.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if tol <= 0:
        raise ValueError("tol must be positive")
    _, s, vh = scipy.linalg.svd(m, full_matrices=True)
    rank = int(np.sum(s > tol * (s[0] if s.size else 0.0)))
    return vh[rank:].T.copy()


def matrix_rank(m: np.ndarray, tol: float = DEFAULT_TOL) -> int:
    """Numerical rank at the relative cutoff ``tol``."""
    s = scipy.linalg.svd(np.atleast_2d(np.asarray(m, dtype=float)), compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def least_norm_solution(m: np.ndarray, w, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Minimal-Euclidean-norm solution x of m @ x = w.

    Equals m.T @ inv(m @ m.T) @ w for full row rank; computed through the
    SVD so near-degenerate rows are detected rather than amplified.

    Raises RankDeficient when the numerical row rank of ``m`` is below the
    number of rows.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    w = np.asarray(w, dtype=float).reshape(-1)
    nrows = m.shape[0]
    if w.size != nrows:
        raise ValueError(f"rhs length {w.size} does not match {nrows} rows")
    u, s, vh = scipy.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > tol * (s[0] if s.size else 0.0)))
    if rank < nrows:
        raise RankDeficient(f"row rank {rank} < {nrows} at tol {tol:g}")
    return vh.T @ ((u.T @ w) / s)


def spd_solve_and_logdet(g: np.ndarray, rhs, sym_tol: float = 1e-8):
    """Solve g @ x = rhs for symmetric positive definite g; also ln det g.

    Returns (solution, logdet). Raises NotSPD when ``g`` is materially
    asymmetric or the Cholesky factorization meets a non-positive pivot.
    """
    g = np.atleast_2d(np.asarray(g, dtype=float))
    rhs = np.asarray(rhs, dtype=float)
    if g.shape[0] != g.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(1.0, float(np.abs(g).max()))
    if float(np.abs(g - g.T).max()) > sym_tol * scale:
        raise NotSPD("matrix is not symmetric within tolerance")
    try:
        chol = scipy.linalg.cholesky(0.5 * (g + g.T), lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc
    y = scipy.linalg.solve_triangular(chol, rhs, lower=True)
    x = scipy.linalg.solve_triangular(chol.T, y, lower=False)
    logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))
    return x, logdet


def cholesky_spd(g: np.ndarray) -> np.ndarray:
    """Lower-triangular factor C with C @ C.T = g, raising NotSPD on failure."""
    g = np.atleast_2d(np.asarray(g, dtype=float))
    try:
        return scipy.linalg.cholesky(0.5 * (g + g.T), lower=True)
    except scipy.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc


def log_surface_constant(j: int) -> float:
    """ln of the total surface measure of the unit j-sphere.

    The j-dimensional unit sphere has measure 2 pi^((j+1)/2) / Gamma((j+1)/2);
    the computation stays in log domain so it cannot overflow for any j that
    fits in memory (the linear-domain value overflows float64 near j ~ 350).
    """
    if j < 0:
        raise ValueError("sphere dimension must be >= 0")
    half = 0.5 * (j + 1)
    return math.log(2.0) + half * math.log(math.pi) - math.lgamma(half)
