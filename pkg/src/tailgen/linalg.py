"""Symmetric eigendecomposition and PSD matrix square root.

The eigensolver runs cyclic Jacobi sweeps in round-robin (tournament)
order: each round rotates n/2 disjoint index pairs simultaneously, which
keeps the inner loop fully vectorized while still visiting every
off-diagonal pair exactly once per sweep. Good for the dense symmetric
matrices up to a few hundred rows that the Frechet evaluator produces.
"""

from __future__ import annotations

import numpy as np

from .errors import ContractError, NotPsdError, NumericError, ShapeError
from .matrix import Matrix, _as_array

MAX_SWEEPS = 100
OFF_DIAG_TOL = 1e-12  # relative to the largest input magnitude
SYMMETRY_TOL = 1e-9


def _round_robin_rounds(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Pairings of the circle method: n-1 rounds of disjoint pairs (n padded even)."""
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a >= n or b >= n:  # bye slot for odd n
                continue
            ps.append(min(a, b))
            qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def sym_eig(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvectors of a symmetric matrix.

    Satisfies a = V @ diag(w) @ V.T. Raises ContractError when the input is
    not square-symmetric within 1e-9, NumericError when the sweeps fail to
    push the off-diagonal mass below tolerance.
    """
    arr = _as_array(a)
    n, m = arr.shape
    if n != m:
        raise ContractError(f"sym_eig needs a square matrix, got {arr.shape}")
    if n == 0:
        return np.zeros(0), np.zeros((0, 0))
    if np.abs(arr - arr.T).max() > SYMMETRY_TOL:
        raise ContractError("sym_eig input is not symmetric within 1e-9")

    A = np.ascontiguousarray((arr + arr.T) * 0.5)
    V = np.eye(n)
    if n == 1:
        return A[0].copy(), V

    scale = max(1.0, float(np.abs(A).max()))
    tol = OFF_DIAG_TOL * scale
    skip_eps = tol * 1e-3
    rounds = _round_robin_rounds(n)

    converged = False
    for _ in range(MAX_SWEEPS):
        off = np.abs(A - np.diag(np.diag(A))).max()
        if off <= tol:
            converged = True
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > skip_eps
            if not active.any():
                continue
            app, aqq = A[P, P], A[Q, Q]
            with np.errstate(divide="ignore", invalid="ignore"):
                tau = (aqq - app) / (2.0 * apq)
                t = np.where(tau >= 0.0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            c = np.where(active, c, 1.0)
            s = np.where(active, s, 0.0)

            # A <- J^T A J, all pairs at once (rows and columns are disjoint)
            rp, rq = A[P, :], A[Q, :]
            A[P, :] = c[:, None] * rp - s[:, None] * rq
            A[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = A[:, P], A[:, Q]
            A[:, P] = cp * c - cq * s
            A[:, Q] = cp * s + cq * c
            zp, zq = P[active], Q[active]
            A[zp, zq] = 0.0
            A[zq, zp] = 0.0

            vp, vq = V[:, P], V[:, Q]
            V[:, P] = vp * c - vq * s
            V[:, Q] = vp * s + vq * c
    if not converged and np.abs(A - np.diag(np.diag(A))).max() > tol:
        raise NumericError(f"Jacobi sweeps did not converge within {MAX_SWEEPS} sweeps")

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def sqrtm_psd(a):
    """Symmetric PSD square root X with X @ X ~= a.

    Eigenvalues in [-1e-6, 0) are treated as rounding noise and clamped to
    zero; anything more negative raises NotPsdError. Returns a Matrix when
    given one, else a plain array.
    """
    arr = _as_array(a)
    w, V = sym_eig(arr)
    if w.size and w.min() < -1e-6:
        raise NotPsdError(f"matrix is not PSD: min eigenvalue {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    X = (V * np.sqrt(w)) @ V.T
    X = (X + X.T) * 0.5
    if isinstance(a, Matrix):
        return Matrix(X)
    return X
