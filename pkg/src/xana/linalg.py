"""Rank, subspace-containment and noise-dominance primitives."""

from __future__ import annotations

import numpy as np

RANK_TOL_FACTOR = 64.0
SPAN_TOL = 1e-8


class PreconditionError(ValueError):
    """An operation was called outside its declared domain."""


def _as_matrix(A):
    A = np.asarray(A)
    if A.ndim == 1:
        A = A[:, None]
    if A.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {A.shape}")
    return A


def default_rank_tol(A, factor=RANK_TOL_FACTOR, s=None):
    A = _as_matrix(A)
    if s is None:
        s = np.linalg.svd(A, compute_uv=False)
    smax = s[0] if s.size else 0.0
    return max(A.shape) * smax * np.finfo(float).eps * factor


def numeric_rank(A, tol=None, factor=RANK_TOL_FACTOR):
    """Number of singular values of ``A`` above ``tol``.

    The default threshold is ``max(rows, cols) * sigma_max * eps * factor``.
    """
    A = _as_matrix(A)
    if A.size == 0:
        raise ValueError("numeric_rank of an empty matrix")
    s = np.linalg.svd(A, compute_uv=False)
    if tol is None:
        tol = default_rank_tol(A, factor, s)
    return int(np.count_nonzero(s > tol))


def orth_basis(A, tol=None, factor=RANK_TOL_FACTOR):
    """Orthonormal basis for the numerical column space of ``A``."""
    A = _as_matrix(A)
    if A.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=A.dtype)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    if tol is None:
        tol = default_rank_tol(A, factor, s)
    return U[:, s > tol]


def span_contained(B, A, tol=SPAN_TOL, rank_factor=RANK_TOL_FACTOR):
    """Test ``span(B) <= span(A)``.

    Returns ``(contained, residual)`` with the relative Frobenius residual
    ``||(I - P_A) B||_F / max(||B||_F, eps)``.
    """
    A = _as_matrix(A)
    B = _as_matrix(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"row counts differ: B has {B.shape[0]}, A has {A.shape[0]}")
    nb = np.linalg.norm(B)
    if nb == 0:
        return True, 0.0
    Q = orth_basis(A, factor=rank_factor) if A.size else np.zeros((A.shape[0], 0))
    R = B - Q @ (Q.conj().T @ B)
    residual = float(np.linalg.norm(R) / max(nb, np.finfo(float).eps))
    return residual < tol, residual


def noise_dominance(A, Bs, lambdas, tol=SPAN_TOL, rank_factor=RANK_TOL_FACTOR):
    """Check that in-span terms do not raise the rank of ``A A^H``.

    Every ``B_i`` must lie in ``span(A)``; a violation raises
    :class:`PreconditionError` naming the offending index. Returns whether
    ``rank(A A^H + sum_i lambda_i B_i B_i^H) == rank(A A^H)``.
    """
    A = _as_matrix(A)
    Bs = [_as_matrix(B) for B in Bs]
    if len(Bs) != len(lambdas):
        raise ValueError("need one weight per B_i")
    rows, cols = A.shape
    if rows < cols:
        raise PreconditionError(f"A must be tall, got {A.shape}")
    for i, (B, lam) in enumerate(zip(Bs, lambdas)):
        if B.shape[0] != rows or B.shape[1] > cols:
            raise PreconditionError(f"B[{i}] has shape {B.shape}, incompatible with A {A.shape}")
        if lam < 0:
            raise PreconditionError(f"lambda[{i}] = {lam} is negative")
        ok, res = span_contained(B, A, tol=tol, rank_factor=rank_factor)
        if not ok:
            raise PreconditionError(f"B[{i}] is not contained in span(A) (residual {res:.3e})")
    base = A @ A.conj().T
    total = base.copy()
    for B, lam in zip(Bs, lambdas):
        total += lam * (B @ B.conj().T)
    return numeric_rank(total, factor=rank_factor) == numeric_rank(base, factor=rank_factor)
