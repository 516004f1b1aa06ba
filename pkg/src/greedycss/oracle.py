"""Ground truth for small instances.

Conventions: ``sigma_min`` / ``sigma_max`` are the extreme *squared*
singular values of the matrix whose columns are the unit-normalized
vectors of a set, i.e. extreme eigenvalues of its Gram matrix, and
``kappa = sigma_max / sigma_min``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._rng import substream
from .errors import ConvergenceError, GuardError
from .matcore import as_column_set, as_dense, normalized_columns
from .objective import coverage_naive

MAX_SUBSETS = 10**6
MAX_PCA_DIM = 500
ZERO_EIG_RTOL = 1e-12


@dataclass(frozen=True)
class SpectrumStats:
    sigma_min: float
    sigma_max: float
    kappa: float
    eigenvalues: tuple = ()


@dataclass(frozen=True)
class OptResult:
    opt_set: tuple
    opt_value: float
    spectrum: SpectrumStats
    subsets_evaluated: int


def jacobi_eigvalsh(M, tol: float = 1e-12, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues (ascending) of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm is below ``tol`` times
    the Frobenius norm of ``M``.
    """
    a = np.array(M, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max(initial=0.0))):
        raise ValueError("matrix must be symmetric")
    a = 0.5 * (a + a.T)
    scale = np.linalg.norm(a)
    if n < 2 or scale == 0.0:
        return np.sort(np.diag(a).copy())
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = math.sqrt(float(np.sum(a[offdiag] ** 2)))
        if off <= tol * scale:
            return np.sort(np.diag(a).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap, aq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
    raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")


def spectrum(B, S: Sequence[int]) -> SpectrumStats:
    """Squared singular values of the normalized columns ``B[S]``."""
    Bd = as_dense(B)
    S = as_column_set(S, Bd.shape[1])
    if not S:
        raise ValueError("spectrum of an empty set is undefined")
    V = np.column_stack(normalized_columns(Bd, S))
    eig = jacobi_eigvalsh(V.T @ V)
    eig = np.where(np.abs(eig) <= ZERO_EIG_RTOL * len(S), 0.0, eig)
    lo, hi = float(max(eig[0], 0.0)), float(eig[-1])
    kappa = math.inf if lo == 0.0 else hi / lo
    return SpectrumStats(lo, hi, kappa, tuple(float(e) for e in eig))


def brute_force_opt(A, B, k: int) -> OptResult:
    """Best ``k``-subset of B's columns for covering A, by full enumeration.

    Ties go to the lexicographically smallest index tuple.
    """
    Bd = as_dense(B)
    n_b = Bd.shape[1]
    if not 1 <= k <= n_b:
        raise ValueError(f"k must be in [1, {n_b}], got {k}")
    total = math.comb(n_b, k)
    if total > MAX_SUBSETS:
        raise GuardError(f"C({n_b}, {k}) = {total} subsets exceeds the {MAX_SUBSETS} guard")
    A = as_dense(A)
    best, best_val = None, -1.0
    for S in itertools.combinations(range(n_b), k):
        val = coverage_naive(A, Bd[:, S])
        if best is None or val > best_val + 1e-12 * max(1.0, best_val):
            best, best_val = S, val
    try:
        spec = spectrum(Bd, best)
    except ValueError:
        spec = SpectrumStats(0.0, 0.0, math.inf)
    return OptResult(best, float(best_val), spec, total)


def make_tight_example(n: int, theta: float) -> tuple:
    """Instance on which greedy needs ~1/(theta^2 eps) picks.

    Ambient dimension ``n + 1`` with basis e_0..e_n. ``A`` is the single
    column e_0; ``B`` holds e_1, theta*e_0 + e_1 and 2*theta*e_0 + e_j for
    j = 2..n, in that order and unnormalized.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < theta < 1.0:
        raise ValueError("theta must lie in (0, 1)")
    dim = n + 1
    A = np.zeros((dim, 1))
    A[0, 0] = 1.0
    B = np.zeros((dim, n + 1))
    B[1, 0] = 1.0
    B[0, 1], B[1, 1] = theta, 1.0
    for j in range(2, n + 1):
        B[0, j] = 2.0 * theta
        B[j, j] = 1.0
    return A, B


def tight_example_coverage(theta: float, t: int) -> float:
    """Target coverage after ``t`` greedy picks on the tight example."""
    c = 4.0 * theta * theta
    return c / (1.0 / t + c)


def pca_upper_bound(A, k: int, tol: float = 1e-10, max_iter: int = 10**4,
                    oversample: int = 5) -> float:
    """Sum of the ``k`` largest squared singular values, by orthogonal iteration."""
    A = as_dense(A)
    m, n = A.shape
    if min(m, n) > MAX_PCA_DIM:
        raise GuardError(f"min(m, n) = {min(m, n)} exceeds the {MAX_PCA_DIM} guard")
    if k < 1:
        raise ValueError("k must be positive")
    M = A.T @ A if n <= m else A @ A.T
    dim = M.shape[0]
    if k >= dim:
        return float(np.trace(M))
    p = min(dim, k + oversample)
    rng = substream(0, "pca")
    Q, _ = np.linalg.qr(rng.standard_normal((dim, p)))
    prev = None
    for _ in range(max_iter):
        Q, _ = np.linalg.qr(M @ Q)
        ritz = jacobi_eigvalsh(Q.T @ M @ Q)
        val = float(np.sum(ritz[-k:]))
        if prev is not None and abs(val - prev) <= tol * max(abs(val), 1e-300):
            return val
        prev = val
    raise ConvergenceError(f"orthogonal iteration did not converge in {max_iter} steps")


def make_random_instance(m: int, n_a: int, n_b: int, rank_hint: int, seed: int,
                         noise: float = 0.0, independent_b: bool = False) -> tuple:
    """``A = L R^T + noise``; ``B = A`` unless ``independent_b`` (then B is a
    separate pool drawn the same way, needing ``n_b`` columns)."""
    if min(m, n_a, n_b, rank_hint) < 1:
        raise ValueError("dimensions must be positive")
    rng = substream(seed, "instance")

    def draw(cols):
        L = rng.standard_normal((m, rank_hint))
        R = rng.standard_normal((cols, rank_hint))
        X = L @ R.T
        if noise:
            X = X + noise * rng.standard_normal((m, cols))
        return X

    A = draw(n_a)
    if not independent_b:
        if n_b != n_a:
            raise ValueError("n_b must equal n_a when B = A")
        return A, A.copy()
    return A, draw(n_b)
