"""Coverage objective ``f_A(S) = ||P_S A||_F^2`` and incremental selection state.

The state keeps ``A`` and ``B`` with their projections onto the selected
span removed. With the residuals at hand the gain of candidate ``j`` is
``||R_A^T b'||^2`` with ``b'`` the normalized residual of ``B_j``, so no
re-orthogonalization of the selection is needed per evaluation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DeadCandidateError
from .matcore import as_dense

DEAD_TOL = 1e-12        # squared residual norm relative to the original squared norm
DEPENDENT_TOL = 1e-10   # residual norm relative to original norm in coverage_naive


@dataclass
class GainReport:
    candidate: int
    gain: float


@dataclass
class SelectionState:
    A_norm_sq: float
    residual_A: np.ndarray
    residual_B: np.ndarray
    ref_norms_sq: np.ndarray
    basis: np.ndarray
    coverage: float = 0.0
    selected: list = field(default_factory=list)
    dead_candidates: set = field(default_factory=set)
    gain_evaluations: int = 0

    @property
    def n_candidates(self) -> int:
        return self.residual_B.shape[1]

    def alive(self) -> np.ndarray:
        """Indices of candidates that are neither selected nor dead, ascending."""
        mask = np.ones(self.n_candidates, dtype=bool)
        if self.selected:
            mask[self.selected] = False
        if self.dead_candidates:
            mask[list(self.dead_candidates)] = False
        return np.flatnonzero(mask)


def orthonormalize(vectors, tol: float = DEPENDENT_TOL) -> np.ndarray:
    """Two-pass modified Gram-Schmidt; near-dependent vectors are dropped."""
    V = as_dense(vectors) if not isinstance(vectors, (list, tuple)) else (
        np.column_stack([np.asarray(v, dtype=np.float64).ravel() for v in vectors])
        if len(vectors) else None)
    if V is None:
        return np.zeros((0, 0))
    Q = []
    for j in range(V.shape[1]):
        v = V[:, j].copy()
        nrm0 = np.linalg.norm(v)
        if nrm0 == 0.0:
            continue
        for _ in range(2):
            for q in Q:
                v -= np.dot(q, v) * q
        nrm = np.linalg.norm(v)
        if nrm <= tol * nrm0:
            continue
        Q.append(v / nrm)
    if not Q:
        return np.zeros((V.shape[0], 0))
    return np.column_stack(Q)


def coverage_naive(A, V) -> float:
    """Reference ``f_A(V)``: orthonormalize ``V`` from scratch and project ``A``."""
    A = as_dense(A)
    if isinstance(V, (list, tuple)):
        if len(V) == 0:
            return 0.0
        for v in V:
            if np.asarray(v).size != A.shape[0]:
                raise ValueError(f"vector of length {np.asarray(v).size} does not match "
                                 f"{A.shape[0]} rows")
    else:
        V = as_dense(V)
        if V.shape[1] == 0:
            return 0.0
        if V.shape[0] != A.shape[0]:
            raise ValueError(f"vectors have {V.shape[0]} rows, A has {A.shape[0]}")
    Q = orthonormalize(V)
    if Q.shape[1] == 0:
        return 0.0
    P = Q.T @ A
    return float(np.einsum("ij,ij->", P, P))


def coverage_of(A, B, indices: Sequence[int]) -> float:
    """Exact ``f_A(B[indices])``."""
    B = as_dense(B)
    idx = list(indices)
    if not idx:
        return 0.0
    return coverage_naive(A, B[:, idx])


def init_state(A, B, prior_basis=None) -> SelectionState:
    """Fresh state; ``prior_basis`` columns are projected out before any pick.

    With a prior basis spanning ``C`` the state's coverage is ``f_A(C)`` and
    gains are those of ``V -> f_A(V | C)``.
    """
    A = np.array(as_dense(A), dtype=np.float64, order="F")
    B = np.array(as_dense(B), dtype=np.float64, order="F")
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but B has {B.shape[0]}")
    ref = np.einsum("ij,ij->j", B, B)
    a_sq = float(np.einsum("ij,ij->", A, A))
    basis = np.zeros((A.shape[0], 0))
    if prior_basis is not None:
        basis = orthonormalize(as_dense(prior_basis))
        if basis.shape[1]:
            for _ in range(2):
                A -= basis @ (basis.T @ A)
                B -= basis @ (basis.T @ B)
    state = SelectionState(A_norm_sq=a_sq, residual_A=A, residual_B=B,
                           ref_norms_sq=ref, basis=basis)
    state.coverage = a_sq - float(np.einsum("ij,ij->", A, A)) if basis.shape[1] else 0.0
    _refresh_dead(state)
    return state


def _residual_norms_sq(state):
    R = state.residual_B
    return np.einsum("ij,ij->j", R, R)


def _refresh_dead(state, norms_sq=None):
    if norms_sq is None:
        norms_sq = _residual_norms_sq(state)
    dead = (state.ref_norms_sq == 0.0) | (norms_sq < DEAD_TOL * state.ref_norms_sq)
    chosen = set(state.selected)
    state.dead_candidates |= {int(j) for j in np.flatnonzero(dead) if int(j) not in chosen}


def _check_candidate(state, j):
    if not 0 <= j < state.n_candidates:
        raise IndexError(f"candidate {j} out of range for {state.n_candidates} columns")
    if j in state.selected:
        raise ValueError(f"candidate {j} is already selected")


def marginal_gain(state: SelectionState, j: int) -> GainReport:
    j = int(j)
    _check_candidate(state, j)
    state.gain_evaluations += 1
    if j in state.dead_candidates:
        return GainReport(j, 0.0)
    b = state.residual_B[:, j]
    nsq = float(np.dot(b, b))
    if state.ref_norms_sq[j] == 0.0 or nsq < DEAD_TOL * state.ref_norms_sq[j]:
        state.dead_candidates.add(j)
        return GainReport(j, 0.0)
    p = state.residual_A.T @ b
    return GainReport(j, float(np.dot(p, p)) / nsq)


def all_gains(state: SelectionState, candidates=None) -> np.ndarray:
    """Vectorized :func:`marginal_gain` over ``candidates`` (default: all alive)."""
    cand = state.alive() if candidates is None else np.asarray(candidates, dtype=np.int64)
    if cand.size == 0:
        return np.zeros(0)
    state.gain_evaluations += int(cand.size)
    Rb = state.residual_B[:, cand]
    nsq = np.einsum("ij,ij->j", Rb, Rb)
    ref = state.ref_norms_sq[cand]
    dead = (ref == 0.0) | (nsq < DEAD_TOL * ref)
    P = state.residual_A.T @ Rb
    num = np.einsum("ij,ij->j", P, P)
    gains = np.zeros(cand.size)
    ok = ~dead
    gains[ok] = num[ok] / nsq[ok]
    if dead.any():
        state.dead_candidates |= {int(j) for j in cand[dead]}
    return gains


def commit(state: SelectionState, j: int) -> SelectionState:
    """Add candidate ``j``; updates residuals in place and returns the state."""
    j = int(j)
    _check_candidate(state, j)
    b = state.residual_B[:, j].copy()
    nsq = float(np.dot(b, b))
    if j in state.dead_candidates or state.ref_norms_sq[j] == 0.0 \
            or nsq < DEAD_TOL * state.ref_norms_sq[j]:
        raise DeadCandidateError(j)
    Q = state.basis
    if Q.shape[1]:
        b -= Q @ (Q.T @ b)
    b /= np.linalg.norm(b)
    pa = b @ state.residual_A
    gain = float(np.dot(pa, pa))
    state.residual_A -= np.outer(b, pa)
    state.residual_B -= np.outer(b, b @ state.residual_B)
    state.basis = np.column_stack([Q, b]) if Q.shape[1] else b.reshape(-1, 1)
    state.coverage += gain
    state.selected.append(j)
    state.dead_candidates.discard(j)
    _refresh_dead(state)
    return state


def exact_trace(A, B, chosen: Sequence[int], prior: Optional[Sequence[int]] = None) -> list:
    """True coverage after each prefix of ``chosen``, counting ``B[prior]`` as given.

    Used to re-score a selection made on sketched data.
    """
    if not len(chosen):
        return []
    B = as_dense(B)
    cols = [int(j) for j in chosen]
    state = init_state(A, B[:, cols], prior_basis=B[:, list(prior)] if prior else None)
    trace = []
    for j in range(len(cols)):
        if j not in state.dead_candidates:
            commit(state, j)
        trace.append(state.coverage)
    return trace
