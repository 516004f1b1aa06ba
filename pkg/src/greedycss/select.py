"""Single-machine selectors: greedy, lazier-than-lazy (sampled) greedy, random."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._rng import substream
from .matcore import as_dense, frobenius_sq
from .objective import SelectionState, all_gains, commit, coverage_of, init_state

TIE_RTOL = 1e-12


@dataclass
class SelectionResult:
    method: str
    chosen: tuple
    coverage_trace: list
    final_coverage: float
    coverage_ratio: float
    gain_evaluations: int
    wall_time: float
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "chosen": [int(j) for j in self.chosen],
            "coverage_trace": [float(c) for c in self.coverage_trace],
            "final_coverage": float(self.final_coverage),
            "coverage_ratio": float(self.coverage_ratio),
            "gain_evaluations": int(self.gain_evaluations),
            "wall_time": float(self.wall_time),
            "seed": self.seed,
            "params": dict(self.params),
        }


@dataclass(frozen=True)
class LazierParams:
    delta: float = 0.1
    sample_size_override: Optional[int] = None

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.sample_size_override is not None and self.sample_size_override < 1:
            raise ValueError("sample_size_override must be >= 1")

    def sample_size(self, n_b: int, k: int) -> int:
        if self.sample_size_override is not None:
            return int(self.sample_size_override)
        return max(1, math.ceil(n_b * math.log(1.0 / self.delta) / k))


def greedy_budget(k: int, epsilon: float, sigma_min: float, cap: Optional[int] = None) -> int:
    """Number of greedy steps ``ceil(16 k / (epsilon * sigma_min))``, optionally capped.

    ``sigma_min`` is the smallest *squared* singular value of the normalized
    benchmark set.
    """
    if sigma_min <= 0.0:
        if cap is None:
            raise ValueError("sigma_min must be positive when no cap is given")
        return int(cap)
    r = math.ceil(16 * k / (epsilon * sigma_min))
    return min(r, cap) if cap is not None else r


def _check_budget(r):
    if int(r) != r or r < 1:
        raise ValueError(f"selection budget must be a positive integer, got {r}")
    return int(r)


def _pick(cands: np.ndarray, gains: np.ndarray) -> int:
    """Candidate with the max gain; ``cands`` ascending, so near-ties go low."""
    gmax = gains.max()
    return int(cands[np.flatnonzero(gains >= gmax - TIE_RTOL * gmax)[0]])


def run_greedy(state: SelectionState, r: int, sample_size: Optional[int] = None,
               rng: Optional[np.random.Generator] = None) -> tuple:
    """Drive ``state`` for up to ``r`` picks. Returns (chosen, trace).

    With ``sample_size`` set each step only looks at a uniform sample (without
    replacement) of the alive candidates.
    """
    chosen, trace = [], []
    while len(chosen) < r:
        alive = state.alive()
        if alive.size == 0:
            break
        if sample_size is not None and alive.size > sample_size:
            cands = np.sort(rng.choice(alive, size=sample_size, replace=False))
        else:
            cands = alive
        gains = all_gains(state, cands)
        live = np.array([int(c) not in state.dead_candidates for c in cands])
        if not live.any():
            continue
        j = _pick(cands[live], gains[live])
        commit(state, j)
        chosen.append(j)
        trace.append(state.coverage)
    return chosen, trace


def _result(method, A, chosen, trace, evals, t0, seed=None, params=None, a_sq=None):
    a_sq = frobenius_sq(A) if a_sq is None else a_sq
    final = trace[-1] if trace else 0.0
    return SelectionResult(
        method=method, chosen=tuple(int(j) for j in chosen),
        coverage_trace=[float(c) for c in trace], final_coverage=float(final),
        coverage_ratio=float(final / a_sq) if a_sq > 0 else 0.0,
        gain_evaluations=int(evals), wall_time=time.perf_counter() - t0,
        seed=seed, params=dict(params or {}))


def greedy(A, B, r: int) -> SelectionResult:
    """Commit the max-gain candidate ``r`` times (fewer if every candidate dies)."""
    t0 = time.perf_counter()
    r = _check_budget(r)
    state = init_state(A, B)
    chosen, trace = run_greedy(state, r)
    return _result("greedy", A, chosen, trace, state.gain_evaluations, t0,
                   params={"r": r}, a_sq=state.A_norm_sq)


def lazier_greedy(A, B, r: int, params: LazierParams, seed: int,
                  k: Optional[int] = None) -> SelectionResult:
    """Sampled greedy; ``k`` (default ``r``) sets the per-step sample size."""
    t0 = time.perf_counter()
    r = _check_budget(r)
    k = r if k is None else _check_budget(k)
    state = init_state(A, B)
    s = params.sample_size(state.n_candidates, k)
    rng = substream(seed, "lazier")
    chosen, trace = run_greedy(state, r, sample_size=s, rng=rng)
    return _result("lazier", A, chosen, trace, state.gain_evaluations, t0, seed=seed,
                   params={"r": r, "k": k, "delta": params.delta, "sample_size": s},
                   a_sq=state.A_norm_sq)


def random_baseline(A, B, r: int, seed: int) -> SelectionResult:
    t0 = time.perf_counter()
    r = _check_budget(r)
    Bd = as_dense(B)
    n_b = Bd.shape[1]
    if r > n_b:
        raise ValueError(f"cannot pick {r} of {n_b} columns")
    if as_dense(A).shape[0] != Bd.shape[0]:
        raise ValueError("A and B must have the same number of rows")
    chosen = substream(seed, "random").choice(n_b, size=r, replace=False)
    trace = [coverage_of(A, Bd, chosen[: t + 1]) for t in range(r)]
    return _result("random", A, chosen, trace, r, t0, seed=seed, params={"r": r})
