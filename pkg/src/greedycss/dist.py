"""Randomized-partition distributed greedy.

One round: split B's columns uniformly at random over ``machines`` workers,
run greedy for ``k_prime`` picks on each part, run greedy for ``k_dprime``
picks on the union of the per-machine picks, and return whichever of these
sets covers A best. Workers share a read-only target (A or its sketch).

Epochs repeat the round with the objective ``V -> f_A(V | C)`` where C is
the union of earlier epoch winners.
"""
from __future__ import annotations

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ._rng import substream
from .errors import GuardError
from .matcore import as_dense, frobenius_sq
from .objective import coverage_of, exact_trace, init_state
from .select import SelectionResult, greedy, run_greedy
from .sketch import SketchSpec, apply_sketch

log = logging.getLogger(__name__)

OPT_SPLIT_MAX_COLUMNS = 64


@dataclass(frozen=True)
class PartitionPlan:
    machines: int
    assignment: tuple
    seed: int
    epoch: int = 0

    def parts(self) -> list:
        a = np.asarray(self.assignment, dtype=np.int64)
        return [np.flatnonzero(a == i) for i in range(self.machines)]


@dataclass(frozen=True)
class DistConfig:
    k: int
    k_prime: int
    k_dprime: int
    machines: int
    epochs: int = 1
    seed: int = 0
    sketch: Optional[SketchSpec] = None
    workers: Optional[int] = None

    def __post_init__(self):
        for name in ("k", "k_prime", "k_dprime", "machines", "epochs"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")

    def to_dict(self) -> dict:
        return {"k": self.k, "k_prime": self.k_prime, "k_dprime": self.k_dprime,
                "machines": self.machines, "epochs": self.epochs, "seed": self.seed,
                "sketch": self.sketch.to_dict() if self.sketch else None}


@dataclass
class DistResult:
    per_machine: list
    aggregated: SelectionResult
    winner: SelectionResult
    epoch_union: tuple
    epoch_trace: list
    epoch_winners: list = field(default_factory=list)
    plans: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "per_machine": [r.to_dict() for r in self.per_machine],
            "aggregated": self.aggregated.to_dict(),
            "winner": self.winner.to_dict(),
            "epoch_union": [int(j) for j in self.epoch_union],
            "epoch_trace": [float(v) for v in self.epoch_trace],
            "epoch_winners": [r.to_dict() for r in self.epoch_winners],
            "partitions": [[int(a) for a in p.assignment] for p in self.plans],
            "warnings": list(self.warnings),
        }


def dist_budgets(k: int, sigma_min: float, cap: Optional[int] = None) -> tuple:
    """(k', k'') = (ceil(32k / sigma_min), ceil(12k / sigma_min)), optionally capped."""
    if sigma_min <= 0.0:
        if cap is None:
            raise ValueError("sigma_min must be positive when no cap is given")
        return int(cap), int(cap)
    kp, kdp = math.ceil(32 * k / sigma_min), math.ceil(12 * k / sigma_min)
    if cap is not None:
        kp, kdp = min(kp, cap), min(kdp, cap)
    return kp, kdp


def random_partition(n_b: int, machines: int, seed: int, epoch: int = 0) -> PartitionPlan:
    if int(machines) != machines or machines < 1:
        raise ValueError(f"machines must be a positive integer, got {machines}")
    rng = substream(seed, "partition", epoch)
    assignment = rng.integers(0, machines, size=n_b)
    return PartitionPlan(int(machines), tuple(int(a) for a in assignment), seed, epoch)


def _run_part(A, B, A_sel, B_sel, cand, budget, prior, method, sketched, a_sq):
    t0 = time.perf_counter()
    cand = np.asarray(cand, dtype=np.int64)
    chosen, trace, evals = [], [], 0
    if cand.size:
        state = init_state(A_sel, B_sel[:, cand],
                           prior_basis=B_sel[:, prior] if prior else None)
        local, trace = run_greedy(state, budget)
        evals = state.gain_evaluations
        chosen = [int(cand[j]) for j in local]
    if sketched or not chosen:
        trace = exact_trace(A, B, chosen, prior)
    final = trace[-1] if trace else (coverage_of(A, B, prior) if prior else 0.0)
    return SelectionResult(
        method=method, chosen=tuple(chosen), coverage_trace=[float(c) for c in trace],
        final_coverage=float(final), coverage_ratio=float(final / a_sq) if a_sq > 0 else 0.0,
        gain_evaluations=int(evals), wall_time=time.perf_counter() - t0,
        params={"budget": int(budget), "candidates": int(cand.size)})


def _round(A, B, A_sel, B_sel, cfg, plan, prior, warnings):
    n_b = B.shape[1]
    if len(plan.assignment) != n_b:
        raise ValueError(f"partition covers {len(plan.assignment)} columns, B has {n_b}")
    a_sq = frobenius_sq(A)
    sketched = cfg.sketch is not None
    parts = plan.parts()
    for i, part in enumerate(parts):
        if cfg.k_prime > part.size:
            msg = f"epoch {plan.epoch} machine {i}: k'={cfg.k_prime} truncated to {part.size} columns"
            warnings.append(msg)
            log.debug(msg)

    def work(i):
        return _run_part(A, B, A_sel, B_sel, parts[i], cfg.k_prime, prior,
                         f"dist-machine-{i}", sketched, a_sq)

    if cfg.workers and cfg.workers > 1 and cfg.machines > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            per_machine = list(pool.map(work, range(cfg.machines)))
    else:
        per_machine = [work(i) for i in range(cfg.machines)]

    union = sorted({j for r in per_machine for j in r.chosen})
    if cfg.k_dprime > len(union):
        msg = f"epoch {plan.epoch} aggregation: k''={cfg.k_dprime} truncated to {len(union)} columns"
        warnings.append(msg)
        log.debug(msg)
    aggregated = _run_part(A, B, A_sel, B_sel, union, cfg.k_dprime, prior,
                           "dist-aggregated", sketched, a_sq)
    # exact comparison; ties keep the aggregated set, then the lowest machine
    winner = aggregated
    for r in per_machine:
        if r.final_coverage > winner.final_coverage:
            winner = r
    return per_machine, aggregated, winner


def dist_greedy_round(A, B, cfg: DistConfig, plan: Optional[PartitionPlan] = None) -> DistResult:
    A, B = as_dense(A), as_dense(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but B has {B.shape[0]}")
    if plan is None:
        plan = random_partition(B.shape[1], cfg.machines, cfg.seed)
    if plan.machines != cfg.machines:
        raise ValueError("plan and config disagree on the number of machines")
    A_sel, B_sel = apply_sketch(A, B, cfg.sketch)
    warnings = []
    per_machine, aggregated, winner = _round(A, B, A_sel, B_sel, cfg, plan, [], warnings)
    return DistResult(per_machine, aggregated, winner, tuple(winner.chosen),
                      [winner.final_coverage], [winner], [plan], warnings)


def dist_greedy_epochs(A, B, cfg: DistConfig) -> DistResult:
    """Repeat rounds; epoch t covers A given the union C of earlier winners."""
    A, B = as_dense(A), as_dense(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but B has {B.shape[0]}")
    A_sel, B_sel = apply_sketch(A, B, cfg.sketch)
    union, trace, winners, plans, warnings = [], [], [], [], []
    last = None
    for t in range(cfg.epochs):
        plan = random_partition(B.shape[1], cfg.machines, cfg.seed, epoch=t)
        last = _round(A, B, A_sel, B_sel, cfg, plan, list(union), warnings)
        winner = last[2]
        union.extend(j for j in winner.chosen if j not in union)
        trace.append(coverage_of(A, B, union))
        winners.append(winner)
        plans.append(plan)
    per_machine, aggregated, winner = last
    return DistResult(per_machine, aggregated, winner, tuple(union), trace, winners,
                      plans, warnings)


def opt_split(A, B, opt: Sequence[int], part: Sequence[int], k_prime: int) -> tuple:
    """Split ``opt`` by whether greedy on ``part + {x}`` would keep ``x``."""
    B = as_dense(B)
    if B.shape[1] > OPT_SPLIT_MAX_COLUMNS:
        raise GuardError(f"opt_split is limited to {OPT_SPLIT_MAX_COLUMNS} candidate columns")
    part = set(int(j) for j in part)
    kept, dropped = [], []
    for x in opt:
        cand = sorted(part | {int(x)})
        res = greedy(A, B[:, cand], k_prime)
        (kept if cand.index(int(x)) in res.chosen else dropped).append(int(x))
    return tuple(kept), tuple(dropped)
