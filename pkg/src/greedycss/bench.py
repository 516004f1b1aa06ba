"""Bound-verification suites run by ``greedycss bench``.

Every suite builds small seeded instances, gets the optimum k-subset and
its spectrum by enumeration, runs a selector and compares against the
corresponding guarantee. A case is a dict with ``measured``, ``bound``,
``margin = measured - bound`` and ``passed``. Statistical cases compare a
sample mean plus three standard errors against the bound.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from ._rng import substream
from .dist import DistConfig, dist_budgets, dist_greedy_epochs, dist_greedy_round, opt_split
from .objective import coverage_of
from .oracle import brute_force_opt, make_random_instance, make_tight_example, tight_example_coverage
from .select import LazierParams, greedy, greedy_budget, lazier_greedy
from .sketch import (GAUSSIAN_ROWS, PCPS_COLS, SketchSpec, gaussian_rows, pcps_cols,
                     recommend_dims)

EXACT_TOL = 1e-9


def case(name, measured, bound, passed=None, **detail):
    measured, bound = float(measured), float(bound)
    if passed is None:
        passed = measured >= bound
    out = {"case": name, "passed": bool(passed), "measured": measured, "bound": bound,
           "margin": measured - bound}
    out.update(detail)
    return out


def mean_se(xs):
    x = np.asarray(xs, dtype=np.float64)
    se = float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
    return float(x.mean()), se


def small_instance(seed, tag, i, m_range=(6, 12), nb_range=(5, 10), k_range=(1, 3)):
    """Random instance with m, n_B and k drawn from the given inclusive ranges."""
    rng = substream(seed, "bench-instance", tag, i)
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    n_b = int(rng.integers(nb_range[0], nb_range[1] + 1))
    k = int(rng.integers(k_range[0], min(k_range[1], n_b) + 1))
    rank = int(rng.integers(1, min(m, n_b) + 1))
    independent = bool(rng.integers(0, 2))
    n_a = int(rng.integers(3, 11)) if independent else n_b
    A, B = make_random_instance(m, n_a, n_b, rank, int(rng.integers(2**62)), noise=0.05,
                                independent_b=independent)
    return A, B, k


def fixed_instance(seed, tag, i, m, n_b, k):
    rng = substream(seed, "bench-fixed", tag, i)
    rank = int(rng.integers(2, min(m, n_b) + 1))
    A, B = make_random_instance(m, n_b, n_b, rank, int(rng.integers(2**62)), noise=0.1)
    return A, B, k


# -- suites -----------------------------------------------------------------

def suite_greedy_bound(seed=0, trials=25, epsilon=0.25):
    cases = []
    for i in range(trials):
        A, B, k = small_instance(seed, "greedy-bound", i)
        opt = brute_force_opt(A, B, k)
        r = greedy_budget(k, epsilon, opt.spectrum.sigma_min, cap=B.shape[1])
        res = greedy(A, B, r)
        bound = (1 - epsilon) * opt.opt_value - EXACT_TOL
        cases.append(case(f"instance-{i}", res.final_coverage, bound, k=k, r=r,
                          n_b=B.shape[1], m=A.shape[0], opt=opt.opt_value,
                          sigma_min=opt.spectrum.sigma_min))
    return cases


def scalar_identity_case(seed=0, pairs=10_000):
    """(max(0, a - b))^2 / a >= a/2 - 2b/3 for nonnegative a > 0, b."""
    rng = substream(seed, "scalar-identity")
    a = rng.exponential(1.0, pairs) * 10.0 ** rng.uniform(-3, 3, pairs) + 1e-12
    b = rng.exponential(1.0, pairs) * 10.0 ** rng.uniform(-3, 3, pairs)
    lhs = np.maximum(0.0, a - b) ** 2 / a
    rhs = a / 2 - 2 * b / 3
    slack = lhs - rhs + EXACT_TOL * np.maximum(1.0, np.abs(a) + np.abs(b))
    return case("scalar-identity", float(slack.min()), 0.0, pairs=pairs)


def suite_dist_bound(seed=0, trials=5, partitions=50, machines=3, k=2, additivity_trials=20,
                     split_partitions=100):
    cases = []
    for i in range(trials):
        A, B, _ = fixed_instance(seed, "dist-bound", i, 10, 12, k)
        opt = brute_force_opt(A, B, k)
        sp = opt.spectrum
        kp, kdp = dist_budgets(k, sp.sigma_min, cap=10 * B.shape[1])
        winners, rp_diff = [], []
        halving_slack = math.inf
        # the first `partitions` rounds feed the winner mean, all of them the split checks
        for p in range(max(partitions, split_partitions)):
            cfg = DistConfig(k=k, k_prime=kp, k_dprime=kdp, machines=machines,
                             seed=int(substream(seed, "dist-seed", i, p).integers(2**62)))
            res = dist_greedy_round(A, B, cfg)
            if p < partitions:
                winners.append(res.winner.final_coverage)
            parts = res.plans[0].parts()
            f_opt_s = []
            for mach, part in enumerate(parts):
                kept, dropped = opt_split(A, B, opt.opt_set, part, kp)
                f_opt_s.append(coverage_of(A, B, kept))
                f_ns = coverage_of(A, B, dropped)
                halving_slack = min(halving_slack,
                                    res.per_machine[mach].final_coverage - f_ns / 2)
            rp_diff.append(res.aggregated.final_coverage - 0.5 * sum(f_opt_s) / machines)
        mean, se = mean_se(winners)
        bound = opt.opt_value / (8 * sp.kappa) if math.isfinite(sp.kappa) else 0.0
        cases.append(case(f"instance-{i}-winner-mean", mean + 3 * se, bound,
                          mean=mean, se=se, kappa=sp.kappa, k_prime=kp, k_dprime=kdp))
        cases.append(case(f"instance-{i}-opt-ns-halving", halving_slack, -EXACT_TOL))
        dmean, dse = mean_se(rp_diff)
        cases.append(case(f"instance-{i}-random-partition", dmean + 3 * dse, 0.0,
                          mean=dmean, se=dse))
        rng = substream(seed, "additivity", i)
        add_bound = opt.opt_value / (2 * sp.kappa) if math.isfinite(sp.kappa) else 0.0
        worst = math.inf
        for _ in range(additivity_trials):
            side = rng.integers(0, 2, size=len(opt.opt_set))
            I = [x for x, s in zip(opt.opt_set, side) if s == 0]
            J = [x for x, s in zip(opt.opt_set, side) if s == 1]
            worst = min(worst, coverage_of(A, B, I) + coverage_of(A, B, J) - add_bound)
        cases.append(case(f"instance-{i}-additivity", worst, -EXACT_TOL))
    cases.append(scalar_identity_case(seed))
    return cases


def suite_epochs(seed=0, trials=5, partitions=30, epsilon=0.3, machines=3, k=2, max_epochs=20):
    cases = []
    for i in range(trials):
        A, B, _ = fixed_instance(seed, "epochs", i, 10, 12, k)
        opt = brute_force_opt(A, B, k)
        sp = opt.spectrum
        epochs = max_epochs if not math.isfinite(sp.kappa) else min(max_epochs,
                                                                    math.ceil(sp.kappa / epsilon))
        kp, kdp = dist_budgets(k, sp.sigma_min, cap=10 * B.shape[1])
        vals = []
        for p in range(partitions):
            cfg = DistConfig(k=k, k_prime=kp, k_dprime=kdp, machines=machines, epochs=epochs,
                             seed=int(substream(seed, "epochs-seed", i, p).integers(2**62)))
            vals.append(dist_greedy_epochs(A, B, cfg).epoch_trace[-1])
        mean, se = mean_se(vals)
        cases.append(case(f"instance-{i}", mean + 3 * se, (1 - epsilon) * opt.opt_value,
                          mean=mean, se=se, epochs=epochs, kappa=sp.kappa))
    return cases


def suite_lazier_bound(seed=0, trials=5, runs=200, epsilon=0.25, delta=0.25, k=3):
    cases = []
    params = LazierParams(delta=delta)
    for i in range(trials):
        A, B, _ = fixed_instance(seed, "lazier", i, 10, 8, k)
        n_b = B.shape[1]
        opt = brute_force_opt(A, B, k)
        r = greedy_budget(k, epsilon, opt.spectrum.sigma_min, cap=n_b)
        s = math.ceil(n_b * math.log(1 / delta) / k)
        vals, max_evals = [], 0
        for run in range(runs):
            res = lazier_greedy(A, B, r, params,
                                int(substream(seed, "lazier-seed", i, run).integers(2**62)), k=k)
            vals.append(res.final_coverage)
            max_evals = max(max_evals, res.gain_evaluations)
        mean, se = mean_se(vals)
        cases.append(case(f"instance-{i}-mean", mean + 3 * se,
                          (1 - epsilon - delta) * opt.opt_value, mean=mean, se=se, r=r))
        cases.append(case(f"instance-{i}-evaluations", r * s, max_evals,
                          sample_size=s, r=r))
    return cases


def tight_steps_needed(theta, n, epsilon):
    """Greedy picks until the target coverage first reaches 1 - epsilon."""
    A, B = make_tight_example(n, theta)
    res = greedy(A, B, B.shape[1])
    for t, c in enumerate(res.coverage_trace, start=1):
        if c >= 1 - epsilon:
            return t
    return math.inf


def suite_tight_example(seed=0, trials=None, thetas=(0.3, 0.5), n=12, epsilon=0.1, steps=8):
    cases = []
    for theta in thetas:
        A, B = make_tight_example(n, theta)
        res = greedy(A, B, n - 1)
        for t in range(1, steps + 1):
            err = abs(res.coverage_trace[t - 1] - tight_example_coverage(theta, t))
            cases.append(case(f"theta-{theta}-coverage-t{t}", -err, -EXACT_TOL,
                              expected=tight_example_coverage(theta, t)))
        hit = sorted(set(res.chosen) & {0, 1})
        cases.append(case(f"theta-{theta}-avoids-covering-pair", -len(hit), 0, picks=n - 1))
        needed = tight_steps_needed(theta, n, epsilon)
        threshold = 0.5 / (2 * theta**2 * epsilon)
        cases.append(case(f"theta-{theta}-steps-needed", needed, threshold,
                          passed=needed > threshold, epsilon=epsilon))
    return cases


def suite_sketch_fidelity(seed=0, trials=50):
    cases = []
    # norm preservation of vectors in the 2-span of B
    rng = substream(seed, "jl-instance")
    B = rng.standard_normal((40, 10))
    d, eps_jl, n_trials = 2000, 0.15, 500
    fails = 0
    for t in range(n_trials):
        trng = substream(seed, "jl-trial", t)
        cols = trng.choice(B.shape[1], 2, replace=False)
        x = B[:, cols] @ trng.standard_normal(2)
        x /= np.linalg.norm(x)
        spec = SketchSpec(GAUSSIAN_ROWS, d, epsilon=eps_jl, seed=t + seed * 7919)
        gx = gaussian_rows(x.reshape(-1, 1), x.reshape(-1, 1), spec).A_sketched.to_dense()
        if abs(np.linalg.norm(gx) - 1.0) > eps_jl:
            fails += 1
    cases.append(case("gaussian-norm-preservation", -fails / n_trials, -0.05,
                      passed=fails / n_trials < 0.05, trials=n_trials, d=d))

    # greedy on a PCPS sketch of A, scored exactly
    good = 0
    for t in range(trials):
        A, B = make_random_instance(20, 30, 30, 6, int(substream(seed, "pcps-inst", t)
                                                       .integers(2**62)), noise=0.1)
        base = greedy(A, B, 3).final_coverage
        spec = SketchSpec(PCPS_COLS, 200, seed=int(substream(seed, "pcps-seed", t).integers(2**62)))
        As = pcps_cols(A, spec).A_sketched
        chosen = greedy(As, B, 3).chosen
        if coverage_of(A, B, chosen) >= 0.85 * base:
            good += 1
    cases.append(case("pcps-greedy-fidelity", good / trials, 0.9, trials=trials))

    # Gaussian sketch keeps the order of two well separated sets
    A, B = make_random_instance(30, 30, 30, 8, int(substream(seed, "order-inst").integers(2**62)),
                                noise=0.1)
    S1 = list(greedy(A, B, 2).chosen)
    S2 = list(min(itertools.combinations(range(B.shape[1]), 2),
                  key=lambda S: coverage_of(A, B, S)))
    f1, f2 = coverage_of(A, B, S1), coverage_of(A, B, S2)
    d_rec, _ = recommend_dims(2, B.shape[1], 0.1, 0.1)
    kept = 0
    for t in range(100):
        spec = SketchSpec(GAUSSIAN_ROWS, d_rec, epsilon=0.1,
                          seed=int(substream(seed, "order-seed", t).integers(2**62)))
        pair = gaussian_rows(A, B, spec)
        As, Bs = pair.A_sketched.to_dense(), pair.B_sketched.to_dense()
        if coverage_of(As, Bs, S1) > coverage_of(As, Bs, S2):
            kept += 1
    cases.append(case("gaussian-order-preservation", kept / 100, 0.95,
                      ratio=f1 / f2 if f2 > 0 else math.inf, d=d_rec))

    # unbiasedness of the PCPS objective on the 3x3 example
    A3 = np.array([[1.0, 0.0, 1.0], [1.0, -1.0, 0.0], [0.0, 1.0, 1.0]])
    sk = [coverage_of(pcps_cols(A3, SketchSpec(PCPS_COLS, 400, seed=s)).A_sketched.to_dense(),
                      A3, [0]) for s in range(100)]
    rel = abs(float(np.mean(sk)) - 3.0) / 3.0
    cases.append(case("pcps-rank2-mean", -rel, -0.15))
    return cases


SUITES = {
    "greedy-bound": suite_greedy_bound,
    "dist-bound": suite_dist_bound,
    "epochs": suite_epochs,
    "lazier-bound": suite_lazier_bound,
    "tight-example": suite_tight_example,
    "sketch-fidelity": suite_sketch_fidelity,
}


def run_suite(name, seed=0, trials=None):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    fn = SUITES[name]
    return fn(seed=seed) if trials is None else fn(seed=seed, trials=trials)
