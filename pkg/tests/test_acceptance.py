"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Runtime budgets are part of each criterion and are checked alongside the
numerical condition.
"""
import json
import time

import numpy as np
import pytest

from greedycss import bench
from greedycss.cli import main
from greedycss.objective import all_gains, commit, coverage_of, init_state
from greedycss.oracle import make_random_instance, spectrum
from greedycss.report import load_report, strip_timing
from greedycss.select import greedy


@pytest.fixture
def verdict(capsys):
    def emit(number, title, passed, elapsed, budget, detail=""):
        ok = passed and elapsed < budget
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:>2} {'PASS' if ok else 'FAIL'} {title} "
                  f"[{elapsed:.2f}s / {budget:.0f}s] {detail}".rstrip())
        assert passed, detail
        assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"
    return emit


def _failed(cases):
    return [c["case"] for c in cases if not c["passed"]]


def _min_margin(cases):
    return min(c["margin"] for c in cases)


def test_01_greedy_bound(verdict):
    t0 = time.perf_counter()
    cases = bench.suite_greedy_bound(seed=0, trials=25, epsilon=0.25)
    bad = _failed(cases)
    verdict(1, "greedy bound", len(cases) == 25 and not bad, time.perf_counter() - t0, 30,
            f"{25 - len(bad)}/25 instances, min margin {_min_margin(cases):.3g}")


def test_02_large_gain_step(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(20240)
    worst, n = np.inf, 0
    while n < 200:
        m, n_a, n_b = int(rng.integers(2, 11)), int(rng.integers(1, 9)), int(rng.integers(3, 11))
        A, B = rng.standard_normal((m, n_a)), rng.standard_normal((m, n_b))
        perm = rng.permutation(n_b)
        s_size = int(rng.integers(1, n_b))
        t_size = int(rng.integers(0, n_b - s_size + 1))
        S, T = sorted(perm[:s_size].tolist()), sorted(perm[s_size:s_size + t_size].tolist())
        fS, fT = coverage_of(A, B, S), coverage_of(A, B, T)
        if fS < fT:
            S, T, fS, fT = T, S, fT, fS
        if not S:
            continue
        lhs = max(coverage_of(A, B, T + [v]) - fT for v in S)
        sig = spectrum(B, S).sigma_min
        rhs = sig * (fS - fT) ** 2 / (4 * len(S) * fS) if fS > 0 else 0.0
        worst = min(worst, lhs - rhs)
        n += 1
    verdict(2, "large gain step", worst >= -1e-9, time.perf_counter() - t0, 10,
            f"200 cases, min slack {worst:.3g}")


def test_03_tight_example(verdict):
    t0 = time.perf_counter()
    cases = bench.suite_tight_example(thetas=(0.3, 0.5), n=12, epsilon=0.1, steps=8)
    bad = _failed(cases)
    steps = {c["case"]: (c["measured"], round(c["bound"], 3)) for c in cases
             if c["case"].endswith("steps-needed")}
    verdict(3, "tight example", not bad, time.perf_counter() - t0, 5,
            f"failed: {bad or 'none'}; steps needed vs threshold: {steps}")


def test_04_residual_updates(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        rng = np.random.default_rng(1000 + i)
        m, n_a, n_b = int(rng.integers(2, 16)), int(rng.integers(1, 11)), int(rng.integers(2, 13))
        A = rng.standard_normal((m, n_a))
        B = rng.standard_normal((m, n_b)) if i % 2 else A.copy()
        state = init_state(A, B)
        while state.alive().size:
            alive = state.alive()
            gains = all_gains(state, alive)
            base = coverage_of(A, B, state.selected)
            for j, g in zip(alive, gains):
                after = coverage_of(A, B, state.selected + [int(j)])
                worst = max(worst, abs(g - (after - base)) / max(after, 1e-300))
            j = int(alive[int(np.argmax(gains))] if i % 3 else rng.choice(alive))
            if j in state.dead_candidates:
                break
            commit(state, j)
            ref = coverage_of(A, B, state.selected)
            worst = max(worst, abs(state.coverage - ref) / max(ref, 1e-300))
    verdict(4, "residual-update correctness", worst <= 1e-8, time.perf_counter() - t0, 20,
            f"50 instances, max relative error {worst:.3g}")


def test_05_distributed_bound(verdict):
    t0 = time.perf_counter()
    cases = bench.suite_dist_bound(seed=0, trials=5, partitions=50)
    bad = _failed(cases)
    verdict(5, "distributed bound and partition checks", not bad, time.perf_counter() - t0, 120,
            f"{len(cases) - len(bad)}/{len(cases)} checks")


def test_06_epochs(verdict):
    t0 = time.perf_counter()
    cases = bench.suite_epochs(seed=0, trials=5, partitions=30, epsilon=0.3, max_epochs=20)
    bad = _failed(cases)
    verdict(6, "multi-round convergence", not bad, time.perf_counter() - t0, 120,
            f"{len(cases) - len(bad)}/5 instances, min margin {_min_margin(cases):.3g}")


def test_07_lazier_bound(verdict):
    t0 = time.perf_counter()
    cases = bench.suite_lazier_bound(seed=0, trials=5, runs=200, epsilon=0.25, delta=0.25)
    bad = _failed(cases)
    verdict(7, "lazier-than-lazy bound", not bad, time.perf_counter() - t0, 120,
            f"{len(cases) - len(bad)}/{len(cases)} checks")


def test_08_sketch_fidelity(verdict):
    t0 = time.perf_counter()
    cases = {c["case"]: c for c in bench.suite_sketch_fidelity(seed=0, trials=50)}
    named = [cases["gaussian-norm-preservation"], cases["pcps-greedy-fidelity"]]
    verdict(8, "sketch fidelity", all(c["passed"] for c in named), time.perf_counter() - t0, 120,
            f"norm failure rate {abs(named[0]['measured']):.3f} (< 0.05), "
            f"PCPS fidelity {named[1]['measured']:.2f} (>= 0.90)")


def _cli(argv):
    try:
        return main(argv)
    except SystemExit as e:
        return e.code


def test_09_determinism(verdict, tmp_path, capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    m = tmp_path / "m.csv"
    np.savetxt(m, rng.standard_normal((10, 14)), delimiter=",", fmt="%.17g")
    runs = {
        "greedy": ["--method", "greedy", "--r", "4"],
        "greedy-gauss": ["--method", "greedy", "--r", "4", "--sketch-rows", "auto"],
        "lazier": ["--method", "lazier", "--r", "4", "--k", "2", "--delta", "0.2"],
        "random": ["--method", "random", "--r", "4"],
        "dist": ["--method", "dist", "--k", "2", "--machines", "3", "--epochs", "3",
                 "--k-prime", "4", "--k-dprime", "3", "--pcps-cols", "auto"],
    }
    mismatched = []
    for name, extra in runs.items():
        reps = []
        for i in range(2):
            out = tmp_path / f"{name}{i}.json"
            assert _cli(["select", "--matrix", str(m), "--seed", "17", "--out", str(out)] + extra) == 0
            rep = strip_timing(load_report(out))
            rep["config"].pop("output_path")
            reps.append(rep)
        if reps[0] != reps[1]:
            mismatched.append(name)
    # worker scheduling
    dist_reps = []
    for w in ("1", "4"):
        out = tmp_path / f"w{w}.json"
        assert _cli(["select", "--matrix", str(m), "--seed", "17", "--out", str(out), "--workers", w]
                    + runs["dist"]) == 0
        rep = strip_timing(load_report(out))
        rep["config"].pop("output_path")
        rep["config"].pop("workers")
        dist_reps.append(rep)
    if dist_reps[0] != dist_reps[1]:
        mismatched.append("dist-workers")
    for suite in ("tight-example", "lazier-bound"):
        reps = []
        for i in range(2):
            out = tmp_path / f"{suite}{i}.json"
            _cli(["bench", "--suite", suite, "--seed", "4", "--trials", "1", "--out", str(out)])
            reps.append(json.dumps(strip_timing(load_report(out)), sort_keys=True))
        if reps[0] != reps[1]:
            mismatched.append(suite)
    capsys.readouterr()
    verdict(9, "determinism", not mismatched, time.perf_counter() - t0, 30,
            f"mismatched: {mismatched or 'none'}")


def _gaps(A, B, chosen):
    state = init_state(A, B)
    out = []
    for j in chosen:
        alive = state.alive()
        g = np.sort(all_gains(state, alive))[::-1]
        out.append(g[0] - g[1] if g.size > 1 else np.inf)
        commit(state, j)
    return out


def test_10_scaling_invariance(verdict):
    t0 = time.perf_counter()
    used, changed, seed = 0, 0, 0
    while used < 20:
        seed += 1
        A, B = make_random_instance(10, 8, 9, 5, seed=seed, noise=0.1, independent_b=True)
        base = greedy(A, B, 5)
        if min(_gaps(A, B, base.chosen)) <= 1e-6:
            continue
        used += 1
        scale = np.exp(np.random.default_rng(seed).uniform(-3, 3, B.shape[1]))
        if greedy(A, B * scale, 5).chosen != base.chosen:
            changed += 1
    verdict(10, "scaling argmax invariance", changed == 0, time.perf_counter() - t0, 10,
            f"{20 - changed}/20 sequences unchanged")
