"""``greedycss`` command line: ``select`` runs one selector, ``bench`` runs a suite.

Exit codes: 0 on success, 1 on a user/IO error or a failing bench case,
2 when a problem-size guard is hit.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from typing import Optional

from . import __version__
from .bench import SUITES, run_suite
from .dist import DistConfig, dist_budgets, dist_greedy_epochs
from .errors import GuardError
from .matcore import frobenius_sq, guess_format, load_matrix
from .objective import coverage_of, exact_trace
from .oracle import brute_force_opt
from .report import SCHEMA_VERSION, write_report
from .select import LazierParams, greedy, lazier_greedy, random_baseline
from .sketch import GAUSSIAN_ROWS, PCPS_COLS, SketchSpec, apply_sketch, recommend_dims

METHODS = ("greedy", "lazier", "dist", "random")
DIST_ONLY = ("machines", "k_prime", "k_dprime", "epochs", "workers")
SKETCH_DELTA = 0.1


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    matrix_path: str
    method: str
    candidates_path: Optional[str] = None
    k: Optional[int] = None
    r: Optional[int] = None
    delta: Optional[float] = None
    machines: Optional[int] = None
    k_prime: Optional[int] = None
    k_dprime: Optional[int] = None
    epochs: Optional[int] = None
    sketch_rows: Optional[object] = None
    pcps_cols: Optional[object] = None
    epsilon: Optional[float] = None
    seed: int = 0
    workers: Optional[int] = None
    output_path: Optional[str] = None

    def validate(self):
        if self.method not in METHODS:
            raise UsageError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        for p in (self.matrix_path, self.candidates_path):
            if p is not None and not os.path.isfile(p):
                raise UsageError(f"no such file: {p}")
        for name in ("k", "r", "machines", "k_prime", "k_dprime", "epochs", "workers"):
            v = getattr(self, name)
            if v is not None and (isinstance(v, bool) or not isinstance(v, int) or v < 1):
                raise UsageError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise UsageError(f"seed must be an integer, got {self.seed!r}")
        for name in ("sketch_rows", "pcps_cols"):
            v = getattr(self, name)
            if v is not None and v != "auto" and (isinstance(v, bool) or not isinstance(v, int)
                                                 or v < 1):
                raise UsageError(f"{name} must be a positive integer or 'auto', got {v!r}")
        for name in ("delta", "epsilon"):
            v = getattr(self, name)
            if v is not None and not 0.0 < v < 1.0:
                raise UsageError(f"{name} must lie in (0, 1), got {v}")

        m = self.method
        if m != "lazier" and self.delta is not None:
            raise UsageError("--delta only applies to --method lazier")
        if m != "dist":
            extra = [n for n in DIST_ONLY if getattr(self, n) is not None]
            if extra:
                flags = ", ".join("--" + n.replace("_", "-") for n in extra)
                raise UsageError(f"{flags} only apply to --method dist")
        sketched = self.sketch_rows is not None or self.pcps_cols is not None
        if self.sketch_rows is not None and self.pcps_cols is not None:
            raise UsageError("--sketch-rows and --pcps-cols are mutually exclusive")
        if sketched and m == "random":
            raise UsageError("sketching does not apply to --method random")
        if self.epsilon is not None and not sketched:
            raise UsageError("--epsilon only applies together with a sketch")
        if m == "dist":
            if self.k is None:
                raise UsageError("--method dist needs --k")
            if self.machines is None:
                raise UsageError("--method dist needs --machines")
            if self.r is not None:
                raise UsageError("--r does not apply to --method dist; use --k-prime/--k-dprime")
        elif self.r is None and self.k is None:
            raise UsageError(f"--method {m} needs --r or --k")
        if self.output_path is None:
            raise UsageError("--out is required")
        return self


def _pos_int_or_auto(text):
    if text == "auto":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'auto', got {text!r}")


class _Parser(argparse.ArgumentParser):
    # usage errors exit with 1; 2 is reserved for guard violations
    def error(self, message):
        _fail("usage", message, 1, prog=self.prog)


def _fail(kind, message, code, **extra):
    payload = {"error": {"type": kind, "message": str(message), **extra}}
    print(json.dumps(payload), file=sys.stderr)
    raise SystemExit(code)


def build_parser():
    p = _Parser(prog="greedycss", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("select", help="run a selector and write a report")
    s.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    s.add_argument("--matrix", dest="matrix_path")
    s.add_argument("--candidates", dest="candidates_path")
    s.add_argument("--method", choices=METHODS)
    s.add_argument("--k", type=int)
    s.add_argument("--r", type=int)
    s.add_argument("--delta", type=float)
    s.add_argument("--machines", type=int)
    s.add_argument("--k-prime", dest="k_prime", type=int)
    s.add_argument("--k-dprime", dest="k_dprime", type=int)
    s.add_argument("--epochs", type=int)
    s.add_argument("--sketch-rows", dest="sketch_rows", type=_pos_int_or_auto)
    s.add_argument("--pcps-cols", dest="pcps_cols", type=_pos_int_or_auto)
    s.add_argument("--epsilon", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out", dest="output_path")

    b = sub.add_parser("bench", help="run a bound-verification suite")
    b.add_argument("--suite", required=True, help=", ".join(SUITES))
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--trials", type=int)
    b.add_argument("--out")
    return p


def config_from_args(args) -> RunConfig:
    base = {}
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            base = json.load(fh)
        if not isinstance(base, dict):
            raise UsageError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = sorted(set(base) - known)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            base[f.name] = v
    for name in ("matrix_path", "method"):
        if base.get(name) is None:
            raise UsageError(f"--{name.split('_')[0]} is required")
    return RunConfig(**base).validate()


def _sketch_spec(cfg: RunConfig, k: int, size: int, n_b: int) -> tuple:
    """SketchSpec for the run (or None) plus the dimension actually used."""
    if cfg.sketch_rows is None and cfg.pcps_cols is None:
        return None
    eps = 0.1 if cfg.epsilon is None else cfg.epsilon
    d_auto, _ = recommend_dims(k, n_b, eps, SKETCH_DELTA)
    # n' follows the selection size r rather than the benchmark k
    _, n_auto = recommend_dims(size, n_b, eps, SKETCH_DELTA)
    if cfg.sketch_rows is not None:
        dim = d_auto if cfg.sketch_rows == "auto" else cfg.sketch_rows
        return SketchSpec(GAUSSIAN_ROWS, dim, epsilon=eps, delta=SKETCH_DELTA, seed=cfg.seed)
    dim = n_auto if cfg.pcps_cols == "auto" else cfg.pcps_cols
    return SketchSpec(PCPS_COLS, dim, epsilon=eps, delta=SKETCH_DELTA, seed=cfg.seed)


def cmd_select(cfg: RunConfig) -> dict:
    timings = {"load": 0.0, "sketch": 0.0, "select": 0.0, "evaluate": 0.0}
    t0 = time.perf_counter()
    A = load_matrix(cfg.matrix_path, guess_format(cfg.matrix_path)).to_dense()
    B = A if cfg.candidates_path is None else \
        load_matrix(cfg.candidates_path, guess_format(cfg.candidates_path)).to_dense()
    if A.shape[0] != B.shape[0]:
        raise UsageError(f"matrix has {A.shape[0]} rows but candidates have {B.shape[0]}")
    timings["load"] = time.perf_counter() - t0
    n_b = B.shape[1]
    resolved = {"n_rows": A.shape[0], "n_cols_A": A.shape[1], "n_cols_B": n_b}
    dist_out = None

    if cfg.method == "dist":
        k = cfg.k
        kp, kdp = cfg.k_prime, cfg.k_dprime
        if kp is None or kdp is None:
            t = time.perf_counter()
            opt = brute_force_opt(A, B, k)
            dk, ddk = dist_budgets(k, opt.spectrum.sigma_min, cap=n_b)
            kp = dk if kp is None else kp
            kdp = ddk if kdp is None else kdp
            resolved["sigma_min"] = opt.spectrum.sigma_min
            timings["select"] += time.perf_counter() - t
        spec = _sketch_spec(cfg, k, max(kp, kdp), n_b)
        dcfg = DistConfig(k=k, k_prime=kp, k_dprime=kdp, machines=cfg.machines,
                          epochs=cfg.epochs or 1, seed=cfg.seed, sketch=spec,
                          workers=cfg.workers)
        resolved.update(k=k, k_prime=kp, k_dprime=kdp, epochs=dcfg.epochs,
                        sketch=spec.to_dict() if spec else None)
        t = time.perf_counter()
        res = dist_greedy_epochs(A, B, dcfg)
        timings["select"] += time.perf_counter() - t
        dist_out = res.to_dict()
        result = res.winner
        chosen = list(res.epoch_union)
    else:
        r = cfg.r if cfg.r is not None else cfg.k
        k = cfg.k if cfg.k is not None else r
        spec = _sketch_spec(cfg, k, r, n_b)
        resolved.update(k=k, r=r, sketch=spec.to_dict() if spec else None)
        t = time.perf_counter()
        A_sel, B_sel = apply_sketch(A, B, spec)
        timings["sketch"] = time.perf_counter() - t
        t = time.perf_counter()
        if cfg.method == "greedy":
            result = greedy(A_sel, B_sel, r)
        elif cfg.method == "lazier":
            params = LazierParams(delta=0.1 if cfg.delta is None else cfg.delta)
            result = lazier_greedy(A_sel, B_sel, r, params, cfg.seed, k=k)
        else:
            result = random_baseline(A, B, r, cfg.seed)
        timings["select"] = time.perf_counter() - t
        chosen = list(result.chosen)
        if spec is not None:
            t = time.perf_counter()
            result.coverage_trace = exact_trace(A, B, chosen)
            timings["evaluate"] += time.perf_counter() - t

    t = time.perf_counter()
    a_sq = frobenius_sq(A)
    final = coverage_of(A, B, chosen)
    ratio = final / a_sq if a_sq > 0 else 0.0
    timings["evaluate"] += time.perf_counter() - t
    result_dict = result.to_dict()
    if cfg.method != "dist":
        result_dict["final_coverage"] = final
        result_dict["coverage_ratio"] = ratio

    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "select",
        "version": __version__,
        "config": asdict(cfg),
        "resolved": resolved,
        "result": result_dict,
        "dist": dist_out,
        "chosen": [int(j) for j in chosen],
        "final_coverage": final,
        "coverage_ratio": ratio,
        "frobenius_sq_A": a_sq,
        "timings": timings,
    }


def cmd_bench(suite: str, seed: int = 0, trials: Optional[int] = None) -> dict:
    if suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    if trials is not None and trials < 1:
        raise UsageError(f"trials must be a positive integer, got {trials}")
    t0 = time.perf_counter()
    cases = run_suite(suite, seed=seed, trials=trials)
    n_pass = sum(c["passed"] for c in cases)
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "bench",
        "version": __version__,
        "suite": suite,
        "seed": seed,
        "trials": trials,
        "cases": cases,
        "n_cases": len(cases),
        "n_passed": n_pass,
        "passed": n_pass == len(cases),
        "timings": {"total": time.perf_counter() - t0},
    }


def _fmt(x):
    return f"{x:.6g}" if isinstance(x, float) and math.isfinite(x) else str(x)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "select":
            cfg = config_from_args(args)
            rep = cmd_select(cfg)
            write_report(rep, cfg.output_path)
            print(f"{cfg.method}: {len(rep['chosen'])} columns, coverage "
                  f"{_fmt(rep['final_coverage'])} of {_fmt(rep['frobenius_sq_A'])} "
                  f"(ratio {_fmt(rep['coverage_ratio'])}) -> {cfg.output_path}")
            return 0
        rep = cmd_bench(args.suite, args.seed, args.trials)
        if args.out:
            write_report(rep, args.out)
        for c in rep["cases"]:
            print(f"{'PASS' if c['passed'] else 'FAIL'} {args.suite}/{c['case']} "
                  f"measured={_fmt(c['measured'])} bound={_fmt(c['bound'])}")
        print(f"{args.suite}: {rep['n_passed']}/{rep['n_cases']} passed")
        return 0 if rep["passed"] else 1
    except GuardError as e:
        _fail("guard", e, 2)
    except (OSError, ValueError, json.JSONDecodeError, TypeError) as e:
        _fail(type(e).__name__, e, 1)


if __name__ == "__main__":
    sys.exit(main())
