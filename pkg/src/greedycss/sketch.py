"""Randomized compression of the coverage problem.

* ``gaussian_rows``: left-multiply A and B by ``G / sqrt(d)`` with G a d x m
  standard normal matrix; preserves norms of vectors in the span of few
  columns of B.
* ``pcps_cols``: right-multiply A by an n_A x n' matrix of independent
  +-sqrt(1/n') signs, a projection-cost preserving sketch of A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._rng import substream
from .matcore import ColumnMatrix, as_dense

GAUSSIAN_ROWS = "gaussian-rows"
PCPS_COLS = "pcps-cols"


@dataclass(frozen=True)
class SketchSpec:
    kind: str
    target_dim: int
    epsilon: float = 0.1
    delta: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN_ROWS, PCPS_COLS):
            raise ValueError(f"unknown sketch kind {self.kind!r}")
        if int(self.target_dim) != self.target_dim or self.target_dim < 1:
            raise ValueError(f"target_dim must be a positive integer, got {self.target_dim}")
        for name in ("epsilon", "delta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "target_dim": int(self.target_dim),
                "epsilon": float(self.epsilon), "delta": float(self.delta),
                "seed": int(self.seed)}


@dataclass
class SketchedPair:
    A_sketched: ColumnMatrix
    B_sketched: Optional[ColumnMatrix]
    spec: SketchSpec


def gaussian_matrix(spec: SketchSpec, m: int) -> np.ndarray:
    return substream(spec.seed, "sketch", GAUSSIAN_ROWS).standard_normal((spec.target_dim, m))


def rademacher_matrix(spec: SketchSpec, n: int) -> np.ndarray:
    signs = substream(spec.seed, "sketch", PCPS_COLS).integers(0, 2, size=(n, spec.target_dim))
    return (2.0 * signs - 1.0) * math.sqrt(1.0 / spec.target_dim)


def gaussian_rows(A, B, spec: SketchSpec, projector=None) -> SketchedPair:
    """Row sketch of both A and B; ``projector`` replaces G (test hook)."""
    if spec.kind != GAUSSIAN_ROWS:
        raise ValueError(f"expected a {GAUSSIAN_ROWS} spec, got {spec.kind}")
    A, B = as_dense(A), as_dense(B)
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"A has {A.shape[0]} rows but B has {B.shape[0]}")
    G = gaussian_matrix(spec, A.shape[0]) if projector is None else np.asarray(projector, float)
    if G.shape != (spec.target_dim, A.shape[0]):
        raise ValueError(f"projector must be {spec.target_dim}x{A.shape[0]}")
    G = G / math.sqrt(spec.target_dim)
    return SketchedPair(ColumnMatrix(G @ A), ColumnMatrix(G @ B), spec)


def pcps_cols(A, spec: SketchSpec) -> SketchedPair:
    if spec.kind != PCPS_COLS:
        raise ValueError(f"expected a {PCPS_COLS} spec, got {spec.kind}")
    A = as_dense(A)
    R = rademacher_matrix(spec, A.shape[1])
    return SketchedPair(ColumnMatrix(A @ R), None, spec)


def apply_sketch(A, B, spec: Optional[SketchSpec]) -> tuple:
    """Dense (A, B) to run selection on; unchanged when ``spec`` is None."""
    if spec is None:
        return as_dense(A), as_dense(B)
    if spec.kind == GAUSSIAN_ROWS:
        pair = gaussian_rows(A, B, spec)
        return pair.A_sketched.to_dense(), pair.B_sketched.to_dense()
    return pcps_cols(A, spec).A_sketched.to_dense(), as_dense(B)


def recommend_dims(k: int, n: int, epsilon: float, delta: float,
                   c_gauss: float = 1.0, c_pcps: float = 1.0) -> tuple:
    """(d, n') with unit big-O constants by default:

    d  = ceil(c_gauss * k * ln(n / (delta * epsilon)) / epsilon^2)
    n' = ceil(c_pcps * (k + ln(1 / delta)) / epsilon^2)
    """
    if k < 1 or n < 1:
        raise ValueError("k and n must be positive")
    for name, v in (("epsilon", epsilon), ("delta", delta)):
        if not 0.0 < v < 1.0:
            raise ValueError(f"{name} must lie in (0, 1), got {v}")
    d = math.ceil(c_gauss * k * math.log(n / (delta * epsilon)) / epsilon**2)
    n_prime = math.ceil(c_pcps * (k + math.log(1.0 / delta)) / epsilon**2)
    return max(1, d), max(1, n_prime)
