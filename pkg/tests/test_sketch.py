import math

import numpy as np
import pytest

from greedycss.objective import coverage_of
from greedycss.sketch import (GAUSSIAN_ROWS, PCPS_COLS, SketchSpec, apply_sketch,
                              gaussian_rows, pcps_cols, recommend_dims)


def test_spec_validation():
    with pytest.raises(ValueError):
        SketchSpec("other", 3)
    with pytest.raises(ValueError):
        SketchSpec(GAUSSIAN_ROWS, 0)
    with pytest.raises(ValueError):
        SketchSpec(GAUSSIAN_ROWS, 3, epsilon=1.0)
    with pytest.raises(ValueError):
        SketchSpec(PCPS_COLS, 3, delta=0.0)


def test_gaussian_identity_hook(rank2):
    spec = SketchSpec(GAUSSIAN_ROWS, 3)
    pair = gaussian_rows(rank2, rank2, spec, projector=np.eye(3))
    np.testing.assert_allclose(pair.A_sketched.to_dense(), rank2 / math.sqrt(3))
    np.testing.assert_allclose(pair.B_sketched.to_dense(), rank2 / math.sqrt(3))


def test_gaussian_shapes_and_errors(rank2):
    pair = gaussian_rows(rank2, rank2[:, :2], SketchSpec(GAUSSIAN_ROWS, 5))
    assert pair.A_sketched.shape == (5, 3) and pair.B_sketched.shape == (5, 2)
    with pytest.raises(ValueError):
        gaussian_rows(rank2, np.ones((2, 2)), SketchSpec(GAUSSIAN_ROWS, 5))
    with pytest.raises(ValueError):
        gaussian_rows(rank2, rank2, SketchSpec(PCPS_COLS, 5))


def test_determinism(rank2):
    s = SketchSpec(GAUSSIAN_ROWS, 50, seed=123)
    a = gaussian_rows(rank2, rank2, s).A_sketched.to_dense()
    b = gaussian_rows(rank2, rank2, s).A_sketched.to_dense()
    assert np.array_equal(a, b)
    p = SketchSpec(PCPS_COLS, 50, seed=123)
    assert np.array_equal(pcps_cols(rank2, p).A_sketched.to_dense(),
                          pcps_cols(rank2, p).A_sketched.to_dense())


def test_pcps_single_column(rank2):
    pair = pcps_cols(rank2, SketchSpec(PCPS_COLS, 1, seed=4))
    assert pair.A_sketched.shape == (3, 1) and pair.B_sketched is None
    out = pair.A_sketched.to_dense().ravel()
    signs = [np.array(s) for s in np.ndindex(2, 2, 2)]
    assert any(np.allclose(out, rank2 @ (2 * s - 1.0)) for s in signs)


def test_apply_sketch(rank2):
    A, B = apply_sketch(rank2, rank2, None)
    assert np.array_equal(A, rank2)
    A, B = apply_sketch(rank2, rank2, SketchSpec(PCPS_COLS, 7))
    assert A.shape == (3, 7) and np.array_equal(B, rank2)


def test_recommend_dims():
    _, n = recommend_dims(2, 100, 0.5, 0.1)
    assert n == 18
    d, _ = recommend_dims(2, 100, 0.5, 0.1)
    assert d == math.ceil(2 * math.log(100 / 0.05) / 0.25)
    d1, n1 = recommend_dims(2, 100, 0.3, 0.1)
    assert d1 > d and n1 > n
    d2, n2 = recommend_dims(2, 100, 0.5, 0.1, c_gauss=2, c_pcps=2)
    assert d2 in (2 * d - 1, 2 * d) and n2 in (2 * n - 1, 2 * n)


def test_pcps_unbiased_on_rank2(rank2):
    vals = [coverage_of(pcps_cols(rank2, SketchSpec(PCPS_COLS, 400, seed=s)).A_sketched
                        .to_dense(), rank2, [0]) for s in range(100)]
    assert abs(np.mean(vals) - 3.0) / 3.0 <= 0.15
