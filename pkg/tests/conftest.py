import numpy as np
import pytest

# A_3 = A_1 + A_2, so any two columns span the column space
RANK2 = np.array([[1.0, 0.0, 1.0],
                    [1.0, -1.0, 0.0],
                    [0.0, 1.0, 1.0]])


@pytest.fixture
def rank2():
    return RANK2.copy()


@pytest.fixture
def rank2_csv(tmp_path):
    p = tmp_path / "rank2.csv"
    p.write_text("1,0,1\n1,-1,0\n0,1,1\n")
    return p
