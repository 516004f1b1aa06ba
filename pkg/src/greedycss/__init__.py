"""Greedy column subset selection: single-machine, sampled and distributed greedy,
random sketches, and brute-force oracles for checking the guarantees."""
__version__ = "0.1.0"

from .dist import DistConfig, DistResult, dist_greedy_epochs, dist_greedy_round, random_partition
from .matcore import ColumnMatrix, frobenius_sq, load_matrix, save_matrix
from .objective import coverage_naive, coverage_of, init_state
from .oracle import brute_force_opt, spectrum
from .select import LazierParams, SelectionResult, greedy, lazier_greedy, random_baseline
from .sketch import SketchSpec, gaussian_rows, pcps_cols, recommend_dims
