"""Exact-arithmetic upper bounds on the Hausdorff dimension of Rauzy gaskets."""

from .core import (
    Simplex,
    apply_map,
    column_norms,
    generator_matrix,
    nu,
    volume_ratio_oracle,
    word_matrix,
    word_simplex,
)
from .enumeration import EXACT, DeltaMode, x_partition_sum, x_series, x_sum
from .renewal import criterion_sum, min_delta

__version__ = "0.1.0"

__all__ = [
    "EXACT",
    "DeltaMode",
    "Simplex",
    "apply_map",
    "column_norms",
    "criterion_sum",
    "generator_matrix",
    "min_delta",
    "nu",
    "volume_ratio_oracle",
    "word_matrix",
    "word_simplex",
    "x_partition_sum",
    "x_series",
    "x_sum",
]
