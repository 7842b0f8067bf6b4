"""Hierarchical mixtures of 2^j-cubes on Z^d.

Models and profiles are plain dicts in the same format as the CLI's JSON
files; results come back as dicts.
"""

from ._core import (
    Error,
    block_probability,
    c_d,
    classify_phase,
    densities,
    entropy,
    fixed_points,
    fractal,
    invert,
    lambda_d,
    log_partition_function,
    multicanonical_count,
    multicanonical_logcount,
    oracle_partition,
    pressure,
    sample_stats,
)

__version__ = "0.1.0"


def error_code(exc):
    """Error code name carried by a hiercubes.Error, e.g. "TooLarge"."""
    return exc.args[1] if len(exc.args) > 1 else None


__all__ = [
    "Error",
    "block_probability",
    "c_d",
    "classify_phase",
    "densities",
    "entropy",
    "error_code",
    "fixed_points",
    "fractal",
    "invert",
    "lambda_d",
    "log_partition_function",
    "multicanonical_count",
    "multicanonical_logcount",
    "oracle_partition",
    "pressure",
    "sample_stats",
]
