"""Randen: an AES-round Feistel generator with backup security."""

__version__ = "0.1.0"

from randen.aes import (
    aes_round,
    aes_round_batch,
    available_backends,
    BackendUnavailableError,
    default_backend,
    verify_backends,
)
from randen.keys import derive_round_keys, KeyLengthError, KeySchedule
from randen.permutation import block_shuffle, inverse_permute, permute
from randen.generator import RandenEngine
from randen.distributions import (
    fisher_yates,
    monte_carlo_pi,
    reservoir_sample,
    uniform_below,
    unit_double,
)
from randen.search import emit_bound_table, exact_min_active, fast_min_active

# bench and report are imported on demand; they pull in timing calibration
# and matplotlib, which gen/stream users never need

__all__ = [
    "aes_round",
    "aes_round_batch",
    "available_backends",
    "BackendUnavailableError",
    "default_backend",
    "verify_backends",
    "derive_round_keys",
    "KeyLengthError",
    "KeySchedule",
    "block_shuffle",
    "inverse_permute",
    "permute",
    "RandenEngine",
    "fisher_yates",
    "monte_carlo_pi",
    "reservoir_sample",
    "uniform_below",
    "unit_double",
    "emit_bound_table",
    "exact_min_active",
    "fast_min_active",
]
