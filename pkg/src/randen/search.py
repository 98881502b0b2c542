"""Lower bounds on active round functions of the branch shuffle.

Branch-level differential activity: a branch is active (1) or inactive (0),
and each round applies the Feistel update pairwise then the branch shuffle.
The number of active round functions over r rounds lower-bounds the number
of active AES rounds, which is what makes the full permutation's security
margin arguable.  Working at branch granularity needs only two 8-wide
shuffles, one feeding the new odd branches from the old even branches and
one feeding the new even branches from the round-function outputs.

Two activity rules:

* fast: the XOR of an active round-function output into an active odd
  branch is assumed to cancel (``xor_result``).  Cancellation is the
  attacker's best case, but assuming it always happens explores only one
  trajectory per start state, so the resulting bound can overestimate.
* exact: both outcomes are explored whenever input and output are both
  active, taking the minimum over all cancellation choices.  This is the
  defensible bound.

The exact search runs as a level-by-level dynamic program over all 65,536
(even, odd) activity states, which visits every trajectory an explicit
branch-and-bound would, in a few milliseconds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_ROUNDS = 24


@dataclass(frozen=True)
class SearchShuffles:
    """Half-width shuffles acting on branch-pair indices.

    new_odd[i] = even[for_new_odd[i]];  new_even[i] = f_out[for_new_even[i]]
    where f_out is the round-function output activity.
    """

    for_new_odd: tuple
    for_new_even: tuple

    @property
    def pairs(self) -> int:
        return len(self.for_new_odd)


# The production 16-branch shuffle, folded to pair granularity.
PRODUCTION_SHUFFLES = SearchShuffles(
    for_new_odd=(3, 6, 5, 1, 7, 4, 0, 2),
    for_new_even=(1, 2, 4, 3, 0, 5, 7, 6),
)

# 4-branch network (2 pairs, rotate-by-one layout); small enough that an
# unpruned recursion can exhaust it, which the tests use as an oracle.
REDUCED_4BRANCH = SearchShuffles(for_new_odd=(1, 0), for_new_even=(0, 1))

# Reference values for the production shuffle; emit_bound_table flags any
# regression against these.
EXPECTED_MIN_ACTIVE = {
    1: 0, 2: 1, 3: 2, 4: 3, 5: 4, 6: 6, 7: 8, 8: 11, 9: 14, 10: 18,
    11: 22, 12: 24, 13: 27, 14: 30, 15: 32, 16: 35, 17: 36, 18: 39,
    19: 41, 20: 44, 21: 45, 22: 48, 23: 50, 24: 53,
}


def xor_result(a_active, b_active) -> int:
    """Fast-rule activity of ``a ^ b``: both-active is assumed to cancel."""
    return int(bool(a_active)) ^ int(bool(b_active))


def _validate(rounds: int, worker_count: int = 1) -> None:
    if not 1 <= rounds <= MAX_ROUNDS:
        raise ValueError(f"rounds must be in [1, {MAX_ROUNDS}], got {rounds}")
    if worker_count < 1:
        raise ValueError("worker_count must be >= 1")


def _mask_table(perm) -> np.ndarray:
    """Lookup table applying a bit permutation to every mask: out bit i is
    in bit perm[i]."""
    size = 1 << len(perm)
    masks = np.arange(size, dtype=np.uint32)
    out = np.zeros(size, dtype=np.uint32)
    for i, src in enumerate(perm):
        out |= ((masks >> src) & 1) << i
    return out.astype(np.int64)


def _popcount_table(bits: int) -> np.ndarray:
    values = np.arange(1 << bits, dtype=np.uint32)
    pop = np.zeros(1 << bits, dtype=np.int64)
    for b in range(bits):
        pop += (values >> b) & 1
    return pop


def fast_min_active(rounds: int, shuffles: SearchShuffles = None) -> int:
    """Minimum active round functions under the always-cancel rule."""
    _validate(rounds)
    if shuffles is None:
        shuffles = PRODUCTION_SHUFFLES
    p = shuffles.pairs
    t_odd = _mask_table(shuffles.for_new_odd)
    t_even = _mask_table(shuffles.for_new_even)
    pop = _popcount_table(p)
    half = 1 << p
    state = np.arange(half * half, dtype=np.int64)
    even = state >> p
    odd = state & (half - 1)
    active = np.zeros(half * half, dtype=np.int64)
    for _ in range(rounds):
        active += pop[even]
        even, odd = t_even[even ^ odd], t_odd[even]
    return int(active[1:].min())


@lru_cache(maxsize=8)
def _dp_tables(shuffles: SearchShuffles):
    """Flattened child lists for the exact search.

    For state (even, odd) the round-function output is active exactly where
    one input is active; where both are active either outcome is possible.
    Children enumerate every choice: f_out = (even ^ odd) | s over submasks
    s of even & odd.
    """
    p = shuffles.pairs
    half = 1 << p
    t_odd = [int(v) for v in _mask_table(shuffles.for_new_odd)]
    t_even = [int(v) for v in _mask_table(shuffles.for_new_even)]
    nstates = half * half
    offsets = np.zeros(nstates + 1, dtype=np.int64)
    flat = []
    for even in range(half):
        new_odd = t_odd[even]
        for odd in range(half):
            base = even ^ odd
            both = even & odd
            s = both
            while True:
                flat.append((t_even[base | s] << p) | new_odd)
                if s == 0:
                    break
                s = (s - 1) & both
            offsets[((even << p) | odd) + 1] = len(flat)
    pop = _popcount_table(p)
    pop_even = pop[np.arange(nstates, dtype=np.int64) >> p]
    return np.array(flat, dtype=np.int64), offsets, pop_even


def _sharded_min(values: np.ndarray, worker_count: int) -> int:
    """Minimum over the nonzero start states, sharded the way a worker pool
    would split the scan; the result does not depend on the split."""
    shards = np.array_split(values[1:], worker_count)
    return min(int(s.min()) for s in shards if s.size)


def _exact_levels(shuffles: SearchShuffles, max_rounds: int, worker_count: int):
    flat, offsets, pop_even = _dp_tables(shuffles)
    f = np.zeros(len(pop_even), dtype=np.int64)
    mins = []
    for _ in range(max_rounds):
        f = pop_even + np.minimum.reduceat(f[flat], offsets[:-1])
        mins.append(_sharded_min(f, worker_count))
    return mins


def exact_min_active(
    rounds: int, worker_count: int = 1, shuffles: SearchShuffles = None
) -> int:
    """Minimum active round functions over every cancellation choice.

    Never exceeds ``fast_min_active`` for the same round count, and is
    non-decreasing in ``rounds``.  ``worker_count`` shards the start-state
    scan; results are identical for any value.
    """
    _validate(rounds, worker_count)
    if shuffles is None:
        shuffles = PRODUCTION_SHUFFLES
    return _exact_levels(shuffles, rounds, worker_count)[-1]


@dataclass
class BoundRow:
    rounds: int
    fast_bound: int
    exact_bound: int
    expected: int  # None when no reference value is embedded
    ok: bool


def emit_bound_table(
    max_rounds: int, worker_count: int = 1, shuffles: SearchShuffles = None
):
    """Per-round bounds from 1 to ``max_rounds``, checked against the
    embedded reference values when the production shuffle is searched."""
    _validate(max_rounds, worker_count)
    if shuffles is None:
        shuffles = PRODUCTION_SHUFFLES
    exact = _exact_levels(shuffles, max_rounds, worker_count)
    rows = []
    for r in range(1, max_rounds + 1):
        expected = (
            EXPECTED_MIN_ACTIVE.get(r) if shuffles == PRODUCTION_SHUFFLES else None
        )
        rows.append(
            BoundRow(
                rounds=r,
                fast_bound=fast_min_active(r, shuffles),
                exact_bound=exact[r - 1],
                expected=expected,
                ok=expected is None or exact[r - 1] == expected,
            )
        )
    return rows


def format_bound_table(rows) -> str:
    header = f"{'rounds':>6}  {'fast':>4}  {'exact':>5}  {'expected':>8}  {'ok':>4}"
    lines = [header, "-" * len(header)]
    for row in rows:
        expected = "-" if row.expected is None else str(row.expected)
        lines.append(
            f"{row.rounds:>6}  {row.fast_bound:>4}  {row.exact_bound:>5}  "
            f"{expected:>8}  {'yes' if row.ok else 'NO':>4}"
        )
    return "\n".join(lines)
