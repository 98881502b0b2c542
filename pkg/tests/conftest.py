"""Shared test helpers: scripted engines and the unpruned search oracle."""

from __future__ import annotations

import pytest


class ScriptedEngine:
    """Feeds a fixed list of u64 draws; raises when exhausted."""

    def __init__(self, values):
        self.values = list(values)

    def next_u64(self) -> int:
        return self.values.pop(0)


class CountingEngine:
    """Counts draws; returns a fixed value."""

    def __init__(self, value: int = 0):
        self.value = value
        self.calls = 0

    def next_u64(self) -> int:
        self.calls += 1
        return self.value


def exhaustive_min_active(shuffles, rounds: int) -> int:
    """Unpruned recursive enumeration of every cancellation choice.

    Deliberately brute force (no memoisation, no bounds): the oracle the
    production search must agree with on small networks.
    """
    p = shuffles.pairs
    size = 1 << p

    def apply(perm, mask):
        out = 0
        for i, src in enumerate(perm):
            out |= ((mask >> src) & 1) << i
        return out

    best = [float("inf")]

    def recurse(even, odd, remaining, acc):
        if remaining == 0:
            best[0] = min(best[0], acc)
            return
        acc += bin(even).count("1")
        base = even ^ odd
        both = even & odd
        new_odd = apply(shuffles.for_new_odd, even)
        s = both
        while True:
            recurse(apply(shuffles.for_new_even, base | s), new_odd,
                    remaining - 1, acc)
            if s == 0:
                break
            s = (s - 1) & both

    for even in range(size):
        for odd in range(size):
            if even or odd:
                recurse(even, odd, rounds, 0)
    return int(best[0])


@pytest.fixture(scope="session")
def pi_schedule():
    from randen.keys import derive_round_keys

    return derive_round_keys()
