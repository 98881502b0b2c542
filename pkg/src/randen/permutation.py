"""The 2048-bit permutation: 17 rounds of a 16-branch Feistel network.

State layout: 256 bytes = 16 branches of 16 bytes; branch b occupies bytes
[16b, 16b + 16).  Viewed as 64-bit words (little-endian), word w lives at
bytes [8w, 8w + 8).  Each round applies the round function to every branch
pair, then permutes whole branches:

* pair p: odd branch 2p+1 ^= MSS(MSS(even) ^ key_p) where MSS is the keyless
  AES round; expressed with ``aes_round`` the XOR comes free as the second
  round's key: new_odd = aes_round(aes_round(even, key_p), old_odd)
* branch shuffle: new[i] = old[SHUFFLE[i]]

The shuffle was chosen to maximise the number of provably active round
functions (see the search module); the identity layout or the rotate-by-one
layout would activate far fewer.
"""

from __future__ import annotations

from randen import aes
from randen.keys import KeySchedule, derive_round_keys

try:
    from randen import _speed
except ImportError:
    _speed = None

STATE_BYTES = 256
NUM_BRANCHES = 16
BRANCH_BYTES = 16
NUM_ROUNDS = 17

SHUFFLE = (7, 2, 13, 4, 11, 8, 3, 6, 15, 0, 9, 10, 1, 14, 5, 12)

_INVERSE_SHUFFLE = tuple(SHUFFLE.index(i) for i in range(NUM_BRANCHES))


def _check_state(state: bytes) -> None:
    if len(state) != STATE_BYTES:
        raise ValueError(f"state must be {STATE_BYTES} bytes, got {len(state)}")


def _schedule_bytes(schedule) -> bytes:
    if schedule is None:
        return derive_round_keys().data
    if isinstance(schedule, KeySchedule):
        return schedule.data
    return KeySchedule(bytes(schedule)).data


def block_shuffle(state: bytes) -> bytes:
    """Permute whole 16-byte branches: new[i] = old[SHUFFLE[i]]."""
    _check_state(state)
    out = bytearray(STATE_BYTES)
    for i, src in enumerate(SHUFFLE):
        out[16 * i : 16 * i + 16] = state[16 * src : 16 * src + 16]
    return bytes(out)


def _unshuffle(state: bytes) -> bytes:
    out = bytearray(STATE_BYTES)
    for i, src in enumerate(_INVERSE_SHUFFLE):
        out[16 * i : 16 * i + 16] = state[16 * src : 16 * src + 16]
    return bytes(out)


def round_functions(state: bytes, round_keys) -> bytes:
    """Apply the Feistel step to all 8 branch pairs (reference path).

    ``round_keys`` is a sequence of 8 16-byte keys.  Even branches pass
    through unchanged; the update XORs a function of the even branch into
    the odd branch, so applying it twice is the identity.
    """
    _check_state(state)
    keys = list(round_keys)
    if len(keys) != 8:
        raise ValueError("need exactly 8 round keys")
    out = bytearray(state)
    for p in range(8):
        even = state[32 * p : 32 * p + 16]
        odd = state[32 * p + 16 : 32 * p + 32]
        f1 = aes.aes_round(even, keys[p])
        out[32 * p + 16 : 32 * p + 32] = aes.aes_round(f1, odd)
    return bytes(out)


def _permute_reference(state: bytes, keys: bytes) -> bytes:
    for r in range(NUM_ROUNDS):
        state = round_functions(
            state, [keys[16 * (8 * r + p) : 16 * (8 * r + p) + 16] for p in range(8)]
        )
        state = block_shuffle(state)
    return state


def _inverse_reference(state: bytes, keys: bytes) -> bytes:
    for r in reversed(range(NUM_ROUNDS)):
        state = _unshuffle(state)
        state = round_functions(
            state, [keys[16 * (8 * r + p) : 16 * (8 * r + p) + 16] for p in range(8)]
        )
    return state


def permute(state: bytes, schedule=None, backend=None) -> bytes:
    """Run the full 17-round permutation and return the new 256-byte state."""
    _check_state(state)
    keys = _schedule_bytes(schedule)
    backend = aes.resolve_backend(backend)
    if backend == "python":
        return _permute_reference(bytes(state), keys)
    return _speed.permute_block(bytes(state), keys, aes.BACKEND_CODES[backend])


def inverse_permute(state: bytes, schedule=None, backend=None) -> bytes:
    """Invert ``permute``; mainly a bijectivity oracle for tests."""
    _check_state(state)
    keys = _schedule_bytes(schedule)
    backend = aes.resolve_backend(backend)
    if backend == "python":
        return _inverse_reference(bytes(state), keys)
    return _speed.inverse_permute_block(bytes(state), keys, aes.BACKEND_CODES[backend])
