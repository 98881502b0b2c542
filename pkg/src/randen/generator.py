"""Buffered generator over the permutation, with backtracking protection.

Refill ("generate") permutes the whole 256-byte state, then XORs the
previous inner words (words 0 and 1) back into the new inner words.  That
feed-forward makes the permutation non-invertible from the outside, so an
attacker who captures the entire state still cannot run it backwards to
recover earlier output.  The inner 16 bytes are never emitted; output is
bytes 16..256 of each refill, read in ascending order.

Byte-order contract: words are little-endian within the state, and
``next_u64``/``next_u32`` read little-endian bundles at the byte cursor.
The two 32-bit values carved from one u64 are its low half then its high
half.  Streams are only portable across machines that honour this layout.
"""

from __future__ import annotations

import struct

import numpy as np

from randen import aes
from randen.keys import KeySchedule, derive_round_keys
from randen import permutation

try:
    from randen import _speed
except ImportError:
    _speed = None

STATE_BYTES = 256
BUFFER_START = 16  # first emitted byte offset; words 0..1 stay inner
BUFFER_BYTES = STATE_BYTES - BUFFER_START  # 240 bytes, 30 u64 per refill
_U64_MAX = (1 << 64) - 1

# seed words occupy state words 4, 5, 8 and 9
_SEED_WORDS = (4, 5, 8, 9)


def initial_state(seed) -> bytes:
    """All-zero state with the four seed words planted."""
    s = tuple(seed)
    if len(s) != 4:
        raise ValueError("seed must be four 64-bit integers")
    for v in s:
        if not 0 <= v <= _U64_MAX:
            raise ValueError("seed words must be in [0, 2**64)")
    state = bytearray(STATE_BYTES)
    for word, value in zip(_SEED_WORDS, s):
        struct.pack_into("<Q", state, 8 * word, value)
    return bytes(state)


class RandenEngine:
    """Deterministic stream of 64-bit values from a 4-word seed.

    A fresh engine starts with an exhausted buffer, so the first draw
    triggers a refill.  ``next_u32`` shares the byte cursor with
    ``next_u64``; mixing them is allowed and well defined.
    """

    def __init__(self, seed=(0, 0, 0, 0), key_schedule=None, backend=None):
        if key_schedule is None:
            key_schedule = derive_round_keys()
        elif not isinstance(key_schedule, KeySchedule):
            key_schedule = KeySchedule(bytes(key_schedule))
        self.schedule = key_schedule
        self.backend = aes.resolve_backend(backend)
        self._code = aes.BACKEND_CODES.get(self.backend)  # None for python
        self._keys = key_schedule.data
        self.seed = tuple(seed)
        self._state = initial_state(seed)
        self._cursor = STATE_BYTES

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def state_bytes(self) -> bytes:
        return self._state

    @property
    def words(self):
        """The 32 state words as integers (for inspection and tests)."""
        return struct.unpack("<32Q", self._state)

    def generate(self) -> None:
        """Refill: permute, feed the old inner words forward, reset cursor."""
        if self._code is not None:
            self._state = _speed.generate_block(self._state, self._keys, self._code)
        else:
            old = self._state
            new = permutation.permute(old, self.schedule, backend="python")
            inner = bytes(a ^ b for a, b in zip(old[:16], new[:16]))
            self._state = inner + new[16:]
        self._cursor = BUFFER_START

    def next_u64(self) -> int:
        if self._cursor + 8 > STATE_BYTES:
            self.generate()
        v = int.from_bytes(self._state[self._cursor : self._cursor + 8], "little")
        self._cursor += 8
        return v

    def next_u32(self) -> int:
        if self._cursor + 4 > STATE_BYTES:
            self.generate()
        v = int.from_bytes(self._state[self._cursor : self._cursor + 4], "little")
        self._cursor += 4
        return v

    def discard(self, count: int) -> None:
        """Skip ``count`` u64 draws without materialising them.

        Whole skipped buffers are advanced by repeated refills with no byte
        copies; the final cursor equals what ``count`` next_u64 calls would
        leave behind.
        """
        if count < 0:
            raise ValueError("count must be >= 0")
        available = (STATE_BYTES - self._cursor) // 8
        if count <= available:
            self._cursor += 8 * count
            return
        count -= available
        refills = (count + 29) // 30
        served_in_last = count - 30 * (refills - 1)
        if self._code is not None:
            self._state = _speed.advance_state(
                self._state, self._keys, self._code, refills
            )
        else:
            for _ in range(refills):
                self.generate()
        self._cursor = BUFFER_START + 8 * served_in_last

    def fill_bytes(self, nbytes: int) -> bytes:
        """The raw byte stream: buffer bytes in order, refilling when empty."""
        if nbytes < 0:
            raise ValueError("nbytes must be >= 0")
        if self._code is not None:
            out, self._state, self._cursor = _speed.fill_stream(
                self._state, self._cursor, nbytes, self._keys, self._code
            )
            return out
        chunks = []
        remaining = nbytes
        while remaining > 0:
            if self._cursor >= STATE_BYTES:
                self.generate()
            take = min(STATE_BYTES - self._cursor, remaining)
            chunks.append(self._state[self._cursor : self._cursor + take])
            self._cursor += take
            remaining -= take
        return b"".join(chunks)

    def fill_u64(self, count: int) -> np.ndarray:
        """``count`` next_u64 draws as a numpy array (bit-identical order)."""
        if count < 0:
            raise ValueError("count must be >= 0")
        out = np.empty(count, dtype=np.uint64)
        i = 0
        # a u32 draw can leave a sub-word tail that next_u64 would skip at
        # the refill boundary; serve draws singly until byte and word
        # streams coincide again
        while i < count and (STATE_BYTES - self._cursor) % 8 != 0:
            out[i] = self.next_u64()
            i += 1
        if i < count:
            raw = self.fill_bytes(8 * (count - i))
            out[i:] = np.frombuffer(raw, dtype="<u8")
        return out

    def __repr__(self) -> str:
        return (
            f"RandenEngine(seed={self.seed!r}, backend={self.backend!r}, "
            f"cursor={self._cursor})"
        )
