"""Branch shuffle, round functions, and the full permutation."""

import numpy as np
import pytest

from randen import aes, permutation
from randen.keys import KeySchedule, derive_round_keys
from randen import selftest

ZERO_STATE = bytes(256)
ZERO_SCHEDULE = KeySchedule(bytes(2176))


def _labelled_state() -> bytes:
    return b"".join(bytes([i]) * 16 for i in range(16))


def _random_states(n, seed):
    rng = np.random.default_rng(seed)
    return [rng.integers(0, 256, 256, dtype=np.uint8).tobytes() for _ in range(n)]


def test_shuffle_is_a_permutation():
    assert sorted(permutation.SHUFFLE) == list(range(16))
    assert permutation.SHUFFLE == (7, 2, 13, 4, 11, 8, 3, 6, 15, 0, 9, 10, 1, 14, 5, 12)


def test_block_shuffle_moves_whole_branches():
    shuffled = permutation.block_shuffle(_labelled_state())
    for i in range(16):
        branch = shuffled[16 * i : 16 * i + 16]
        assert branch == bytes([permutation.SHUFFLE[i]]) * 16


def test_block_shuffle_fixed_on_equal_branches():
    state = bytes([0xAB]) * 256
    assert permutation.block_shuffle(state) == state


def test_unshuffle_inverts_shuffle():
    for state in _random_states(5, 21):
        assert permutation._unshuffle(permutation.block_shuffle(state)) == state
        assert permutation.block_shuffle(permutation._unshuffle(state)) == state


def test_round_functions_leave_even_branches_alone():
    state = _random_states(1, 22)[0]
    keys8 = [bytes([p]) * 16 for p in range(8)]
    out = permutation.round_functions(state, keys8)
    for p in range(8):
        assert out[32 * p : 32 * p + 16] == state[32 * p : 32 * p + 16]


def test_round_functions_match_double_aes_round():
    state = _random_states(1, 23)[0]
    keys8 = _random_states(1, 24)[0][:128]
    keys8 = [keys8[16 * p : 16 * p + 16] for p in range(8)]
    out = permutation.round_functions(state, keys8)
    for p in range(8):
        even = state[32 * p : 32 * p + 16]
        odd = state[32 * p + 16 : 32 * p + 32]
        expected = aes.aes_round(aes.aes_round(even, keys8[p]), odd)
        assert out[32 * p + 16 : 32 * p + 32] == expected
        # the old odd branch enters through the final XOR only
        keyless = aes.aes_round(aes.aes_round(even, keys8[p]), bytes(16))
        assert expected == bytes(a ^ b for a, b in zip(keyless, odd))


def test_round_functions_are_an_involution():
    state = _random_states(1, 25)[0]
    keys8 = [bytes([p ^ 0x5A]) * 16 for p in range(8)]
    once = permutation.round_functions(state, keys8)
    assert permutation.round_functions(once, keys8) == state


def test_round_functions_validate_args():
    with pytest.raises(ValueError):
        permutation.round_functions(bytes(100), [bytes(16)] * 8)
    with pytest.raises(ValueError):
        permutation.round_functions(ZERO_STATE, [bytes(16)] * 7)


def test_permute_golden_zero_keys():
    expected = selftest.PERMUTE_ZERO_STATE_ZERO_KEYS
    recomputed = permutation._permute_reference(ZERO_STATE, ZERO_SCHEDULE.data)
    assert recomputed == expected
    for backend in aes.available_backends():
        assert permutation.permute(ZERO_STATE, ZERO_SCHEDULE, backend=backend) == expected


def test_permute_golden_pi_keys(pi_schedule):
    expected = selftest.PERMUTE_ZERO_STATE_PI_KEYS
    recomputed = permutation._permute_reference(ZERO_STATE, pi_schedule.data)
    assert recomputed == expected
    for backend in aes.available_backends():
        assert permutation.permute(ZERO_STATE, pi_schedule, backend=backend) == expected


def test_permute_composes_rounds_in_key_order(pi_schedule):
    """17 manual (round functions, shuffle) steps equal one permute call."""
    state = _random_states(1, 26)[0]
    manual = state
    for r in range(17):
        manual = permutation.round_functions(
            manual, [pi_schedule.key_for(r, p) for p in range(8)])
        manual = permutation.block_shuffle(manual)
    assert manual == permutation.permute(state, pi_schedule, backend="python")


def test_backends_agree_on_permute(pi_schedule):
    for state in _random_states(4, 27):
        results = {permutation.permute(state, pi_schedule, backend=b)
                   for b in aes.available_backends()}
        assert len(results) == 1


def test_inverse_round_trips(pi_schedule):
    backends = aes.available_backends()
    for i, state in enumerate(_random_states(30, 28)):
        forward = permutation.permute(state, pi_schedule)
        backend = backends[i % len(backends)]
        assert permutation.inverse_permute(forward, pi_schedule, backend=backend) == state


def test_permute_sensitive_to_keys(pi_schedule):
    tweaked = bytearray(pi_schedule.data)
    tweaked[0] ^= 1
    out_pi = permutation.permute(ZERO_STATE, pi_schedule)
    out_tweaked = permutation.permute(ZERO_STATE, KeySchedule(bytes(tweaked)))
    assert out_pi != out_tweaked


def test_permute_avalanche_quick():
    """Flipping one input bit flips about half the 2048 output bits."""
    rng = np.random.default_rng(29)
    schedule = derive_round_keys()
    distances = []
    for _ in range(30):
        state = rng.integers(0, 256, 256, dtype=np.uint8).tobytes()
        bit = int(rng.integers(0, 2048))
        flipped = bytearray(state)
        flipped[bit // 8] ^= 1 << (bit % 8)
        a = permutation.permute(state, schedule)
        b = permutation.permute(bytes(flipped), schedule)
        diff = np.frombuffer(a, np.uint8) ^ np.frombuffer(b, np.uint8)
        distances.append(int(np.unpackbits(diff).sum()))
    assert 960 <= np.mean(distances) <= 1088


def test_permute_rejects_bad_state():
    with pytest.raises(ValueError):
        permutation.permute(bytes(255))
