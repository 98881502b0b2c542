"""The AES round: reference correctness and backend agreement."""

import numpy as np
import pytest

from randen import aes


# ---------------------------------------------------------------------------
# independent oracle: textbook GF(2^8) arithmetic, no shared tables

def _gmul(a: int, b: int) -> int:
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        if a & 0x100:
            a ^= 0x11B
        b >>= 1
    return result & 0xFF


def _sbox_oracle(x: int) -> int:
    inv = next(c for c in range(256) if _gmul(x, c) == 1) if x else 0
    out = 0
    for bit in range(8):
        v = ((inv >> bit) & 1) ^ ((inv >> (bit + 4) % 8) & 1) \
            ^ ((inv >> (bit + 5) % 8) & 1) ^ ((inv >> (bit + 6) % 8) & 1) \
            ^ ((inv >> (bit + 7) % 8) & 1) ^ ((0x63 >> bit) & 1)
        out |= v << bit
    return out


def _aes_round_oracle(block: bytes, key: bytes) -> bytes:
    # matrix form: cell (r, c) at byte 4c + r
    s = [[block[4 * c + r] for c in range(4)] for r in range(4)]
    s = [[aes.SBOX[v] for v in row] for row in s]
    s = [[s[r][(c + r) % 4] for c in range(4)] for r in range(4)]
    out = bytearray(16)
    for c in range(4):
        col = [s[r][c] for r in range(4)]
        for r in range(4):
            out[4 * c + r] = (_gmul(col[r], 2) ^ _gmul(col[(r + 1) % 4], 3)
                              ^ col[(r + 2) % 4] ^ col[(r + 3) % 4]
                              ^ key[4 * c + r])
    return bytes(out)


def test_sbox_against_field_arithmetic():
    sampled = list(range(0, 256, 7)) + [0, 1, 2, 0x53, 0xCA, 0xFF]
    for x in sampled:
        assert aes.SBOX[x] == _sbox_oracle(x)


def test_sbox_spot_values():
    assert aes.SBOX[0x00] == 0x63
    assert aes.SBOX[0x01] == 0x7C
    assert aes.SBOX[0x53] == 0xED
    assert aes.SBOX[0xFF] == 0x16
    assert sorted(aes.SBOX) == list(range(256))  # bijective


def test_shift_rows_formula():
    assert aes.SHIFT_ROWS == (0, 5, 10, 15, 4, 9, 14, 3, 8, 13, 2, 7, 12, 1, 6, 11)


def test_zero_round_vector():
    assert aes.aes_round(bytes(16), bytes(16)) == bytes([0x63]) * 16


def test_round_against_independent_oracle():
    rng = np.random.default_rng(11)
    for _ in range(40):
        block = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
        key = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
        assert aes.aes_round(block, key) == _aes_round_oracle(block, key)


def test_key_enters_linearly():
    rng = np.random.default_rng(12)
    for _ in range(20):
        block = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
        key = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
        keyless = aes.aes_round(block, bytes(16))
        expected = bytes(a ^ b for a, b in zip(keyless, key))
        assert aes.aes_round(block, key) == expected


def test_round_rejects_bad_lengths():
    with pytest.raises(ValueError):
        aes.aes_round(bytes(15), bytes(16))
    with pytest.raises(ValueError):
        aes.aes_round(bytes(16), bytes(17))


def test_round_is_injective_on_sample():
    rng = np.random.default_rng(13)
    blocks = rng.integers(0, 256, size=(100_000, 16), dtype=np.uint8)
    blocks = np.unique(blocks, axis=0)
    out = aes.aes_round_batch(blocks.tobytes(), bytes(16 * len(blocks)),
                              backend=aes.default_backend())
    arr = np.frombuffer(out, dtype=np.uint8).reshape(-1, 16)
    assert len(np.unique(arr, axis=0)) == len(blocks)


def test_backends_agree_on_random_pairs():
    rng = np.random.default_rng(14)
    blocks = rng.integers(0, 256, 16 * 200, dtype=np.uint8).tobytes()
    keys = rng.integers(0, 256, 16 * 200, dtype=np.uint8).tobytes()
    results = {b: aes.aes_round_batch(blocks, keys, backend=b)
               for b in aes.available_backends()}
    assert len(set(results.values())) == 1


def test_aes_round_batch_validates_shapes():
    with pytest.raises(ValueError):
        aes.aes_round_batch(bytes(16), bytes(32))
    with pytest.raises(ValueError):
        aes.aes_round_batch(bytes(15), bytes(15))


@pytest.mark.skipif(not aes.have_hardware(), reason="no AES instructions")
def test_verify_backends_agreement():
    assert aes.verify_backends(1) is True
    assert aes.verify_backends(10_000) is True


def test_verify_backends_rejects_zero_samples():
    with pytest.raises(ValueError):
        aes.verify_backends(0)


def test_resolve_backend_names():
    assert aes.resolve_backend(None) == aes.default_backend()
    assert aes.resolve_backend("python") == "python"
    with pytest.raises(ValueError):
        aes.resolve_backend("nonsense")


def test_missing_core_degrades_to_python(monkeypatch):
    monkeypatch.setattr(aes, "_speed", None)
    assert aes.available_backends() == ("python",)
    assert aes.default_backend() == "python"
    with pytest.raises(aes.BackendUnavailableError):
        aes.resolve_backend("table")
    with pytest.raises(aes.BackendUnavailableError):
        aes.verify_backends(10)
