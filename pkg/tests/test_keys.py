"""Key schedule: the pi constant and the file/stream sources."""

import io

import pytest

from randen import keys


def _pi_fraction_bytes(nbytes: int) -> bytes:
    """Independent recomputation: Machin's formula in integer arithmetic."""
    guard = 64
    prec = 8 * nbytes + guard

    def atan_inv(x: int) -> int:
        total, k, power = 0, 0, x
        xx = x * x
        while True:
            term = (1 << prec) // ((2 * k + 1) * power)
            if term == 0:
                return total
            total += -term if k & 1 else term
            power *= xx
            k += 1

    pi_scaled = 16 * atan_inv(5) - 4 * atan_inv(239)
    fraction = pi_scaled - (3 << prec)
    assert 0 < fraction < 1 << prec
    return (fraction >> guard).to_bytes(nbytes, "big")


def test_pi_constant_matches_independent_computation():
    assert keys.PI_FRACTION == _pi_fraction_bytes(keys.SCHEDULE_BYTES)


def test_pi_constant_against_mpmath():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.prec = 8 * keys.SCHEDULE_BYTES + 128
    scaled = int(mpmath.floor((mpmath.mp.pi - 3) * (1 << (8 * keys.SCHEDULE_BYTES))))
    assert keys.PI_FRACTION == scaled.to_bytes(keys.SCHEDULE_BYTES, "big")


def test_first_key_block_is_classic_pi_prefix():
    schedule = keys.derive_round_keys()
    assert schedule[0].hex() == "243f6a8885a308d313198a2e03707344"


def test_builtin_schedule_shape_and_distinctness():
    schedule = keys.derive_round_keys()
    assert len(schedule) == 136
    assert len(schedule.data) == 2176
    assert schedule.all_distinct()
    assert schedule.source == "builtin-pi"


def test_key_for_indexing():
    schedule = keys.derive_round_keys()
    assert schedule.key_for(0, 0) == schedule[0]
    assert schedule.key_for(0, 7) == schedule[7]
    assert schedule.key_for(1, 0) == schedule[8]
    assert schedule.key_for(16, 7) == schedule[135]
    with pytest.raises(IndexError):
        schedule.key_for(17, 0)
    with pytest.raises(IndexError):
        schedule.key_for(0, 8)
    with pytest.raises(IndexError):
        schedule[136]


def test_zero_key_file_yields_zero_blocks(tmp_path):
    path = tmp_path / "zero.keys"
    path.write_bytes(bytes(2176))
    schedule = keys.derive_round_keys(path)
    assert all(schedule[i] == bytes(16) for i in range(136))
    assert not schedule.all_distinct()  # user material is taken verbatim


def test_short_key_file_rejected(tmp_path):
    path = tmp_path / "short.keys"
    path.write_bytes(bytes(2175))
    with pytest.raises(keys.KeyLengthError):
        keys.derive_round_keys(path)


def test_long_key_file_rejected(tmp_path):
    path = tmp_path / "long.keys"
    path.write_bytes(bytes(2177))
    with pytest.raises(keys.KeyLengthError):
        keys.derive_round_keys(path)


def test_missing_key_file_raises_oserror(tmp_path):
    with pytest.raises(OSError):
        keys.derive_round_keys(tmp_path / "nope.keys")


def test_bytes_and_stream_sources():
    from_bytes = keys.derive_round_keys(keys.PI_FRACTION)
    assert from_bytes.data == keys.PI_FRACTION
    from_stream = keys.derive_round_keys(io.BytesIO(keys.PI_FRACTION))
    assert from_stream.data == keys.PI_FRACTION
    with pytest.raises(keys.KeyLengthError):
        keys.derive_round_keys(b"\x00" * 16)
