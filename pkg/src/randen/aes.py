"""Single AES round: reference implementation and backend selection.

The round here is the encryption round as hardware implements it:
MixColumns(ShiftRows(SubBytes(state))) XOR round_key, with state byte i
holding cell (row i % 4, column i // 4).  There is no final-round special
case and no key schedule; callers supply every 16-byte key explicitly.

Three interchangeable backends:

* ``aesni``  - one CPU instruction per round (compiled extension, x86 only)
* ``table``  - portable byte tables in C (compiled extension)
* ``python`` - this module's reference code, always available

``aesni`` and ``table`` must agree bit for bit; ``verify_backends`` checks
exactly that and is wired into the CLI selftest.
"""

from __future__ import annotations

try:
    from randen import _speed
except ImportError:  # compiled core missing: reference path only
    _speed = None


class BackendUnavailableError(RuntimeError):
    """Requested backend cannot run on this machine or build."""


# GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.  The S-box is derived rather than
# transcribed; tests pin the classic spot values (S[0x00] = 0x63 etc.) and
# compare against the AES instruction when present.
def _build_sbox() -> tuple[bytes, bytes]:
    exp = [0] * 255
    log = [0] * 256
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x ^= (x << 1) ^ (0x11B if x & 0x80 else 0)  # multiply by 0x03
        x &= 0xFF
    sbox = bytearray(256)
    for i in range(256):
        inv = exp[(255 - log[i]) % 255] if i else 0
        s = 0x63
        for r in range(5):
            rot = ((inv << r) | (inv >> (8 - r))) & 0xFF
            s ^= rot
        sbox[i] = s
    xtime = bytes(((i << 1) ^ (0x1B if i & 0x80 else 0)) & 0xFF for i in range(256))
    return bytes(sbox), xtime


SBOX, _XTIME = _build_sbox()

# ShiftRows as a flat byte gather: out[4c + r] = in[4*((c + r) % 4) + r]
SHIFT_ROWS = tuple(4 * ((i // 4 + i % 4) % 4) + i % 4 for i in range(16))

BLOCK_BYTES = 16


def aes_round(block: bytes, key: bytes) -> bytes:
    """One AES encryption round of ``block`` under ``key`` (reference path).

    Key material enters only through the final XOR, so
    ``aes_round(x, k) == aes_round(x, bytes(16)) xor k``.
    """
    if len(block) != BLOCK_BYTES or len(key) != BLOCK_BYTES:
        raise ValueError("block and key must each be 16 bytes")
    t = [SBOX[block[SHIFT_ROWS[i]]] for i in range(16)]
    out = bytearray(16)
    for c in range(0, 16, 4):
        a0, a1, a2, a3 = t[c : c + 4]
        allx = a0 ^ a1 ^ a2 ^ a3
        out[c] = a0 ^ allx ^ _XTIME[a0 ^ a1] ^ key[c]
        out[c + 1] = a1 ^ allx ^ _XTIME[a1 ^ a2] ^ key[c + 1]
        out[c + 2] = a2 ^ allx ^ _XTIME[a2 ^ a3] ^ key[c + 2]
        out[c + 3] = a3 ^ allx ^ _XTIME[a3 ^ a0] ^ key[c + 3]
    return bytes(out)


# ---------------------------------------------------------------------------
# backend registry

BACKEND_CODES = {"aesni": 1, "table": 2}


def have_hardware() -> bool:
    return _speed is not None and _speed.have_aesni()


def available_backends() -> tuple[str, ...]:
    names = []
    if have_hardware():
        names.append("aesni")
    if _speed is not None:
        names.append("table")
    names.append("python")
    return tuple(names)


def default_backend() -> str:
    return available_backends()[0]


def resolve_backend(name=None) -> str:
    """Map a backend name (or None for the default) to an available one."""
    if name is None:
        return default_backend()
    if name not in ("aesni", "table", "python"):
        raise ValueError(f"unknown backend {name!r}")
    if name not in available_backends():
        raise BackendUnavailableError(f"backend {name!r} unavailable here")
    return name


def aes_round_batch(blocks: bytes, keys: bytes, backend=None) -> bytes:
    """Apply one AES round to each 16-byte block with its matching key."""
    if len(blocks) != len(keys) or len(blocks) % 16:
        raise ValueError("blocks and keys must be equal multiples of 16 bytes")
    backend = resolve_backend(backend)
    if backend == "python":
        return b"".join(
            aes_round(blocks[i : i + 16], keys[i : i + 16])
            for i in range(0, len(blocks), 16)
        )
    return _speed.aes_round_blocks(blocks, keys, BACKEND_CODES[backend])


def verify_backends(sample_count: int) -> bool:
    """Compare the hardware and portable rounds on random (block, key) pairs.

    Returns True when every pair matches.  Raises BackendUnavailableError on
    machines without AES instructions, which is a different condition from a
    mismatch and is reported as such by the selftest.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    if not have_hardware():
        raise BackendUnavailableError("hardware AES backend unavailable")
    import numpy as np

    rng = np.random.default_rng(0x5EED5EED)
    remaining = sample_count
    while remaining > 0:
        n = min(remaining, 1 << 16)
        blocks = rng.integers(0, 256, size=16 * n, dtype=np.uint8).tobytes()
        keys = rng.integers(0, 256, size=16 * n, dtype=np.uint8).tobytes()
        hw = _speed.aes_round_blocks(blocks, keys, BACKEND_CODES["aesni"])
        sw = _speed.aes_round_blocks(blocks, keys, BACKEND_CODES["table"])
        if hw != sw:
            return False
        remaining -= n
    return True
