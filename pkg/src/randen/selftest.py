"""Built-in health checks: backends, golden vectors, output statistics.

The golden vectors were produced by the pure-Python reference path and
frozen; every backend must reproduce them byte for byte, on every machine,
forever.  The statistical smoke test is a cheap gate (bit balance and byte
chi-square on an 8 MiB stream), not a substitute for a real battery; the
README shows how to pipe output into PractRand or dieharder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from randen import aes
from randen.generator import RandenEngine
from randen.keys import KeySchedule, derive_round_keys
from randen.permutation import permute

SMOKE_BYTES = 8 << 20
MONOBIT_TOLERANCE = 2.5e-4  # ~6.5 sigma at 8 MiB, fails only when broken
CHI2_P_RANGE = (1e-6, 1.0 - 1e-6)

PERMUTE_ZERO_STATE_ZERO_KEYS = bytes.fromhex(
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
    "6b6b6b6b6b6b6b6b6b6b6b6b6b6b6b6bf1f1f1f1f1f1f1f1f1f1f1f1f1f1f1f1"
)

PERMUTE_ZERO_STATE_PI_KEYS = bytes.fromhex(
    "3654dfb23dec373e12bd7ef698956c268d02b19ebb2a6b304b3a575ddc2e0333"
    "7166b5ed52f2f281975f750688c0d298aba5ec75c0f9ddd6732496805fad5aca"
    "cd89f79d9c264f62a004d964f640a5cfc282c22b16ed3e093f02355923686583"
    "9bee83418cc39c72a3355a741acb66ac314e1dd30fb22acc8ddc11f4902524be"
    "910d814acf6949cdc44161febf47488a29c5b3651c912dfc44715f44c7c3b380"
    "d9e0096e34188aa7f4ceaf52c114727087fb87c616b40b8342a4c09a38bfdfa5"
    "62ab4ddea67776e9cb10e1263fba692a111ac18c960d001878827f6366282f9e"
    "db9a3ba0b33d9ba56ac04f393d443f605472cd3faef2a145c34b97ca8d48c5c7"
)

STREAM_SEED_0000 = bytes.fromhex(
    "8d02b19ebb2a6b304b3a575ddc2e03337166b5ed52f2f281975f750688c0d298"
    "aba5ec75c0f9ddd6732496805fad5acacd89f79d9c264f62a004d964f640a5cf"
    "c282c22b16ed3e093f023559236865839bee83418cc39c72a3355a741acb66ac"
    "314e1dd30fb22acc8ddc11f4902524be910d814acf6949cdc44161febf47488a"
    "29c5b3651c912dfc44715f44c7c3b380d9e0096e34188aa7f4ceaf52c1147270"
    "87fb87c616b40b8342a4c09a38bfdfa562ab4ddea67776e9cb10e1263fba692a"
    "111ac18c960d001878827f6366282f9edb9a3ba0b33d9ba56ac04f393d443f60"
    "5472cd3faef2a145c34b97ca8d48c5c7"
)

STREAM_SEED_1234 = bytes.fromhex(
    "21142a41af00da8b0ffa33dc9218970f05db185bacd7dc2f86798d4a9bd5b30e"
    "753f661c507e01b54602fa56e9fd8ce8d366e8b1ad117332ecc0e225b1199f9d"
    "1417a6778dbb0b151069669254c94b6e29fe0c5f7657d7d563849ed90d568f7b"
    "9696e9e56d8b37df50a16a8c783af8a360dbee17d551c40faa5ba50caa58b1e8"
    "025c02204250b3270fb860f08d0afb99d34160aa12522ce43e45e99e861f9f82"
    "f8bde76a38c4f4618cecbadaf2da3da28bdde7197b74e90f0f1d254fc26a2d77"
    "a66798db291eeb715c6440e66d332b91066838b533ba4d8d265fc4d8bd7f1f2e"
    "0ba5b8ce27738b8d3b58bf2cd971a4b5"
)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


def _check_backends(samples: int) -> CheckResult:
    if not aes.have_hardware():
        return CheckResult("backend-agreement", True,
                           "skipped: hardware AES backend unavailable")
    ok = aes.verify_backends(samples)
    return CheckResult("backend-agreement", ok,
                       f"{samples} random (block, key) pairs" if ok
                       else "hardware and table rounds disagree")


def _check_aes_vector() -> CheckResult:
    expected = bytes([0x63]) * 16
    for backend in aes.available_backends():
        got = aes.aes_round_batch(bytes(16), bytes(16), backend=backend)
        if got != expected:
            return CheckResult("aes-round-vector", False,
                               f"backend {backend} broke the zero-round vector")
    return CheckResult("aes-round-vector", True)


def _check_key_schedule() -> CheckResult:
    schedule = derive_round_keys()
    ok = (schedule[0].hex() == "243f6a8885a308d313198a2e03707344"
          and schedule.all_distinct() and len(schedule) == 136)
    return CheckResult("key-schedule", ok)


def _check_permute_goldens() -> list:
    zero = bytes(256)
    cases = [
        ("permute-zero-keys", KeySchedule(bytes(2176)), PERMUTE_ZERO_STATE_ZERO_KEYS),
        ("permute-pi-keys", derive_round_keys(), PERMUTE_ZERO_STATE_PI_KEYS),
    ]
    results = []
    for name, schedule, expected in cases:
        bad = [b for b in aes.available_backends()
               if permute(zero, schedule, backend=b) != expected]
        results.append(CheckResult(name, not bad,
                                   f"mismatch on {bad}" if bad else ""))
    return results


def _check_stream_goldens() -> list:
    cases = [
        ("stream-seed-0", (0, 0, 0, 0), STREAM_SEED_0000),
        ("stream-seed-1234", (1, 2, 3, 4), STREAM_SEED_1234),
    ]
    results = []
    for name, seed, expected in cases:
        bad = [b for b in aes.available_backends()
               if RandenEngine(seed, backend=b).fill_bytes(240) != expected]
        results.append(CheckResult(name, not bad,
                                   f"mismatch on {bad}" if bad else ""))
    return results


def statistical_smoke(data: bytes):
    """(monobit_ok, fraction_of_ones, chi2_ok, p_value) for a byte stream."""
    from scipy import stats

    arr = np.frombuffer(data, dtype=np.uint8)
    ones = int(np.unpackbits(arr).sum())
    fraction = ones / (8 * len(arr))
    # the fraction's standard deviation shrinks with 1/sqrt(bits), so widen
    # the band for shorter streams to keep the same false-failure rate
    tolerance = MONOBIT_TOLERANCE * (SMOKE_BYTES / len(arr)) ** 0.5
    monobit_ok = abs(fraction - 0.5) <= tolerance
    counts = np.bincount(arr, minlength=256)
    p_value = float(stats.chisquare(counts).pvalue)
    chi2_ok = CHI2_P_RANGE[0] <= p_value <= CHI2_P_RANGE[1]
    return monobit_ok, fraction, chi2_ok, p_value


def _check_smoke(nbytes: int) -> CheckResult:
    data = RandenEngine((1, 2, 3, 4)).fill_bytes(nbytes)
    monobit_ok, fraction, chi2_ok, p_value = statistical_smoke(data)
    return CheckResult(
        "statistical-smoke", monobit_ok and chi2_ok,
        f"ones fraction {fraction:.6f}, byte chi-square p {p_value:.4f}")


def run_selftest(samples: int = 10000, smoke_bytes: int = SMOKE_BYTES):
    """All checks in order; returns (results, all_ok)."""
    results = [_check_backends(samples), _check_aes_vector(), _check_key_schedule()]
    results.extend(_check_permute_goldens())
    results.extend(_check_stream_goldens())
    results.append(_check_smoke(smoke_bytes))
    return results, all(r.ok for r in results)
