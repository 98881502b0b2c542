"""Robust timing of generator workloads.

Methodology: each repetition runs a whole workload through one C call (the
per-draw buffer checks are part of the work, as a consumer would see them),
timestamps are taken around the call with a serialised cycle counter when
the CPU has one (nanoseconds otherwise), the calibrated timer overhead is
subtracted, and the central estimate is the median, or the mode once there
are enough repetitions for one to be meaningful.  Spread is reported as the
median absolute deviation (MAD), which a few preempted repetitions cannot
drag the way a mean or variance would.

Workload results are verified outside the timed region on every repetition,
so a reported number can never come from broken work.
"""

from __future__ import annotations

import statistics
import time
from collections import Counter
from dataclasses import dataclass

import numpy as np

from randen import aes
from randen.keys import derive_round_keys

try:
    from randen import _speed
except ImportError:
    _speed = None

DEFAULT_SEED = (1, 2, 3, 4)
MODE_THRESHOLD = 64  # repetitions needed before the mode beats the median

# workload sizes: large enough to swamp call overhead, small enough that a
# repetition is comfortably preemption-free
LOOP_DRAWS = 102_400  # 819,200 bytes
SHUFFLE_ELEMENTS = 100_000  # 99,999 draws
SAMPLE_STREAM = 51_200
SAMPLE_K = 10_240  # 40,960 draws
MONTECARLO_POINTS = 100_000  # 200,000 draws

WORKLOAD_NAMES = ("loop", "shuffle", "sample", "montecarlo")
ENGINE_NAMES = ("randen", "randen-sw", "mt19937_64", "splitmix64")


class MonotonicityError(RuntimeError):
    """The timer went backwards during calibration."""


@dataclass
class Timer:
    now: object  # zero-argument callable returning an integer timestamp
    unit: str  # "cycles" or "ns"
    overhead: int  # median cost of one timestamp pair
    resolution: int


@dataclass
class Measurement:
    central: float
    mad: float
    unit: str
    bytes: int

    @property
    def central_per_byte(self) -> float:
        return self.central / self.bytes

    @property
    def mad_per_byte(self) -> float:
        return self.mad / self.bytes

    @property
    def rel_mad(self) -> float:
        return self.mad / self.central if self.central else float("inf")


def calibrate_timer(samples: int = 2048) -> Timer:
    """Measure the cost and resolution of back-to-back timestamp reads."""
    if _speed is not None and _speed.tsc_available():
        now, unit = _speed.tsc, "cycles"
    else:
        now, unit = time.perf_counter_ns, "ns"
    stamps = [now() for _ in range(samples + 1)]
    deltas = [b - a for a, b in zip(stamps, stamps[1:])]
    if any(d < 0 for d in deltas):
        raise MonotonicityError("timestamp source went backwards")
    positive = [d for d in deltas if d > 0]
    overhead = int(statistics.median(deltas))
    resolution = min(positive) if positive else 1
    return Timer(now=now, unit=unit, overhead=overhead, resolution=resolution)


def robust_measure(run, nbytes: int, repetitions: int, timer: Timer = None,
                   verify=None, warmup: int = 1) -> Measurement:
    """Time ``run()`` ``repetitions`` times and summarise robustly.

    ``nbytes`` is the number of random bytes one run consumes; zero-byte
    workloads are rejected rather than reported as infinitely fast.
    ``verify`` is called with each run's result outside the timed window.
    The first ``warmup`` executions are discarded untimed, so cold caches
    and first-touch page faults never count against the spread.
    """
    if repetitions < 5:
        raise ValueError("need at least 5 repetitions")
    if nbytes <= 0:
        raise ValueError("workload consumed no random bytes")
    if timer is None:
        timer = calibrate_timer()
    for _ in range(warmup):
        run()
    now = timer.now
    samples = []
    for _ in range(repetitions):
        t0 = now()
        result = run()
        t1 = now()
        if verify is not None:
            verify(result)
        samples.append(max(t1 - t0 - timer.overhead, 0))
    if repetitions >= MODE_THRESHOLD:
        # integer samples repeat on quiet machines; prefer the smallest of
        # the most common values so a tie cannot flap between runs
        counts = Counter(samples)
        top = max(counts.values())
        central = float(min(v for v, c in counts.items() if c == top))
    else:
        central = float(statistics.median(samples))
    med = statistics.median(samples)
    mad = float(statistics.median([abs(s - med) for s in samples]))
    return Measurement(central=central, mad=mad, unit=timer.unit, bytes=nbytes)


class EngineHandle:
    """A named engine the C workload kernels can instantiate.

    Handles are stateless: every workload call restarts the stream from the
    seed, so repetitions time identical work and any fixed seed gives fully
    deterministic results.  splitmix64 uses only the first seed word.
    """

    def __init__(self, name: str, kind: int, backend_code: int, seed, keys: bytes):
        self.name = name
        self.kind = kind
        self.backend_code = backend_code
        self.seed = tuple(seed)
        self.keys = keys

    def _args(self):
        return (self.kind, *self.seed, self.keys, self.backend_code)

    def stream(self, nbytes: int) -> bytes:
        return _speed.engine_stream(*self._args(), nbytes)

    def draws(self, count: int) -> np.ndarray:
        return np.frombuffer(self.stream(8 * count), dtype="<u8")

    def run_loop(self, ndraws: int) -> int:
        return _speed.run_loop(*self._args(), ndraws)

    def run_shuffle(self, nelems: int) -> np.ndarray:
        return np.frombuffer(_speed.run_shuffle(*self._args(), nelems), dtype="<u4")

    def run_sample(self, nstream: int, k: int) -> np.ndarray:
        return np.frombuffer(_speed.run_sample(*self._args(), nstream, k), dtype="<u8")

    def run_montecarlo(self, points: int):
        return _speed.run_montecarlo(*self._args(), points)

    def __repr__(self) -> str:
        return f"EngineHandle({self.name!r}, seed={self.seed!r})"


def make_engine(name: str, seed=DEFAULT_SEED) -> EngineHandle:
    if _speed is None:
        raise aes.BackendUnavailableError("compiled core required for benchmarks")
    if name == "randen":
        backend = aes.resolve_backend("aesni")
        return EngineHandle(name, 0, aes.BACKEND_CODES[backend], seed,
                            derive_round_keys().data)
    if name == "randen-sw":
        return EngineHandle(name, 0, aes.BACKEND_CODES["table"], seed,
                            derive_round_keys().data)
    if name == "mt19937_64":
        return EngineHandle(name, 1, 0, seed, b"")
    if name == "splitmix64":
        return EngineHandle(name, 2, 0, seed, b"")
    raise ValueError(f"unknown engine {name!r}")


def _loop_workload(handle: EngineHandle, ndraws: int):
    expected = None

    def run():
        return handle.run_loop(ndraws)

    def verify(checksum):
        nonlocal expected
        if expected is None:
            expected = int(np.bitwise_xor.reduce(handle.draws(ndraws))) if ndraws else 0
        if checksum != expected:
            raise AssertionError("loop checksum does not match engine stream")

    return run, verify, 8 * ndraws


def _shuffle_workload(handle: EngineHandle, nelems: int):
    def run():
        return handle.run_shuffle(nelems)

    def verify(arr):
        if not (len(arr) == nelems
                and np.array_equal(np.sort(arr), np.arange(nelems, dtype=np.uint32))):
            raise AssertionError("shuffle output is not a permutation")

    return run, verify, 8 * max(nelems - 1, 0)


def _sample_workload(handle: EngineHandle, nstream: int, k: int):
    def run():
        return handle.run_sample(nstream, k)

    def verify(res):
        if len(res) != k or len(np.unique(res)) != k or (k and int(res.max()) >= nstream):
            raise AssertionError("reservoir is not a k-subset of the stream")

    return run, verify, 8 * (nstream - k)


def _montecarlo_workload(handle: EngineHandle, points: int):
    # the estimator's standard error is about 1.64/sqrt(points); allow five
    # of those, with a 0.05 floor so the default size keeps a fixed band
    tolerance = max(0.05, 5 * 1.64 / points**0.5)

    def run():
        return handle.run_montecarlo(points)

    def verify(result):
        estimate, _ = result
        if abs(estimate - 3.14159265) > tolerance:
            raise AssertionError(f"implausible pi estimate {estimate}")

    return run, verify, 16 * points


def build_workload(kind: str, handle: EngineHandle, size=None):
    """Return (run, verify, nbytes) for a workload kind.

    ``size`` overrides the default scale: draws for loop, elements for
    shuffle, (stream, k) for sample, points for montecarlo.
    """
    if kind == "loop":
        return _loop_workload(handle, LOOP_DRAWS if size is None else size)
    if kind == "shuffle":
        return _shuffle_workload(handle, SHUFFLE_ELEMENTS if size is None else size)
    if kind == "sample":
        nstream, k = (SAMPLE_STREAM, SAMPLE_K) if size is None else size
        return _sample_workload(handle, nstream, k)
    if kind == "montecarlo":
        return _montecarlo_workload(handle, MONTECARLO_POINTS if size is None else size)
    raise ValueError(f"unknown workload kind {kind!r}")


def run_benchmark(kind: str, engine, repetitions: int = 20, timer: Timer = None,
                  seed=DEFAULT_SEED, size=None) -> Measurement:
    """Measure one workload kind on one engine (name or handle)."""
    handle = make_engine(engine, seed) if isinstance(engine, str) else engine
    run, verify, nbytes = build_workload(kind, handle, size)
    return robust_measure(run, nbytes, repetitions, timer=timer, verify=verify)


@dataclass
class BenchRow:
    kind: str
    engine: str
    central: float
    mad: float
    unit: str
    bytes: int
    speedup_vs_randen: float  # None when no randen baseline in the suite

    def to_dict(self):
        return {
            "kind": self.kind,
            "engine": self.engine,
            "central": self.central,
            "mad": self.mad,
            "unit": self.unit,
            "bytes": self.bytes,
            "speedup_vs_randen": self.speedup_vs_randen,
        }


def run_suite(kinds=None, engines=None, repetitions: int = 20, timer: Timer = None,
              seed=DEFAULT_SEED):
    """All requested kind x engine measurements, with cost ratios vs randen.

    ``speedup_vs_randen`` is other.central / randen.central for the same
    kind: above 1.0 means the other engine spends more time per byte.
    """
    kinds = list(WORKLOAD_NAMES if kinds is None else kinds)
    engines = list(ENGINE_NAMES if engines is None else engines)
    if timer is None:
        timer = calibrate_timer()
    handles = [make_engine(name, seed) for name in engines]
    rows = []
    for kind in kinds:
        measured = {}
        for handle in handles:
            measured[handle.name] = run_benchmark(kind, handle, repetitions, timer)
        baseline = measured.get("randen")
        for name in engines:
            m = measured[name]
            speedup = m.central / baseline.central if baseline else None
            rows.append(BenchRow(kind=kind, engine=name, central=m.central,
                                 mad=m.mad, unit=m.unit, bytes=m.bytes,
                                 speedup_vs_randen=speedup))
    return rows


def to_cycles(row: BenchRow, tsc_freq_hz: float) -> BenchRow:
    """Convert a nanosecond row to cycles at the given TSC frequency."""
    if row.unit == "cycles":
        return row
    scale = tsc_freq_hz / 1e9
    return BenchRow(kind=row.kind, engine=row.engine, central=row.central * scale,
                    mad=row.mad * scale, unit="cycles", bytes=row.bytes,
                    speedup_vs_randen=row.speedup_vs_randen)


def format_rows(rows) -> str:
    header = (f"{'kind':<11} {'engine':<11} {'central':>12} {'mad':>10} "
              f"{'unit':>6} {'bytes':>9} {'vs randen':>10}")
    lines = [header, "-" * len(header)]
    for r in rows:
        speed = "-" if r.speedup_vs_randen is None else f"{r.speedup_vs_randen:.2f}"
        lines.append(f"{r.kind:<11} {r.engine:<11} {r.central:>12.1f} "
                     f"{r.mad:>10.1f} {r.unit:>6} {r.bytes:>9} {speed:>10}")
    return "\n".join(lines)
