"""Command line behaviour: exit codes, output bytes, report files."""

import json
import subprocess
import sys

import pytest

from randen import aes, selftest
from randen.cli import main
from randen.keys import derive_round_keys


# ---------------------------------------------------------------- gen


def test_gen_golden_to_file(tmp_path):
    out = tmp_path / "stream.bin"
    rc = main(["gen", "--seed", "1,2,3,4", "--bytes", "240", "--out", str(out)])
    assert rc == 0
    assert out.read_bytes() == selftest.STREAM_SEED_1234


def test_gen_default_seed_and_hex_words(tmp_path):
    out = tmp_path / "stream.bin"
    assert main(["gen", "--bytes", "240", "--out", str(out)]) == 0
    assert out.read_bytes() == selftest.STREAM_SEED_0000
    assert main(["gen", "--seed", "0x1,0x2,0x3,0x4", "--bytes", "16",
                 "--out", str(out)]) == 0
    assert out.read_bytes() == selftest.STREAM_SEED_1234[:16]


def test_gen_zero_bytes(tmp_path):
    out = tmp_path / "empty.bin"
    assert main(["gen", "--bytes", "0", "--out", str(out)]) == 0
    assert out.read_bytes() == b""


def test_gen_stdout_capture(capsysbinary):
    assert main(["gen", "--bytes", "32"]) == 0
    assert capsysbinary.readouterr().out == selftest.STREAM_SEED_0000[:32]


def test_gen_python_backend(tmp_path):
    out = tmp_path / "py.bin"
    rc = main(["gen", "--seed", "1,2,3,4", "--bytes", "48", "--backend", "python",
               "--out", str(out)])
    assert rc == 0
    assert out.read_bytes() == selftest.STREAM_SEED_1234[:48]


def test_gen_usage_errors():
    for argv in (["gen", "--seed", "1,2,3"],
                 ["gen", "--seed", "1,2,3,banana"],
                 ["gen", "--seed", "1,2,3," + str(1 << 64)],
                 ["gen", "--bytes", "-5"],
                 ["gen", "--bytes", "sometimes"],
                 ["definitely-not-a-command"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2, argv


def test_gen_key_file_round_trip(tmp_path, capsys):
    keyfile = tmp_path / "keys.bin"
    keyfile.write_bytes(derive_round_keys().data)
    out = tmp_path / "a.bin"
    assert main(["gen", "--keys", str(keyfile), "--seed", "1,2,3,4",
                 "--bytes", "64", "--out", str(out)]) == 0
    assert out.read_bytes() == selftest.STREAM_SEED_1234[:64]

    zero = tmp_path / "zero.bin"
    zero.write_bytes(bytes(2176))
    assert main(["gen", "--keys", str(zero), "--seed", "1,2,3,4",
                 "--bytes", "64", "--out", str(out)]) == 0
    assert out.read_bytes() != selftest.STREAM_SEED_1234[:64]


def test_gen_key_file_errors(tmp_path, capsys):
    short = tmp_path / "short.bin"
    short.write_bytes(bytes(100))
    assert main(["gen", "--keys", str(short), "--bytes", "16"]) == 1
    assert "cannot load keys" in capsys.readouterr().err

    long = tmp_path / "long.bin"
    long.write_bytes(bytes(2177))
    assert main(["gen", "--keys", str(long), "--bytes", "16"]) == 1

    assert main(["gen", "--keys", str(tmp_path / "missing.bin"),
                 "--bytes", "16"]) == 1


def test_gen_unwritable_output(tmp_path, capsys):
    target = tmp_path / "no-such-dir" / "out.bin"
    assert main(["gen", "--bytes", "16", "--out", str(target)]) == 1
    assert "cannot open output" in capsys.readouterr().err


def test_gen_survives_closed_pipe():
    # infinite stream into a consumer that stops reading: the generator side
    # must exit 0 rather than crash on EPIPE
    script = (f"{sys.executable} -m randen.cli gen | head -c 1000 > /dev/null; "
              "exit ${PIPESTATUS[0]}")
    proc = subprocess.run(["bash", "-c", script], timeout=60,
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_gen_pipe_bytes_match_golden():
    script = f"{sys.executable} -m randen.cli gen --seed 1,2,3,4 --bytes 240"
    proc = subprocess.run(["bash", "-c", script], timeout=60, capture_output=True)
    assert proc.returncode == 0
    assert proc.stdout == selftest.STREAM_SEED_1234


# ---------------------------------------------------------------- search


def test_search_single_bounds(capsys):
    assert main(["search", "--rounds", "6"]) == 0
    assert capsys.readouterr().out.strip() == "6"
    assert main(["search", "--rounds", "13", "--mode", "fast"]) == 0
    assert capsys.readouterr().out.strip() == "28"
    assert main(["search", "--rounds", "13", "--workers", "4"]) == 0
    assert capsys.readouterr().out.strip() == "27"


def test_search_json(capsys):
    assert main(["search", "--rounds", "10", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"rounds": 10, "mode": "exact", "bound": 18}


def test_search_table(capsys):
    assert main(["search", "--rounds", "8", "--table"]) == 0
    out = capsys.readouterr().out
    assert "rounds" in out and out.count("yes") == 8


def test_search_table_json(capsys):
    assert main(["search", "--rounds", "5", "--table", "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["exact_bound"] for r in rows] == [0, 1, 2, 3, 4]
    assert all(r["ok"] for r in rows)


def test_search_invalid_rounds(capsys):
    assert main(["search", "--rounds", "0"]) == 1
    assert "search failed" in capsys.readouterr().err
    assert main(["search", "--rounds", "99", "--table"]) == 1


def test_search_table_mismatch_exits_nonzero(monkeypatch, capsys):
    from randen import search

    monkeypatch.setitem(search.EXPECTED_MIN_ACTIVE, 2, 99)
    assert main(["search", "--rounds", "3", "--table"]) == 1
    captured = capsys.readouterr()
    assert "NO" in captured.out
    assert "deviates" in captured.err


def test_search_report_dir(tmp_path, capsys):
    rc = main(["search", "--rounds", "6", "--report-dir", str(tmp_path)])
    assert rc == 0
    captured = capsys.readouterr()
    assert "rounds" in captured.out  # report implies the table view
    assert captured.err.count("wrote") == 2
    assert (tmp_path / "bounds.csv").stat().st_size > 0
    assert (tmp_path / "bounds.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


# ---------------------------------------------------------------- bench


def test_bench_json_rows(capsys):
    pytest.importorskip("randen._speed")
    rc = main(["bench", "--kind", "montecarlo", "--engine", "splitmix64",
               "--reps", "5", "--json"])
    assert rc == 0
    rows = json.loads(capsys.readouterr().out)
    assert len(rows) == 1
    row = rows[0]
    assert row["kind"] == "montecarlo"
    assert row["engine"] == "splitmix64"
    assert row["speedup_vs_randen"] is None
    assert set(row) == {"kind", "engine", "central", "mad", "unit", "bytes",
                        "speedup_vs_randen"}


def test_bench_unknown_names(capsys):
    assert main(["bench", "--kind", "primes"]) == 1
    assert "bench failed" in capsys.readouterr().err
    assert main(["bench", "--engine", "xorshift"]) == 1
    assert main(["bench", "--reps", "2", "--kind", "loop",
                 "--engine", "splitmix64"]) == 1


def test_bench_table_and_report(tmp_path, capsys):
    pytest.importorskip("randen._speed")
    if "aesni" not in aes.available_backends():
        pytest.skip("hardware backend required for the randen baseline")
    rc = main(["bench", "--kind", "loop", "--engine", "randen,splitmix64",
               "--reps", "5", "--report-dir", str(tmp_path)])
    assert rc == 0
    captured = capsys.readouterr()
    assert "vs randen" in captured.out
    assert (tmp_path / "bench.csv").stat().st_size > 0
    assert (tmp_path / "bench_cost_per_byte.png").stat().st_size > 0
    assert (tmp_path / "bench_ratio_vs_randen.png").stat().st_size > 0


# ---------------------------------------------------------------- selftest


def test_selftest_green(capsys):
    pytest.importorskip("scipy")
    rc = main(["selftest", "--samples", "500", "--smoke-bytes", "65536"])
    assert rc == 0
    out = capsys.readouterr().out
    lines = [l for l in out.splitlines() if l]
    assert len(lines) == 8
    assert all(l.startswith("PASS") for l in lines)


def test_selftest_failure_exit(monkeypatch, capsys):
    pytest.importorskip("scipy")
    monkeypatch.setattr(selftest, "STREAM_SEED_0000", b"\x00" * 240)
    rc = main(["selftest", "--samples", "100", "--smoke-bytes", "16384"])
    assert rc == 1
    captured = capsys.readouterr()
    assert "FAIL stream-seed-0" in captured.out
    assert "selftest failed: stream-seed-0" in captured.err


def test_console_script_help():
    proc = subprocess.run([sys.executable, "-m", "randen.cli", "--help"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    for word in ("gen", "bench", "search", "selftest"):
        assert word in proc.stdout
