from __future__ import annotations

import io
import json
import subprocess
import sys
from types import SimpleNamespace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasiq import cli
from quasiq.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, dispatch, emit, parse


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = dispatch(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


Z2C = ("--group", "2,2,2", "--a", "1,1,1")


def test_verify_cocycle_text():
    code, out, _ = run("verify-cocycle", *Z2C)
    assert code == EXIT_OK
    assert out == "OK: 3-cocycle condition holds (4096 tuples)\n"


def test_verify_cocycle_json_and_tilde():
    code, out, _ = run("verify-cocycle", *Z2C, "--tilde", "--json")
    doc = parse(out)
    assert code == EXIT_OK and doc["ok"] and doc["schema"] == "quasiq/1"
    assert len(doc["tilde"]) == 8 and all(t["ok"] for t in doc["tilde"])
    assert out == emit(doc).decode()


def test_verification_failure_exits_one(monkeypatch):
    bad = SimpleNamespace(ok=False, checked=1, witness=[(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    monkeypatch.setattr(cli, "verify_cocycle", lambda *a, **k: bad)
    code, out, _ = run("verify-cocycle", *Z2C)
    assert code == EXIT_FAIL
    assert out.startswith("FAIL: 3-cocycle condition fails at (1,0,0) (0,1,0) (0,0,1) (1,1,1)")


def test_enumerate_rank3():
    code, out, _ = run("enumerate", *Z2C, "--rank", "3", "--json")
    doc = parse(out)
    assert code == EXIT_OK and doc["count"] == 64 and len(doc["entries"]) == 64


def test_enumerate_a2_nonzero_is_empty():
    code, out, _ = run("enumerate", *Z2C, "--a2", "1:2=1", "--rank", "3", "--json")
    doc = parse(out)
    assert code == EXIT_OK and doc["count"] == 0 and doc["entries"] == []


def test_present_lists_nilpotency():
    code, out, _ = run("present", *Z2C, "--series", "3:0")
    assert code == EXIT_OK
    assert "X1^4 = 0" in out


def test_solve_chars_text_has_legend():
    code, out, _ = run("solve-chars", *Z2C, "--degree", "1,0,0")
    assert code == EXIT_OK
    assert "z = exp(2*pi*i/4)" in out


def test_check_axioms_small_and_seed_requirement():
    code, out, _ = run("check-axioms", "--group", "2", "--a", "1", "--series", "1:0", "--json")
    doc = parse(out)
    assert code == EXIT_OK and doc["ok"] and doc["mode"] == "exhaustive"
    code, _, err = run("check-axioms", *Z2C, "--series", "3:0")
    assert code == EXIT_USAGE and "--seed" in err


@pytest.mark.parametrize("argv", [
    ("verify-cocycle", "--group", "2,2,2", "--a", "1,1"),
    ("verify-cocycle", "--group", "2,x"),
    ("verify-cocycle", "--a", "1"),
    ("verify-cocycle", *Z2C, "--a2", "1:1=1"),
    ("enumerate", *Z2C, "--rank", "0"),
    ("present", *Z2C, "--series", "3:99999"),
    ("no-such-command",),
    ("z2cubed-report", "--max-rank", "2"),
])
def test_usage_errors_exit_two(argv):
    code, _, _ = run(*argv)
    assert code == EXIT_USAGE


@pytest.mark.parametrize("value", ["0", "-3", "many"])
def test_bad_thread_cap(monkeypatch, value):
    monkeypatch.setenv("QUASIQ_THREADS", value)
    code, _, err = run("verify-cocycle", *Z2C)
    assert code == EXIT_USAGE and "QUASIQ_THREADS" in err


def test_thread_cap_applied():
    import numba

    assert cli.apply_thread_cap({"QUASIQ_THREADS": "1"}) == 1
    assert numba.get_num_threads() == 1
    assert cli.apply_thread_cap({}) is None
    numba.set_num_threads(numba.config.NUMBA_NUM_THREADS)


def test_out_and_config(tmp_path):
    cfg = tmp_path / "sys.json"
    text = json.dumps({"moduli": [2, 2, 2], "a": [1, 1, 1]})
    cfg.write_text(text)
    dest = tmp_path / "out.json"
    code, out, _ = run("enumerate", "--config", str(cfg), "--rank", "3", "--json", "--out", str(dest))
    assert code == EXIT_OK and out == ""
    assert parse(dest.read_bytes())["count"] == 64
    assert cfg.read_text() == text
    code, _, _ = run("enumerate", "--config", str(cfg), "--rank", "3", "--out", str(cfg))
    assert code == EXIT_USAGE and cfg.read_text() == text


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "sys.json"
    cfg.write_text(json.dumps({"moduli": [2, 2, 2], "a": [1, 1, 1]}))
    _, out, _ = run("enumerate", "--config", str(cfg), "--a2", "1:2=1", "--rank", "3", "--json")
    assert parse(out)["count"] == 0


def test_output_is_deterministic():
    a = run("enumerate", *Z2C, "--rank", "4", "--up-to-perm", "--json")
    b = run("enumerate", *Z2C, "--rank", "4", "--up-to-perm", "--json")
    assert a == b


def test_census_text_has_family_rows():
    code, out, _ = run("z2cubed-report", "--max-rank", "4")
    assert code == EXIT_OK
    assert "111  3     64     (1):64" in out
    assert "(1):192 (3):96 (4):64" in out


json_values = st.recursive(
    st.none() | st.booleans() | st.integers(-10**6, 10**6) | st.text(max_size=8),
    lambda inner: st.lists(inner, max_size=4) | st.dictionaries(st.text(max_size=6), inner, max_size=4),
    max_leaves=20,
)


@settings(max_examples=100)
@given(st.dictionaries(st.text(max_size=6), json_values, max_size=6))
def test_emit_parse_roundtrip(doc):
    data = emit(doc)
    assert data.endswith(b"\n") and b"\n" not in data[:-1]
    assert parse(data) == doc
    assert emit(parse(data)) == data


def test_emit_text_and_bad_format():
    assert emit({"b": 1, "a": [2]}, "text") == b'a: [2]\nb: 1\n'
    with pytest.raises(ValueError):
        emit({}, "yaml")


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "quasiq.cli", "verify-cocycle", "--group", "2", "--a", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.startswith("OK: 3-cocycle condition holds")
