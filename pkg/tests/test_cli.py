"""Command-line behavior: output formats, exit codes, cache round trips."""

import json
from fractions import Fraction

import pytest

from gwcalc.cli import main
from gwcalc.graded_algebra import make_p2
from gwcalc.invariant_store import (COMPLEX, InvariantKey, InvariantTable)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_compute_p2_point_counts(capsys):
    code, out, err = run(capsys, "compute", "--target", "P2",
                         "--max-degree", "5", "--insertions-only", "pt")
    assert code == 0
    assert out.splitlines() == [
        "complex g=0 d=1 <pt, pt> = 1",
        "complex g=0 d=2 <pt, pt, pt, pt, pt> = 1",
        "complex g=0 d=3 <pt, pt, pt, pt, pt, pt, pt, pt> = 12",
        "complex g=0 d=4 <pt, pt, pt, pt, pt, pt, pt, pt, pt, pt, pt> = 620",
        "complex g=0 d=5 <pt, pt, pt, pt, pt, pt, pt, pt, pt, pt, pt, pt, "
        "pt, pt> = 87304",
    ]


def test_compute_real_point_counts(capsys):
    code, out, err = run(capsys, "compute", "--target", "P3-tau", "--real",
                         "--max-degree", "3", "--seed-sign", "+")
    assert code == 0
    assert out.splitlines() == [
        "real g=0 d=1 <pt> = 1",
        "real g=0 d=2 <pt, pt> = 0",
        "real g=0 d=3 <pt, pt, pt> = -1",
    ]


def test_compute_single_descendant_insertion(capsys):
    code, out, err = run(capsys, "compute", "--target", "P3-tau", "--real",
                         "--degree", "1", "--insertions", "1:h2",
                         "--seed-sign", "+")
    assert code == 0
    assert out.splitlines() == ["real g=0 d=1 <tau_1(h2)> = -2"]


def test_compute_csv_format(capsys):
    code, out, err = run(capsys, "compute", "--target", "P2",
                         "--max-degree", "2", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "kind,genus,degree,insertions,value"
    assert "complex,0,1,0:3;0:3,1" in lines
    assert "complex,0,2,0:3;0:3;0:3;0:3;0:3,1" in lines


def test_compute_json_format(capsys):
    code, out, err = run(capsys, "compute", "--target", "P2",
                         "--max-degree", "1", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["target"] == "P2"
    assert len(payload["entries"]) == 1
    entry = payload["entries"][0]
    assert entry["value"] == "1"
    assert entry["degree"] == 1


def test_compute_is_deterministic_across_threads(capsys, tmp_path):
    outs = []
    for threads in ("1", "3"):
        cache = tmp_path / ("cache-%s.json" % threads)
        code, out, err = run(capsys, "compute", "--target", "P2",
                             "--max-degree", "4", "--threads", threads,
                             "--cache", str(cache))
        assert code == 0
        outs.append(out)
        assert cache.exists()
    assert outs[0] == outs[1]


def test_usage_errors_exit_2(capsys, tmp_path):
    cases = [
        ("compute", "--target", "P2", "--degree", "-1"),
        ("compute", "--target", "P9", "--max-degree", "1"),
        ("compute", "--max-degree", "1"),
        ("compute", "--target", "P2", "--real", "--max-degree", "1"),
        ("compute", "--target", "P2", "--max-degree", "1",
         "--insertions", "pt"),
        ("compute", "--target", "P2", "--degree", "1",
         "--insertions", "xyz"),
        ("compute", "--target", "P2", "--max-degree", "1",
         "--insertions-only", "h5"),
        ("compute", "--target", "P3-tau", "--real", "--max-degree", "1",
         "--seed-sign", "plus"),
        ("compute", "--target", "P2", "--target-file", "nowhere.json",
         "--max-degree", "1"),
        ("verify", "--target", "P2", "--suite", "nonsense"),
        ("cache", "show"),
    ]
    for argv in cases:
        code, out, err = run(capsys, *argv)
        assert code == 2, argv
        assert err


def test_no_command_exits_2(capsys):
    code, out, err = run(capsys)
    assert code == 2


def test_conflicting_cache_value_exits_3(capsys, tmp_path):
    p2 = make_p2()
    table = InvariantTable(p2)
    table.put(InvariantKey(COMPLEX, 0, 1, [(0, 3), (0, 3)]),
              Fraction(2), "seed")
    cache = tmp_path / "poisoned.json"
    table.save(str(cache))
    code, out, err = run(capsys, "compute", "--target", "P2",
                         "--max-degree", "2", "--cache", str(cache))
    assert code == 3
    assert "inconsistent" in err


def test_free_involution_without_seed_exits_4(capsys):
    code, out, err = run(capsys, "compute", "--target", "P3-eta", "--real",
                         "--max-degree", "1")
    assert code == 4
    assert "underdetermined" in err


def test_target_file_round_trip(capsys, tmp_path):
    spec = tmp_path / "target.json"
    spec.write_text(make_p2().dumps())
    code, out, err = run(capsys, "compute", "--target-file", str(spec),
                         "--max-degree", "1", "--insertions-only", "pt")
    assert code == 0
    assert out.splitlines() == ["complex g=0 d=1 <pt, pt> = 1"]
    spec.write_text("{ not json")
    code, out, err = run(capsys, "compute", "--target-file", str(spec),
                         "--max-degree", "1")
    assert code == 2


def test_cache_flows(capsys, tmp_path):
    cache = tmp_path / "cache.json"
    code, out, err = run(capsys, "cache", "show", "--cache", str(cache))
    assert code == 0 and out == "0 entries\n"

    code, out, err = run(capsys, "compute", "--target", "P2",
                         "--max-degree", "3", "--cache", str(cache))
    assert code == 0

    code, out, err = run(capsys, "cache", "show", "--cache", str(cache))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "3 entries"
    assert lines[1] == "target: P2"
    assert lines[2] == "  complex: 3"

    code, out, err = run(capsys, "cache", "export", "--cache", str(cache),
                         "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "kind,genus,degree,insertions,value"
    assert "complex,0,3,0:3;0:3;0:3;0:3;0:3;0:3;0:3;0:3,12" in out.splitlines()

    code, out, err = run(capsys, "cache", "clear", "--cache", str(cache))
    assert code == 0 and out == "cache cleared\n"
    assert not cache.exists()


def test_cache_env_var(capsys, tmp_path, monkeypatch):
    cache = tmp_path / "from-env.json"
    monkeypatch.setenv("GWCALC_CACHE", str(cache))
    code, out, err = run(capsys, "compute", "--target", "P2",
                         "--max-degree", "1")
    assert code == 0
    assert cache.exists()
    code, out, err = run(capsys, "cache", "show")
    assert code == 0
    assert out.splitlines()[0] == "1 entries"


def test_cache_reuse_is_consistent(capsys, tmp_path):
    cache = tmp_path / "cache.json"
    first = run(capsys, "compute", "--target", "P2", "--max-degree", "3",
                "--cache", str(cache))
    blob = cache.read_text()
    second = run(capsys, "compute", "--target", "P2", "--max-degree", "3",
                 "--cache", str(cache))
    assert first == second
    assert cache.read_text() == blob


def test_verify_p2_all_suites(capsys):
    code, out, err = run(capsys, "verify", "--target", "P2",
                         "--max-degree", "3")
    assert code == 0
    lines = out.splitlines()
    names = [line.split()[1] for line in lines]
    assert names == ["grading", "wdvv", "string", "dilaton", "divisor",
                     "trr-cross"]
    assert all("pass" in line for line in lines)


def test_verify_single_suite(capsys):
    code, out, err = run(capsys, "verify", "--target", "P3-tau",
                         "--max-degree", "2", "--suite", "rwdvv")
    assert code == 0
    assert out.startswith("suite rwdvv")
    assert "pass" in out


def test_verify_tampered_cache_fails(capsys, tmp_path):
    p2 = make_p2()
    table = InvariantTable(p2)
    # nonzero value at a structurally-zero key (wrong grading)
    table.put(InvariantKey(COMPLEX, 0, 1, [(0, 2), (0, 3)]),
              Fraction(5), "classical")
    cache = tmp_path / "tampered.json"
    table.save(str(cache))
    code, out, err = run(capsys, "verify", "--target", "P2",
                         "--max-degree", "2", "--cache", str(cache))
    assert code == 1
    assert out.startswith("suite grading")
    assert "FAIL" in out.splitlines()[0]
    # a failing verify must not rewrite the cache
    reloaded = InvariantTable.load(str(cache), target=p2)
    assert reloaded.get(InvariantKey(COMPLEX, 0, 1, [(0, 2), (0, 3)])) == 5
