import time

import pytest

from nhc.validate import CheckResult, all_passed, format_report, run_validation, suite_items


def test_fast_level_passes_quickly():
    start = time.perf_counter()
    rows = run_validation("fast", seed=0)
    assert time.perf_counter() - start < 30
    assert rows and all_passed(rows), [r for r in rows if r.status == "FAIL"]
    assert {r.status for r in rows} <= {"PASS", "INFO"}


def test_injected_fault_names_invariant():
    rows = run_validation("fast", seed=0, inject_fault=True)
    failed = [r for r in rows if r.status == "FAIL"]
    assert failed and not all_passed(rows)
    assert any(r.invariant == "GΩG=Ω" for r in failed)


def test_parallel_run_matches_sequential():
    seq = run_validation("fast", seed=3, jobs=1)
    par = run_validation("fast", seed=3, jobs=4)
    assert format_report(seq) == format_report(par)


def test_report_format():
    rows = [CheckResult("a.b", "inv", "PASS", 1e-12, 1e-9), CheckResult("c", "x", "INFO", 0.5, 0.0, "note")]
    lines = format_report(rows).splitlines()
    assert lines[0].split("\t")[0] == "status"
    assert lines[1].split("\t")[:3] == ["PASS", "a.b", "inv"]
    assert lines[2].endswith("note")
    assert all_passed(rows)


def test_levels():
    assert len(suite_items("full")) > len(suite_items("fast"))
    with pytest.raises(ValueError):
        suite_items("extreme")


@pytest.mark.slow
def test_full_level_passes():
    rows = run_validation("full", seed=0, jobs=4)
    assert all_passed(rows), [r for r in rows if r.status == "FAIL"]
    info = [r for r in rows if r.status == "INFO"]
    assert any("beta" in r.name for r in info)
