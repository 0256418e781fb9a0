"""The ten acceptance criteria, each at its stated tolerance and runtime budget.

Run under pytest, or directly (``python tests/test_acceptance.py``) for the
PASS/FAIL lines alone.  Assertions read raw metrics, not the battery's status.
"""

import math
import sys
import time

import pytest

from cftk import suite
from cftk.report import RunConfig

CFG = RunConfig()


def _check_1(m):
    for pair, v in m["per_pair"].items():
        assert v["adjoint_checks"] > 0 and v["commutator_checks"] > 0
        assert v["adjoint_failures"] == 0, pair
        assert v["commutator_failures"] == 0, pair
    assert len(m["per_pair"]) == 5


def _check_2(m):
    for pair, v in m["per_pair"].items():
        assert v["psd_levels"] == [True] * 7, pair
        assert v["level1"] and v["level2"], pair


def _check_3(m):
    # a 5 x 5 x 3 grid of (arg z, r, t_lowest) for each of the three values of |z| + r
    assert m["grid_points"] == 5 * 5 * 3 * 3
    assert m["bound_violations"] == 0
    assert m["monotone_violations"] == 0
    assert m["min_bound_minus_norm"] > -1e-9


def _check_4(m):
    for desc in ("identity", "mobius:a=1/2"):
        for entry in m[desc].values():
            assert entry["closed_form"] < 1e-8
            assert entry["functional"] < 1e-8
            assert entry["semigroup"] < 1e-8


def _check_5(m):
    for cut in ("4", "6", "8"):
        d = [m["cauchy_distances"][cut][n] for n in ("8", "16", "32", "64")]
        assert all(b < a for a, b in zip(d, d[1:])), (cut, d)
    assert m["cauchy_distances"]["8"]["64"] < 1e-3
    assert m["g_zero_max_deviation"] < 1e-12


def _check_6(m):
    assert m["car_defects"] == 0
    assert m["borcherds"]["samples"] == 100 and m["borcherds"]["failures"] == 0
    assert m["commutator"]["samples"] == 50 and m["commutator"]["failures"] == 0
    assert m["grading_failures"] == 0 and m["derivative_failures"] == 0
    for state in ("vac", "nu", "psi(-1/2)|0>"):
        assert m["invariance"][state]["max_residual"] == "0"
    assert m["character_matches_product"]
    assert [c for _, c in m["character"]][:5] == [1, 2, 1, 2, 4]


def _check_7(m):
    assert len(m["residuals"]) == 2 * 3 * 2
    assert all(r == "0" for r in m["residuals"].values())


def _check_8(m):
    assert {r["axiom"] for r in m["axioms"]} == {"derivative", "borcherds", "commutator"}
    assert all(r["max_residual"] == "0" for r in m["axioms"])
    assert m["delta_shift"] == {"(0,0,0)": "0", "(1/2,0,1/2)": "0", "(1/4,1/4,0)": "1/2"}


def _check_9(m):
    assert all(m["hamming8_predicates"].values())
    h = m["hamming8_lattice"]
    assert h["even"] and h["det"] == "1" and h["root_count"] == 240
    assert h["theta"][:3] == [[0, 1], [2, 240], [4, 2160]]
    g = m["golay24_lattice"]
    assert g["even"] and g["det"] == "1" and g["root_count"] == 48
    assert m["random_codes"]["codes"] == 20 and m["random_codes"]["mismatches"] == []


def _check_10(m):
    assert all(v == "consistent" for v in m["cocycles"].values())
    bt = m["braid_tables"]
    assert bt["pairs"] == 256 and bt["mismatches"] == 0
    assert bt["semionic_violations"] > 0 and bt["semionic_rejected"] == bt["semionic_violations"]


CHECKS = {1: _check_1, 2: _check_2, 3: _check_3, 4: _check_4, 5: _check_5,
          6: _check_6, 7: _check_7, 8: _check_8, 9: _check_9, 10: _check_10}


def evaluate(idx):
    name, fn, limit = suite.CRITERIA[idx]
    t0 = time.perf_counter()
    report = fn(CFG)
    elapsed = time.perf_counter() - t0
    metrics = report.to_json()["metrics"]
    error = None
    try:
        CHECKS[idx](metrics)
        assert elapsed < limit, f"runtime {elapsed:.1f}s exceeds {limit}s"
    except AssertionError as exc:
        error = exc
    line = f"{'PASS' if error is None else 'FAIL'} criterion {idx:2d} {name} ({elapsed:.2f}s / {limit}s)"
    return line, error


@pytest.mark.parametrize("idx", sorted(CHECKS))
def test_acceptance(idx, capsys):
    line, error = evaluate(idx)
    with capsys.disabled():
        print("\n" + line)
    if error is not None:
        raise error


if __name__ == "__main__":
    failed = 0
    for i in sorted(CHECKS):
        line, error = evaluate(i)
        print(line if error is None else f"{line}: {error}")
        failed += error is not None
    sys.exit(1 if failed else 0)
