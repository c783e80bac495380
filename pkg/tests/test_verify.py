from __future__ import annotations

import json
from collections import Counter

import pytest

from kgqm.errors import ConfigurationError
from kgqm.grid import GridSpec
from kgqm.verify import INVARIANTS, REGISTRY, run_verification


@pytest.fixture(scope="module")
def report():
    return run_verification(GridSpec(), seed=0)


def test_every_invariant_registered_under_its_module():
    for module, names in INVARIANTS.items():
        for name in names:
            assert name in REGISTRY, name
            assert REGISTRY[name].module == module


def test_invariants_listed_once():
    counts = Counter(name for names in INVARIANTS.values() for name in names)
    assert all(c == 1 for c in counts.values())


def test_every_invariant_appears_once_in_report(report):
    counts = Counter(e["identity"] for e in report["identities"])
    for names in INVARIANTS.values():
        for name in names:
            assert counts[name] == 1
    assert set(counts) == set(REGISTRY)


def test_default_grid_passes(report):
    failed = [e["identity"] for e in report["identities"] if e["status"] == "fail"]
    assert failed == []
    assert report["passed"] is True


def test_report_shape(report):
    names = [e["identity"] for e in report["identities"]]
    assert names == sorted(names)
    for entry in report["identities"]:
        assert {"identity", "residual", "tolerance", "status", "passed"} <= set(entry)
        assert entry["residual"] >= 0
        if entry["tolerance"] is None:
            assert entry["status"] == "reported" and entry["passed"] is None


def test_experiments_are_reported_without_verdict(report):
    by_name = {e["identity"]: e for e in report["identities"]}
    for name in ("closed_form_position_tau0.1", "closed_form_position_tau1", "PT_kg_vs_unconjugated_reflection"):
        assert by_name[name]["status"] == "reported"
    assert by_name["closed_form_position_tau0"]["status"] == "pass"


def test_deterministic():
    a = run_verification(GridSpec(n=32), seed=5, only=["C_squared", "newton_wigner_restriction"])
    b = run_verification(GridSpec(n=32), seed=5, only=["newton_wigner_restriction", "C_squared"])
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)


def test_subset_matches_full_run(report):
    sub = run_verification(GridSpec(), seed=0, only=["U_unitarity"])
    full = {e["identity"]: e for e in report["identities"]}
    assert sub["identities"][0] == full["U_unitarity"]


def test_seed_changes_residuals():
    a = run_verification(GridSpec(n=16), seed=1, only=["C_squared"])
    b = run_verification(GridSpec(n=16), seed=2, only=["C_squared"])
    assert a["identities"][0]["residual"] != b["identities"][0]["residual"]


def test_tolerance_override_forces_failure():
    out = run_verification(GridSpec(n=16), tolerance_overrides={"C_squared": 1e-20}, only=["C_squared"])
    assert out["identities"][0]["status"] == "fail"
    assert out["passed"] is False


def test_unknown_names():
    with pytest.raises(ConfigurationError):
        run_verification(GridSpec(n=16), tolerance_overrides={"nope": 1.0})
    with pytest.raises(ConfigurationError):
        run_verification(GridSpec(n=16), only=["nope"])


@pytest.mark.parametrize(
    "kwargs",
    [{"n": 16}, {"d": 2, "n": 32}, {"mu": 2.5, "lam": 0.1}, {"hbar": 2.0}],
    ids=["coarse", "d2", "heavy", "hbar2"],
)
def test_other_grids_pass(kwargs):
    out = run_verification(GridSpec(**kwargs), seed=3)
    failed = [(e["identity"], e["residual"]) for e in out["identities"] if e["status"] == "fail"]
    assert failed == []


def test_grid_used_is_recorded():
    out = run_verification(GridSpec(n=16), only=["newton_wigner_restriction", "dense_eta_equals_PC"])
    by_name = {e["identity"]: e for e in out["identities"]}
    assert by_name["newton_wigner_restriction"]["n"] == 64
    assert by_name["dense_eta_equals_PC"]["n"] == 8
