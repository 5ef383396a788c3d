"""Theorem suites: report plumbing, tag coverage, and small smoke runs."""

import dataclasses

import numpy as np
import pytest

from bundlelab.generators import InstanceRecipe
from bundlelab.suites import (
    CheckRow,
    REQUIRED_TAGS,
    SUITE_TAGS,
    TheoremReport,
    default_recipe,
    make_report,
    run_suites,
    suite_convexity_lower,
    suite_convexity_upper,
    suite_criterion,
    suite_duality,
    suite_hilbert,
    suite_pointwise_modulus,
)

TINY = {
    "hilbert": InstanceRecipe(seed=11, instance_count=2, atom_range=(2, 3)),
    "uc-upper": InstanceRecipe(seed=23, instance_count=1, atom_range=(2, 2),
                               dim_range=(2, 2), exponents=(2,)),
    "uc-lower": InstanceRecipe(seed=37, instance_count=1, atom_range=(2, 2),
                               dim_range=(2, 2), kinds=("inner_product",),
                               exponents=(2,)),
    "pointwise": InstanceRecipe(seed=41, instance_count=1, atom_range=(2, 2),
                                dim_range=(2, 2)),
    "duality": InstanceRecipe(seed=53, instance_count=1, atom_range=(2, 3)),
}
GRID = [0.5, 1.0, 1.5, 2.0]


def test_every_suite_covers_its_tags():
    assert frozenset().union(*SUITE_TAGS.values()) == REQUIRED_TAGS


def test_default_recipes_exist_for_every_suite():
    for name in SUITE_TAGS:
        recipe = default_recipe(name)
        assert isinstance(recipe, InstanceRecipe)
        assert recipe.instance_count >= 1


def test_make_report_verdict_consistency():
    good = CheckRow("ok", 0.0, 1e-9, True)
    bad = CheckRow("broken", 1.0, 1e-9, False)
    rep = make_report("s", "t", "i", [good])
    assert rep.verdict == "PASS" and not rep.unexpected
    rep = make_report("s", "t", "i", [good, bad])
    assert rep.verdict == "FAIL" and rep.unexpected
    rep = make_report("s", "t", "i", [bad], expected="FAIL")
    assert rep.verdict == "FAIL" and not rep.unexpected


def test_unknown_suite_rejected():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suites(("no-such-suite",))


class TestSmallRuns:
    def test_hilbert(self):
        reports = suite_hilbert(TINY["hilbert"])
        assert reports
        assert all(not r.unexpected for r in reports)
        assert {r.tag for r in reports} == {"hilbert-fiber-equivalence"}

    def test_uc_upper(self):
        reports = suite_convexity_upper(TINY["uc-upper"], GRID)
        assert all(not r.unexpected for r in reports)
        for rep in reports:
            assert "epsilon" in rep.data
            for row in rep.checks:
                assert row.residual <= row.threshold

    def test_uc_lower(self):
        reports = suite_convexity_lower(TINY["uc-lower"], GRID)
        assert all(not r.unexpected for r in reports)

    def test_pointwise(self):
        reports = suite_pointwise_modulus(TINY["pointwise"], [1.0, 2.0])
        assert all(not r.unexpected for r in reports)
        assert {r.tag for r in reports} == {"pointwise-modulus-equality"}

    def test_duality(self):
        reports = suite_duality(TINY["duality"])
        assert all(not r.unexpected for r in reports)
        tags = {r.tag for r in reports}
        assert "dual-norm-isometry" in tags
        assert "bidual-diagram" in tags
        assert "constant-fiber-chain" in tags

    def test_criterion_includes_expected_failures(self):
        reports = suite_criterion(seed=0, triple_count=40)
        assert all(not r.unexpected for r in reports)
        expected_fail = [r for r in reports if r.expected == "FAIL"]
        assert expected_fail, "counterexample catalogue must be exercised"
        for rep in expected_fail:
            assert rep.verdict == "FAIL"
            assert any(not row.passed and row.witness for row in rep.checks)
        tags = {r.tag for r in reports}
        assert {
            "restriction-additivity",
            "weak-star-continuity",
            "pointwise-norm-reconstruction",
            "measure-power-inequality",
        } <= tags


def test_run_suites_dispatch_and_determinism():
    reports_a = run_suites(("uc-upper",), recipes=TINY, eps_grid=GRID)
    reports_b = run_suites(("uc-upper",), recipes=TINY, eps_grid=GRID)
    assert len(reports_a) == len(reports_b) > 0
    for ra, rb in zip(reports_a, reports_b):
        assert ra.instance == rb.instance and ra.verdict == rb.verdict
        for ca, cb in zip(ra.checks, rb.checks):
            assert ca.residual == cb.residual  # bit-for-bit replay


def test_report_fields_round_trip_into_dataclass():
    rep = make_report(
        "s", "t", "i", [CheckRow("r", 0.5, 1.0, True, witness="w")],
        notes=["n"], data={"xs": np.arange(3.0)},
    )
    assert dataclasses.is_dataclass(rep)
    assert isinstance(rep, TheoremReport)
    assert rep.checks[0].witness == "w"
    assert rep.notes == ["n"]
