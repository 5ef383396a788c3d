"""Modulus-of-convexity searches: closed-form oracle for inner products,
exact zero for flat norms, witness contracts, and determinism."""

import math

import numpy as np
import pytest

from bundlelab.convexity import (
    DEFAULT_EPS_GRID,
    FEASIBILITY_SLACK,
    SearchBudget,
    maximize_linear_on_sphere,
    modulus_curve,
    modulus_grid_estimate_2d,
    modulus_of_convexity,
    parallelogram_defect,
)
from bundlelab.norms import (
    InnerProductNorm,
    PolyhedralMaxNorm,
    PolytopeGaugeNorm,
    WeightedLpNorm,
)

TEST_BUDGET = SearchBudget(restarts=16, iterations=80)


def euclid_modulus(eps):
    """Closed-form modulus for any inner-product norm: 1 - sqrt(1 - eps^2/4).

    Derivation (independent of the search code): for unit v, w at distance
    eps, the parallelogram identity gives ||v+w||^2 = 4 - eps^2 exactly when
    ||v-w|| = eps, so the midpoint gap is minimized on the boundary.
    """
    return 1.0 - math.sqrt(1.0 - (eps / 2.0) ** 2)


def test_closed_form_frozen_value():
    # frozen from the derivation above; guards against edits to the helper
    assert euclid_modulus(1.0) == pytest.approx(0.1339745962155614, abs=1e-15)
    assert euclid_modulus(2.0) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize(
    "spec",
    [
        InnerProductNorm(np.eye(2)),
        InnerProductNorm([[2.0, 0.3], [0.3, 1.0]]),
        InnerProductNorm(np.diag([1.0, 2.0, 0.5])),
    ],
    ids=["euclid-2d", "skewed-2d", "diag-3d"],
)
def test_inner_product_curve_matches_closed_form(spec):
    curve = modulus_curve(spec, budget=TEST_BUDGET)
    target = np.array([euclid_modulus(e) for e in curve.epsilons])
    # estimates are upper bounds for the slack-relaxed infimum; the relaxation
    # matters near eps = 2 where the closed form has a square-root singularity
    floor = np.array(
        [euclid_modulus(max(e - FEASIBILITY_SLACK, 1e-12)) for e in curve.epsilons]
    )
    assert np.all(curve.deltas >= floor - 1e-9)
    assert np.max(np.abs(curve.deltas - target)) <= 1e-3


@pytest.mark.parametrize(
    "spec",
    [
        WeightedLpNorm(1, [1.0, 2.0]),
        WeightedLpNorm(math.inf, [1.0, 1.0]),
        PolyhedralMaxNorm([[1.0, 0.0], [0.0, 1.0]]),
        PolytopeGaugeNorm([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]),
    ],
    ids=["l1", "linf", "square-max", "cross-gauge"],
)
def test_flat_norms_have_zero_modulus(spec):
    """Sign-pattern / vertex pairs realize midpoints on the sphere, so the
    search must return exactly 0.0 (not merely something small)."""
    curve = modulus_curve(spec, budget=TEST_BUDGET)
    assert np.all(curve.deltas == 0.0)
    for eps, (v, w) in zip(curve.epsilons, curve.witnesses):
        assert spec.norm(v) == pytest.approx(1.0, abs=1e-9)
        assert spec.norm(w) == pytest.approx(1.0, abs=1e-9)
        assert spec.norm(v - w) >= eps - FEASIBILITY_SLACK


def test_witness_contract_euclid():
    spec = InnerProductNorm(np.eye(2))
    delta, (v, w) = modulus_of_convexity(spec, 1.0, budget=TEST_BUDGET)
    assert spec.norm(v) == pytest.approx(1.0, abs=1e-9)
    assert spec.norm(w) == pytest.approx(1.0, abs=1e-9)
    assert spec.norm(v - w) >= 1.0 - FEASIBILITY_SLACK
    # the witness midpoint gap reproduces the reported value
    assert 1.0 - spec.norm((v + w) / 2.0) == pytest.approx(delta, abs=1e-12)
    assert delta == pytest.approx(euclid_modulus(1.0), abs=1e-3)


def test_curve_is_isotonic_and_below_raw():
    spec = WeightedLpNorm(3, [1.0, 1.0])
    curve = modulus_curve(spec, budget=TEST_BUDGET)
    assert np.all(np.diff(curve.deltas) >= 0.0)
    assert np.all(curve.deltas <= curve.raw_deltas + 1e-15)


def test_determinism_same_budget_same_bits():
    spec = WeightedLpNorm(1.5, [1.0, 2.0])
    a = modulus_curve(spec, budget=TEST_BUDGET)
    b = modulus_curve(spec, budget=TEST_BUDGET)
    assert np.array_equal(a.deltas, b.deltas)
    assert np.array_equal(a.raw_deltas, b.raw_deltas)
    for (v1, w1), (v2, w2) in zip(a.witnesses, b.witnesses):
        assert np.array_equal(v1, v2) and np.array_equal(w1, w2)


def test_one_dimensional_convention():
    spec = WeightedLpNorm(2, [1.0])
    curve = modulus_curve(spec, budget=TEST_BUDGET)
    assert np.all(curve.deltas == 1.0)
    for v, w in curve.witnesses:
        assert np.allclose(v, -w)
        assert spec.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_default_grid_shape():
    assert len(DEFAULT_EPS_GRID) == 20
    assert DEFAULT_EPS_GRID[0] == pytest.approx(0.1)
    assert DEFAULT_EPS_GRID[-1] == pytest.approx(2.0)


@pytest.mark.parametrize(
    "bad",
    [[], [0.0, 1.0], [-0.5], [2.5], [0.5, 0.5], [1.0, 0.5]],
    ids=["empty", "zero", "negative", "above-two", "flat", "decreasing"],
)
def test_bad_grids_rejected(bad):
    spec = InnerProductNorm(np.eye(2))
    with pytest.raises(ValueError):
        modulus_curve(spec, eps_grid=bad, budget=TEST_BUDGET)


def test_grid_oracle_agrees_with_search_on_gauge():
    """Two independent routes to the same planar curve: dense angle-pair
    enumeration vs multi-start descent."""
    spec = PolytopeGaugeNorm(
        [[1.2, 0.1], [0.2, 0.9], [-1.2, -0.1], [-0.2, -0.9]]
    )
    grid = [0.4, 0.8, 1.2, 1.6, 2.0]
    eps, dense = modulus_grid_estimate_2d(spec, grid, samples=2048)
    curve = modulus_curve(spec, grid, budget=TEST_BUDGET)
    assert np.max(np.abs(curve.deltas - dense)) <= 2e-3


def test_grid_oracle_requires_dimension_two():
    with pytest.raises(ValueError, match="dimension 2"):
        modulus_grid_estimate_2d(InnerProductNorm(np.eye(3)))


class TestParallelogramDefect:
    def test_inner_product_defect_vanishes(self):
        defect, (v, w) = parallelogram_defect(InnerProductNorm([[2.0, 0.3], [0.3, 1.0]]))
        assert defect <= 1e-9

    def test_l1_defect_is_four(self):
        # v = e1, w = e2: ||v+w||^2 + ||v-w||^2 = 4 + 4, defect |8 - 4| = 4,
        # and 4 is the ceiling since each term is at most 2^2
        spec = WeightedLpNorm(1, [1.0, 1.0])
        defect, (v, w) = parallelogram_defect(spec)
        assert defect == pytest.approx(4.0, abs=1e-9)
        assert spec.norm(v) == pytest.approx(1.0, abs=1e-9)
        assert spec.norm(w) == pytest.approx(1.0, abs=1e-9)

    def test_linf_defect_is_four(self):
        defect, _ = parallelogram_defect(WeightedLpNorm(math.inf, [1.0, 1.0]))
        assert defect == pytest.approx(4.0, abs=1e-9)

    def test_witness_reproduces_defect(self):
        spec = WeightedLpNorm(3, [1.0, 2.0])
        defect, (v, w) = parallelogram_defect(spec)
        re = abs(spec.norm(v + w) ** 2 + spec.norm(v - w) ** 2 - 4.0)
        assert re == pytest.approx(defect, abs=1e-12)
        assert defect > 1e-3  # p=3 is genuinely non-Hilbert


class TestLinearMaximization:
    @pytest.mark.parametrize(
        "spec",
        [
            InnerProductNorm([[2.0, 0.3], [0.3, 1.0]]),
            WeightedLpNorm(3, [1.0, 2.0]),
            PolytopeGaugeNorm([[1.5, 0.0], [0.0, 0.5], [-1.5, 0.0], [0.0, -0.5]]),
        ],
        ids=["ip", "wlp3", "gauge"],
    )
    def test_search_matches_closed_form(self, spec):
        c = np.array([0.7, -1.1])
        value, point = maximize_linear_on_sphere(spec.norm_batch, 2, c)
        closed, _ = spec.linear_maximizer(c)
        assert value == pytest.approx(closed, abs=1e-6)
        assert spec.norm(point) == pytest.approx(1.0, abs=1e-9)

    def test_zero_functional(self):
        spec = InnerProductNorm(np.eye(2))
        value, point = maximize_linear_on_sphere(spec.norm_batch, 2, [0.0, 0.0])
        assert value == pytest.approx(0.0, abs=1e-12)
        assert spec.norm(point) == pytest.approx(1.0, abs=1e-9)
