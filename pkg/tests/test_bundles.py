"""Bundles over finite atomic measure spaces: sections, pointwise norms,
weighted p-norms, module action, integrals, and fiber classifications."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bundlelab.bundles import (
    Bundle,
    Fiber,
    HILBERT_DEFECT_TOL,
    Section,
    ZERO_FIBER_MODULUS,
    bochner_integral,
    classify_bundle,
    fiber_modulus_curve,
    module_action,
    parallelogram_residual,
    pointwise_modulus,
    pointwise_norm,
    restrict_section,
    section_lp_norm,
    section_modulus_curve,
)
from bundlelab.convexity import SearchBudget
from bundlelab.measure import MeasureSpace, ScalarField
from bundlelab.norms import InnerProductNorm, WeightedLpNorm

FAST = SearchBudget(restarts=8, iterations=60)


def euclid(dim=2):
    return InnerProductNorm(np.eye(dim))


def two_atom_euclid(weights=(1.0, 1.0)):
    space = MeasureSpace(["a", "b"], list(weights))
    return Bundle(space, [Fiber(2, euclid()), Fiber(2, euclid())])


class TestFiberValidation:
    def test_negative_dimension(self):
        with pytest.raises(ValueError, match="nonnegative"):
            Fiber(-1, euclid())

    def test_zero_dim_with_norm(self):
        with pytest.raises(ValueError, match="no norm"):
            Fiber(0, euclid())

    def test_positive_dim_without_norm(self):
        with pytest.raises(ValueError, match="need a norm"):
            Fiber(2, None)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="does not match"):
            Fiber(3, euclid(2))


class TestBundle:
    def test_fiber_count_must_match_atoms(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        with pytest.raises(ValueError, match="one fiber per atom"):
            Bundle(space, [Fiber(2, euclid())])

    def test_total_dimension_and_degeneracy(self):
        space = MeasureSpace(["a", "b", "c"], [1.0, 1.0, 1.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(0), Fiber(1, euclid(1))])
        assert b.total_dimension == 3
        assert not b.degenerate
        z = Bundle(space, [Fiber(0), Fiber(0), Fiber(0)])
        assert z.degenerate

    def test_is_constant(self):
        assert two_atom_euclid().is_constant
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        mixed = Bundle(space, [Fiber(2, euclid()), Fiber(2, WeightedLpNorm(1, [1.0, 1.0]))])
        assert not mixed.is_constant

    def test_dual_is_cached_and_correct(self):
        space = MeasureSpace(["a"], [1.0])
        b = Bundle(space, [Fiber(2, WeightedLpNorm(3, [1.0, 2.0]))])
        assert b.dual() is b.dual()
        assert float(b.dual().fibers[0].norm.r) == pytest.approx(1.5)

    def test_zero_section(self):
        z = two_atom_euclid().zero_section()
        assert all(np.all(v == 0.0) for v in z.vectors)


class TestSection:
    def test_wrong_vector_count(self):
        with pytest.raises(ValueError, match="one vector per atom"):
            Section(two_atom_euclid(), [[1.0, 0.0]])

    def test_wrong_shape_names_the_atom(self):
        with pytest.raises(ValueError, match="atom index 1"):
            Section(two_atom_euclid(), [[1.0, 0.0], [1.0, 0.0, 0.0]])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            Section(two_atom_euclid(), [[1.0, 0.0], [np.nan, 0.0]])

    def test_arithmetic(self):
        b = two_atom_euclid()
        s = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        t = Section(b, [[1.0, 1.0], [0.0, 2.0]])
        assert np.allclose((s + t).vectors[0], [4.0, 5.0])
        assert np.allclose((s - t).vectors[1], [1.0, -2.0])
        assert np.allclose((-s).vectors[0], [-3.0, -4.0])
        assert np.allclose(s.scale(0.5).vectors[0], [1.5, 2.0])

    def test_copy_is_independent(self):
        b = two_atom_euclid()
        s = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        c = s.copy()
        c.vectors[0][0] = 99.0
        assert s.vectors[0][0] == 3.0

    def test_cross_space_arithmetic_rejected(self):
        s = Section(two_atom_euclid(), [[1.0, 0.0], [0.0, 1.0]])
        other_space = MeasureSpace(["x", "y"], [2.0, 1.0])
        other = Bundle(other_space, [Fiber(2, euclid()), Fiber(2, euclid())])
        t = Section(other, [[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            s + t


class TestPointwiseNorm:
    def test_hand_values(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [0.0, 0.0]])
        assert np.allclose(pointwise_norm(v).values, [5.0, 0.0])

    def test_l1_fiber(self):
        space = MeasureSpace(["a"], [1.0])
        b = Bundle(space, [Fiber(2, WeightedLpNorm(1, [1.0, 1.0]))])
        v = Section(b, [[1.0, -2.0]])
        assert np.allclose(pointwise_norm(v).values, [3.0])

    def test_zero_fiber_contributes_zero(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(0)])
        v = Section(b, [[3.0, 4.0], []])
        assert np.allclose(pointwise_norm(v).values, [5.0, 0.0])


class TestSectionNorm:
    def test_p2_hand_value(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [0.0, 0.0]])
        assert section_lp_norm(v, 2) == pytest.approx(5.0, abs=1e-12)

    def test_p2_frozen_value(self):
        # pointwise norms [5, 4] with unit weights: sqrt(25 + 16) = sqrt(41)
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [0.0, 4.0]])
        assert section_lp_norm(v, 2) == pytest.approx(6.4031242374328485, abs=1e-12)

    def test_p1_weighted(self):
        space = MeasureSpace(["a", "b"], [2.0, 0.5])
        b = Bundle(space, [Fiber(1, euclid(1)), Fiber(1, euclid(1))])
        v = Section(b, [[1.0], [2.0]])
        assert section_lp_norm(v, 1) == pytest.approx(3.0, abs=1e-12)

    def test_p_inf(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [5.0, 12.0]])
        assert section_lp_norm(v, math.inf) == pytest.approx(13.0, abs=1e-12)


class TestModuleAction:
    def test_indicator_field(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        out = module_action([0.0, 1.0], v)
        assert np.allclose(out.vectors[0], [0.0, 0.0])
        assert np.allclose(out.vectors[1], [1.0, 0.0])

    def test_constant_one_is_identity(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        out = module_action(np.ones(2), v)
        for a, c in zip(v.vectors, out.vectors):
            assert np.array_equal(a, c)

    def test_negative_scalar_doubles_norm(self):
        space = MeasureSpace(["a"], [1.0])
        b = Bundle(space, [Fiber(2, euclid())])
        v = Section(b, [[1.0, 1.0]])
        out = module_action([-2.0], v)
        assert np.allclose(out.vectors[0], [-2.0, -2.0])
        assert pointwise_norm(out).values[0] == pytest.approx(
            2.0 * pointwise_norm(v).values[0], abs=1e-12
        )

    def test_pointwise_norm_is_multiplicative(self):
        """|f.v| = |f| |v| holds atom by atom, exactly."""
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [1.0, 2.0]])
        f = np.array([0.5, -3.0])
        lhs = pointwise_norm(module_action(f, v)).values
        rhs = np.abs(f) * pointwise_norm(v).values
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_scalar_field_input_and_space_check(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        f = ScalarField(b.space, np.array([2.0, 0.0]))
        assert np.allclose(module_action(f, v).vectors[0], [6.0, 8.0])
        other = ScalarField(MeasureSpace(["x", "y"], [1.0, 1.0]), np.ones(2))
        with pytest.raises(ValueError, match="different measure spaces"):
            module_action(other, v)

    def test_wrong_length(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        with pytest.raises(ValueError, match="one value per atom"):
            module_action([1.0], v)


class TestRestriction:
    def test_restrict_zeroes_complement(self):
        b = two_atom_euclid()
        v = Section(b, [[3.0, 4.0], [1.0, 0.0]])
        r = restrict_section(v, ["a"])
        assert np.allclose(r.vectors[0], [3.0, 4.0])
        assert np.allclose(r.vectors[1], [0.0, 0.0])

    def test_restriction_additivity_exact(self):
        b = two_atom_euclid((2.0, 0.5))
        v = Section(b, [[3.0, 4.0], [1.0, 2.0]])
        for p in (1, 1.5, 2, 3):
            whole = section_lp_norm(v, p) ** float(p)
            part = section_lp_norm(restrict_section(v, ["a"]), p) ** float(p)
            rest = section_lp_norm(restrict_section(v, ["b"]), p) ** float(p)
            assert part + rest == pytest.approx(whole, abs=1e-12)


class TestBochnerIntegral:
    def test_full_space(self):
        space = MeasureSpace(["a", "b"], [1.0, 2.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(2, euclid())])
        v = Section(b, [[1.0, 0.0], [0.0, 1.0]])
        assert np.allclose(bochner_integral(v), [1.0, 2.0])

    def test_empty_subset_is_zero_vector(self):
        space = MeasureSpace(["a", "b"], [1.0, 2.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(2, euclid())])
        v = Section(b, [[1.0, 0.0], [0.0, 1.0]])
        out = bochner_integral(v, [])
        assert out.shape == (2,) and np.all(out == 0.0)

    def test_half_weight(self):
        space = MeasureSpace(["a"], [0.5])
        b = Bundle(space, [Fiber(2, euclid())])
        v = Section(b, [[4.0, 4.0]])
        assert np.allclose(bochner_integral(v, ["a"]), [2.0, 2.0])

    def test_heterogeneous_subset_rejected(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(1, euclid(1))])
        v = Section(b, [[1.0, 0.0], [1.0]])
        with pytest.raises(ValueError, match="single fiber dimension"):
            bochner_integral(v)
        with pytest.raises(ValueError, match="heterogeneous"):
            bochner_integral(v, [])


class TestPointwiseModulus:
    def test_euclidean_constant(self):
        b = two_atom_euclid()
        field = pointwise_modulus(b, 1.0, budget=FAST)
        assert np.max(np.abs(field.values - 0.1339745962155614)) <= 1e-3

    def test_mixed_fibers(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(2, WeightedLpNorm(1, [1.0, 1.0]))])
        field = pointwise_modulus(b, 1.0, budget=FAST)
        assert field.values[0] == pytest.approx(0.1339745962155614, abs=1e-3)
        assert field.values[1] <= 1e-9

    def test_dimension_one_convention(self):
        space = MeasureSpace(["a"], [1.0])
        b = Bundle(space, [Fiber(1, euclid(1))])
        assert pointwise_modulus(b, 1.0, budget=FAST).values[0] == 1.0

    def test_zero_fiber_convention(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        b = Bundle(space, [Fiber(0), Fiber(2, euclid())])
        assert pointwise_modulus(b, 1.0, budget=FAST).values[0] == ZERO_FIBER_MODULUS


def test_fiber_curve_memoized_across_equal_specs():
    grid = [0.5, 1.0]
    a = fiber_modulus_curve(euclid(), grid, FAST)
    b = fiber_modulus_curve(InnerProductNorm(np.eye(2)), grid, FAST)
    assert a is b  # keyed by digest + grid + budget


class TestClassification:
    GRID = [0.5, 1.0, 1.5, 2.0]

    def classify(self, bundle):
        return classify_bundle(bundle, eps_grid=self.GRID, budget=FAST, defect_budget=FAST)

    def test_hilbert_bundle(self):
        rec = self.classify(two_atom_euclid())
        assert rec.is_hilbert and rec.is_uniformly_convex and not rec.degenerate
        assert np.max(rec.fiber_defects) <= HILBERT_DEFECT_TOL

    def test_one_flat_fiber_kills_both(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        b = Bundle(space, [Fiber(2, euclid()), Fiber(2, WeightedLpNorm(1, [1.0, 1.0]))])
        rec = self.classify(b)
        assert not rec.is_hilbert and not rec.is_uniformly_convex
        assert np.all(rec.ess_inf_modulus == 0.0)

    def test_p4_fibers_convex_but_not_hilbert(self):
        space = MeasureSpace(["a", "b"], [1.0, 1.0])
        spec = WeightedLpNorm(4, [1.0, 1.0])
        b = Bundle(space, [Fiber(2, spec), Fiber(2, spec)])
        rec = self.classify(b)
        assert not rec.is_hilbert
        assert rec.is_uniformly_convex

    def test_degenerate_bundle(self):
        space = MeasureSpace(["a"], [1.0])
        rec = self.classify(Bundle(space, [Fiber(0)]))
        assert rec.degenerate and rec.is_hilbert and rec.is_uniformly_convex
        assert rec.notes and "vacuous" in rec.notes[0]


class TestSectionModulus:
    def test_constant_euclid_p2_matches_closed_form(self):
        b = two_atom_euclid((1.0, 2.0))
        curve = section_modulus_curve(
            b, 2, eps_grid=[0.5, 1.0, 1.5], budget=SearchBudget(restarts=4, iterations=20), fiber_budget=SearchBudget(restarts=10, iterations=50)
        )
        target = np.array([1.0 - math.sqrt(1.0 - (e / 2.0) ** 2) for e in curve.epsilons])
        assert np.max(np.abs(curve.deltas - target)) <= 2e-3

    def test_degenerate_bundle_rejected(self):
        space = MeasureSpace(["a"], [1.0])
        b = Bundle(space, [Fiber(0)])
        with pytest.raises(ValueError, match="degenerate"):
            section_modulus_curve(b, 2)


class TestParallelogramResidual:
    def test_hilbert_residual_small(self):
        b = two_atom_euclid((1.0, 2.0))
        rng = np.random.default_rng(0)
        for _ in range(10):
            v = Section(b, list(rng.standard_normal((2, 2))))
            w = Section(b, list(rng.standard_normal((2, 2))))
            assert parallelogram_residual(v, w) <= 1e-9

    def test_flat_fiber_residual_large(self):
        space = MeasureSpace(["a"], [1.0])
        b = Bundle(space, [Fiber(2, WeightedLpNorm(1, [1.0, 1.0]))])
        v = Section(b, [[1.0, 0.0]])
        w = Section(b, [[0.0, 1.0]])
        assert parallelogram_residual(v, w) == pytest.approx(4.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(
    coords=st.lists(
        st.floats(-4, 4, allow_nan=False), min_size=8, max_size=8
    ),
    p=st.sampled_from([1.5, 2, 3]),
    t=st.floats(-3, 3, allow_nan=False),
)
def test_gamma_p_norm_axioms(coords, p, t):
    b = two_atom_euclid((2.0, 0.5))
    v = Section(b, [coords[0:2], coords[2:4]])
    w = Section(b, [coords[4:6], coords[6:8]])
    nv = section_lp_norm(v, p)
    assert section_lp_norm(v.scale(t), p) == pytest.approx(abs(t) * nv, rel=1e-9, abs=1e-9)
    assert section_lp_norm(v + w, p) <= nv + section_lp_norm(w, p) + 1e-9
    if nv <= 1e-15:
        assert all(np.allclose(x, 0.0, atol=1e-12) for x in v.vectors)


@settings(max_examples=25, deadline=None)
@given(
    coords=st.lists(st.floats(-4, 4, allow_nan=False), min_size=4, max_size=4),
    f0=st.floats(-2, 2, allow_nan=False),
    f1=st.floats(-2, 2, allow_nan=False),
    p=st.sampled_from([1.5, 2, 3]),
)
def test_module_compatibility_bound(coords, f0, f1, p):
    """|| f.v ||_p <= (sup |f|) ||v||_p, with equality for constant f."""
    b = two_atom_euclid((2.0, 0.5))
    v = Section(b, [coords[0:2], coords[2:4]])
    f = np.array([f0, f1])
    lhs = section_lp_norm(module_action(f, v), p)
    assert lhs <= np.max(np.abs(f)) * section_lp_norm(v, p) + 1e-9
    const = module_action(np.full(2, f0), v)
    assert section_lp_norm(const, p) == pytest.approx(
        abs(f0) * section_lp_norm(v, p), rel=1e-9, abs=1e-9
    )
