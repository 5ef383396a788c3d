"""When does an abstract section-space norm come from a pointwise norm?

The checks here probe two structural conditions on a candidate norm over a
bundle's sections:

* restriction additivity: the p-th power of the norm splits additively
  across complementary atom subsets;
* weak-star continuity: multiplying by a bounded, atomwise-vanishing
  sequence of scalar fields drives the norm to zero.

Norms passing the first condition define an additive set function whose
density recovers a pointwise norm; :func:`reconstruct_pointwise_norm`
computes it and the tests round-trip it against the inducing norm.  A
small lemma about power inequalities between measures and their densities
is checked exhaustively by :func:`measure_inequality_report`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .bundles import Bundle, Section, module_action, pointwise_norm, section_lp_norm
from .measure import MeasureSpace, ScalarField, as_exponent

__all__ = [
    "AbstractModuleNorm",
    "induced_norm",
    "sup_over_atoms_norm",
    "mixed_sum_norm",
    "mixed_max_norm",
    "AdditivityReport",
    "restriction_additivity_check",
    "WeakStarFamily",
    "weak_star_null_families",
    "ContinuityReport",
    "weak_star_continuity_check",
    "reconstruct_pointwise_norm",
    "AtomicMeasureTriple",
    "MeasureInequalityReport",
    "measure_inequality_report",
    "subset_sums",
]

ADDITIVITY_TOL = 1e-9
CONTINUITY_TOL = 1e-6
ENUMERATION_CAP = 16
SAMPLED_SUBSETS = 4096


class AbstractModuleNorm:
    """A candidate norm on the sections of a bundle, given as a callable."""

    def __init__(self, bundle: Bundle, fn: Callable[[Section], float], name: str,
                 claimed_exponent=None):
        self.bundle = bundle
        self._fn = fn
        self.name = name
        self.claimed_exponent = claimed_exponent

    def evaluate(self, section: Section) -> float:
        if section.bundle is not self.bundle and (
            section.bundle.space != self.bundle.space
            or list(section.bundle.dimensions) != list(self.bundle.dimensions)
        ):
            raise ValueError("section does not live on this norm's bundle")
        return float(self._fn(section))

    def check_axioms(self, probes: int = 16, seed: int = 0, tol: float = 1e-9):
        """Randomized spot check of norm axioms; raises AssertionError on failure."""
        rng = np.random.default_rng(seed)
        if self.bundle.total_dimension == 0:
            return
        for _ in range(probes):
            v = _random_section(self.bundle, rng)
            w = _random_section(self.bundle, rng)
            t = float(rng.uniform(-3.0, 3.0))
            nv, nw = self.evaluate(v), self.evaluate(w)
            if nv <= 0.0:
                raise AssertionError(f"{self.name}: vanishing on a nonzero section")
            if abs(self.evaluate(v.scale(t)) - abs(t) * nv) > tol * max(1.0, nv):
                raise AssertionError(f"{self.name}: homogeneity violated")
            if self.evaluate(v + w) > nv + nw + tol * max(1.0, nv + nw):
                raise AssertionError(f"{self.name}: triangle inequality violated")

    def __repr__(self):
        return f"AbstractModuleNorm({self.name!r})"


def _random_section(bundle: Bundle, rng) -> Section:
    return Section(bundle, [rng.standard_normal(d) for d in bundle.dimensions])


def induced_norm(bundle: Bundle, p) -> AbstractModuleNorm:
    """The section-space norm induced by the pointwise norm and exponent p."""
    p = as_exponent(p)
    return AbstractModuleNorm(
        bundle, lambda v: section_lp_norm(v, p), f"induced-p{p}", claimed_exponent=p
    )


def sup_over_atoms_norm(bundle: Bundle) -> AbstractModuleNorm:
    """Plain supremum of fiber norms over atoms (ignores the measure)."""

    def fn(v: Section) -> float:
        vals = pointwise_norm(v).values
        return float(vals.max()) if len(vals) else 0.0

    return AbstractModuleNorm(bundle, fn, "sup-over-atoms")


def mixed_sum_norm(bundle: Bundle, p1, p2) -> AbstractModuleNorm:
    p1, p2 = as_exponent(p1), as_exponent(p2)
    return AbstractModuleNorm(
        bundle,
        lambda v: section_lp_norm(v, p1) + section_lp_norm(v, p2),
        f"mixed-sum-p{p1}-p{p2}",
    )


def mixed_max_norm(bundle: Bundle, p1, p2) -> AbstractModuleNorm:
    p1, p2 = as_exponent(p1), as_exponent(p2)
    return AbstractModuleNorm(
        bundle,
        lambda v: max(section_lp_norm(v, p1), section_lp_norm(v, p2)),
        f"mixed-max-p{p1}-p{p2}",
    )


# -- restriction additivity ---------------------------------------------------


@dataclass
class AdditivityReport:
    norm_name: str
    exponent: float
    passed: bool
    max_residual: float
    witness_probe: int
    witness_subset: tuple
    subsets_checked: int
    enumeration: str
    notes: list = field(default_factory=list)


def _subset_masks(atom_count: int, cap: int, samples: int, seed: int):
    if atom_count <= cap:
        count = 2**atom_count
        idx = np.arange(count, dtype=np.uint32)
        masks = (idx[:, None] >> np.arange(atom_count)) & 1
        return masks.astype(bool), "full"
    rng = np.random.default_rng(seed)
    masks = rng.integers(0, 2, size=(samples, atom_count)).astype(bool)
    return masks, "sampled"


def restriction_additivity_check(
    norm: AbstractModuleNorm,
    p,
    probes: int | Sequence[Section] = 8,
    seed: int = 0,
    cap: int = ENUMERATION_CAP,
    samples: int = SAMPLED_SUBSETS,
) -> AdditivityReport:
    """Does the p-th power of the norm split across complementary subsets?

    For every probe section v and subset E the residual
    ``| N(1_E v)^p + N(1_{X\\E} v)^p - N(v)^p |`` is evaluated; subsets are
    fully enumerated up to ``cap`` atoms and sampled deterministically
    beyond.  Probes are normalized so the 1e-9 verdict line is scale-free.
    """
    p = as_exponent(p)
    if p == math.inf:
        raise ValueError("the sup-exponent analogue of this check is out of scope; use finite p")
    pf = float(p)
    bundle = norm.bundle
    if isinstance(probes, int):
        rng = np.random.default_rng(seed)
        probe_sections = [_random_section(bundle, rng) for _ in range(probes)]
    else:
        probe_sections = list(probes)

    masks, enumeration = _subset_masks(bundle.space.atom_count, cap, samples, seed)
    atoms = np.array(bundle.space.atoms, dtype=object)

    max_res = 0.0
    wit_probe, wit_subset = -1, ()
    for k, v in enumerate(probe_sections):
        total = norm.evaluate(v)
        if total > 0.0:
            v = v.scale(1.0 / total)
            total = norm.evaluate(v)
        total_p = total**pf
        for mask in masks:
            inside = norm.evaluate(module_action(mask.astype(float), v))
            outside = norm.evaluate(module_action((~mask).astype(float), v))
            res = abs(inside**pf + outside**pf - total_p)
            if res > max_res:
                max_res = res
                wit_probe = k
                wit_subset = tuple(atoms[mask])
    return AdditivityReport(
        norm.name,
        pf,
        max_res <= ADDITIVITY_TOL,
        max_res,
        wit_probe,
        wit_subset,
        len(masks) * len(probe_sections),
        enumeration,
    )


# -- weak-star continuity ------------------------------------------------------


@dataclass
class WeakStarFamily:
    """A bounded sequence of scalar fields vanishing at every atom."""

    name: str
    values_at: Callable[[int], np.ndarray]
    bound: float

    def self_test(self, space: MeasureSpace, horizon: int):
        sup = 0.0
        for n in range(1, horizon + 1):
            vals = self.values_at(n)
            if vals.shape != (space.atom_count,):
                raise AssertionError(f"{self.name}: wrong field shape at step {n}")
            sup = max(sup, float(np.max(np.abs(vals))) if len(vals) else 0.0)
        if sup > self.bound + 1e-12:
            raise AssertionError(f"{self.name}: bound {self.bound} exceeded ({sup})")
        tail = float(np.max(np.abs(self.values_at(horizon)))) if space.atom_count else 0.0
        if tail > 1e-9:
            raise AssertionError(f"{self.name}: not atomwise vanishing (tail {tail:.2e})")


def weak_star_null_families(space: MeasureSpace) -> list[WeakStarFamily]:
    """Geometric-decay families: uniform, sign-alternating, rotating singleton."""
    k = space.atom_count
    ones = np.ones(k)

    def uniform(n):
        return 0.5**n * ones

    def alternating(n):
        return (-1.0) ** n * 0.5**n * ones

    def rotating(n):
        out = np.zeros(k)
        if k:
            out[n % k] = 0.5**n
        return out

    return [
        WeakStarFamily("uniform-decay", uniform, 1.0),
        WeakStarFamily("alternating-decay", alternating, 1.0),
        WeakStarFamily("rotating-singleton-decay", rotating, 1.0),
    ]


@dataclass
class ContinuityReport:
    norm_name: str
    passed: bool
    max_limit_proxy: float
    horizon: int
    rows: list = field(default_factory=list)


def weak_star_continuity_check(
    norm: AbstractModuleNorm,
    probes: int | Sequence[Section] = 6,
    seed: int = 0,
    horizon: int = 40,
) -> ContinuityReport:
    """Evaluate ``N(f_n . v)`` at the horizon for the null families.

    Probes are normalized; the verdict passes when every limit proxy is at
    most 1e-6.  The families are self-tested for boundedness and atomwise
    decay before use.
    """
    bundle = norm.bundle
    if isinstance(probes, int):
        rng = np.random.default_rng(seed)
        probe_sections = [_random_section(bundle, rng) for _ in range(probes)]
    else:
        probe_sections = list(probes)
    families = weak_star_null_families(bundle.space)
    for fam in families:
        fam.self_test(bundle.space, horizon)

    rows = []
    worst = 0.0
    for fam in families:
        f_end = fam.values_at(horizon)
        for k, v in enumerate(probe_sections):
            total = norm.evaluate(v)
            if total > 0.0:
                v = v.scale(1.0 / total)
            val = norm.evaluate(module_action(f_end, v))
            worst = max(worst, val)
            rows.append((fam.name, k, val))
    return ContinuityReport(norm.name, worst <= CONTINUITY_TOL, worst, horizon, rows)


# -- reconstruction ------------------------------------------------------------


def reconstruct_pointwise_norm(norm: AbstractModuleNorm, p, section: Section) -> ScalarField:
    """Recover the pointwise norm of a section from singleton restrictions.

    ``|v|(x) = (N(1_{x} v)^p / w_x)^(1/p)``.  Refuses (with a diagnostic)
    when the singleton restriction masses fail to add up to the p-th power
    of the full norm, i.e. when the norm is not restriction-additive on
    this section.
    """
    p = as_exponent(p)
    if p == math.inf:
        raise ValueError("the sup-exponent analogue of this check is out of scope; use finite p")
    pf = float(p)
    bundle = norm.bundle
    weights = bundle.space.weights
    total_p = norm.evaluate(section) ** pf
    masses = np.empty(bundle.space.atom_count)
    for x in range(bundle.space.atom_count):
        sel = np.zeros(bundle.space.atom_count)
        sel[x] = 1.0
        masses[x] = norm.evaluate(module_action(sel, section)) ** pf
    gap = abs(float(masses.sum()) - total_p)
    if gap > ADDITIVITY_TOL * max(1.0, total_p):
        raise ValueError(
            "pointwise-norm reconstruction refused: singleton restriction masses "
            f"are not additive (gap {gap:.3e}); the norm fails restriction additivity"
        )
    return ScalarField(bundle.space, (masses / weights) ** (1.0 / pf))


# -- measure power inequality ---------------------------------------------------


def subset_sums(masses: np.ndarray) -> np.ndarray:
    """Sums over all subsets; bit i of the index marks atom i's membership."""
    out = np.zeros(1)
    for m in np.asarray(masses, dtype=float):
        out = np.concatenate([out, out + m])
    return out


@dataclass
class AtomicMeasureTriple:
    """Three finite measures given by densities against one atomic base."""

    space: MeasureSpace
    density1: np.ndarray
    density2: np.ndarray
    density3: np.ndarray
    alpha: float

    def __post_init__(self):
        for name in ("density1", "density2", "density3"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.space.atom_count,):
                raise ValueError(f"{name} needs one value per atom")
            if np.any(arr < 0.0) or not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} must be finite and nonnegative")
            setattr(self, name, arr)
        if not (0.0 < float(self.alpha) < math.inf):
            raise ValueError("alpha must be a positive real")
        self.alpha = float(self.alpha)


@dataclass
class MeasureInequalityReport:
    set_level_holds: bool
    density_level_holds: bool
    implication_violated: bool
    max_set_margin: float
    max_density_margin: float
    witness_subset: tuple
    witness_atom: object
    subsets_checked: int


def measure_inequality_report(triple: AtomicMeasureTriple, tol: float = 1e-12) -> MeasureInequalityReport:
    """Exhaustively test: set-level power inequality implies density-level.

    Set level: ``mu1(E)^a <= mu2(E)^a + mu3(E)^a`` for every subset E (full
    enumeration; at most 20 atoms).  Density level: the same inequality for
    the densities at every atom.  The report flags the (never observed)
    case where the set level holds but the density level fails.
    """
    k = triple.space.atom_count
    if k > 20:
        raise ValueError("full subset enumeration is capped at 20 atoms")
    w = triple.space.weights
    a = triple.alpha
    s1 = subset_sums(triple.density1 * w) ** a
    s2 = subset_sums(triple.density2 * w) ** a
    s3 = subset_sums(triple.density3 * w) ** a
    set_margin = s1 - (s2 + s3)
    scale = max(1.0, float(np.max(s2 + s3))) if len(s2) else 1.0
    j = int(np.argmax(set_margin))
    set_holds = bool(set_margin[j] <= tol * scale)
    atoms = np.array(triple.space.atoms, dtype=object)
    witness_subset = tuple(atoms[[(j >> i) & 1 == 1 for i in range(k)]])

    d1 = triple.density1**a
    d2 = triple.density2**a + triple.density3**a
    density_margin = d1 - d2
    dscale = max(1.0, float(np.max(d2))) if k else 1.0
    i = int(np.argmax(density_margin)) if k else 0
    density_holds = bool(k == 0 or density_margin[i] <= tol * dscale)

    return MeasureInequalityReport(
        set_holds,
        density_holds,
        bool(set_holds and not density_holds),
        float(set_margin[j]),
        float(density_margin[i]) if k else 0.0,
        witness_subset,
        atoms[i] if k else None,
        len(s1),
    )
