"""Deterministic random-instance generation for the verification suites.

Every instance is a pure function of ``(recipe, index)``: per-instance
random generators are derived from seed sequences, so identical recipes
reproduce identical bundles, sections and measure triples bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .bundles import Bundle, Fiber, Section
from .criterion import AtomicMeasureTriple
from .duality import DualSection
from .measure import MeasureSpace
from .norms import (
    InnerProductNorm,
    NormSpec,
    PolyhedralMaxNorm,
    PolytopeGaugeNorm,
    WeightedLpNorm,
)
from .serialize import bundle_digest

__all__ = [
    "InstanceRecipe",
    "instance_rng",
    "random_norm_spec",
    "random_bundle",
    "random_section",
    "random_dual_section",
    "random_measure_triple",
    "bundles_from_recipe",
    "bundle_digest",
]

ALL_KINDS = ("inner_product", "weighted_lp", "polyhedral_max", "polytope_gauge")
UC_KINDS = ("inner_product", "weighted_lp")


@dataclass(frozen=True)
class InstanceRecipe:
    """Everything needed to regenerate a family of instances."""

    seed: int = 0
    instance_count: int = 10
    atom_range: tuple = (2, 4)
    dim_range: tuple = (2, 3)
    kinds: tuple = ALL_KINDS
    lp_exponents: tuple = (1, 1.5, 2, 3, "inf")
    weight_range: tuple = (0.3, 3.0)
    exponents: tuple = (1.5, 2, 3)
    constant_fraction: float = 0.0
    zero_fiber_fraction: float = 0.0

    def config_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instance_count": self.instance_count,
            "atom_range": list(self.atom_range),
            "dim_range": list(self.dim_range),
            "kinds": list(self.kinds),
            "lp_exponents": [str(e) for e in self.lp_exponents],
            "weight_range": list(self.weight_range),
            "exponents": [str(e) for e in self.exponents],
            "constant_fraction": self.constant_fraction,
            "zero_fiber_fraction": self.zero_fiber_fraction,
        }


def recipe_from_config(cfg: dict) -> InstanceRecipe:
    kwargs = {}
    casts = {
        "seed": int,
        "instance_count": int,
        "atom_range": tuple,
        "dim_range": tuple,
        "kinds": tuple,
        "lp_exponents": tuple,
        "weight_range": tuple,
        "exponents": tuple,
        "constant_fraction": float,
        "zero_fiber_fraction": float,
    }
    for key, cast in casts.items():
        if key in cfg:
            kwargs[key] = cast(cfg[key])
    return InstanceRecipe(**kwargs)


def instance_rng(seed: int, index: int, stream: int = 0) -> np.random.Generator:
    """Independent generator for one (instance, purpose) pair."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index), int(stream)]))


def _rand_int(rng, lohi) -> int:
    lo, hi = int(lohi[0]), int(lohi[1])
    return int(rng.integers(lo, hi + 1))


def random_norm_spec(rng: np.random.Generator, kind: str, dim: int,
                     lp_exponents=(1, 1.5, 2, 3, "inf")) -> NormSpec:
    if kind == "inner_product":
        Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
        lam = rng.uniform(0.5, 2.2, size=dim)
        G = Q @ np.diag(lam) @ Q.T
        return InnerProductNorm(0.5 * (G + G.T))
    if kind == "weighted_lp":
        r = lp_exponents[int(rng.integers(0, len(lp_exponents)))]
        d = rng.uniform(0.5, 2.0, size=dim)
        return WeightedLpNorm(r, d)
    if kind == "polyhedral_max":
        while True:
            rows = dim + 1 + int(rng.integers(0, 3))
            A = rng.standard_normal((rows, dim))
            A = A / np.linalg.norm(A, axis=1)[:, None] * rng.uniform(0.7, 1.5, size=(rows, 1))
            if np.linalg.matrix_rank(A) == dim:
                return PolyhedralMaxNorm(A)
    if kind == "polytope_gauge":
        while True:
            rows = dim + 1 + int(rng.integers(0, 3))
            P = rng.standard_normal((rows, dim))
            P = P / np.linalg.norm(P, axis=1)[:, None] * rng.uniform(0.8, 1.4, size=(rows, 1))
            V = np.vstack([P, -P])
            if np.linalg.matrix_rank(V) == dim:
                return PolytopeGaugeNorm(V)
    raise ValueError(f"unknown norm kind: {kind!r}")


def random_bundle(recipe: InstanceRecipe, index: int) -> Bundle:
    rng = instance_rng(recipe.seed, index, stream=1)
    n_atoms = _rand_int(rng, recipe.atom_range)
    weights = np.exp(rng.uniform(np.log(recipe.weight_range[0]),
                                 np.log(recipe.weight_range[1]), size=n_atoms))
    space = MeasureSpace([f"a{i}" for i in range(n_atoms)], weights)

    constant = rng.random() < recipe.constant_fraction
    if constant:
        dim = _rand_int(rng, recipe.dim_range)
        kind = recipe.kinds[int(rng.integers(0, len(recipe.kinds)))]
        spec = random_norm_spec(rng, kind, dim, recipe.lp_exponents)
        fibers = [Fiber(dim, spec) for _ in range(n_atoms)]
        return Bundle(space, fibers)

    fibers = []
    for _ in range(n_atoms):
        if rng.random() < recipe.zero_fiber_fraction:
            fibers.append(Fiber(0, None))
            continue
        dim = _rand_int(rng, recipe.dim_range)
        kind = recipe.kinds[int(rng.integers(0, len(recipe.kinds)))]
        fibers.append(Fiber(dim, random_norm_spec(rng, kind, dim, recipe.lp_exponents)))
    return Bundle(space, fibers)


def bundles_from_recipe(recipe: InstanceRecipe) -> Iterator[tuple[int, Bundle]]:
    for index in range(recipe.instance_count):
        yield index, random_bundle(recipe, index)


def random_section(bundle: Bundle, rng: np.random.Generator, scale: float = 1.0) -> Section:
    return Section(bundle, [scale * rng.standard_normal(d) for d in bundle.dimensions])


def random_dual_section(bundle: Bundle, rng: np.random.Generator, scale: float = 1.0) -> DualSection:
    return DualSection(bundle, [scale * rng.standard_normal(d) for d in bundle.dimensions])


# -- measure triples for the power-inequality lemma ---------------------------


def random_measure_triple(seed: int, index: int, atom_range=(2, 10)) -> AtomicMeasureTriple:
    """Candidate triples mixing always-valid constructions and free draws.

    The caller still rejection-tests the set-level hypothesis; the families
    here just make acceptance common enough to be useful.
    """
    rng = instance_rng(seed, index, stream=7)
    k = _rand_int(rng, atom_range)
    space = MeasureSpace([f"a{i}" for i in range(k)], rng.uniform(0.2, 2.0, size=k))
    f2 = rng.uniform(0.0, 2.0, size=k)
    f3 = rng.uniform(0.0, 2.0, size=k)
    family = int(rng.integers(0, 4))
    if family == 0:
        alpha = 1.0
        f1 = rng.uniform(0.0, 1.0) * (f2 + f3)
    elif family == 1:
        alpha = float(rng.uniform(0.2, 1.0))
        f1 = rng.uniform(0.0, 1.0) * (f2 + f3)
    elif family == 2:
        alpha = float(rng.uniform(1.0, 3.0))
        f1 = rng.uniform(0.0, 1.0) * np.minimum(f2, f3)
    else:
        # free draw: per-atom scaling, rejected by the caller when the
        # set-level hypothesis fails (common for alpha above one)
        alpha = float(rng.uniform(0.3, 2.5))
        f1 = rng.uniform(0.0, 1.0, size=k) * (f2 + f3)
    return AtomicMeasureTriple(space, f1, f2, f3, alpha)
