"""JSON configuration schema and text ingestion.

Schema (all plain JSON, decimal notation, no localization):

* measure space: ``{"atoms": [...ids], "weights": [...positive]}``
* norm kind:     ``{"kind": "inner_product", "gram": [[...]]}``
                 ``{"kind": "weighted_lp", "r": 2 | "3/2" | "inf", "weights": [...]}``
                 ``{"kind": "polyhedral_max", "functionals": [[...], ...]}``
                 ``{"kind": "polytope_gauge", "vertices": [[...], ...]}``
* bundle:        ``{"space": {...}, "fibers": [{"dimension": d, "norm": {...}}, ...]}``
                 (zero-dimensional fibers omit the norm)
* section:       ``{"vectors": [[...], ...]}`` (one row per atom, in order)
* search budget: ``{"restarts": 64, "iterations": 200, "seed": 0, ...}``

Sections may also be ingested from a columnar text file: one line per
atom, ``atom_id c1 c2 ...`` whitespace-separated, ``#`` comments allowed.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .bundles import Bundle, Fiber, Section
from .convexity import SearchBudget
from .criterion import AtomicMeasureTriple
from .duality import DualSection
from .measure import MeasureSpace
from .norms import NormSpec, norm_spec_from_config

__all__ = [
    "ConfigError",
    "canonical_json",
    "digest",
    "space_to_config",
    "space_from_config",
    "bundle_to_config",
    "bundle_from_config",
    "section_to_config",
    "section_from_config",
    "budget_from_config",
    "budget_to_config",
    "triple_from_config",
    "read_columnar_section",
]


class ConfigError(ValueError):
    """A configuration file or mapping does not satisfy the schema."""


def canonical_json(obj) -> str:
    """Deterministic JSON encoding (sorted keys, shortest float repr)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(obj) -> str:
    """Short stable digest of a config-shaped object."""
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:12]


def _require(cfg: dict, key: str, context: str):
    if not isinstance(cfg, dict):
        raise ConfigError(f"{context} must be a mapping")
    if key not in cfg:
        raise ConfigError(f"{context}: {key} required")
    return cfg[key]


# -- measure spaces -----------------------------------------------------------


def space_to_config(space: MeasureSpace) -> dict:
    return {"atoms": list(space.atoms), "weights": space.weights.tolist()}


def space_from_config(cfg: dict) -> MeasureSpace:
    atoms = _require(cfg, "atoms", "measure space config")
    weights = _require(cfg, "weights", "measure space config")
    try:
        return MeasureSpace(atoms, weights)
    except ValueError as exc:
        raise ConfigError(f"measure space config invalid: {exc}") from None


# -- bundles ------------------------------------------------------------------


def bundle_to_config(bundle: Bundle) -> dict:
    fibers = []
    for f in bundle.fibers:
        entry = {"dimension": int(f.dimension)}
        if f.dimension > 0:
            entry["norm"] = f.norm.config_dict()
        fibers.append(entry)
    return {"space": space_to_config(bundle.space), "fibers": fibers}


def bundle_from_config(cfg: dict) -> Bundle:
    space = space_from_config(_require(cfg, "space", "bundle config"))
    fiber_cfgs = _require(cfg, "fibers", "bundle config")
    fibers = []
    for i, fc in enumerate(fiber_cfgs):
        if not isinstance(fc, dict) or "dimension" not in fc:
            raise ConfigError(f"fiber dimension required (fiber at atom index {i})")
        dim = int(fc["dimension"])
        if dim == 0:
            fibers.append(Fiber(0, None))
            continue
        if "norm" not in fc:
            raise ConfigError(f"fiber norm required (fiber at atom index {i})")
        try:
            spec = norm_spec_from_config(fc["norm"])
            fibers.append(Fiber(dim, spec))
        except ValueError as exc:
            raise ConfigError(f"fiber at atom index {i} invalid: {exc}") from None
    try:
        return Bundle(space, fibers)
    except ValueError as exc:
        raise ConfigError(f"bundle config invalid: {exc}") from None


def bundle_digest(bundle: Bundle) -> str:
    return digest(bundle_to_config(bundle))


# -- sections -----------------------------------------------------------------


def section_to_config(section) -> dict:
    vectors = section.covectors if isinstance(section, DualSection) else section.vectors
    return {"vectors": [v.tolist() for v in vectors]}


def section_from_config(bundle: Bundle, cfg: dict, dual: bool = False):
    vectors = _require(cfg, "vectors", "section config")
    try:
        if dual:
            return DualSection(bundle, vectors)
        return Section(bundle, vectors)
    except ValueError as exc:
        raise ConfigError(f"section config invalid: {exc}") from None


def read_columnar_section(path, bundle: Bundle, dual: bool = False):
    """Read a section from columnar text: ``atom_id c1 c2 ...`` per line."""
    rows = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            parts = body.split()
            atom_id = parts[0]
            if atom_id not in {str(a) for a in bundle.space.atoms}:
                raise ConfigError(f"line {lineno}: unknown atom id {atom_id!r}")
            if atom_id in rows:
                raise ConfigError(f"line {lineno}: duplicate atom id {atom_id!r}")
            try:
                rows[atom_id] = [float(tok) for tok in parts[1:]]
            except ValueError:
                raise ConfigError(f"line {lineno}: non-numeric coordinate") from None
    vectors = []
    for atom, dim in zip(bundle.space.atoms, bundle.dimensions):
        key = str(atom)
        if key not in rows:
            raise ConfigError(f"missing row for atom id {key!r}")
        if len(rows[key]) != dim:
            raise ConfigError(
                f"atom id {key!r}: expected {dim} coordinates, got {len(rows[key])}"
            )
        vectors.append(rows[key])
    return section_from_config(bundle, {"vectors": vectors}, dual=dual)


# -- budgets and triples -------------------------------------------------------


def budget_to_config(budget: SearchBudget) -> dict:
    return {
        "restarts": budget.restarts,
        "iterations": budget.iterations,
        "seed": budget.seed,
        "init_step": budget.init_step,
        "min_step": budget.min_step,
        "penalty": budget.penalty,
    }


def budget_from_config(cfg: dict | None) -> SearchBudget:
    if cfg is None:
        return SearchBudget()
    if not isinstance(cfg, dict):
        raise ConfigError("budget config must be a mapping")
    allowed = {"restarts", "iterations", "seed", "init_step", "min_step", "penalty"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ConfigError(f"budget config has unknown fields: {sorted(unknown)}")
    try:
        return SearchBudget(**cfg)
    except TypeError as exc:
        raise ConfigError(f"budget config invalid: {exc}") from None


def triple_from_config(cfg: dict) -> AtomicMeasureTriple:
    space = space_from_config(_require(cfg, "space", "measure triple config"))
    try:
        return AtomicMeasureTriple(
            space,
            np.asarray(_require(cfg, "density1", "measure triple config"), dtype=float),
            np.asarray(_require(cfg, "density2", "measure triple config"), dtype=float),
            np.asarray(_require(cfg, "density3", "measure triple config"), dtype=float),
            float(_require(cfg, "alpha", "measure triple config")),
        )
    except ValueError as exc:
        raise ConfigError(f"measure triple config invalid: {exc}") from None
