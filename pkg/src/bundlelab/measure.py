"""Finite atomic measure spaces and scalar fields on them.

Everything downstream works over a finite list of atoms with strictly
positive weights.  Because every atom carries positive mass, "almost
everywhere" statements degenerate to "at every atom", which is exactly
what makes the desk-scale checks in the rest of the package exact.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "MeasureSpace",
    "ScalarField",
    "ProbabilityReweighting",
    "lp_norm",
    "ess_extrema",
    "lattice_sup",
    "l0_distance",
    "conjugate_exponent",
    "as_exponent",
]


def _as_weight_array(values, name) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a one-dimensional sequence")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


class MeasureSpace:
    """A finite atomic measure space: ordered atom ids plus positive weights.

    Parameters
    ----------
    atoms : sequence of hashable ids
        Atom labels; order is meaningful and ids must be unique.
    weights : sequence of float
        Strictly positive mass per atom.  Zero or negative weights are
        rejected at construction so that no downstream operation ever has
        to reason about null atoms.
    """

    def __init__(self, atoms: Sequence, weights: Sequence[float]):
        self.atoms = tuple(atoms)
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("atom ids must be unique")
        self.weights = _as_weight_array(weights, "weights")
        if len(self.weights) != len(self.atoms):
            raise ValueError("weights must match atoms in length")
        if np.any(self.weights <= 0.0):
            raise ValueError("weights must be strictly positive")
        self._index = {atom: i for i, atom in enumerate(self.atoms)}

    # -- basic queries ---------------------------------------------------

    @property
    def atom_count(self) -> int:
        return len(self.atoms)

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def index(self, atom) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise KeyError(f"unknown atom id: {atom!r}") from None

    def mask(self, subset: Iterable) -> np.ndarray:
        """Boolean membership mask for a subset given by atom ids."""
        out = np.zeros(self.atom_count, dtype=bool)
        for atom in subset:
            out[self.index(atom)] = True
        return out

    def field(self, values) -> "ScalarField":
        return ScalarField(self, values)

    def indicator(self, subset: Iterable) -> "ScalarField":
        return ScalarField(self, self.mask(subset).astype(float))

    def __eq__(self, other):
        return (
            isinstance(other, MeasureSpace)
            and self.atoms == other.atoms
            and np.array_equal(self.weights, other.weights)
        )

    def __hash__(self):
        return hash((self.atoms, self.weights.tobytes()))

    def __repr__(self):
        return f"MeasureSpace(atoms={list(self.atoms)!r}, weights={self.weights.tolist()!r})"


class ScalarField:
    """A real-valued function on the atoms of a :class:`MeasureSpace`."""

    def __init__(self, space: MeasureSpace, values):
        self.space = space
        self.values = np.asarray(values, dtype=float)
        if self.values.shape != (space.atom_count,):
            raise ValueError(
                f"field needs one value per atom: expected shape "
                f"({space.atom_count},), got {self.values.shape}"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("field values must be finite")

    def __repr__(self):
        return f"ScalarField({self.values.tolist()!r})"

    # Small arithmetic surface; heavy lifting happens on .values directly.

    def __add__(self, other):
        return ScalarField(self.space, self.values + _field_values(other, self.space))

    def __sub__(self, other):
        return ScalarField(self.space, self.values - _field_values(other, self.space))

    def __mul__(self, other):
        return ScalarField(self.space, self.values * _field_values(other, self.space))

    __rmul__ = __mul__

    def abs(self) -> "ScalarField":
        return ScalarField(self.space, np.abs(self.values))


def _field_values(other, space) -> np.ndarray:
    if isinstance(other, ScalarField):
        if other.space is not space and other.space != space:
            raise ValueError("fields live on different measure spaces")
        return other.values
    if isinstance(other, numbers.Real):
        return np.full(space.atom_count, float(other))
    return np.asarray(other, dtype=float)


class ProbabilityReweighting:
    """Auxiliary strictly positive probability weights on the same atoms.

    Used by :func:`l0_distance`; the weights must sum to one.
    """

    def __init__(self, space: MeasureSpace, probabilities):
        self.space = space
        self.probabilities = _as_weight_array(probabilities, "probabilities")
        if len(self.probabilities) != space.atom_count:
            raise ValueError("probabilities must match atoms in length")
        if np.any(self.probabilities <= 0.0):
            raise ValueError("probabilities must be strictly positive")
        if abs(self.probabilities.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must sum to one")


# -- exponents -----------------------------------------------------------


def as_exponent(p):
    """Validate an integrability exponent, returning float or Fraction.

    Accepts ints, floats, :class:`fractions.Fraction`, ``math.inf`` and the
    string ``"inf"``.  Rational inputs are kept exact so conjugates can be
    formed in exact arithmetic.
    """
    if isinstance(p, str):
        if p.strip().lower() in {"inf", "infinity"}:
            return math.inf
        p = Fraction(p)
    if isinstance(p, Fraction):
        if p < 1:
            raise ValueError(f"exponent must satisfy p >= 1, got {p}")
        return p
    if isinstance(p, numbers.Integral):
        if p < 1:
            raise ValueError(f"exponent must satisfy p >= 1, got {p}")
        return Fraction(int(p))
    p = float(p)
    if math.isinf(p) and p > 0:
        return math.inf
    if not (p >= 1.0):
        raise ValueError(f"exponent must satisfy p >= 1, got {p}")
    return p


def conjugate_exponent(p):
    """Conjugate exponent q with 1/p + 1/q = 1.

    Rational p (given as int, Fraction or numeric string) is handled in
    exact arithmetic; float p uses floating point, for which the defining
    identity holds to 1e-15 and is asserted.
    """
    p = as_exponent(p)
    if p == math.inf:
        return Fraction(1)
    if isinstance(p, Fraction):
        if p == 1:
            return math.inf
        return p / (p - 1)
    if p == 1.0:
        return math.inf
    q = p / (p - 1.0)
    assert abs(1.0 / p + 1.0 / q - 1.0) <= 1e-15
    return q


# -- integral-type operations ---------------------------------------------


def lp_norm(field: ScalarField, p) -> float:
    """Weighted L^p norm of a scalar field, p in [1, inf].

    For finite p this is ``(sum_x w_x |f(x)|^p)**(1/p)``; for p = inf it is
    the maximum of ``|f|`` over atoms, which on a finite atomic space is the
    essential supremum.
    """
    p = as_exponent(p)
    values = np.abs(field.values)
    if field.space.atom_count == 0:
        return 0.0
    if p == math.inf:
        return float(values.max())
    pf = float(p)
    return float(np.sum(field.space.weights * values**pf) ** (1.0 / pf))


def ess_extrema(field: ScalarField) -> tuple[float, float]:
    """Essential infimum and supremum of a field (min and max over atoms)."""
    if field.space.atom_count == 0:
        raise ValueError("essential extrema are undefined on an empty atom list")
    return float(field.values.min()), float(field.values.max())


def lattice_sup(fields: Sequence[ScalarField]) -> ScalarField:
    """Pointwise supremum of a finite non-empty collection of fields."""
    fields = list(fields)
    if not fields:
        raise ValueError("lattice supremum needs at least one field")
    space = fields[0].space
    stacked = np.stack([_field_values(f, space) for f in fields])
    return ScalarField(space, stacked.max(axis=0))


def l0_distance(f: ScalarField, g: ScalarField, reweighting: ProbabilityReweighting) -> float:
    """Distance of convergence in measure under an auxiliary probability.

    ``sum_x p_x * min(|f(x) - g(x)|, 1)`` where ``p`` is the reweighting.
    The value is a metric on scalar fields and is always within [0, 1].
    """
    if reweighting.space != f.space or f.space != g.space:
        raise ValueError("fields and reweighting must share one measure space")
    gap = np.minimum(np.abs(f.values - g.values), 1.0)
    return float(np.sum(reweighting.probabilities * gap))
