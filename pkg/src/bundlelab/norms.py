"""Norm kinds on finite-dimensional real fibers.

Four concrete kinds share one interface:

* ``InnerProductNorm``: sqrt(v' G v) for a symmetric positive definite G.
* ``WeightedLpNorm``: weighted l^r norm, r in [1, inf].
* ``PolyhedralMaxNorm``: max_i |<a_i, v>| over a spanning functional list.
* ``PolytopeGaugeNorm``: Minkowski gauge of a symmetric spanning polytope.

Each kind knows its exact dual (``dual()``), can evaluate batches of
vectors (``norm_batch``), produces a unit-sphere maximizer of any linear
functional (``linear_maximizer``), and samples its unit sphere
deterministically (``sample_sphere``).  All evaluation is pure; instances
are immutable by convention after construction.
"""

from __future__ import annotations

import hashlib
import math
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull

from .measure import as_exponent, conjugate_exponent

__all__ = [
    "NormSpec",
    "InnerProductNorm",
    "WeightedLpNorm",
    "PolyhedralMaxNorm",
    "PolytopeGaugeNorm",
    "norm_spec_from_config",
]

#: agreement demanded between the two exact gauge evaluation routes
GAUGE_SOLVER_TOL = 1e-10

#: run randomized norm-axiom spot checks inside every constructor
DEBUG_VALIDATE = False


def _sign_nonzero(x: np.ndarray) -> np.ndarray:
    s = np.sign(x)
    s[s == 0.0] = 1.0
    return s


def _as_matrix(values, name) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a two-dimensional array")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


class NormSpec:
    """Common interface for the concrete norm kinds."""

    kind: str = "abstract"

    def __init__(self, dimension: int):
        if int(dimension) < 1:
            raise ValueError("norm dimension must be a positive integer")
        self.dimension = int(dimension)
        self._dual = None

    # -- evaluation ------------------------------------------------------

    def norm(self, v) -> float:
        raise NotImplementedError

    def norm_batch(self, V: np.ndarray) -> np.ndarray:
        """Norms of the rows of V, shape (m, dimension) -> (m,)."""
        raise NotImplementedError

    def dual_norm(self, w) -> float:
        """Norm of a covector in the dual space (closed form via dual())."""
        return self.dual().norm(w)

    def _check_vec(self, v) -> np.ndarray:
        arr = np.asarray(v, dtype=float)
        if arr.shape != (self.dimension,):
            raise ValueError(
                f"vector of dimension {self.dimension} expected, got shape {arr.shape}"
            )
        return arr

    def unit(self, v) -> np.ndarray:
        """Projection of a nonzero vector onto the unit sphere."""
        arr = self._check_vec(v)
        n = self.norm(arr)
        if n <= 0.0:
            raise ValueError("cannot normalize the zero vector")
        u = arr / n
        return u / self.norm(u)

    # -- structure -------------------------------------------------------

    def dual(self) -> "NormSpec":
        if self._dual is None:
            self._dual = self._make_dual()
        return self._dual

    def _make_dual(self) -> "NormSpec":
        raise NotImplementedError

    def linear_maximizer(self, c) -> tuple[float, np.ndarray]:
        """Maximize <c, v> over the unit ball.

        Returns ``(value, witness)`` where the witness lies on the unit
        sphere (within 1e-9) and the value equals the dual norm of ``c``.
        For ``c = 0`` the witness is an arbitrary unit vector.
        """
        raise NotImplementedError

    def sample_sphere(self, count: int, seed: int) -> np.ndarray:
        """Deterministic sample of ``count`` unit vectors, shape (count, dim).

        Direction sampling is an isotropic Gaussian; each row is normalized
        twice so its norm is 1 within 1e-12.
        """
        rng = np.random.default_rng(seed)
        X = rng.standard_normal((int(count), self.dimension))
        # Guard against astronomically unlikely near-zero rows.
        bad = np.linalg.norm(X, axis=1) < 1e-12
        X[bad] = 1.0
        U = X / self.norm_batch(X)[:, None]
        U = U / self.norm_batch(U)[:, None]
        return U

    # -- bookkeeping -------------------------------------------------------

    def config_dict(self) -> dict:
        raise NotImplementedError

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.kind.encode())
        h.update(str(self.dimension).encode())
        for part in self._digest_parts():
            h.update(np.ascontiguousarray(part, dtype=float).tobytes())
        return h.hexdigest()[:12]

    def _digest_parts(self):
        raise NotImplementedError

    def self_test(self, probes: int = 32, seed: int = 0, tol: float = 1e-9) -> None:
        """Randomized spot check of the norm axioms; raises on failure."""
        rng = np.random.default_rng(seed)
        V = rng.standard_normal((probes, self.dimension))
        W = rng.standard_normal((probes, self.dimension))
        t = rng.uniform(-3.0, 3.0, size=probes)
        nv = self.norm_batch(V)
        nw = self.norm_batch(W)
        if np.any(nv <= 0.0):
            raise AssertionError(f"{self.kind}: vanishing norm on a nonzero vector")
        hom = np.abs(self.norm_batch(V * t[:, None]) - np.abs(t) * nv)
        if np.max(hom) > tol * max(1.0, np.max(nv)):
            raise AssertionError(f"{self.kind}: homogeneity violated ({np.max(hom):.2e})")
        tri = self.norm_batch(V + W) - (nv + nw)
        if np.max(tri) > tol * max(1.0, np.max(nv + nw)):
            raise AssertionError(f"{self.kind}: triangle inequality violated ({np.max(tri):.2e})")
        # single-vector and batch routes must agree
        single = np.array([self.norm(v) for v in V])
        if np.max(np.abs(single - nv)) > 1e-9 * max(1.0, np.max(nv)):
            raise AssertionError(f"{self.kind}: batch and single evaluation disagree")

    def __repr__(self):
        return f"{type(self).__name__}(dimension={self.dimension})"


class InnerProductNorm(NormSpec):
    """Norm induced by a symmetric positive definite Gram matrix."""

    kind = "inner_product"

    def __init__(self, gram):
        G = _as_matrix(gram, "gram")
        if G.shape[0] != G.shape[1]:
            raise ValueError("gram matrix must be square")
        super().__init__(G.shape[0])
        if np.max(np.abs(G - G.T)) > 1e-12 * max(1.0, np.max(np.abs(G))):
            raise ValueError("gram matrix must be symmetric positive definite")
        G = 0.5 * (G + G.T)
        try:
            L = np.linalg.cholesky(G)
        except np.linalg.LinAlgError:
            raise ValueError("gram matrix must be symmetric positive definite") from None
        self.gram = G
        self._chol = L  # G = L L'
        if DEBUG_VALIDATE:
            self.self_test()

    def norm(self, v) -> float:
        v = self._check_vec(v)
        y = v @ self._chol
        return float(math.sqrt(max(y @ y, 0.0)))

    def norm_batch(self, V) -> np.ndarray:
        Y = np.asarray(V, dtype=float) @ self._chol
        return np.sqrt(np.maximum(np.einsum("...i,...i->...", Y, Y), 0.0))

    def _make_dual(self) -> "InnerProductNorm":
        inv = np.linalg.inv(self.gram)
        return InnerProductNorm(0.5 * (inv + inv.T))

    def linear_maximizer(self, c):
        c = self._check_vec(c)
        if not np.any(c):
            e = np.zeros(self.dimension)
            e[0] = 1.0
            return 0.0, self.unit(e)
        x = np.linalg.solve(self.gram, c)
        value = math.sqrt(max(float(c @ x), 0.0))
        witness = self.unit(x)
        return float(c @ witness), witness

    def config_dict(self):
        return {"kind": self.kind, "gram": self.gram.tolist()}

    def _digest_parts(self):
        return [self.gram]


class WeightedLpNorm(NormSpec):
    """Weighted l^r norm: (sum_i d_i |v_i|^r)^(1/r), max_i d_i |v_i| for r = inf."""

    kind = "weighted_lp"

    def __init__(self, r, weights):
        d = np.asarray(weights, dtype=float)
        if d.ndim != 1:
            raise ValueError("weights must be one-dimensional")
        super().__init__(len(d))
        if not np.all(np.isfinite(d)) or np.any(d <= 0.0):
            raise ValueError("weights must be finite and strictly positive")
        self.r = as_exponent(r)
        self.weights = d
        # cached dispatch flags: Fraction comparisons are too slow for the
        # batch-norm hot path
        self._r_is_inf = self.r == math.inf
        self._rf = math.inf if self._r_is_inf else float(self.r)
        if DEBUG_VALIDATE:
            self.self_test()

    def norm(self, v) -> float:
        v = self._check_vec(v)
        if self._r_is_inf:
            return float(np.max(self.weights * np.abs(v)))
        rf = self._rf
        return float(np.sum(self.weights * np.abs(v) ** rf, axis=-1) ** (1.0 / rf))

    def norm_batch(self, V) -> np.ndarray:
        V = np.asarray(V, dtype=float)
        if self._r_is_inf:
            return np.max(self.weights * np.abs(V), axis=-1)
        rf = self._rf
        return np.sum(self.weights * np.abs(V) ** rf, axis=-1) ** (1.0 / rf)

    def _make_dual(self) -> "WeightedLpNorm":
        if self.r == math.inf:
            return WeightedLpNorm(1, 1.0 / self.weights)
        if self.r == 1:
            return WeightedLpNorm(math.inf, 1.0 / self.weights)
        rq = conjugate_exponent(self.r)
        return WeightedLpNorm(rq, self.weights ** (1.0 - float(rq)))

    def linear_maximizer(self, c):
        c = self._check_vec(c)
        if not np.any(c):
            e = np.zeros(self.dimension)
            e[0] = 1.0
            return 0.0, self.unit(e)
        if self.r == 1:
            j = int(np.argmax(np.abs(c) / self.weights))
            u = np.zeros(self.dimension)
            u[j] = _sign_nonzero(c[j : j + 1])[0] / self.weights[j]
        elif self.r == math.inf:
            u = _sign_nonzero(c) / self.weights
        else:
            t = 1.0 / (self._rf - 1.0)
            u = _sign_nonzero(c) * (np.abs(c) / self.weights) ** t
        u = self.unit(u)
        return float(c @ u), u

    def config_dict(self):
        r = "inf" if self.r == math.inf else (
            str(self.r) if isinstance(self.r, Fraction) else float(self.r)
        )
        return {"kind": self.kind, "r": r, "weights": self.weights.tolist()}

    def _digest_parts(self):
        rf = -1.0 if self.r == math.inf else float(self.r)
        return [np.array([rf]), self.weights]


class PolyhedralMaxNorm(NormSpec):
    """Max of absolute values of finitely many spanning linear functionals."""

    kind = "polyhedral_max"

    def __init__(self, functionals):
        A = _as_matrix(functionals, "functionals")
        super().__init__(A.shape[1])
        if np.linalg.matrix_rank(A) < self.dimension:
            raise ValueError("functionals must span the dual space")
        self.functionals = A
        if DEBUG_VALIDATE:
            self.self_test()

    def norm(self, v) -> float:
        v = self._check_vec(v)
        return float(np.max(np.abs(self.functionals @ v)))

    def norm_batch(self, V) -> np.ndarray:
        V = np.asarray(V, dtype=float)
        return np.max(np.abs(V @ self.functionals.T), axis=-1)

    def _make_dual(self) -> "PolytopeGaugeNorm":
        return PolytopeGaugeNorm(np.vstack([self.functionals, -self.functionals]))

    def linear_maximizer(self, c):
        c = self._check_vec(c)
        if not np.any(c):
            e = np.zeros(self.dimension)
            e[0] = 1.0
            return 0.0, self.unit(e)
        A = self.functionals
        res = linprog(
            -c,
            A_ub=np.vstack([A, -A]),
            b_ub=np.ones(2 * A.shape[0]),
            bounds=[(None, None)] * self.dimension,
            method="highs",
        )
        if res.status != 0:
            raise RuntimeError(f"linear maximizer LP failed with status {res.status}")
        u = self.unit(res.x)
        return float(c @ u), u

    def config_dict(self):
        return {"kind": self.kind, "functionals": self.functionals.tolist()}

    def _digest_parts(self):
        return [self.functionals]


class PolytopeGaugeNorm(NormSpec):
    """Minkowski gauge of the convex hull of a symmetric spanning vertex list.

    The public ``norm`` solves the defining linear program (minimal t >= 0
    with v inside t times the hull); ``norm_batch`` evaluates the exact
    halfspace form precomputed from the hull.  The two routes are
    cross-checked at construction to ``GAUGE_SOLVER_TOL``.
    """

    kind = "polytope_gauge"

    def __init__(self, vertices):
        V = _as_matrix(vertices, "vertices")
        super().__init__(V.shape[1])
        if np.linalg.matrix_rank(V) < self.dimension:
            raise ValueError("vertices must span the space")
        scale = max(1.0, float(np.max(np.abs(V))))
        for row in V:
            if np.min(np.max(np.abs(V + row), axis=1)) > 1e-9 * scale:
                raise ValueError("vertex list must be symmetric (closed under negation)")
        self.vertices = V
        self._facets = self._facet_matrix(V)
        # Gauge of each listed vertex (1 for true extreme points).
        self._vertex_gauges = np.max(V @ self._facets.T, axis=1)
        self._cross_check()
        if DEBUG_VALIDATE:
            self.self_test()

    @staticmethod
    def _facet_matrix(V: np.ndarray) -> np.ndarray:
        n = V.shape[1]
        if n == 1:
            a = float(np.max(np.abs(V)))
            return np.array([[1.0 / a], [-1.0 / a]])
        hull = ConvexHull(V)
        normals = hull.equations[:, :n]
        offsets = hull.equations[:, n]
        if np.max(offsets) >= -1e-12:
            raise ValueError("vertex hull must contain the origin in its interior")
        return normals / (-offsets[:, None])

    def _cross_check(self, probes: int = 8, seed: int = 7) -> None:
        rng = np.random.default_rng(seed)
        P = rng.standard_normal((probes, self.dimension))
        lp_vals = np.array([self._norm_lp(p) for p in P])
        facet_vals = self.norm_batch(P)
        gap = np.max(np.abs(lp_vals - facet_vals))
        if gap > GAUGE_SOLVER_TOL * max(1.0, float(np.max(facet_vals))):
            raise AssertionError(
                f"gauge evaluation routes disagree by {gap:.2e} "
                f"(linear program vs facet form)"
            )

    def _norm_lp(self, v: np.ndarray) -> float:
        k = self.vertices.shape[0]
        res = linprog(
            np.ones(k),
            A_eq=self.vertices.T,
            b_eq=v,
            bounds=[(0, None)] * k,
            method="highs",
        )
        if res.status != 0:
            raise RuntimeError(f"gauge LP failed with status {res.status}")
        return float(res.fun)

    def norm(self, v) -> float:
        v = self._check_vec(v)
        return self._norm_lp(v)

    def norm_batch(self, V) -> np.ndarray:
        V = np.asarray(V, dtype=float)
        vals = V @ self._facets.T
        return np.max(vals, axis=-1)

    def _make_dual(self) -> "PolyhedralMaxNorm":
        return PolyhedralMaxNorm(self.vertices)

    def linear_maximizer(self, c):
        c = self._check_vec(c)
        if not np.any(c):
            e = np.zeros(self.dimension)
            e[0] = 1.0
            return 0.0, self.unit(e)
        scores = (self.vertices @ c) / self._vertex_gauges
        j = int(np.argmax(scores))
        u = self.vertices[j] / self._vertex_gauges[j]
        u = u / self.norm_batch(u[None, :])[0]
        return float(c @ u), u

    def config_dict(self):
        return {"kind": self.kind, "vertices": self.vertices.tolist()}

    def _digest_parts(self):
        return [self.vertices]


_KINDS = {
    "inner_product": lambda cfg: InnerProductNorm(cfg["gram"]),
    "weighted_lp": lambda cfg: WeightedLpNorm(cfg["r"], cfg["weights"]),
    "polyhedral_max": lambda cfg: PolyhedralMaxNorm(cfg["functionals"]),
    "polytope_gauge": lambda cfg: PolytopeGaugeNorm(cfg["vertices"]),
}


def norm_spec_from_config(cfg: dict) -> NormSpec:
    """Rebuild a norm kind from its ``config_dict`` representation."""
    try:
        kind = cfg["kind"]
    except (TypeError, KeyError):
        raise ValueError("norm config must be a mapping with a 'kind' entry") from None
    if kind not in _KINDS:
        raise ValueError(f"unknown norm kind: {kind!r}")
    try:
        return _KINDS[kind](cfg)
    except KeyError as exc:
        raise ValueError(f"norm config for kind {kind!r} is missing field {exc}") from None
