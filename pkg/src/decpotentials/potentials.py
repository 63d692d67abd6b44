"""Discrete potential operators and their verification.

A cone operator determines a potential operator P mapping k-cochains to
(k-1)-cochains: pair the input against the cone of each (k-1)-simplex
(combinatorial kind), or integrate the Whitney interpolant over the singular
cone (Whitney kind).  Both kinds satisfy the discrete homotopy identity

    d P alpha + P d alpha = alpha            (0 < k < n)
    P d alpha = alpha - (pi alpha)           (k = 0)
    d P alpha = alpha                        (k = n)

where pi is the operator's own constant component: the value at the
contraction vertex for combinatorial operators, the interpolated value at
the base point for Whitney ones.

The trace-preserving variant (``BogovskiiOperator``) subtracts the integral
over the infinite cone from the star cone integral; on inputs with vanishing
boundary trace (vanishing mean for top degree) it satisfies the same
identity with no constant component, and its outputs again have vanishing
trace.  Its base point must not meet any codimension-1 simplex.

``verify_homotopy`` estimates the identity's residual on seeded random
cochains and reports per-degree maxima; everything is deterministic given
the seed.
"""

from __future__ import annotations

import numpy as np

from .cones import (
    InfiniteConeOperator,
    SimplicialConeOperator,
    SingularConeOperator,
    infinite_cone,
    star_cone,
)
from .simplicial import Cochain, SimplicialComplex, coboundary
from .singular import chain_functional, cone_chain_functional, point_segment_distance
from .whitney import MeshGeometry, whitney_value


class PreconditionError(ValueError):
    """An operator's standing assumption is violated by the input."""


class BasePointOnFacetError(PreconditionError):
    """The base point lies on a codimension-1 simplex, which the
    trace-preserving construction does not allow."""


def check_base_point(geometry: MeshGeometry, point, tol_rel: float = 1e-12) -> None:
    """Reject base points on (or numerically on) any mesh edge."""
    cx = geometry.complex
    coords = cx.coordinates
    p = np.asarray(point, dtype=float)
    tol = tol_rel * geometry.diagonal
    for u, v in cx.simplices(1):
        if point_segment_distance(p, coords[u], coords[v]) <= tol:
            raise BasePointOnFacetError(
                f"base point ({p[0]:g}, {p[1]:g}) lies on edge {(u, v)} within {tol:.1e}"
            )


class DiscretePoincareOperator:
    """Potential operator wrapping a simplicial or singular cone operator."""

    def __init__(self, cone, geometry: MeshGeometry | None = None, label: str | None = None):
        if isinstance(cone, SimplicialConeOperator):
            self.kind = "combinatorial"
            self.geometry = geometry
        elif isinstance(cone, SingularConeOperator):
            self.kind = "whitney"
            self.geometry = geometry or MeshGeometry(cone.complex)
        else:
            raise TypeError(f"unsupported cone operator {type(cone).__name__}")
        self.cone = cone
        self.complex: SimplicialComplex = cone.complex
        self.label = label or self.kind
        self._matrices: dict[int, np.ndarray] = {}

    def matrix(self, k: int) -> np.ndarray:
        """Dense matrix of P on k-cochains, shape (num (k-1)-simplices, num k)."""
        if not 1 <= k <= self.complex.dim:
            raise ValueError(f"P acts on degrees 1..{self.complex.dim}, got {k}")
        if k not in self._matrices:
            cx = self.complex
            rows = cx.simplices(k - 1)
            mat = np.zeros((len(rows), cx.num_simplices(k)))
            if self.kind == "combinatorial":
                idx = cx._index[k]
                for i, s in enumerate(rows):
                    for t, c in self.cone.table[s].terms.items():
                        mat[i, idx[t]] = c
            else:
                for i, s in enumerate(rows):
                    row = chain_functional(self.geometry, self.cone.table[s])
                    for j, w in row.items():
                        mat[i, j] = w
            self._matrices[k] = mat
        return self._matrices[k]

    def apply(self, alpha: Cochain) -> Cochain:
        if alpha.complex is not self.complex:
            raise ValueError("cochain lives on a different complex")
        return Cochain(self.complex, alpha.dim - 1, self.matrix(alpha.dim) @ alpha.values)

    def constant_component(self, alpha: Cochain) -> float:
        """The degree-0 identity's constant term evaluated on a 0-cochain."""
        if alpha.dim != 0:
            raise ValueError("constant component is defined for 0-cochains")
        if self.kind == "combinatorial":
            return float(alpha.values[self.complex.index((self.cone.vertex,))])
        return float(whitney_value(self.geometry, alpha, self.cone.point))


class ComplexPropertyOperator:
    """P - d P P: same homotopy identity, and the composition squares to zero."""

    def __init__(self, base: DiscretePoincareOperator):
        self.base = base
        self.complex = base.complex
        self.kind = base.kind
        self.label = base.label + "+complex-property"

    def apply(self, alpha: Cochain) -> Cochain:
        p = self.base.apply(alpha)
        if alpha.dim >= 2:
            p = p - coboundary(self.base.apply(p))
        return p

    def constant_component(self, alpha: Cochain) -> float:
        return self.base.constant_component(alpha)


class BogovskiiOperator:
    """Trace-preserving potential operator from a base point.

    The value on a (k-1)-simplex is the integral of the Whitney interpolant
    over the finite join minus the integral over the infinite cone; for
    simplices on the boundary the two coincide and the trace vanishes.
    """

    def __init__(self, point, complex: SimplicialComplex,
                 geometry: MeshGeometry | None = None,
                 truncation_factor: float = 10.0, label: str = "bogovskii"):
        self.geometry = geometry or MeshGeometry(complex)
        check_base_point(self.geometry, point)
        self.complex = complex
        self.point = np.asarray(point, dtype=float)
        self.kind = "bogovskii"
        self.label = label
        self.truncation_factor = truncation_factor
        self.star: SingularConeOperator = star_cone(self.point, complex)
        self.infinite: InfiniteConeOperator = infinite_cone(self.point, complex)
        self._matrices: dict[int, np.ndarray] = {}

    def matrix(self, k: int) -> np.ndarray:
        if not 1 <= k <= self.complex.dim:
            raise ValueError(f"operator acts on degrees 1..{self.complex.dim}, got {k}")
        if k not in self._matrices:
            cx = self.complex
            rows = cx.simplices(k - 1)
            mat = np.zeros((len(rows), cx.num_simplices(k)))
            for i, s in enumerate(rows):
                fin = chain_functional(self.geometry, self.star.table[s],
                                      allow_exterior=True)
                inf = cone_chain_functional(self.geometry, self.infinite.table[s],
                                            self.truncation_factor)
                for j, w in fin.items():
                    mat[i, j] += w
                for j, w in inf.items():
                    mat[i, j] -= w
            self._matrices[k] = mat
        return self._matrices[k]

    def signed_mass(self, alpha: Cochain) -> float:
        """Total integral of the Whitney interpolant of a top cochain."""
        if alpha.dim != self.complex.dim:
            raise ValueError("mass is defined for top-degree cochains")
        return float(alpha.values @ self.geometry.orientation)

    def apply(self, alpha: Cochain, *, check_mean: bool = True) -> Cochain:
        if alpha.complex is not self.complex:
            raise ValueError("cochain lives on a different complex")
        k = alpha.dim
        if k == self.complex.dim and check_mean:
            mass = self.signed_mass(alpha)
            scale = float(np.max(np.abs(alpha.values))) if alpha.values.size else 0.0
            if abs(mass) > 1e-9 * max(scale, 1.0):
                raise PreconditionError(
                    f"top-degree input must have zero mean, got total integral {mass:.3e}"
                )
        return Cochain(self.complex, k - 1, self.matrix(k) @ alpha.values)

    def project_admissible(self, alpha: Cochain) -> Cochain:
        """Nearest admissible input: zero boundary trace, or zero mean on top."""
        cx = self.complex
        k = alpha.dim
        values = np.array(alpha.values, dtype=float)
        if k == cx.dim:
            areas = self.geometry.signed_area
            c = self.signed_mass(alpha) / self.geometry.total_area
            values = values - c * areas
        else:
            for s in cx.boundary_simplices(k):
                values[cx.index(s)] = 0.0
        return Cochain(cx, k, values)


def _coboundary_or_zero(alpha: Cochain):
    if alpha.dim >= alpha.complex.dim:
        return None
    return coboundary(alpha)


def homotopy_residual(op, alpha: Cochain) -> np.ndarray:
    """Componentwise residual of the homotopy identity on one cochain."""
    cx = op.complex
    n = cx.dim
    k = alpha.dim
    trace_free = isinstance(op, BogovskiiOperator)
    if k == 0:
        d_alpha = coboundary(alpha)
        r = op.apply(d_alpha).values - alpha.values
        if not trace_free:
            r = r + op.constant_component(alpha)
        return r
    if k == n:
        return coboundary(op.apply(alpha)).values - alpha.values
    r = coboundary(op.apply(alpha)).values + op.apply(coboundary(alpha)).values
    return r - alpha.values


def verify_homotopy(op, ks=None, trials: int = 100, seed: int = 0) -> dict:
    """Max/mean homotopy residuals over seeded random cochains.

    Random inputs are uniform on (-1, 1) per simplex, with one generator per
    (seed, degree, trial) triple so the report is reproducible and trials
    could be evaluated in any order.  Inputs to trace-preserving operators
    are first projected to the admissible subspace.
    """
    cx = op.complex
    n = cx.dim
    if ks is None:
        ks = range(n + 1)
    per_k = {}
    for k in ks:
        worst = 0.0
        total = 0.0
        for trial in range(trials):
            rng = np.random.default_rng((seed, k, trial))
            alpha = Cochain(cx, k, rng.uniform(-1.0, 1.0, cx.num_simplices(k)))
            if isinstance(op, BogovskiiOperator):
                alpha = op.project_admissible(alpha)
            r = homotopy_residual(op, alpha)
            m = float(np.max(np.abs(r))) if r.size else 0.0
            worst = max(worst, m)
            total += m
        per_k[str(k)] = {"max": worst, "mean": total / trials}
    return {
        "operator": getattr(op, "label", type(op).__name__),
        "trials": trials,
        "seed": seed,
        "per_k": per_k,
    }


def max_residual(report: dict) -> float:
    return max(entry["max"] for entry in report["per_k"].values())
