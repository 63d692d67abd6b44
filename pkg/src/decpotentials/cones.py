"""Cone operators: the algebraic engines behind discrete potentials.

A cone operator sends each k-simplex of a complex to a (k+1)-dimensional
object "filling" it toward a distinguished point or vertex:

* ``collapse_cone``   -- simplicial chains, from a collapse sequence;
* ``contraction_cone``-- simplicial chains, pushing extruded prisms through a
                         discrete contraction of the product complex;
* ``star_cone``       -- linear singular simplices joining a star point;
* ``lipschitz_cone``  -- linear singular chains, pushing extruded prisms
                         through a piecewise (per-slab) contraction map;
* ``infinite_cone``   -- infinite cones from a base point, used by operators
                         that must preserve boundary traces.

Every simplicial cone operator Co satisfies the chain homotopy identity
``boundary(Co(c)) + Co(boundary(c)) = c`` in dimensions >= 1 and
``boundary(Co(v)) = v - a`` for vertices, exactly.  The singular analogues
satisfy the same identities up to degenerate simplices (which integrate to
zero and are deliberately kept in the stored chains so that formal boundary
cancellation still works).
"""

from __future__ import annotations

import json
from bisect import bisect_right
from typing import Callable, Sequence

import numpy as np

from .homotopy import (
    CollapseSequence,
    ProductComplex,
    build_product_complex,
    extrusion,
    validate_collapse_sequence,
)
from .simplicial import (
    Chain,
    Simplex,
    SimplicialComplex,
    SimplicialMap,
    canonical_simplex,
    induced_chain_map,
)
from .singular import ConeChain, InfiniteCone, LinearSimplex, SingularChain


class _ConeOperatorBase:
    """Shared table plumbing: canonical lookup and linear extension."""

    def __init__(self, complex: SimplicialComplex, table: dict):
        self.complex = complex
        self.table = table

    def chain(self, vertices):
        """Cone of a single (arbitrarily ordered) simplex."""
        t, sign = canonical_simplex(vertices)
        result = self.table[t]
        return result if sign == 1 else sign * result

    def apply(self, chain: Chain):
        out = None
        for s, c in chain.terms.items():
            piece = c * self.table[s]
            out = piece if out is None else out + piece
        if out is None:
            return self._zero(chain.dim + 1)
        return out


class SimplicialConeOperator(_ConeOperatorBase):
    """Cone operator with simplicial chain values and a contraction vertex."""

    def __init__(self, complex: SimplicialComplex, vertex: int, table: dict):
        super().__init__(complex, table)
        self.vertex = vertex

    def _zero(self, dim):
        return Chain(self.complex, dim, {})


class SingularConeOperator(_ConeOperatorBase):
    """Cone operator with linear singular chain values and a base point."""

    def __init__(self, complex: SimplicialComplex, point, table: dict):
        super().__init__(complex, table)
        self.point = np.asarray(point, dtype=float)

    def _zero(self, dim):
        return SingularChain(dim, [])


class InfiniteConeOperator(_ConeOperatorBase):
    """Cone operator with infinite-cone values from a base point."""

    def __init__(self, complex: SimplicialComplex, point, table: dict):
        super().__init__(complex, table)
        self.point = np.asarray(point, dtype=float)

    def _zero(self, dim):
        return ConeChain(dim, [])


# -- collapse-based cones ------------------------------------------------


def collapse_cone(seq: CollapseSequence) -> SimplicialConeOperator:
    """Cone operator from a collapse sequence, built in expansion order.

    Growing the complex back step by step, the new coface starts with cone
    zero and the freed face records the coface corrected by the cone of the
    remaining boundary; the terminal vertex also has cone zero.
    """
    if not validate_collapse_sequence(seq):
        raise ValueError("invalid collapse sequence")
    cx = seq.complex
    table: dict[Simplex, Chain] = {(seq.terminal,): Chain(cx, 1, {})}

    def apply_partial(chain: Chain) -> Chain:
        out = Chain(cx, chain.dim + 1, {})
        for s, c in chain.terms.items():
            out = out + c * table[s]
        return out

    from .simplicial import boundary as _boundary

    for sigma, tau in reversed(seq.steps):
        table[sigma] = Chain(cx, len(sigma), {})
        sigma_chain = Chain(cx, len(sigma) - 1, {sigma: 1})
        bnd = _boundary(sigma_chain)
        eps = bnd.terms[tau]  # canonical sign of the freed face inside the coface
        rest = bnd - Chain(cx, len(tau) - 1, {tau: eps})
        table[tau] = eps * (sigma_chain - apply_partial(rest))
    return SimplicialConeOperator(cx, seq.terminal, table)


def contraction_cone(psi: SimplicialMap, product: ProductComplex) -> SimplicialConeOperator:
    """Cone operator from a discrete contraction of the product complex.

    ``psi`` must map the top level by the identity and the bottom level to a
    single vertex; each base simplex is extruded to its prism chain and
    pushed forward through ``psi``.
    """
    base = product.base
    if psi.source is not product.complex or psi.target is not base:
        raise ValueError("contraction must map the product complex onto its base")
    top = product.n_slabs
    bottom_images = {psi(product.vertex_id(v, 0)) for (v,) in base.simplices(0)}
    if len(bottom_images) != 1:
        raise ValueError("contraction is not constant at level 0")
    for (v,) in base.simplices(0):
        if psi(product.vertex_id(v, top)) != v:
            raise ValueError("contraction is not the identity at the top level")
    (vertex,) = bottom_images

    table: dict[Simplex, Chain] = {}
    for k, simplices in base.simplices_by_dim.items():
        for s in simplices:
            table[s] = induced_chain_map(psi, extrusion(s, product))
    return SimplicialConeOperator(base, vertex, table)


# -- geometric cones -----------------------------------------------------


def star_cone(point, complex: SimplicialComplex) -> SingularConeOperator:
    """Join every simplex to a star point by a linear singular simplex.

    Simplices whose join with the point is degenerate keep their (degenerate)
    simplex in the table; it integrates to zero.
    """
    coords = complex.coordinates
    if coords is None:
        raise ValueError("complex has no vertex coordinates")
    a = np.asarray(point, dtype=float)
    table: dict[Simplex, SingularChain] = {}
    for k, simplices in complex.simplices_by_dim.items():
        for s in simplices:
            cone = LinearSimplex.from_points([a, *(coords[v] for v in s)])
            table[s] = SingularChain(k + 1, [(1, cone)])
    return SingularConeOperator(complex, a, table)


def infinite_cone(point, complex: SimplicialComplex) -> InfiniteConeOperator:
    """Infinite cone from a base point over every simplex."""
    coords = complex.coordinates
    if coords is None:
        raise ValueError("complex has no vertex coordinates")
    a = np.asarray(point, dtype=float)
    table: dict[Simplex, ConeChain] = {}
    for k, simplices in complex.simplices_by_dim.items():
        for s in simplices:
            cone = InfiniteCone.from_points([a, *(coords[v] for v in s)])
            table[s] = ConeChain(k + 1, [(1, cone)])
    return InfiniteConeOperator(complex, a, table)


class SlabAffineContraction:
    """Contraction of the plane onto a point, described slab by slab in time.

    Between consecutive breakpoints the map may be given by an affine matrix
    acting on homogeneous ``(x, y, t, 1)`` input, or by an arbitrary callable
    (used for the built-in contractions, whose slabs are bilinear in space
    and time).  Only evaluations at mesh vertices and breakpoints enter the
    cone construction, which interpolates affinely in between.
    """

    def __init__(self, breakpoints: Sequence[float], evaluate: Callable,
                 point, matrices=None):
        times = tuple(float(t) for t in breakpoints)
        if len(times) < 2 or times[0] != 0.0 or times[-1] != 1.0:
            raise ValueError("breakpoints must run from 0.0 to 1.0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        self.breakpoints = times
        self._evaluate = evaluate
        self.point = np.asarray(point, dtype=float)
        self.matrices = matrices

    def __call__(self, xy, t: float) -> np.ndarray:
        return np.asarray(self._evaluate(np.asarray(xy, dtype=float), float(t)),
                          dtype=float)

    def slab_index(self, t: float) -> int:
        i = bisect_right(self.breakpoints, t) - 1
        return min(max(i, 0), len(self.breakpoints) - 2)

    @classmethod
    def straight_line(cls, point) -> "SlabAffineContraction":
        a = np.asarray(point, dtype=float)

        def ev(xy, t):
            return (1.0 - t) * a + t * xy

        return cls((0.0, 1.0), ev, a)

    @classmethod
    def ushape(cls, point) -> "SlabAffineContraction":
        """Axis-aligned two-stage contraction: horizontal first, then vertical.

        For t in [0, 1/2] the image slides along the horizontal line through
        the target point; for t in (1/2, 1] it rises vertically to the
        identity.  Suited to meshes whose domain is an axis-aligned union of
        rectangles containing that horizontal line.
        """
        a = np.asarray(point, dtype=float)

        def ev(xy, t):
            if t <= 0.5:
                return np.array([(1.0 - 2.0 * t) * a[0] + 2.0 * t * xy[0], a[1]])
            return np.array([xy[0], 2.0 * (1.0 - t) * a[1] + (2.0 * t - 1.0) * xy[1]])

        return cls((0.0, 0.5, 1.0), ev, a)

    @classmethod
    def from_matrices(cls, breakpoints, matrices, point) -> "SlabAffineContraction":
        times = tuple(float(t) for t in breakpoints)
        mats = [np.array(m, dtype=float) for m in matrices]
        if len(mats) != len(times) - 1:
            raise ValueError("need one matrix per slab")
        for m in mats:
            if m.shape != (2, 4):
                raise ValueError("slab matrices must be 2x4 (homogeneous x, y, t, 1)")

        def ev(xy, t, _times=times, _mats=mats):
            i = min(max(bisect_right(_times, t) - 1, 0), len(_mats) - 1)
            return _mats[i] @ np.array([xy[0], xy[1], t, 1.0])

        self = cls(times, ev, np.asarray(point, dtype=float), matrices=mats)
        self._check_matrix_continuity()
        return self

    def _check_matrix_continuity(self, tol: float = 1e-10):
        for i in range(len(self.matrices) - 1):
            t = self.breakpoints[i + 1]
            a, b = self.matrices[i], self.matrices[i + 1]
            # restriction to the plane {time = t}: x/y columns plus t*tcol+const
            ra = np.column_stack([a[:, 0], a[:, 1], a[:, 2] * t + a[:, 3]])
            rb = np.column_stack([b[:, 0], b[:, 1], b[:, 2] * t + b[:, 3]])
            if np.max(np.abs(ra - rb)) > tol:
                raise ValueError(f"slab maps disagree at breakpoint {t}")

    def to_json(self) -> dict:
        if self.matrices is None:
            raise ValueError("only matrix-based contractions can be serialized")
        return {
            "breakpoints": list(self.breakpoints),
            "slabs": [{"matrix": m.tolist()} for m in self.matrices],
            "point": [float(self.point[0]), float(self.point[1])],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SlabAffineContraction":
        return cls.from_matrices(
            data["breakpoints"],
            [slab["matrix"] for slab in data["slabs"]],
            data["point"],
        )

    @classmethod
    def load(cls, path) -> "SlabAffineContraction":
        with open(path) as fh:
            return cls.from_json(json.load(fh))

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def validate_contraction(phi: SlabAffineContraction, complex: SimplicialComplex,
                         geometry=None, tol: float = 1e-10) -> list[str]:
    """Sampled endpoint and containment checks at mesh vertices.

    Containment is probed at the breakpoints and at the midpoint of each
    vertex path segment: the cone construction interpolates affinely between
    breakpoint images, so on a nonconvex domain a segment can leave the mesh
    even though its endpoints stay inside.
    """
    coords = complex.coordinates
    if coords is None:
        raise ValueError("complex has no vertex coordinates")
    issues = []
    for (v,) in complex.simplices(0):
        x = coords[v]
        if np.max(np.abs(phi(x, 1.0) - x)) > tol:
            issues.append(f"phi(vertex {v}, 1) != identity")
        if np.max(np.abs(phi(x, 0.0) - phi.point)) > tol:
            issues.append(f"phi(vertex {v}, 0) != base point")
        if geometry is not None:
            images = [phi(x, t) for t in phi.breakpoints]
            for t, p in zip(phi.breakpoints, images):
                if geometry.locate(p, tol=1e-9) is None:
                    issues.append(f"phi(vertex {v}, {t}) leaves the mesh")
            for lo, hi in zip(images, images[1:]):
                if geometry.locate(0.5 * (lo + hi), tol=1e-9) is None:
                    issues.append(f"interpolated path of vertex {v} leaves the mesh")
    return issues


def lipschitz_cone(phi: SlabAffineContraction, complex: SimplicialComplex,
                   product: ProductComplex | None = None,
                   geometry=None) -> SingularConeOperator:
    """Singular cone operator from a per-slab contraction map.

    The product complex is subdivided exactly at the contraction's
    breakpoints; each extruded prism becomes the linear singular simplex on
    its vertex images, i.e. the affine interpolation of the contraction per
    prism.  Degenerate image simplices are kept (they matter for formal
    boundary cancellation, and integrate to zero).
    """
    coords = complex.coordinates
    if coords is None:
        raise ValueError("complex has no vertex coordinates")
    if product is None:
        product = build_product_complex(complex, phi.breakpoints)
    else:
        if product.base is not complex:
            raise ValueError("product complex built over a different base")
        if product.times != phi.breakpoints:
            raise ValueError(
                f"product breakpoints {product.times} do not match "
                f"contraction breakpoints {phi.breakpoints}"
            )
    issues = validate_contraction(phi, complex, geometry)
    if issues:
        raise ValueError("invalid contraction: " + "; ".join(issues[:5]))

    # vertex images, evaluated once per (vertex, level)
    images = {}
    for (pv,) in product.complex.simplices(0):
        v, level = product.vertex_level(pv)
        images[pv] = tuple(phi(coords[v], product.times[level]))

    table: dict[Simplex, SingularChain] = {}
    for k, simplices in complex.simplices_by_dim.items():
        for s in simplices:
            terms = []
            for tau, c in extrusion(s, product).terms.items():
                terms.append((c, LinearSimplex(tuple(images[pv] for pv in tau))))
            table[s] = SingularChain(k + 1, terms)
    return SingularConeOperator(complex, phi.point, table)
