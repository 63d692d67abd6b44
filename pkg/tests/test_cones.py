"""Cone operators: collapse-based, contraction-based, star, infinite, Lipschitz."""

from itertools import combinations

import numpy as np
import pytest

from decpotentials.cones import (
    SlabAffineContraction,
    collapse_cone,
    contraction_cone,
    infinite_cone,
    lipschitz_cone,
    star_cone,
    validate_contraction,
)
from decpotentials.homotopy import (
    build_product_complex,
    contraction_from_strong_collapse,
    find_collapse_sequence,
    find_strong_collapse_sequence,
    uniform_breakpoints,
)
from decpotentials.simplicial import Chain, SimplicialComplex, boundary
from decpotentials.singular import (
    LinearSimplex,
    SingularChain,
    is_degenerate,
    lift_simplex,
    singular_boundary,
)
from decpotentials.whitney import MeshGeometry


def _random_collapsible(rng, rounds=8):
    """Grow a complex by repeatedly coning a new vertex over an existing face."""
    pool = {(0,)}
    for new in range(1, rounds + 1):
        s = sorted(pool)[rng.integers(0, len(pool))]
        if len(s) >= 3:  # cap the new simplex at dimension 3
            keep = sorted(rng.choice(len(s), size=2, replace=False))
            s = tuple(s[int(i)] for i in keep)
        glued = tuple(sorted((*s, new)))
        for r in range(1, len(glued) + 1):
            pool.update(combinations(glued, r))
    return SimplicialComplex(sorted(pool, key=lambda t: (len(t), t)))


def _check_cone_identity(op, cx):
    """boundary(Co s) + Co(boundary s) == s, exactly, for every simplex."""
    for k in sorted(cx.simplices_by_dim):
        for s in cx.simplices(k):
            c = Chain.single(cx, s)
            got = boundary(op.apply(c))
            if k > 0:
                got = got + op.apply(boundary(c))
                assert got == c
            else:
                assert got == c - Chain.single(cx, (op.vertex,))


def test_collapse_cone_single_triangle_table():
    cx = SimplicialComplex([(0, 1, 2)])
    seq = find_collapse_sequence(cx)
    assert seq.steps == [((0, 1, 2), (0, 1)), ((0, 2), (0,)), ((1, 2), (1,))]
    op = collapse_cone(seq)
    assert op.vertex == 2
    assert op.table[(2,)] == Chain(cx, 1, {})
    assert op.table[(1,)] == Chain(cx, 1, {(1, 2): -1})
    assert op.table[(0,)] == Chain(cx, 1, {(0, 2): -1})
    assert op.table[(0, 1)] == Chain(cx, 2, {(0, 1, 2): 1})
    assert op.table[(0, 2)].is_zero() and op.table[(1, 2)].is_zero()
    _check_cone_identity(op, cx)


def test_collapse_cone_identity_on_random_complexes():
    rng = np.random.default_rng(1)
    for _ in range(6):
        cx = _random_collapsible(rng)
        seq = find_collapse_sequence(cx)
        assert seq is not None, "coned growth must stay collapsible"
        op = collapse_cone(seq)
        _check_cone_identity(op, cx)


def test_collapse_cone_respects_orientation_signs(square2):
    seq = find_collapse_sequence(square2)
    op = collapse_cone(seq)
    c = op.chain((1, 0))
    assert c == -op.chain((0, 1))


def test_collapse_cone_rejects_invalid_sequence(square1):
    seq = find_collapse_sequence(square1)
    from decpotentials.homotopy import CollapseSequence

    bad = CollapseSequence(square1, list(reversed(seq.steps)), seq.terminal)
    with pytest.raises(ValueError):
        collapse_cone(bad)


def test_contraction_cone_single_triangle():
    cx = SimplicialComplex([(0, 1, 2)])
    seq = find_strong_collapse_sequence(cx)
    prod = build_product_complex(cx, uniform_breakpoints(2))
    psi = contraction_from_strong_collapse(seq, prod)
    op = contraction_cone(psi, prod)
    assert op.vertex == 2
    # extruded vertex path pushed through psi: 0 -> 1 -> 2 gives two edges
    assert op.table[(0,)] == Chain(cx, 1, {(1, 2): -1, (0, 1): -1})
    assert op.table[(1,)] == Chain(cx, 1, {(1, 2): -1})
    _check_cone_identity(op, cx)


def test_contraction_cone_identity_square2(square2):
    seq = find_strong_collapse_sequence(square2)
    prod = build_product_complex(square2, uniform_breakpoints(len(seq.steps)))
    psi = contraction_from_strong_collapse(seq, prod)
    op = contraction_cone(psi, prod)
    _check_cone_identity(op, square2)


def test_star_cone_formal_homotopy_identity(square2):
    a = np.array([0.31, 0.47])
    op = star_cone(a, square2)
    apex = LinearSimplex(((0.31, 0.47),))
    for k in sorted(square2.simplices_by_dim):
        for s in square2.simplices(k):
            lhs = singular_boundary(op.table[s])
            if k > 0:
                for f, c in boundary(Chain.single(square2, s)).terms.items():
                    lhs = lhs + c * op.table[f]
                rhs = SingularChain(k, [(1, lift_simplex(square2, s))])
            else:
                rhs = SingularChain(0, [(1, lift_simplex(square2, s)), (-1, apex)])
            assert (lhs - rhs).is_zero()


def test_star_cone_keeps_degenerate_joins(square2):
    # apex collinear with a mesh edge: the join is degenerate but still stored
    op = star_cone(np.array([0.25, 0.0]), square2)
    degen = op.table[(0, 1)]
    assert len(degen.terms) == 1
    (coeff, simplex), = degen.terms
    assert is_degenerate(simplex.array())


def test_infinite_cone_tables_are_apex_first(square2):
    a = np.array([0.4, 0.45])
    op = infinite_cone(a, square2)
    (coeff, cone), = op.table[(0, 1)].terms
    assert coeff == 1
    assert cone.apex == (0.4, 0.45)
    assert cone.dim == 2


def test_straight_line_contraction_endpoints():
    phi = SlabAffineContraction.straight_line(np.array([0.2, 0.7]))
    x = np.array([0.9, 0.1])
    assert np.allclose(phi(x, 1.0), x)
    assert np.allclose(phi(x, 0.0), [0.2, 0.7])
    assert np.allclose(phi(x, 0.5), (x + np.array([0.2, 0.7])) / 2)
    assert phi.breakpoints == (0.0, 1.0)


def test_ushape_contraction_moves_vertically_then_horizontally():
    a = np.array([0.2, 0.2])
    phi = SlabAffineContraction.ushape(a)
    x = np.array([0.9, 0.8])
    assert np.allclose(phi(x, 1.0), x)
    assert np.allclose(phi(x, 0.75), [0.9, 0.5])   # dropping toward y = a_y
    assert np.allclose(phi(x, 0.5), [0.9, 0.2])    # inside the bottom strip
    assert np.allclose(phi(x, 0.25), [0.55, 0.2])  # sliding toward a
    assert np.allclose(phi(x, 0.0), a)


def test_contraction_matrices_round_trip(tmp_path):
    # a jointly affine slab map: identity at t=1, a translation earlier on
    mats = [
        [[1.0, 0.0, 0.25, -0.25], [0.0, 1.0, 0.0, 0.0]],
        [[1.0, 0.0, 0.25, -0.25], [0.0, 1.0, 0.6, -0.3]],
    ]
    phi = SlabAffineContraction.from_matrices((0.0, 0.5, 1.0), mats, (0.0, 0.0))
    path = tmp_path / "phi.json"
    phi.save(path)
    back = SlabAffineContraction.load(path)
    assert back.breakpoints == phi.breakpoints
    rng = np.random.default_rng(2)
    for _ in range(20):
        x = rng.uniform(0, 1, 2)
        t = float(rng.uniform(0, 1))
        assert np.allclose(phi(x, t), back(x, t), atol=1e-15)
    # byte-stable rewrite
    back.save(tmp_path / "phi2.json")
    assert path.read_bytes() == (tmp_path / "phi2.json").read_bytes()


def test_matrix_descriptors_cannot_reach_a_point():
    # a translation path is expressible but fails the contraction endpoint
    # conditions, so the singular cone construction must refuse it
    mats = [[[1.0, 0.0, 0.5, -0.5], [0.0, 1.0, 0.0, 0.0]]]
    phi = SlabAffineContraction.from_matrices((0.0, 1.0), mats, (0.0, 0.0))
    cx = SimplicialComplex([(0, 1, 2)],
                           np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        lipschitz_cone(phi, cx, geometry=MeshGeometry(cx))


def test_from_matrices_rejects_discontinuous_slabs():
    mats = [
        [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]],
        [[1.0, 0.0, 0.0, 5.0], [0.0, 1.0, 0.0, 0.0]],  # jumps at t = 0.5
    ]
    with pytest.raises(ValueError):
        SlabAffineContraction.from_matrices((0.0, 0.5, 1.0), mats, (0.0, 0.0))


def test_validate_contraction_flags_escapes(ushape10):
    geom = MeshGeometry(ushape10)
    # straight lines to (0.2, 0.2) cut across the notch from the right arm
    bad = SlabAffineContraction.straight_line(np.array([0.2, 0.2]))
    assert validate_contraction(bad, ushape10, geom)
    good = SlabAffineContraction.ushape(np.array([0.2, 0.2]))
    assert validate_contraction(good, ushape10, geom) == []


def test_lipschitz_cone_residual_is_degenerate_only(ushape10, ugeom):
    phi = SlabAffineContraction.ushape(np.array([0.2, 0.2]))
    op = lipschitz_cone(phi, ushape10, geometry=ugeom)
    apex = LinearSimplex((tuple(map(float, phi.point)),))
    rng = np.random.default_rng(3)
    for k in (0, 1, 2):
        sims = ushape10.simplices(k)
        for i in rng.choice(len(sims), size=6, replace=False):
            s = sims[int(i)]
            lhs = singular_boundary(op.table[s])
            if k > 0:
                for f, c in boundary(Chain.single(ushape10, s)).terms.items():
                    lhs = lhs + c * op.table[f]
                rhs = SingularChain(k, [(1, lift_simplex(ushape10, s))])
            else:
                rhs = SingularChain(0, [(1, lift_simplex(ushape10, s)), (-1, apex)])
            residual = (lhs - rhs).simplify()
            if k == 0:
                assert residual.is_zero()
            else:
                assert all(is_degenerate(np.array(t.points)) for _, t in residual.terms)


def test_lipschitz_cone_on_closed_star_yields_mesh_chains(square2, geom2):
    star_tris = [t for t in square2.simplices(2) if 4 in t]
    cx = SimplicialComplex(star_tris, square2.coordinates)
    phi = SlabAffineContraction.straight_line(square2.coordinates[4])
    op = lipschitz_cone(phi, cx, geometry=MeshGeometry(cx))
    # the join of an edge with the center is a mesh triangle (possibly degenerate)
    for s in cx.simplices(1):
        for _, t in op.table[s].terms:
            pts = np.array(t.points)
            if not is_degenerate(pts):
                verts = tuple(sorted(
                    int(np.argmin(np.linalg.norm(cx.coordinates[:9] - p, axis=1)))
                    for p in pts))
                assert verts in cx


def test_lipschitz_cone_breakpoint_mismatch(square2, geom2):
    phi = SlabAffineContraction.straight_line(np.array([0.5, 0.5]))
    prod = build_product_complex(square2, (0.0, 0.5, 1.0))
    with pytest.raises(ValueError):
        lipschitz_cone(phi, square2, product=prod, geometry=geom2)
