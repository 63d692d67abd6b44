"""Structured mesh generators and file round trips.

Both generators split every grid cell along the same (southwest-northeast)
diagonal.  Vertex ids run row-major from the bottom-left corner, so for the
unit square the origin is vertex 0 and the top-right corner is the last
vertex; the U-shaped domain keeps the same numbering restricted to its
cells, putting the origin at id 0.

File formats:

* mesh JSON: ``{"vertices": [[x, y], ...], "triangles": [[i, j, k], ...]}``
  with triangles written canonically sorted, so a load/save round trip is
  byte-stable;
* cochain CSV: a ``dim,<k>`` header line followed by
  ``v0,...,vk,value`` rows over canonical simplices in index order.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .simplicial import Cochain, SimplicialComplex, canonical_simplex


def generate_square_mesh(n: int) -> SimplicialComplex:
    """Unit square [0,1]^2 with (n+1)^2 vertices and 2 n^2 triangles."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    coords = np.array(
        [[i / n, j / n] for j in range(n + 1) for i in range(n + 1)], dtype=float
    )

    def vid(i, j):
        return j * (n + 1) + i

    triangles = []
    for j in range(n):
        for i in range(n):
            v00 = vid(i, j)
            v10 = vid(i + 1, j)
            v01 = vid(i, j + 1)
            v11 = vid(i + 1, j + 1)
            triangles.append((v00, v10, v11))
            triangles.append((v00, v11, v01))
    return SimplicialComplex(triangles, coords)


def generate_ushape_mesh(n: int) -> SimplicialComplex:
    """U-shaped domain: a bottom strip of height 0.3 joining two side arms
    of width 0.3, meshed at spacing 1/n.  ``n`` must be a multiple of 10 so
    the 0.3/0.7 walls land on grid lines."""
    if n < 10 or n % 10 != 0:
        raise ValueError("n must be a positive multiple of 10")
    wall = 3 * n // 10
    right = 7 * n // 10

    def cell_included(i, j):
        return (j + 1) <= wall or (i + 1) <= wall or i >= right

    used = sorted(
        {
            (i + di, j + dj)
            for j in range(n)
            for i in range(n)
            if cell_included(i, j)
            for di in (0, 1)
            for dj in (0, 1)
        },
        key=lambda p: (p[1], p[0]),
    )
    ids = {p: k for k, p in enumerate(used)}
    coords = np.array([[i / n, j / n] for (i, j) in used], dtype=float)

    triangles = []
    for j in range(n):
        for i in range(n):
            if not cell_included(i, j):
                continue
            v00 = ids[(i, j)]
            v10 = ids[(i + 1, j)]
            v01 = ids[(i, j + 1)]
            v11 = ids[(i + 1, j + 1)]
            triangles.append((v00, v10, v11))
            triangles.append((v00, v11, v01))
    return SimplicialComplex(triangles, coords)


def vertex_at(complex: SimplicialComplex, point, tol: float = 1e-9) -> int:
    """Id of the vertex at (or within tol of) a coordinate point."""
    coords = complex.coordinates
    p = np.asarray(point, dtype=float)
    for (v,) in complex.simplices(0):
        if np.max(np.abs(coords[v] - p)) <= tol:
            return v
    raise KeyError(f"no vertex at {tuple(p)}")


# -- files ---------------------------------------------------------------


def save_mesh_json(complex: SimplicialComplex, path) -> None:
    if complex.coordinates is None:
        raise ValueError("mesh files need vertex coordinates")
    data = {
        "vertices": [[float(x), float(y)] for x, y in
                     complex.coordinates[: complex.vertex_count]],
        "triangles": [list(t) for t in complex.simplices(2)],
    }
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True)
        fh.write("\n")


def load_mesh_json(path) -> SimplicialComplex:
    with open(path) as fh:
        data = json.load(fh)
    coords = np.array(data["vertices"], dtype=float)
    triangles = [tuple(t) for t in data["triangles"]]
    if not triangles:
        raise ValueError("mesh file has no triangles")
    return SimplicialComplex(triangles, coords)


def save_cochain_csv(cochain: Cochain, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["dim", cochain.dim])
        for s, v in zip(cochain.complex.simplices(cochain.dim), cochain.values):
            writer.writerow([*s, repr(float(v))])


def load_cochain_csv(complex: SimplicialComplex, path) -> Cochain:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if not header or header[0] != "dim":
            raise ValueError("cochain file must start with a 'dim,<k>' header")
        k = int(header[1])
        values = np.zeros(complex.num_simplices(k))
        seen = np.zeros(complex.num_simplices(k), dtype=bool)
        for row in reader:
            if not row:
                continue
            verts = [int(x) for x in row[:-1]]
            if len(verts) != k + 1:
                raise ValueError(f"row {row} does not name a {k}-simplex")
            t, sign = canonical_simplex(verts)
            i = complex.index(t)
            values[i] = sign * float(row[-1])
            seen[i] = True
        if not np.all(seen):
            missing = int(np.sum(~seen))
            raise ValueError(f"cochain file misses {missing} {k}-simplices")
    return Cochain(complex, k, values)
