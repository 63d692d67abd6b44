import numpy as np
import pytest

from decpotentials import MeshGeometry, generate_square_mesh, generate_ushape_mesh
from decpotentials.simplicial import Cochain, SimplicialComplex


@pytest.fixture(scope="session")
def square1():
    return generate_square_mesh(1)


@pytest.fixture(scope="session")
def square2():
    return generate_square_mesh(2)


@pytest.fixture(scope="session")
def square8():
    return generate_square_mesh(8)


@pytest.fixture(scope="session")
def ushape10():
    return generate_ushape_mesh(10)


@pytest.fixture(scope="session")
def geom2(square2):
    return MeshGeometry(square2)


@pytest.fixture(scope="session")
def geom8(square8):
    return MeshGeometry(square8)


@pytest.fixture(scope="session")
def ugeom(ushape10):
    return MeshGeometry(ushape10)


@pytest.fixture(scope="session")
def triangle():
    """One reference-like triangle with vertices (0,0), (1,0), (0,1)."""
    coords = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    return SimplicialComplex([(0, 1, 2)], coords)


def random_cochain(cx, k, rng):
    return Cochain(cx, k, rng.uniform(-1.0, 1.0, cx.num_simplices(k)))


def annulus_complex(with_coords=True):
    """Six triangles around a missing center: not contractible."""
    triangles = [(0, 1, 4), (0, 4, 3), (1, 2, 5), (1, 5, 4), (2, 0, 3), (2, 3, 5)]
    coords = None
    if with_coords:
        inner = [(0.4 * np.cos(t), 0.4 * np.sin(t))
                 for t in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
        outer = [(np.cos(t), np.sin(t))
                 for t in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)]
        coords = np.array(inner + outer)
    return SimplicialComplex(triangles, coords)
