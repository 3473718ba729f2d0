import numpy as np
import pytest
from hypothesis import settings

from trisw.bathymetry import sample_bathymetry
from trisw.boundary import BoundaryCondition
from trisw.discretization import Discretization
from trisw.mesh import generate_rect_mesh

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def make_disc(bed=lambda x, y: 0.0 * x, nx=6, ny=4, x=(0.0, 2.0), y=(0.0, 1.0),
              bcs=None, pattern="alternating"):
    mesh = generate_rect_mesh(x, y, nx, ny, pattern)
    bcs = bcs or {"*": BoundaryCondition("wall")}
    return Discretization(mesh, sample_bathymetry(mesh, bed), bcs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
