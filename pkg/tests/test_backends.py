import numpy as np
import pytest
from hypothesis import given, strategies as st

from trisw._core import AVAILABLE, get_residual
from trisw.boundary import BoundaryCondition
from trisw.scenarios import SinusoidalForcing

from conftest import make_disc

pytestmark = pytest.mark.skipif("compiled" not in AVAILABLE,
                                reason="compiled extension not built")

BCS = {"left": BoundaryCondition("inflow_analytic", forcing=SinusoidalForcing(0.1, 2.0, 0.5)),
       "right": BoundaryCondition("outflow"), "*": BoundaryCondition("wall")}


@given(seed=st.integers(0, 2**31 - 1), pattern=st.sampled_from(["uniform", "alternating"]),
       dry=st.floats(0.0, 0.6))
def test_backends_bitwise_equal(seed, pattern, dry):
    rng = np.random.default_rng(seed)
    disc = make_disc(lambda x, y: 0.3 * np.sin(2 * x) * y, nx=7, ny=4, bcs=BCS, pattern=pattern)
    nc = disc.n_cells
    b = disc.bathymetry.cell
    h = rng.uniform(0, 0.5, nc) * (rng.random(nc) > dry)
    w, qx, qy = b + h, rng.normal(0, 0.2, nc) * h, rng.normal(0, 0.2, nc) * h
    t = rng.uniform(0, 3)
    kinds, presc = disc.boundary_data(t)
    a = get_residual("numpy")(disc, w, qx, qy, kinds, presc, 9.81)
    c = get_residual("compiled")(disc, w, qx, qy, kinds, presc, 9.81)
    for x, y in zip(a, c):
        np.testing.assert_array_equal(x, y)


def test_unknown_backend():
    with pytest.raises(ValueError):
        get_residual("fortran")
