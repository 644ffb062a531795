import numpy as np
from hypothesis import strategies as st

from slicereg.quat import Quaternion
from slicereg.regpoly import RegPoly


def random_quaternion(rng, scale=1.0):
    return Quaternion(*rng.uniform(-scale, scale, 4))


def random_poly(rng, max_degree=6, min_degree=0):
    deg = int(rng.integers(min_degree, max_degree + 1))
    coeffs = rng.uniform(-1.0, 1.0, (deg + 1, 4))
    if np.linalg.norm(coeffs[-1]) < 0.1:
        coeffs[-1, 0] += 1.0
    return RegPoly(coeffs)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quaternions = st.builds(Quaternion, finite, finite, finite, finite)
small = st.floats(-1, 1, allow_nan=False, allow_infinity=False)
small_quaternions = st.builds(Quaternion, small, small, small, small)
polys = st.lists(st.tuples(small, small, small, small), min_size=1, max_size=7).map(lambda cs: RegPoly(list(cs)))
