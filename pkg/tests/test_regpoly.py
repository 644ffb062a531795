import numpy as np
import pytest
from hypothesis import assume, given, settings

from helpers import polys, random_poly, random_quaternion, small_quaternions
from oracles import convolve, poly_eval
from slicereg.errors import ParseError
from slicereg.quat import I, J, K, ONE, Quaternion, sample_sphere_units
from slicereg.regpoly import (
    RegPoly,
    evaluate,
    pointwise_product_formula,
    product_formula_array,
    product_of_linear_factors,
    regular_conjugate,
    star_mul,
    symmetrization,
)


def qclose(a, b, tol=1e-12):
    return abs(Quaternion.coerce(a) - Quaternion.coerce(b)) <= tol


Q_MINUS_I = RegPoly.linear(I)
Q_MINUS_J = RegPoly.linear(J)


def test_normal_form_strips_trailing_zeros():
    f = RegPoly([1.0, I, 0.0, Quaternion(0, 1e-15)])
    assert f.degree == 1
    assert RegPoly([0.0, 0.0]).is_zero()
    assert RegPoly().degree == -1


def test_eval_examples():
    assert evaluate(RegPoly([1, 0, 1]), J) == Quaternion()
    assert evaluate(RegPoly([0, I]), J) == -K
    assert qclose(evaluate(Q_MINUS_I, 2 * I), I)


@given(polys, small_quaternions)
def test_eval_matches_matrix_powers(f, q):
    expected = poly_eval([a.to_list() for a in f.coeffs], q.to_list())
    assert np.allclose(evaluate(f, q).to_array(), expected, atol=1e-12)


def test_eval_array_matches_scalar(rng):
    f = random_poly(rng, 5)
    pts = rng.uniform(-1, 1, (3, 7, 4))
    out = f.eval_array(pts)
    for idx in np.ndindex(3, 7):
        assert np.allclose(out[idx], evaluate(f, Quaternion(*pts[idx])).to_array(), atol=1e-13)


def test_star_mul_examples():
    prod = star_mul(Q_MINUS_I, Q_MINUS_J)
    assert prod.allclose(RegPoly([K, -(I + J), ONE]))
    f = RegPoly([1, I, J])
    assert star_mul(f, RegPoly.constant(1)) == f
    assert star_mul(Q_MINUS_I, RegPoly.linear(-I)).allclose(RegPoly([1, 0, 1]))


@given(polys, polys)
def test_star_mul_matches_convolution_oracle(f, g):
    assume(not f.is_zero() and not g.is_zero())
    expected = convolve([a.to_list() for a in f.coeffs], [b.to_list() for b in g.coeffs])
    got = star_mul(f, g)
    pad = np.zeros_like(expected)
    pad[: got.degree + 1] = got.array
    assert np.allclose(pad, expected, atol=1e-12)


def test_star_mul_degree_adds(rng):
    for _ in range(20):
        f, g = random_poly(rng, 5), random_poly(rng, 5)
        assert star_mul(f, g).degree == f.degree + g.degree


def test_pointwise_formula_examples():
    assert qclose(pointwise_product_formula(Q_MINUS_I, Q_MINUS_J, J), 2 * K)
    assert qclose(evaluate(star_mul(Q_MINUS_I, Q_MINUS_J), J), 2 * K)
    assert pointwise_product_formula(Q_MINUS_I, RegPoly([3, J, K]), I) == Quaternion()
    assert qclose(pointwise_product_formula(RegPoly.constant(2), RegPoly.identity(), K), 2 * K)


def test_pointwise_formula_matches_star_product(rng):
    for _ in range(30):
        f, g = random_poly(rng), random_poly(rng)
        fg = star_mul(f, g)
        for _ in range(5):
            q = random_quaternion(rng)
            value = evaluate(fg, q)
            assert abs(value - pointwise_product_formula(f, g, q)) <= 1e-9 * (1 + abs(value))


def test_product_formula_array_matches_scalar(rng):
    f, g = random_poly(rng, 4), random_poly(rng, 4)
    pts = rng.uniform(-1, 1, (20, 4))
    pts[0] = I.to_array()
    f = star_mul(Q_MINUS_I, f)  # vanishes at i
    out = product_formula_array(f, g, pts)
    for k in range(20):
        assert np.allclose(out[k], pointwise_product_formula(f, g, Quaternion(*pts[k])).to_array(), atol=1e-12)


def test_noncommutative_example():
    assert not star_mul(Q_MINUS_I, Q_MINUS_J).allclose(star_mul(Q_MINUS_J, Q_MINUS_I), atol=1e-6)


@settings(max_examples=50)
@given(polys, polys, polys)
def test_associative_and_distributive(f, g, h):
    assert star_mul(star_mul(f, g), h).allclose(star_mul(f, star_mul(g, h)), 1e-12)
    assert star_mul(f, g + h).allclose(star_mul(f, g) + star_mul(f, h), 1e-12)
    assert star_mul(f + g, h).allclose(star_mul(f, h) + star_mul(g, h), 1e-12)


def test_regular_conjugate_examples():
    assert regular_conjugate(RegPoly([1, I])) == RegPoly([1, -I])
    real = RegPoly([1.0, -2.0, 3.0])
    assert regular_conjugate(real) == real
    assert regular_conjugate(Q_MINUS_I) == RegPoly.linear(-I)


@given(polys)
def test_conjugate_is_involution(f):
    assert regular_conjugate(regular_conjugate(f)) == f


def test_symmetrization_examples():
    assert symmetrization(Q_MINUS_I).allclose(RegPoly([1, 0, 1]))
    a = Quaternion(1, 2, -1, 0.5)
    assert symmetrization(RegPoly.constant(a)).allclose(RegPoly.constant(a.norm2()))
    expected = convolve([[1, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]], [[1, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]])
    assert symmetrization(star_mul(Q_MINUS_I, Q_MINUS_J)).allclose(RegPoly(expected))


@given(polys)
def test_symmetrization_is_real_and_order_free(f):
    s = symmetrization(f)
    assert s.is_real(1e-12)
    assert s.allclose(star_mul(regular_conjugate(f), f), 1e-12)


def test_real_coefficients_preserve_slices(rng):
    f = RegPoly.from_real(rng.uniform(-1, 1, 6))
    for u in sample_sphere_units(10, 3):
        for _ in range(5):
            x, y = rng.uniform(-1.5, 1.5, 2)
            v = evaluate(f, Quaternion(x) + u * y)
            # the imaginary part must be parallel to u
            resid = np.array(v.vector) - np.dot(v.vector, u.vector) * np.array(u.vector)
            assert np.linalg.norm(resid) <= 1e-10


def test_linear_factor_product_order():
    f = product_of_linear_factors([I, J])
    assert f.allclose(star_mul(Q_MINUS_I, Q_MINUS_J))


def test_json_roundtrip(rng):
    f = random_poly(rng, 5)
    g = RegPoly.from_json(f.to_json())
    assert g == f
    assert RegPoly.from_json('{"coeffs": [[0,0,0,0],[1,0,0,0]]}') == RegPoly.identity()


@pytest.mark.parametrize(
    "text",
    ["[1,2]", '{"coef": []}', '{"coeffs": [[1,2,3]]}', '{"coeffs": [["a",0,0,0]]}', "{", '{"coeffs": 3}',
     '{"coeffs": [[true,0,0,0]]}'],
)
def test_json_rejects(text):
    with pytest.raises(ParseError):
        RegPoly.from_json(text)


def test_operator_sugar():
    q = RegPoly.identity()
    assert (q * q) == RegPoly([0, 0, 1])
    assert (q - I) == Q_MINUS_I
    assert (1 + q * q).allclose(RegPoly([1, 0, 1]))
    assert q(J) == J


def test_derivative():
    f = RegPoly([1, I, J, K])
    assert f.derivative() == RegPoly([I, 2 * J, 3 * K])
