import numpy as np
import pytest

from helpers import random_poly, random_quaternion
from slicereg.errors import DegenerateLocusError, FrameError
from slicereg.quat import I, J, K, ONE, Quaternion, sample_sphere_units
from slicereg.regpoly import RegPoly, evaluate, regular_conjugate, star_mul
from slicereg.slicerep import (
    SphereLocus,
    degenerate_loci,
    ext_eval,
    has_nondegenerate_neighbor,
    is_degenerate_sphere,
    near_degenerate,
    sphere_pair,
    sphere_pairs_array,
    split,
    split_conjugate,
    split_mul,
)

Q2_PLUS_1 = RegPoly([1, 0, 1])


def qclose(a, b, tol=1e-12):
    return abs(Quaternion.coerce(a) - Quaternion.coerce(b)) <= tol


@pytest.mark.parametrize("x, y", [(0.3, 1.7), (-2.0, 0.5), (1.0, 1.0)])
def test_sphere_pair_identity_and_square(x, y):
    p = sphere_pair(RegPoly.identity(), SphereLocus(x, y))
    assert qclose(p.b, Quaternion(x)) and qclose(p.c, Quaternion(y))
    p = sphere_pair(Q2_PLUS_1, SphereLocus(x, y))
    assert qclose(p.b, Quaternion(x * x - y * y + 1))
    assert qclose(p.c, Quaternion(2 * x * y))


def test_sphere_pair_constant_and_real_axis():
    a = Quaternion(1, 2, 3, 4)
    p = sphere_pair(RegPoly.constant(a), SphereLocus(0.5, 2.0))
    assert qclose(p.b, a) and qclose(p.c, Quaternion())
    f = RegPoly([1, I, J])
    p = sphere_pair(f, SphereLocus(2.0, 0.0))
    assert p.b == evaluate(f, Quaternion(2.0)) and p.c == Quaternion()


def test_sphere_locus_validation():
    with pytest.raises(ValueError):
        SphereLocus(0.0, -1.0)
    assert SphereLocus.of(Quaternion(1, 0, 3, 4)) == SphereLocus(1.0, 5.0)
    assert SphereLocus.from_dict({"x": 1, "y": 2}).to_dict() == {"x": 1.0, "y": 2.0}


def test_affine_in_the_unit(rng):
    for _ in range(20):
        f = random_poly(rng, 6)
        s = SphereLocus(rng.uniform(-1.5, 1.5), rng.uniform(0.05, 1.5))
        p = sphere_pair(f, s)
        for u in sample_sphere_units(50, int(rng.integers(1 << 30))):
            assert abs(evaluate(f, s.point(u)) - p.value(u)) <= 1e-10 * (1 + abs(p.b) + abs(p.c))


def test_probe_independence(rng):
    for _ in range(20):
        f = random_poly(rng, 6)
        s = SphereLocus(rng.uniform(-1, 1), rng.uniform(0.1, 1.5))
        a = sphere_pair(f, s)
        u, v = sample_sphere_units(2, int(rng.integers(1 << 30)))
        b = sphere_pair(f, s, probe=u)
        c = sphere_pair(f, s, probe=v)
        assert qclose(a.b, b.b, 1e-10) and qclose(a.c, b.c, 1e-10) and qclose(b.c, c.c, 1e-10)


def test_sphere_pairs_array_matches_scalar(rng):
    f = random_poly(rng, 5)
    xs, ys = rng.uniform(-1, 1, 6), rng.uniform(0.1, 1, 6)
    b, c = sphere_pairs_array(f, xs, ys)
    for k in range(6):
        p = sphere_pair(f, SphereLocus(xs[k], ys[k]))
        assert np.allclose(b[k], p.b.to_array(), atol=1e-13)
        assert np.allclose(c[k], p.c.to_array(), atol=1e-13)


def test_split_examples():
    s = split(RegPoly([0, J]), I, J)
    assert np.allclose(s.F, [0, 0]) and np.allclose(s.G, [0, 1])
    s = split(RegPoly.from_real([1, -2, 3]), Quaternion(0, 0.6, 0.8, 0), K)
    assert np.allclose(s.G, 0)
    s = split(RegPoly([0, I + J]), I, J)
    assert np.allclose(s.F, [0, 1j]) and np.allclose(s.G, [0, 1])


def test_split_rejects_bad_frames():
    with pytest.raises(FrameError):
        split(RegPoly.identity(), I, Quaternion(0, 1, 1, 0) * (2**-0.5))
    with pytest.raises(FrameError):
        split(RegPoly.identity(), I, Quaternion(0, 0, 2, 0))


def test_split_reconstructs_slice(rng):
    for _ in range(10):
        f = random_poly(rng, 6)
        u, v = sample_sphere_units(2, int(rng.integers(1 << 30)))
        s = split(f, u)  # canonical J
        assert abs(np.dot(s.I.vector, s.J.vector)) < 1e-12
        for _ in range(5):
            z = Quaternion(rng.uniform(-1, 1)) + s.I * rng.uniform(-1, 1)
            assert abs(s.value(z) - evaluate(f, z)) <= 1e-10
        assert s.to_regpoly().allclose(f, 1e-12)


def test_split_mul_examples():
    left, right = split(RegPoly.linear(I), I, J), split(RegPoly.linear(-I), I, J)
    assert split_mul(left, right).allclose(split(Q2_PLUS_1, I, J))
    g = split(RegPoly([1, J, K]), I, J)
    assert split_mul(split(RegPoly.constant(1), I, J), g).allclose(g)
    qj = split(RegPoly([0, J]), I, J)
    squared = split_mul(qj, qj)
    assert squared.allclose(split(RegPoly([0, 0, -1]), I, J))
    assert squared.to_regpoly().allclose(star_mul(RegPoly([0, J]), RegPoly([0, J])))


def test_split_mul_matches_star_mul(rng):
    for _ in range(30):
        f, g = random_poly(rng), random_poly(rng)
        (u,) = sample_sphere_units(1, int(rng.integers(1 << 30)))
        lhs = split_mul(split(f, u), split(g, u))
        rhs = split(star_mul(f, g), u)
        assert lhs.allclose(rhs, 1e-10)


def test_split_mul_frame_mismatch():
    with pytest.raises(FrameError):
        split_mul(split(RegPoly.identity(), I, J), split(RegPoly.identity(), J, K))


def test_split_conjugate_examples(rng):
    assert split_conjugate(split(RegPoly.linear(I), I, J)).allclose(split(RegPoly.linear(-I), I, J))
    real = split(RegPoly.from_real([1, 2]), I, J)
    assert split_conjugate(real).allclose(real)
    assert split_conjugate(split(RegPoly([0, J]), I, J)).allclose(split(RegPoly([0, -J]), I, J))
    for _ in range(20):
        f = random_poly(rng)
        (u,) = sample_sphere_units(1, int(rng.integers(1 << 30)))
        assert split_conjugate(split(f, u)).allclose(split(regular_conjugate(f), u), 1e-12)


def test_ext_eval_examples():
    assert qclose(ext_eval(lambda z: z * z, J, unit=I), -ONE)
    a = Quaternion(1, -2, 0.5, 3)
    assert qclose(ext_eval(lambda z: a, Quaternion(0.3, 1, 2, -1), unit=I), a)
    s = split(RegPoly.linear(I), I, J)
    assert qclose(ext_eval(s, J), J - I)
    assert qclose(ext_eval(s, Quaternion(2.0)), Quaternion(2, -1))


def test_ext_eval_requires_unit_for_callables():
    with pytest.raises(ValueError):
        ext_eval(lambda z: z, J)


def test_ext_eval_reproduces_polynomial(rng):
    for _ in range(20):
        f = random_poly(rng, 6)
        (u,) = sample_sphere_units(1, int(rng.integers(1 << 30)))
        s = split(f, u)
        for _ in range(10):
            q = random_quaternion(rng, 1.5)
            assert abs(ext_eval(s, q) - evaluate(f, q)) <= 1e-10 * (1 + abs(evaluate(f, q)))
            assert abs(ext_eval(lambda z: evaluate(f, z), q, unit=u) - evaluate(f, q)) <= 1e-10 * (
                1 + abs(evaluate(f, q))
            )


def test_is_degenerate_examples():
    assert is_degenerate_sphere(Q2_PLUS_1, SphereLocus(0, 2))
    assert not is_degenerate_sphere(Q2_PLUS_1, SphereLocus(1, 1))
    assert not is_degenerate_sphere(RegPoly.identity(), SphereLocus(0.3, 0.2))
    with pytest.raises(DegenerateLocusError):
        is_degenerate_sphere(Q2_PLUS_1, SphereLocus(1, 0))


def test_degenerate_loci_of_square_plus_one():
    xs = np.linspace(-2, 2, 41)
    ys = np.linspace(0.1, 2, 20)
    flags = degenerate_loci(Q2_PLUS_1, xs, ys)
    step = xs[1] - xs[0]
    expected = (np.abs(xs) <= step + 1e-12)[:, None] & np.ones(len(ys), bool)[None, :]
    assert np.array_equal(flags, expected)
    # constant on sampled sphere points; not interior to the degenerate set
    for y in ys[::4]:
        s = SphereLocus(0.0, y)
        vals = [evaluate(Q2_PLUS_1, s.point(u)) for u in sample_sphere_units(20, 5)]
        assert max(abs(v - vals[0]) for v in vals) <= 1e-10
        assert has_nondegenerate_neighbor(Q2_PLUS_1, s)


def test_degenerate_loci_rejects_real_axis():
    with pytest.raises(DegenerateLocusError):
        degenerate_loci(Q2_PLUS_1, [0.0], [0.0, 1.0])


def test_near_degenerate():
    assert near_degenerate(Q2_PLUS_1, I)
    assert near_degenerate(Q2_PLUS_1, Quaternion(5e-4, 0, 1, 0))
    assert not near_degenerate(Q2_PLUS_1, Quaternion(1, 0, 1, 0))
    assert not near_degenerate(Q2_PLUS_1, Quaternion(0.01, 0, 1, 0))
    # real points are not in the degenerate set; q^2+1 has f'(2) = 4
    assert not near_degenerate(Q2_PLUS_1, Quaternion(2.0))
    assert not near_degenerate(RegPoly.identity(), Quaternion(1, 0, 0.3, 0))
