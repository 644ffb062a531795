"""Sphere coefficients b, c; the splitting over a frame; extension from a slice.

For a regular function and a sphere ``x + yS`` the values are affine in
the unit: ``f(x + yI) = b + I c``.  This module computes ``b`` and ``c``
from two evaluations, splits polynomials over an orthonormal frame
``(I, J)`` into complex polynomials ``F + G J``, multiplies and conjugates
in split form, extends slice data back to all of H, and detects spheres on
which ``f`` is constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DegenerateLocusError, FrameError
from .quat import I as UNIT_I
from .quat import ImaginaryUnit, Quaternion, decompose, orthogonal_unit
from .regpoly import RegPoly

FRAME_TOL = 1e-10
DEGENERATE_TOL = 1e-9


@dataclass(frozen=True)
class SphereLocus:
    """The sphere ``x + y S``; ``y == 0`` is the real singleton ``{x}``."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("sphere locus coordinates must be finite")
        if self.y < 0:
            raise ValueError("sphere locus needs y >= 0")

    @classmethod
    def of(cls, q) -> "SphereLocus":
        """Sphere through ``q``."""
        sc = decompose(q)
        return cls(sc.x, sc.y)

    @property
    def is_real(self) -> bool:
        return self.y == 0.0

    def point(self, unit) -> Quaternion:
        return Quaternion(self.x) + Quaternion.coerce(unit) * self.y

    def distance(self, q) -> float:
        """Euclidean distance from ``q`` to the sphere."""
        sc = decompose(q)
        return math.hypot(sc.x - self.x, sc.y - self.y)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}

    @classmethod
    def from_dict(cls, data) -> "SphereLocus":
        return cls(data["x"], data["y"])


@dataclass(frozen=True)
class SpherePair:
    """Coefficients with ``f(x + yI) = b + I c`` for every unit ``I``."""

    b: Quaternion
    c: Quaternion

    def value(self, unit) -> Quaternion:
        return self.b + Quaternion.coerce(unit) * self.c

    def to_dict(self) -> dict:
        return {"b": self.b.to_list(), "c": self.c.to_list()}


Evaluatable = Union[RegPoly, Callable[[Quaternion], Quaternion]]


def sphere_pair(f: Evaluatable, s: SphereLocus, probe=None) -> SpherePair:
    """Compute ``b(x, y)`` and ``c(x, y)`` from the values at ``x +- y K``.

    ``probe`` is the unit ``K`` (default ``i``); the result does not depend
    on it.  On the real axis this returns ``(f(x), 0)``.
    """
    if s.y == 0.0:
        return SpherePair(f(Quaternion(s.x)), Quaternion())
    k = UNIT_I if probe is None else Quaternion.coerce(probe)
    plus = f(s.point(k))
    minus = f(s.point(-k))
    b = (plus + minus) * 0.5
    c = k * (minus - plus) * 0.5
    return SpherePair(b, c)


def sphere_pairs_array(f: RegPoly, xs: np.ndarray, ys: np.ndarray) -> tuple:
    """Vectorized ``(b, c)`` on broadcast arrays of ``x`` and ``y`` (probe ``i``)."""
    xs, ys = np.broadcast_arrays(np.asarray(xs, float), np.asarray(ys, float))
    plus = np.zeros(xs.shape + (4,))
    plus[..., 0] = xs
    plus[..., 1] = ys
    minus = plus.copy()
    minus[..., 1] = -ys
    fp = f.eval_array(plus)
    fm = f.eval_array(minus)
    b = 0.5 * (fp + fm)
    d = 0.5 * (fm - fp)
    # left multiplication by i
    c = np.stack([-d[..., 1], d[..., 0], -d[..., 3], d[..., 2]], axis=-1)
    return b, c


# --- splitting -------------------------------------------------------------


def _check_frame(i_unit: Quaternion, j_unit: Quaternion) -> tuple:
    try:
        iu = ImaginaryUnit.normalize(i_unit)
        ju = ImaginaryUnit.normalize(j_unit)
    except ValueError as exc:
        raise FrameError(str(exc)) from exc
    for given, unit in ((i_unit, iu), (j_unit, ju)):
        if abs(Quaternion.coerce(given) - unit) > FRAME_TOL:
            raise FrameError(f"{given} is not an imaginary unit")
    dot = float(np.dot(iu.vector, ju.vector))
    if abs(dot) > FRAME_TOL:
        raise FrameError(f"frame units are not orthogonal (inner product {dot:.3g})")
    return iu, ju


@dataclass(frozen=True, eq=False)
class SplitPair:
    """``f_I(z) = F(z) + G(z) J`` with F, G complex polynomials in ``L_I``.

    ``F`` and ``G`` are complex coefficient arrays (ascending degree); the
    complex number ``a + b*1j`` stands for ``a + b I``.
    """

    I: ImaginaryUnit
    J: ImaginaryUnit
    F: np.ndarray
    G: np.ndarray

    @property
    def K(self) -> Quaternion:
        return self.I * self.J

    def to_quaternion(self, alpha: complex) -> Quaternion:
        return Quaternion(alpha.real) + self.I * alpha.imag

    def to_complex(self, z) -> complex:
        """Coordinates of a point of ``L_I`` as a complex number."""
        z = Quaternion.coerce(z)
        return complex(z.w, float(np.dot(z.vector, self.I.vector)))

    def value(self, z) -> Quaternion:
        """``F(z) + G(z) J`` at a point ``z`` of ``L_I``."""
        zc = self.to_complex(z)
        fz = np.polyval(self.F[::-1], zc) if len(self.F) else 0j
        gz = np.polyval(self.G[::-1], zc) if len(self.G) else 0j
        return self.to_quaternion(complex(fz)) + self.to_quaternion(complex(gz)) * self.J

    __call__ = value

    def same_frame(self, other: "SplitPair", tol: float = 1e-12) -> bool:
        return abs(self.I - other.I) <= tol and abs(self.J - other.J) <= tol

    def to_regpoly(self) -> RegPoly:
        """The polynomial whose restriction to ``L_I`` is this pair."""
        n = max(len(self.F), len(self.G))
        F = np.zeros(n, complex)
        G = np.zeros(n, complex)
        F[: len(self.F)] = self.F
        G[: len(self.G)] = self.G
        return RegPoly([self.to_quaternion(a) + self.to_quaternion(b) * self.J for a, b in zip(F, G)])

    def allclose(self, other: "SplitPair", atol: float = 1e-12) -> bool:
        if not self.same_frame(other):
            return False
        return _poly_close(self.F, other.F, atol) and _poly_close(self.G, other.G, atol)


def _poly_close(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    n = max(len(a), len(b))
    pa = np.zeros(n, complex)
    pb = np.zeros(n, complex)
    pa[: len(a)] = a
    pb[: len(b)] = b
    return bool(np.all(np.abs(pa - pb) <= atol))


def split(f: RegPoly, I=None, J=None) -> SplitPair:
    """Split ``f`` over the frame ``(I, J)``.

    Each coefficient ``a = a0 + a1 I + a2 J + a3 IJ`` becomes
    ``(a0 + a1 I) + (a2 + a3 I) J``.  ``I`` defaults to ``i`` and ``J`` to
    the canonical unit orthogonal to ``I``.
    """
    I = UNIT_I if I is None else I
    J = orthogonal_unit(I) if J is None else J
    iu, ju = _check_frame(I, J)
    ku = iu * ju
    basis = np.array([iu.vector, ju.vector, ku.vector])
    c = f.array
    if c.shape[0] == 0:
        return SplitPair(iu, ju, np.zeros(0, complex), np.zeros(0, complex))
    comps = c[:, 1:] @ basis.T  # columns: along I, J, K
    F = c[:, 0] + 1j * comps[:, 0]
    G = comps[:, 1] + 1j * comps[:, 2]
    return SplitPair(iu, ju, F, G)


def _cmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, complex)
    return np.convolve(a, b)


def _cadd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, complex)
    out[: len(a)] += a
    out[: len(b)] += b
    return out


def split_mul(fs: SplitPair, gs: SplitPair) -> SplitPair:
    """Product in split form: ``[FH - G K^] + [FK + G H^] J``.

    ``P^`` denotes ``z -> conj(P(conj z))``, i.e. conjugated coefficients.
    """
    if not fs.same_frame(gs):
        raise FrameError("split pairs use different frames")
    F, G, H, K = fs.F, fs.G, gs.F, gs.G
    first = _cadd(_cmul(F, H), -_cmul(G, np.conj(K)))
    second = _cadd(_cmul(F, K), _cmul(G, np.conj(H)))
    return SplitPair(fs.I, fs.J, first, second)


def split_conjugate(fs: SplitPair) -> SplitPair:
    """``conj(F(conj z)) - G(z) J``."""
    return SplitPair(fs.I, fs.J, np.conj(fs.F), -np.asarray(fs.G))


def ext_eval(fs, q, unit=None) -> Quaternion:
    """Evaluate the regular extension of slice data at ``q``.

    ``fs`` is a :class:`SplitPair` or a callable defined on ``L_unit``
    (then ``unit`` is required).
    """
    if isinstance(fs, SplitPair):
        fI, I = fs.value, fs.I
    else:
        if unit is None:
            raise ValueError("slice callables need the unit of their slice")
        fI, I = fs, ImaginaryUnit.normalize(unit)
    sc = decompose(q)
    if sc.unit is None:
        return fI(Quaternion(sc.x))
    plus = fI(Quaternion(sc.x) + I * sc.y)
    minus = fI(Quaternion(sc.x) - I * sc.y)
    return (plus + minus) * 0.5 + sc.unit * (I * (minus - plus) * 0.5)


# --- degenerate spheres ------------------------------------------------------


def default_degenerate_tol(f: RegPoly) -> float:
    scale = f.scale()
    return DEGENERATE_TOL * (scale if scale > 0 else 1.0)


def is_degenerate_sphere(f: RegPoly, s: SphereLocus, tol: Optional[float] = None) -> bool:
    """True when ``f`` is constant on the sphere, i.e. ``|c(x, y)| <= tol``."""
    if s.y <= 0.0:
        raise DegenerateLocusError("degenerate spheres are defined only for y > 0")
    tol = default_degenerate_tol(f) if tol is None else tol
    return abs(sphere_pair(f, s).c) <= tol


def degenerate_loci(f: RegPoly, xs, ys, tol: Optional[float] = None, samples: int = 33) -> np.ndarray:
    """Flag grid loci lying within one axis step of a degenerate sphere.

    Returns a boolean array of shape ``(len(xs), len(ys))``.  A locus is
    flagged when ``|c|`` reaches ``tol`` at the locus itself or anywhere on
    the grid segment joining it to an axis neighbour.  All ``ys`` must be
    positive.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if np.any(ys <= 0):
        raise DegenerateLocusError("degenerate spheres are defined only for y > 0")
    tol = default_degenerate_tol(f) if tol is None else tol
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    _, c = sphere_pairs_array(f, X, Y)
    flags = np.linalg.norm(c, axis=-1) <= tol

    def c2(x, y):
        return float(np.sum(sphere_pairs_array(f, x, y)[1] ** 2))

    ts = np.linspace(0.0, 1.0, samples)

    def segment_hits(p0, p1) -> bool:
        px = p0[0] + ts * (p1[0] - p0[0])
        py = p0[1] + ts * (p1[1] - p0[1])
        vals = np.sum(sphere_pairs_array(f, px, py)[1] ** 2, axis=-1)
        k = int(np.argmin(vals))
        if vals[k] <= tol * tol:
            return True
        mags = np.sqrt(vals)
        # |c| cannot reach zero between samples if it stays above its local variation
        if mags[k] > 2.0 * float(np.max(np.abs(np.diff(mags)))):
            return False
        lo = ts[max(k - 1, 0)]
        hi = ts[min(k + 1, samples - 1)]
        res = minimize_scalar(
            lambda t: c2(p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-12},
        )
        return bool(res.fun <= tol * tol)

    nx, ny = X.shape
    for a in range(nx):
        for b in range(ny):
            p = (X[a, b], Y[a, b])
            for da, db in ((1, 0), (0, 1)):
                a2, b2 = a + da, b + db
                if a2 >= nx or b2 >= ny:
                    continue
                if flags[a, b] and flags[a2, b2]:
                    continue
                if segment_hits(p, (X[a2, b2], Y[a2, b2])):
                    flags[a, b] = flags[a2, b2] = True
    return flags


def _reduced_c(f: RegPoly, x: float, y: float) -> Quaternion:
    """``c(x, y) / y`` evaluated without division, so it extends to ``y = 0``.

    Uses ``(x + yK)^n = A_n + K y B_n`` with real ``A_n``, ``B_n``.
    """
    A, B = 1.0, 0.0
    acc = np.zeros(4)
    for n, a in enumerate(f.array):
        if n > 0:
            A, B = x * A - y * y * B, x * B + A
        acc += B * a
    return Quaternion.from_array(acc)


def near_degenerate(f: RegPoly, q, radius: float = 1e-3, tol: Optional[float] = None) -> bool:
    """Conservative test for a degenerate sphere within ``radius`` of ``q``.

    Works with ``c/y`` (which vanishes exactly on degenerate spheres and
    stays meaningful near the real axis) and a first-order bound on its
    variation over the disc of the given radius in the ``(x, y)`` plane.
    """
    tol = default_degenerate_tol(f) if tol is None else tol
    s = SphereLocus.of(q)
    h = 1e-6
    c0 = _reduced_c(f, s.x, s.y)
    dx = abs(_reduced_c(f, s.x + h, s.y) - _reduced_c(f, s.x - h, s.y)) / (2 * h)
    dy = abs(_reduced_c(f, s.x, s.y + h) - _reduced_c(f, s.x, s.y - h)) / (2 * h)
    return abs(c0) <= tol + radius * (dx + dy)


def has_nondegenerate_neighbor(
    f: RegPoly, s: SphereLocus, radius: float = 1e-3, tol: Optional[float] = None, count: int = 8
) -> bool:
    """Spot check that a locus is not interior to the degenerate set."""
    for t in np.linspace(0.0, 2 * np.pi, count, endpoint=False):
        y = s.y + radius * math.sin(t)
        if y <= 0:
            continue
        if not is_degenerate_sphere(f, SphereLocus(s.x + radius * math.cos(t), y), tol):
            return True
    return False
