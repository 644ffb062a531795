"""Zero sets of polynomials: real points, isolated points and whole spheres.

The zeros of ``f`` sit on the spheres ``x + yS`` through the roots of the
real polynomial ``f^s = f * f^c``.  On each such sphere ``f(x + yI) = b +
I c``; either ``b = c = 0`` (the whole sphere vanishes) or the unique zero
is at ``I = -b c^-1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import DegenerateLocusError, InconsistencyError, ZeroPolynomialError
from .quat import ImaginaryUnit, Quaternion
from .regpoly import RegPoly, evaluate, star_mul, symmetrization
from .slicerep import SphereLocus, sphere_pair

DK_TOL = 1e-12
DK_MAX_SWEEPS = 500
DK_ANGLE_OFFSET = 0.4
CLUSTER_TOL = 1e-8
REALITY_TOL = 1e-12
C_CUTOFF = 1e-9
UNIT_CHECK_TOL = 1e-7
ZERO_TOL = 1e-8


# --- complex roots of real polynomials ---------------------------------------


def _durand_kerner(monic: np.ndarray, tol: float, max_sweeps: int):
    """Simultaneous iteration on a monic polynomial (descending coefficients).

    Returns the iterates and their inclusion radii ``n |W_k|``.
    """
    n = len(monic) - 1
    radius = 1.0 + float(np.max(np.abs(monic[1:])))
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + DK_ANGLE_OFFSET))

    def correction(z):
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        denom = np.prod(diff, axis=1)
        p = np.polyval(monic, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            w = p / denom
        return np.where(np.isfinite(w), w, 0.0)

    for _ in range(max_sweeps):
        w = correction(z)
        z = z - w
        if np.max(np.abs(w)) <= tol * max(1.0, float(np.max(np.abs(z)))):
            break
    return z, n * np.abs(correction(z))


def _clusters(z: np.ndarray, radii: np.ndarray, tol: float) -> list:
    """Group iterates whose inclusion discs (padded by ``tol``) overlap."""
    n = len(z)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(n):
        for b in range(a + 1, n):
            if abs(z[a] - z[b]) <= radii[a] + radii[b] + tol:
                parent[find(a)] = find(b)
    groups = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    return list(groups.values())


def _polish(desc: np.ndarray, z0: complex, m: int, real: bool) -> complex:
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    p = np.polyder(desc, m - 1) if m > 1 else desc
    dp = np.polyder(p)
    z = float(z0.real) if real else complex(z0)
    best, best_val = z, abs(np.polyval(p, z))
    for _ in range(50):
        d = np.polyval(dp, z)
        if d == 0:
            break
        step = np.polyval(p, z) / d
        z = z - step
        val = abs(np.polyval(p, z))
        if val < best_val:
            best, best_val = z, val
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return complex(best)


def complex_roots_real_poly(coeffs, cluster_tol: float = CLUSTER_TOL) -> List[complex]:
    """All complex roots, with multiplicity, of a real polynomial.

    ``coeffs`` are real and in ascending degree.  Roots closer than their
    inclusion radii are merged into one cluster, polished, and repeated by
    multiplicity; the output is closed under conjugation.
    """
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size == 0:
        raise ZeroPolynomialError("the zero polynomial has no isolated roots")
    if c.size == 1:
        raise ValueError("a nonzero constant has no roots; degree must be >= 1")
    desc = c[::-1]
    monic = desc / desc[0]
    z, radii = _durand_kerner(monic, DK_TOL, DK_MAX_SWEEPS)
    roots = []
    for group in _clusters(z, radii, cluster_tol):
        m = len(group)
        centre = complex(np.mean(z[group]))
        spread = float(np.max(np.abs(z[group] - centre)) + np.max(radii[group]))
        is_real = abs(centre.imag) <= max(spread, cluster_tol)
        if not is_real and centre.imag < 0:
            continue  # reconstructed from the upper half plane
        root = _polish(monic, centre, m, is_real)
        if is_real:
            roots.extend([complex(root.real, 0.0)] * m)
        else:
            roots.extend([root] * m + [root.conjugate()] * m)
    roots.sort(key=lambda r: (r.real, r.imag))
    return roots


# --- classification ------------------------------------------------------------


class ZeroKind(str, enum.Enum):
    ISOLATED = "point"
    SPHERICAL = "sphere"
    REAL = "real"


@dataclass(frozen=True)
class ZeroEntry:
    kind: ZeroKind
    point: Optional[Quaternion] = None
    locus: Optional[SphereLocus] = None
    multiplicity: int = 1  # from root clustering of f^s; not interpreted

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        if self.point is not None:
            out["point"] = self.point.to_list()
        if self.kind is ZeroKind.SPHERICAL:
            out["locus"] = self.locus.to_dict()
        return out

    def distance(self, q) -> float:
        """Distance from ``q`` to this zero (point or sphere)."""
        if self.kind is ZeroKind.SPHERICAL:
            return self.locus.distance(q)
        return abs(Quaternion.coerce(q) - self.point)


class SphereZeroClass:
    """Outcome of solving ``b + I c = 0`` on a sphere."""

    __slots__ = ("kind", "unit")

    WHOLE = "whole"
    POINT = "point"
    NONE = "none"

    def __init__(self, kind: str, unit: Optional[ImaginaryUnit] = None):
        self.kind = kind
        self.unit = unit

    def __repr__(self):
        return f"SphereZeroClass({self.kind!r}, {self.unit!r})" if self.unit else f"SphereZeroClass({self.kind!r})"

    @classmethod
    def whole(cls):
        return cls(cls.WHOLE)

    @classmethod
    def point(cls, unit):
        return cls(cls.POINT, unit)

    @classmethod
    def none(cls):
        return cls(cls.NONE)


def classify_on_sphere(f: RegPoly, s: SphereLocus, c_cutoff: Optional[float] = None) -> SphereZeroClass:
    if s.y <= 0.0:
        raise DegenerateLocusError("classification needs a sphere with y > 0")
    tol = C_CUTOFF * (1.0 + f.scale()) if c_cutoff is None else c_cutoff
    pair = sphere_pair(f, s)
    nb, nc = abs(pair.b), abs(pair.c)
    if nb <= tol and nc <= tol:
        return SphereZeroClass.whole()
    if nc <= tol:
        return SphereZeroClass.none()
    cand = -(pair.b * pair.c.inverse())
    if abs(cand.w) > UNIT_CHECK_TOL or abs(abs(cand) - 1.0) > UNIT_CHECK_TOL:
        return SphereZeroClass.none()
    return SphereZeroClass.point(ImaginaryUnit.normalize(cand))


def find_zeros(f: RegPoly, tol: float = ZERO_TOL) -> List[ZeroEntry]:
    """Complete zero set of a nonzero polynomial.

    Raises
    ------
    ZeroPolynomialError
        If ``f`` is identically zero.
    InconsistencyError
        If a sphere carrying roots of ``f^s`` yields no zero of ``f``, or a
        reported zero fails to evaluate below ``tol`` (scaled by the
        coefficients); both signal numerical breakdown.
    """
    if f.is_zero():
        raise ZeroPolynomialError("the zero polynomial vanishes everywhere")
    if f.degree == 0:
        return []
    fs = symmetrization(f)
    if not fs.is_real(REALITY_TOL * max(1.0, fs.scale())):
        raise InconsistencyError("symmetrization has non-real coefficients")
    check_tol = tol * (1.0 + f.scale())
    entries: List[ZeroEntry] = []
    roots = complex_roots_real_poly(fs.real_coeffs())
    seen = []
    for r in roots:
        key = (round(r.real, 9), round(abs(r.imag), 9))
        if key in seen:
            continue
        seen.append(key)
        mult = sum(1 for t in roots if t == r)
        if r.imag == 0.0:
            p = Quaternion(r.real)
            if abs(evaluate(f, p)) > check_tol:
                raise InconsistencyError(f"real root {r.real!r} of f^s is not a zero of f")
            entries.append(ZeroEntry(ZeroKind.REAL, point=p, multiplicity=mult))
            continue
        s = SphereLocus(r.real, abs(r.imag))
        cls = classify_on_sphere(f, s)
        if cls.kind == SphereZeroClass.WHOLE:
            entries.append(ZeroEntry(ZeroKind.SPHERICAL, locus=s, multiplicity=mult))
        elif cls.kind == SphereZeroClass.POINT:
            p = s.point(cls.unit)
            if abs(evaluate(f, p)) > check_tol:
                raise InconsistencyError(f"isolated zero candidate {p} does not evaluate to zero")
            entries.append(ZeroEntry(ZeroKind.ISOLATED, point=p, locus=s, multiplicity=mult))
        else:
            raise InconsistencyError(f"f^s vanishes on sphere {s} but f has no zero there")
    return entries


def product_zero_check(f: RegPoly, g: RegPoly, q, tol: float = ZERO_TOL) -> bool:
    """Decide ``(f*g)(q) == 0`` through the factor dichotomy.

    Either ``f(q) = 0``, or ``g`` vanishes at ``f(q)^-1 q f(q)``.
    """
    q = Quaternion.coerce(q)
    fq = evaluate(f, q)
    if abs(fq) <= tol:
        return True
    moved = fq.inverse() * q * fq
    return abs(evaluate(g, moved)) * abs(fq) <= tol


def zeros_to_dict(entries: List[ZeroEntry]) -> dict:
    return {"zeros": [e.to_dict() for e in entries]}


def star_product_zero(f: RegPoly, g: RegPoly, q, tol: float = ZERO_TOL) -> bool:
    """Direct check ``|(f*g)(q)| <= tol`` used to cross-validate the dichotomy."""
    return abs(evaluate(star_mul(f, g), q)) <= tol
