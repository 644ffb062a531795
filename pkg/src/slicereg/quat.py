"""Quaternion arithmetic and slice coordinates.

Scalar values are immutable :class:`Quaternion` objects.  Batches of
quaternions are plain ``(..., 4)`` float arrays ordered ``(w, x, y, z)``;
the ``*_arr`` helpers operate on those and are what the grid probes use.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ParseError, ZeroDivisorError

UNIT_TOL = 1e-12

Real = Union[int, float]


@dataclass(frozen=True, slots=True, eq=False)
class Quaternion:
    """q = w + x i + y j + z k with float components."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __post_init__(self):
        for name in ("w", "x", "y", "z"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"quaternion component {name} is not finite: {v!r}")
            object.__setattr__(self, name, v)

    def __eq__(self, other):
        if not isinstance(other, Quaternion):
            return NotImplemented
        return (self.w, self.x, self.y, self.z) == (other.w, other.x, other.y, other.z)

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))

    # construction helpers

    @classmethod
    def from_array(cls, a: Sequence[float]) -> "Quaternion":
        if len(a) != 4:
            raise ValueError(f"expected 4 components, got {len(a)}")
        return cls(*(float(v) for v in a))

    @classmethod
    def coerce(cls, value) -> "Quaternion":
        """Accept a Quaternion, a real number or a 4-sequence."""
        if isinstance(value, Quaternion):
            return value
        if isinstance(value, (int, float, np.floating, np.integer)):
            return cls(float(value))
        return cls.from_array(value)

    @classmethod
    def parse(cls, text: str) -> "Quaternion":
        return parse_quaternion(text)

    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def to_list(self) -> list:
        return [self.w, self.x, self.y, self.z]

    # algebra

    def __add__(self, other):
        try:
            o = Quaternion.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Quaternion(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = Quaternion.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return Quaternion(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other, self.y * other, self.z * other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            if other == 0:
                raise ZeroDivisorError("division by zero")
            return self * (1.0 / other)
        # right division a / b = a b^{-1}
        if isinstance(other, Quaternion):
            return mul(self, other.inverse())
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm2(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self) -> float:
        return math.sqrt(self.norm2())

    def inverse(self) -> "Quaternion":
        n2 = self.norm2()
        if n2 == 0.0:
            raise ZeroDivisorError("cannot invert the zero quaternion")
        return Quaternion(self.w / n2, -self.x / n2, -self.y / n2, -self.z / n2)

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> "Quaternion":
        return Quaternion(0.0, self.x, self.y, self.z)

    @property
    def vector(self) -> tuple:
        return (self.x, self.y, self.z)

    def is_real(self, tol: float = 0.0) -> bool:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z) <= tol

    def __str__(self) -> str:
        return format_quaternion(self)


ZERO = Quaternion()
ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


class ImaginaryUnit(Quaternion):
    """A quaternion on the unit sphere of imaginary units (u*u == -1)."""

    __slots__ = ()

    def __post_init__(self):
        Quaternion.__post_init__(self)
        if abs(self.w) > UNIT_TOL:
            raise ValueError(f"imaginary unit has nonzero real part {self.w!r}")
        if abs(math.sqrt(self.x**2 + self.y**2 + self.z**2) - 1.0) > UNIT_TOL:
            raise ValueError("imaginary unit must have norm 1")

    @classmethod
    def normalize(cls, q) -> "ImaginaryUnit":
        """Project the imaginary part of ``q`` onto the unit sphere."""
        q = Quaternion.coerce(q)
        n = math.sqrt(q.x**2 + q.y**2 + q.z**2)
        if n == 0.0:
            raise ValueError("cannot normalize a real quaternion to an imaginary unit")
        return cls(0.0, q.x / n, q.y / n, q.z / n)


def mul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product ``a b``."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


def conj_norm_inv(q: Quaternion) -> tuple:
    """Return ``(conjugate, norm, inverse)``; raises ZeroDivisorError for q == 0."""
    q = Quaternion.coerce(q)
    return q.conj(), abs(q), q.inverse()


class SliceCoords(NamedTuple):
    """``q = x + y*unit`` with ``y >= 0``; ``unit`` is None on the real axis."""

    x: float
    y: float
    unit: Optional[ImaginaryUnit]

    @property
    def on_real_axis(self) -> bool:
        return self.unit is None

    def reconstruct(self) -> Quaternion:
        if self.unit is None:
            return Quaternion(self.x)
        return Quaternion(self.x) + self.unit * self.y


def decompose(q: Quaternion) -> SliceCoords:
    q = Quaternion.coerce(q)
    y = math.sqrt(q.x * q.x + q.y * q.y + q.z * q.z)
    if y == 0.0:
        return SliceCoords(q.w, 0.0, None)
    return SliceCoords(q.w, y, ImaginaryUnit(0.0, q.x / y, q.y / y, q.z / y))


def sample_sphere_units(n: int, seed: int = 0) -> list:
    """Draw ``n`` imaginary units uniformly from the unit 2-sphere."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((n, 3))
    norms = np.linalg.norm(v, axis=1)
    # a zero draw has probability zero; redraw defensively anyway
    while np.any(norms == 0.0):
        bad = norms == 0.0
        v[bad] = rng.standard_normal((int(bad.sum()), 3))
        norms = np.linalg.norm(v, axis=1)
    v /= norms[:, None]
    return [ImaginaryUnit.normalize(Quaternion(0.0, *row)) for row in v]


def orthogonal_unit(u: Quaternion) -> ImaginaryUnit:
    """Deterministic unit orthogonal to ``u``.

    Starts from whichever of i, j, k is most orthogonal to ``u`` and
    applies one Gram-Schmidt step.
    """
    u = ImaginaryUnit.normalize(u)
    vec = np.array(u.vector)
    e = np.eye(3)[int(np.argmin(np.abs(vec)))]
    w = e - np.dot(e, vec) * vec
    return ImaginaryUnit.normalize(Quaternion(0.0, *w))


# --- text format -----------------------------------------------------------

_NUM = r"(?:\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
_TERM = re.compile(rf"([+-]?)({_NUM})?([ijk]?)")


def parse_quaternion(text: str) -> Quaternion:
    """Parse literals such as ``1-2i+0.5k``, ``-j`` or ``3``."""
    s = str(text).strip()
    if not s:
        raise ParseError("empty quaternion literal")
    if any(ch.isspace() for ch in s):
        raise ParseError(f"whitespace inside quaternion literal {text!r}")
    parts = {"": 0.0, "i": 0.0, "j": 0.0, "k": 0.0}
    seen = set()
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"bad quaternion literal {text!r} at offset {pos}")
        sign, num, unit = m.groups()
        if num is None and not unit:
            raise ParseError(f"bad quaternion literal {text!r} at offset {pos}")
        if pos > 0 and not sign:
            raise ParseError(f"missing sign between terms in {text!r}")
        if unit in seen:
            raise ParseError(f"repeated term {unit or 'real'!r} in {text!r}")
        seen.add(unit)
        value = float(num) if num is not None else 1.0
        parts[unit] = -value if sign == "-" else value
        pos = m.end()
    return Quaternion(parts[""], parts["i"], parts["j"], parts["k"])


def _fmt(v: float) -> str:
    # repr is the shortest string that round-trips the double exactly
    r = repr(float(v))
    return r[:-2] if r.endswith(".0") else r


def format_quaternion(q: Quaternion) -> str:
    terms = []
    for value, unit in ((q.w, ""), (q.x, "i"), (q.y, "j"), (q.z, "k")):
        if value == 0.0:
            continue
        body = _fmt(abs(value)) + unit
        sign = "-" if math.copysign(1.0, value) < 0 else "+"
        terms.append((sign, body))
    if not terms:
        return "0"
    first_sign, first = terms[0]
    out = ("-" if first_sign == "-" else "") + first
    return out + "".join(sign + body for sign, body in terms[1:])


# --- array helpers -----------------------------------------------------------


def as_array(qs: Union[Quaternion, Iterable]) -> np.ndarray:
    if isinstance(qs, Quaternion):
        return qs.to_array()
    arr = np.asarray([q.to_array() if isinstance(q, Quaternion) else q for q in qs], dtype=float)
    return arr


def mul_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product of ``(..., 4)`` arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def conj_arr(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def abs_arr(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a, dtype=float) ** 2, axis=-1))


def inv_arr(a: np.ndarray) -> np.ndarray:
    n2 = np.sum(np.asarray(a, dtype=float) ** 2, axis=-1)
    if np.any(n2 == 0.0):
        raise ZeroDivisorError("cannot invert the zero quaternion")
    return conj_arr(a) / n2[..., None]
