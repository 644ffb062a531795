"""Polynomials sum_n q^n a_n with quaternion coefficients on the right."""
from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from .errors import ParseError
from .quat import Quaternion, as_array, inv_arr, mul_arr

#: trailing coefficients below this magnitude are dropped after arithmetic
TRIM_TOL = 1e-13
#: relative cutoff for the vanishing-left-factor branch of the product formula
VANISH_TOL = 1e-13


class RegPoly:
    """Immutable polynomial ``f(q) = sum_n q^n a_n``.

    Coefficients are stored as an ``(N+1, 4)`` float array in ascending
    degree.  The zero polynomial has no coefficients and degree -1.

    Parameters
    ----------
    coeffs : iterable
        Quaternions, real numbers or 4-sequences, lowest degree first.
    trim_tol : float
        Trailing coefficients with magnitude below this are stripped.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable = (), trim_tol: float = TRIM_TOL):
        if isinstance(coeffs, np.ndarray) and coeffs.ndim == 2:
            arr = np.array(coeffs, dtype=float)
        else:
            rows = [Quaternion.coerce(c).to_array() for c in coeffs]
            arr = np.array(rows, dtype=float).reshape(len(rows), 4)
        if arr.ndim != 2 or arr.shape[1] != 4:
            raise ValueError("coefficient array must have shape (n, 4)")
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        n = arr.shape[0]
        while n > 0 and np.linalg.norm(arr[n - 1]) < trim_tol:
            n -= 1
        arr = arr[:n].copy()
        arr.setflags(write=False)
        self._c = arr

    # construction

    @classmethod
    def constant(cls, a) -> "RegPoly":
        return cls([a])

    @classmethod
    def identity(cls) -> "RegPoly":
        return cls([0.0, 1.0])

    @classmethod
    def linear(cls, p) -> "RegPoly":
        """The factor ``q - p``."""
        return cls([-Quaternion.coerce(p), 1.0])

    @classmethod
    def from_real(cls, coeffs: Sequence[float]) -> "RegPoly":
        return cls([float(c) for c in coeffs])

    # properties

    @property
    def array(self) -> np.ndarray:
        return self._c

    @property
    def coeffs(self) -> list:
        return [Quaternion.from_array(row) for row in self._c]

    @property
    def degree(self) -> int:
        return self._c.shape[0] - 1

    def is_zero(self) -> bool:
        return self._c.shape[0] == 0

    def is_real(self, tol: float = 0.0) -> bool:
        """True when every coefficient is real to within ``tol``."""
        if self.is_zero():
            return True
        return float(np.max(np.abs(self._c[:, 1:]))) <= tol

    def scale(self) -> float:
        """Largest coefficient magnitude (0 for the zero polynomial)."""
        if self.is_zero():
            return 0.0
        return float(np.max(np.linalg.norm(self._c, axis=1)))

    def real_coeffs(self) -> np.ndarray:
        return self._c[:, 0].copy()

    # evaluation

    def __call__(self, q) -> Quaternion:
        return evaluate(self, q)

    def eval_array(self, qs: np.ndarray) -> np.ndarray:
        """Evaluate at a ``(..., 4)`` array of points (Horner, left multiplication)."""
        qs = np.asarray(qs, dtype=float)
        out = np.zeros(qs.shape, dtype=float)
        for a in self._c[::-1]:
            out = mul_arr(qs, out) + a
        return out

    # algebra

    def __add__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        n = max(self._c.shape[0], other._c.shape[0])
        out = np.zeros((n, 4))
        out[: self._c.shape[0]] += self._c
        out[: other._c.shape[0]] += other._c
        return RegPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return RegPoly(-self._c)

    def __sub__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        """``f * g`` is the regular (star) product."""
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return star_mul(self, other)

    def __rmul__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return other
        return star_mul(other, self)

    def conjugate(self) -> "RegPoly":
        return regular_conjugate(self)

    def symmetrization(self) -> "RegPoly":
        return symmetrization(self)

    def derivative(self) -> "RegPoly":
        """Slice derivative ``sum_n n q^(n-1) a_n``."""
        if self.degree < 1:
            return RegPoly()
        n = np.arange(1, self._c.shape[0], dtype=float)
        return RegPoly(self._c[1:] * n[:, None])

    def allclose(self, other: "RegPoly", atol: float = 1e-12) -> bool:
        """Coefficientwise comparison, padding the shorter polynomial with zeros."""
        n = max(self._c.shape[0], other._c.shape[0])
        a = np.zeros((n, 4))
        b = np.zeros((n, 4))
        a[: self._c.shape[0]] = self._c
        b[: other._c.shape[0]] = other._c
        return bool(np.all(np.abs(a - b) <= atol))

    def __eq__(self, other):
        if not isinstance(other, RegPoly):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def __repr__(self):
        return f"RegPoly({self._c.tolist()!r})"

    def __str__(self):
        if self.is_zero():
            return "0"
        terms = []
        for n, a in enumerate(self.coeffs):
            if a == Quaternion():
                continue
            power = "" if n == 0 else ("q" if n == 1 else f"q^{n}")
            terms.append(f"{power}({a})" if power else f"({a})")
        return " + ".join(terms)

    # serialization

    def to_dict(self) -> dict:
        return {"coeffs": [[float(v) for v in row] for row in self._c]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data) -> "RegPoly":
        if not isinstance(data, dict) or "coeffs" not in data:
            raise ParseError('polynomial JSON must be an object with a "coeffs" key')
        rows = data["coeffs"]
        if not isinstance(rows, list):
            raise ParseError('"coeffs" must be a list')
        out = []
        for k, row in enumerate(rows):
            if (
                not isinstance(row, list)
                or len(row) != 4
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in row)
            ):
                raise ParseError(f"coefficient {k} must be an array of 4 numbers")
            out.append(row)
        try:
            return cls(np.array(out, dtype=float).reshape(len(out), 4))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc

    @classmethod
    def from_json(cls, text: str) -> "RegPoly":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def _as_poly(value):
    if isinstance(value, RegPoly):
        return value
    try:
        return RegPoly.constant(Quaternion.coerce(value))
    except (TypeError, ValueError):
        return NotImplemented


def evaluate(f: RegPoly, q) -> Quaternion:
    """Return ``sum_n q^n a_n``."""
    q = Quaternion.coerce(q)
    acc = Quaternion()
    for a in reversed(f.coeffs):
        acc = q * acc + a
    return acc


def star_mul(f: RegPoly, g: RegPoly) -> RegPoly:
    """Regular product: coefficient convolution keeping ``a_k`` left of ``b_(n-k)``."""
    if f.is_zero() or g.is_zero():
        return RegPoly()
    a, b = f.array, g.array
    out = np.zeros((a.shape[0] + b.shape[0] - 1, 4))
    for k in range(a.shape[0]):
        out[k : k + b.shape[0]] += mul_arr(a[k], b)
    return RegPoly(out)


def pointwise_product_formula(f: RegPoly, g: RegPoly, q) -> Quaternion:
    """Evaluate ``f*g`` at ``q`` as ``f(q) g(f(q)^-1 q f(q))``."""
    q = Quaternion.coerce(q)
    fq = f(q)
    if abs(fq) < VANISH_TOL * (1.0 + f.scale()):
        return Quaternion()
    inv = fq.inverse()
    return fq * g(inv * q * fq)


def product_formula_array(f: RegPoly, g, qs: np.ndarray) -> np.ndarray:
    """Vectorized :func:`pointwise_product_formula`; ``g`` needs ``eval_array``."""
    qs = np.asarray(qs, dtype=float)
    fq = f.eval_array(qs)
    nf = np.linalg.norm(fq, axis=-1)
    vanish = nf < VANISH_TOL * (1.0 + f.scale())
    safe = np.where(vanish[..., None], np.array([1.0, 0, 0, 0]), fq)
    moved = mul_arr(mul_arr(inv_arr(safe), qs), safe)
    out = mul_arr(safe, g.eval_array(moved))
    out[vanish] = 0.0
    return out


def regular_conjugate(f: RegPoly) -> RegPoly:
    c = np.array(f.array, copy=True)
    c[:, 1:] *= -1.0
    return RegPoly(c)


def symmetrization(f: RegPoly) -> RegPoly:
    """``f * f^c``; its coefficients are real up to rounding."""
    return star_mul(f, regular_conjugate(f))


def product_of_linear_factors(points: Iterable) -> RegPoly:
    """``(q - p_1) * (q - p_2) * ... `` in the given order."""
    out = RegPoly.constant(1.0)
    for p in points:
        out = star_mul(out, RegPoly.linear(p))
    return out


def as_points(qs) -> np.ndarray:
    """Normalize a Quaternion, list of Quaternions or array to a ``(..., 4)`` array."""
    if isinstance(qs, np.ndarray):
        return np.asarray(qs, dtype=float)
    return as_array(qs)
