"""Regular reciprocal, the sphere-preserving transform T_f, rational expressions.

Expressions are kept as trees over polynomial leaves and evaluated
pointwise; a ``star`` node uses ``(A*B)(q) = A(q) B(A(q)^-1 q A(q))``,
which holds for any regular factors and therefore also for reciprocals.
"""
from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .errors import ParseError, PoleError
from .quat import Quaternion, abs_arr, inv_arr, mul_arr
from .regpoly import VANISH_TOL, RegPoly, evaluate, regular_conjugate, symmetrization

POLE_TOL = 1e-10


def _pole_tol(fs: RegPoly) -> float:
    return POLE_TOL * (1.0 + fs.scale())


def reciprocal_eval(f: RegPoly, q) -> Quaternion:
    """``f^-*(q) = f^s(q)^-1 f^c(q)``; raises PoleError on the zero set of ``f^s``."""
    q = Quaternion.coerce(q)
    fs = symmetrization(f)
    sq = evaluate(fs, q)
    if abs(sq) <= _pole_tol(fs):
        raise PoleError(f"{q} is a pole of the reciprocal of {f}", leaf=f, point=q)
    return sq.inverse() * evaluate(regular_conjugate(f), q)


def transform_Tf(f: RegPoly, q) -> Quaternion:
    """``T_f(q) = f^c(q)^-1 q f^c(q)``."""
    q = Quaternion.coerce(q)
    fc = evaluate(regular_conjugate(f), q)
    if abs(fc) <= POLE_TOL * (1.0 + f.scale()):
        raise PoleError(f"f^c vanishes at {q}; T_f is undefined there", leaf=f, point=q)
    return fc.inverse() * q * fc


def reciprocal_via_transform(f: RegPoly, q) -> Quaternion:
    """The alternative formula ``1 / f(T_f(q))``."""
    return evaluate(f, transform_Tf(f, q)).inverse()


# --- expression trees ------------------------------------------------------------


class RationalExpr:
    """Base class for expression nodes; call with a quaternion to evaluate."""

    op = ""

    def __call__(self, q) -> Quaternion:
        return Quaternion.from_array(self.eval_array(Quaternion.coerce(q).to_array()))

    def eval_array(self, qs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def scale(self) -> float:
        return 1.0

    def to_dict(self) -> dict:
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    # convenience operators
    def __add__(self, other):
        if isinstance(other, RationalExpr):
            return Sum(self, other)
        if isinstance(other, RegPoly):
            return Sum(self, Leaf(other))
        return ConstShift(self, Quaternion.coerce(other))

    def star(self, other: "RationalExpr") -> "RationalExpr":
        return Star(self, other)


class Leaf(RationalExpr):
    op = "leaf"

    def __init__(self, poly: RegPoly):
        self.poly = poly

    def eval_array(self, qs):
        return self.poly.eval_array(qs)

    def scale(self):
        return self.poly.scale()

    def to_dict(self):
        return self.poly.to_dict()

    def __repr__(self):
        return f"Leaf({self.poly!r})"


class Sum(RationalExpr):
    op = "sum"

    def __init__(self, *args: RationalExpr):
        if not args:
            raise ValueError("sum needs at least one argument")
        self.args = tuple(_as_expr(a) for a in args)

    def eval_array(self, qs):
        out = self.args[0].eval_array(qs)
        for a in self.args[1:]:
            out = out + a.eval_array(qs)
        return out

    def scale(self):
        return max(a.scale() for a in self.args)

    def to_dict(self):
        return {"op": self.op, "args": [a.to_dict() for a in self.args]}

    def __repr__(self):
        return f"Sum{self.args!r}"


class _Product(RationalExpr):
    """Regular product of two expressions, evaluated by the pointwise formula."""

    def __init__(self, left: RationalExpr, right: RationalExpr):
        self.left = left
        self.right = right

    def eval_array(self, qs):
        qs = np.asarray(qs, dtype=float)
        lq = self.left.eval_array(qs)
        vanish = abs_arr(lq) < VANISH_TOL * (1.0 + self.left.scale())
        safe = np.where(vanish[..., None], np.array([1.0, 0.0, 0.0, 0.0]), lq)
        moved = mul_arr(mul_arr(inv_arr(safe), qs), safe)
        out = mul_arr(safe, self.right.eval_array(moved))
        return np.where(vanish[..., None], 0.0, out)

    def scale(self):
        return max(self.left.scale(), self.right.scale())


class Star(RationalExpr):
    op = "star"

    def __init__(self, *args: RationalExpr):
        if not args:
            raise ValueError("star needs at least one argument")
        self.args = tuple(_as_expr(a) for a in args)
        node = self.args[0]
        for a in self.args[1:]:
            node = _Product(node, a)
        self._node = node

    def eval_array(self, qs):
        return self._node.eval_array(qs)

    def scale(self):
        return self._node.scale()

    def to_dict(self):
        return {"op": self.op, "args": [a.to_dict() for a in self.args]}

    def __repr__(self):
        return f"Star{self.args!r}"


class Recip(RationalExpr):
    """Regular reciprocal of a polynomial leaf.

    The leaf's symmetrization is kept for pole testing.
    """

    op = "recip"

    def __init__(self, poly: RegPoly):
        if isinstance(poly, Leaf):
            poly = poly.poly
        if not isinstance(poly, RegPoly):
            raise TypeError("recip applies to polynomial leaves only")
        self.poly = poly
        self.sym = symmetrization(poly)
        self.conj = regular_conjugate(poly)
        self._tol = _pole_tol(self.sym)

    def eval_array(self, qs):
        qs = np.asarray(qs, dtype=float)
        sq = self.sym.eval_array(qs)
        bad = abs_arr(sq) <= self._tol
        if np.any(bad):
            point = Quaternion.from_array(qs.reshape(-1, 4)[int(np.argmax(bad.reshape(-1)))])
            raise PoleError(f"pole of recip({self.poly}) at {point}", leaf=self.poly, point=point)
        return mul_arr(inv_arr(sq), self.conj.eval_array(qs))

    def scale(self):
        return self.poly.scale()

    def to_dict(self):
        return {"op": self.op, "args": [self.poly.to_dict()]}

    def __repr__(self):
        return f"Recip({self.poly!r})"


class ConstShift(RationalExpr):
    op = "const-shift"

    def __init__(self, arg: RationalExpr, shift):
        self.arg = _as_expr(arg)
        self.shift = Quaternion.coerce(shift)

    def eval_array(self, qs):
        return self.arg.eval_array(qs) + self.shift.to_array()

    def scale(self):
        return max(self.arg.scale(), abs(self.shift))

    def to_dict(self):
        return {"op": self.op, "args": [self.arg.to_dict(), self.shift.to_list()]}

    def __repr__(self):
        return f"ConstShift({self.arg!r}, {self.shift!r})"


def _as_expr(value) -> RationalExpr:
    if isinstance(value, RationalExpr):
        return value
    if isinstance(value, RegPoly):
        return Leaf(value)
    raise TypeError(f"cannot use {type(value).__name__} as an expression node")


def rational_eval(e: RationalExpr, q) -> Quaternion:
    return e(q)


def expr_from_dict(data) -> RationalExpr:
    """Parse the nested ``{"op": ..., "args": [...]}`` format; bare polynomials are leaves."""
    if not isinstance(data, dict):
        raise ParseError("expression node must be a JSON object")
    if "coeffs" in data:
        return Leaf(RegPoly.from_dict(data))
    op = data.get("op")
    args = data.get("args")
    if not isinstance(args, list) or not args:
        raise ParseError(f'node {op!r} needs a non-empty "args" list')
    if op == "sum":
        return Sum(*(expr_from_dict(a) for a in args))
    if op == "star":
        return Star(*(expr_from_dict(a) for a in args))
    if op == "recip":
        if len(args) != 1 or not isinstance(args[0], dict) or "coeffs" not in args[0]:
            raise ParseError("recip takes exactly one polynomial argument")
        return Recip(RegPoly.from_dict(args[0]))
    if op == "const-shift":
        if len(args) != 2:
            raise ParseError("const-shift takes an expression and a 4-array")
        shift = args[1]
        if not (isinstance(shift, list) and len(shift) == 4 and all(isinstance(v, (int, float)) for v in shift)):
            raise ParseError("const-shift constant must be an array of 4 numbers")
        return ConstShift(expr_from_dict(args[0]), Quaternion.from_array(shift))
    raise ParseError(f"unknown expression op {op!r}")


def expr_from_json(text: str) -> RationalExpr:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return expr_from_dict(data)


def inverse_square_plus_one() -> RationalExpr:
    """``q^-2 + 1`` built as ``recip(q^2)`` shifted by one."""
    return ConstShift(Recip(RegPoly([0.0, 0.0, 1.0])), 1.0)


def star_with_reciprocal(f: RegPoly, q, reciprocal_first: bool = False) -> Quaternion:
    """Evaluate ``f * f^-*`` (or ``f^-* * f``) at ``q`` through the product formula."""
    pair: Sequence[RationalExpr] = (Recip(f), Leaf(f)) if reciprocal_first else (Leaf(f), Recip(f))
    return Star(*pair)(q)
