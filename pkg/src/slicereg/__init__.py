"""Slice-regular quaternionic polynomials and their zero sets."""

from .errors import (
    DegenerateLocusError,
    DomainError,
    FrameError,
    InconsistencyError,
    ParseError,
    PoleError,
    ZeroDivisorError,
    ZeroPolynomialError,
)
from .quat import I, J, K, ONE, ZERO, ImaginaryUnit, Quaternion, decompose, parse_quaternion
from .rational import RationalExpr, reciprocal_eval, transform_Tf
from .regpoly import RegPoly, regular_conjugate, star_mul, symmetrization
from .slicerep import SphereLocus, SpherePair, SplitPair, sphere_pair, split
from .zeros import ZeroEntry, ZeroKind, find_zeros

__version__ = "0.1.0"

__all__ = [
    "DegenerateLocusError",
    "DomainError",
    "FrameError",
    "I",
    "ImaginaryUnit",
    "InconsistencyError",
    "J",
    "K",
    "ONE",
    "ParseError",
    "PoleError",
    "Quaternion",
    "RationalExpr",
    "RegPoly",
    "SphereLocus",
    "SpherePair",
    "SplitPair",
    "ZERO",
    "ZeroDivisorError",
    "ZeroEntry",
    "ZeroKind",
    "ZeroPolynomialError",
    "decompose",
    "find_zeros",
    "parse_quaternion",
    "reciprocal_eval",
    "regular_conjugate",
    "sphere_pair",
    "split",
    "star_mul",
    "symmetrization",
    "transform_Tf",
]
