"""Numerical probes for regularity, the modulus principles and openness.

Every probe returns a :class:`ProbeReport`.  Grid probes evaluate in
batches; any evaluatable may be passed, but objects exposing
``eval_array`` (polynomials and rational expressions) are much faster.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateLocusError, DomainError
from .quat import I as UNIT_I
from .quat import J as UNIT_J
from .quat import K as UNIT_K
from .quat import ImaginaryUnit, Quaternion, abs_arr, mul_arr, sample_sphere_units
from .rational import inverse_square_plus_one
from .regpoly import RegPoly
from .slicerep import near_degenerate
from .zeros import find_zeros

FD_STEP = 1e-5
REGULARITY_TOL = 1e-5
EXTREMUM_MARGIN = 1e-12
OPEN_TOL = 1e-4


@dataclass(frozen=True)
class GridSpec:
    """Sampling region: the box ``center +- radius`` in every coordinate.

    With ``unit`` set the grid is two dimensional, ``center + s + t*unit``
    (a slice grid when ``center`` lies on ``L_unit``).
    """

    center: Quaternion = Quaternion()
    radius: float = 1.0
    points: int = 15
    unit: Optional[ImaginaryUnit] = None

    def __post_init__(self):
        object.__setattr__(self, "center", Quaternion.coerce(self.center))
        if not self.radius > 0:
            raise ValueError("grid radius must be positive")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points per axis")
        if self.unit is not None:
            object.__setattr__(self, "unit", ImaginaryUnit.normalize(self.unit))

    @property
    def dim(self) -> int:
        return 4 if self.unit is None else 2

    @property
    def step(self) -> float:
        return 2.0 * self.radius / (self.points - 1)

    @property
    def cell_diagonal(self) -> float:
        return self.step * math.sqrt(self.dim)

    def lattice(self) -> np.ndarray:
        """Grid points, shape ``(points,) * dim + (4,)``."""
        t = np.linspace(-self.radius, self.radius, self.points)
        c = self.center.to_array()
        if self.unit is None:
            mesh = np.stack(np.meshgrid(t, t, t, t, indexing="ij"), axis=-1)
            return c + mesh
        S, T = np.meshgrid(t, t, indexing="ij")
        u = self.unit.to_array()
        return c + S[..., None] * np.array([1.0, 0, 0, 0]) + T[..., None] * u

    def contains(self, q, slack: float = 1e-12) -> bool:
        d = Quaternion.coerce(q) - self.center
        return max(abs(v) for v in d.to_list()) <= self.radius + slack


@dataclass
class ProbeReport:
    verdict: str
    witness: Quaternion
    residual: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        out = {"verdict": self.verdict, "witness": self.witness.to_list(), "residual": float(self.residual)}
        if self.details:
            out["details"] = self.details
        return out


def _batch(fun) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(fun, "eval_array"):
        return fun.eval_array

    def run(qs):
        qs = np.asarray(qs, dtype=float)
        flat = qs.reshape(-1, 4)
        out = np.empty_like(flat)
        for n, row in enumerate(flat):
            q = Quaternion.from_array(row)
            try:
                out[n] = Quaternion.coerce(fun(q)).to_array()
            except DomainError:
                raise
            except Exception as exc:  # noqa: BLE001 - re-raised with the point attached
                raise DomainError(f"evaluation failed at {q}: {exc}") from exc
        return out.reshape(qs.shape)

    return run


def _left_unit(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return mul_arr(np.broadcast_to(u, v.shape), v)


# --- regularity -------------------------------------------------------------------


def check_regular(
    fun,
    region: GridSpec = GridSpec(radius=1.0, points=7),
    h: float = FD_STEP,
    tol: float = REGULARITY_TOL,
    n_units: int = 8,
    seed: int = 0,
) -> ProbeReport:
    """Finite-difference test that ``(d/dx + I d/dy) f(x + yI) / 2`` vanishes.

    Units ``i, j, k`` plus ``n_units - 3`` random ones are probed; on each
    slice ``L_I`` the points form a ``points x points`` grid centred at the
    projection of ``region.center`` and clipped to the ball of radius
    ``region.radius``.  The residual is the largest ``|dbar_I f|`` found.
    """
    if h <= 0:
        raise ValueError("finite difference step must be positive")
    units = [UNIT_I, UNIT_J, UNIT_K]
    if n_units > 3:
        units += sample_sphere_units(n_units - 3, seed)
    run = _batch(fun)
    c = region.center.to_array()
    t = np.linspace(-region.radius, region.radius, region.points)
    S, T = np.meshgrid(t, t, indexing="ij")
    one = np.array([1.0, 0, 0, 0])
    worst_val, worst_pt = -1.0, region.center
    for unit in units:
        u = unit.to_array()
        base = c[0] * one + float(np.dot(c[1:], u[1:])) * u
        offset2 = float(np.sum((c - base) ** 2))
        pts = base + S[..., None] * one + T[..., None] * u
        keep = offset2 + S**2 + T**2 <= region.radius**2
        pts = pts[keep]
        if pts.size == 0:
            continue
        dx = (run(pts + h * one) - run(pts - h * one)) / (2 * h)
        dy = (run(pts + h * u) - run(pts - h * u)) / (2 * h)
        dbar = 0.5 * (dx + _left_unit(u, dy))
        res = abs_arr(dbar)
        k = int(np.argmax(res))
        if res[k] > worst_val:
            worst_val, worst_pt = float(res[k]), Quaternion.from_array(pts[k])
    verdict = "pass" if worst_val <= tol else "fail"
    return ProbeReport(verdict, worst_pt, worst_val, {"h": h, "tol": tol, "units": len(units)})


# --- extremum detection ---------------------------------------------------------------


def _offsets(dim: int):
    return [o for o in itertools.product((-1, 0, 1), repeat=dim) if any(o)]


def strict_interior_extrema(values: np.ndarray, kind: str, margin: float = EXTREMUM_MARGIN) -> np.ndarray:
    """Indices of strict interior maxima or minima on a regular grid.

    Every interior node is compared against all ``3**d - 1`` neighbours
    and must beat each by more than ``margin``.
    """
    d = values.ndim
    n = values.shape
    core = values[(slice(1, -1),) * d]
    mask = np.ones(core.shape, dtype=bool)
    for off in _offsets(d):
        sl = tuple(slice(1 + o, n[a] - 1 + o) for a, o in enumerate(off))
        other = values[sl]
        if kind == "max":
            mask &= core > other + margin
        else:
            mask &= core < other - margin
    return np.argwhere(mask) + 1


def max_modulus_probe(f, region: GridSpec = GridSpec(radius=1.0), margin: float = EXTREMUM_MARGIN) -> ProbeReport:
    """Look for a strict interior maximum of ``|f|`` on the grid.

    On pass the witness is the grid maximum (necessarily on the boundary)
    and the residual its modulus; on fail the witness is an interior
    maximum and the residual its excess over the largest neighbour.
    """
    pts = region.lattice()
    if isinstance(f, RegPoly) and f.degree < 1:
        return ProbeReport("pass", region.center, abs(f(region.center)), {"note": "constant function; probe inapplicable"})
    vals = abs_arr(_batch(f)(pts))
    found = strict_interior_extrema(vals, "max", margin)
    if len(found):
        worst, excess = None, -np.inf
        for idx in found:
            idx = tuple(idx)
            nb = max(vals[tuple(i + o for i, o in zip(idx, off))] for off in _offsets(vals.ndim))
            if vals[idx] - nb > excess:
                worst, excess = idx, vals[idx] - nb
        return ProbeReport("fail", Quaternion.from_array(pts[worst]), float(excess), {"interior_maxima": len(found)})
    k = np.unravel_index(int(np.argmax(vals)), vals.shape)
    return ProbeReport("pass", Quaternion.from_array(pts[k]), float(vals[k]), {"interior_maxima": 0})


def min_modulus_probe(
    f: RegPoly,
    region: GridSpec = GridSpec(radius=1.0),
    zero_tol: float = 1e-8,
    margin: float = EXTREMUM_MARGIN,
    zeros=None,
    descend: bool = False,
) -> ProbeReport:
    """Every strict interior minimum of ``|f|`` must sit at, or next to, a zero.

    "Next to" means within one cell diagonal of an entry of
    :func:`find_zeros`.  The residual is the largest distance from an
    interior minimum to its nearest zero.

    With ``descend=True`` each unexplained grid minimum is also followed by
    a local descent; those that reach a zero are counted in
    ``details["lattice_artifacts"]``.  The verdict is unaffected.
    """
    pts = region.lattice()
    if f.degree < 1:
        return ProbeReport("pass", region.center, abs(f(region.center)), {"note": "constant function; probe inapplicable"})
    zeros = find_zeros(f) if zeros is None else zeros
    vals = abs_arr(f.eval_array(pts))
    found = strict_interior_extrema(vals, "min", margin)
    worst_pt, worst_dist, bad = region.center, 0.0, 0
    for idx in found:
        idx = tuple(idx)
        q = Quaternion.from_array(pts[idx])
        dist = min((z.distance(q) for z in zeros), default=math.inf)
        if vals[idx] <= zero_tol:
            dist = 0.0
        if dist > region.cell_diagonal:
            bad += 1
        if dist >= worst_dist:
            worst_pt, worst_dist = q, dist
    verdict = "pass" if bad == 0 else "fail"
    details = {"interior_minima": int(len(found)), "unexplained": bad, "cell_diagonal": region.cell_diagonal}
    if descend:
        details["lattice_artifacts"] = sum(
            _descends_to_zero(f, pts[tuple(idx)], zeros, zero_tol)
            for idx in found
            if vals[tuple(idx)] > zero_tol
            and min((z.distance(Quaternion.from_array(pts[tuple(idx)])) for z in zeros), default=math.inf)
            > region.cell_diagonal
        )
    return ProbeReport(verdict, worst_pt, float(worst_dist), details)


def _descends_to_zero(f: RegPoly, start: np.ndarray, zeros, zero_tol: float) -> bool:
    res = minimize(
        lambda v: float(abs_arr(f.eval_array(v))),
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 20000, "maxfev": 40000},
    )
    end = Quaternion.from_array(res.x)
    return res.fun <= zero_tol and min((z.distance(end) for z in zeros), default=math.inf) <= 1e-6


# --- open mapping ----------------------------------------------------------------------


def _ball_search(run, q0: np.ndarray, r: float, target: np.ndarray, points: int, max_levels: int, keep: int, tol: float):
    """Nested grid refinement for ``min |fun(q) - target|`` over ``B(q0, r)``.

    Each level re-grids ``+- one previous step`` around the best ``keep``
    candidates, so the spacing shrinks by ``(points - 1) / 2`` per level.
    """
    t = np.linspace(-1.0, 1.0, points)
    unit_mesh = np.stack(np.meshgrid(t, t, t, t, indexing="ij"), axis=-1).reshape(-1, 4)
    centres = [q0]
    half = r
    best_pt, best_val = q0, float(abs_arr(run(q0) - target))
    for _ in range(max_levels + 1):
        cand = np.concatenate([c + half * unit_mesh for c in centres])
        cand = cand[np.sum((cand - q0) ** 2, axis=1) <= r * r]
        vals = abs_arr(run(cand) - target)
        order = np.argsort(vals, kind="stable")[:keep]
        if vals[order[0]] < best_val:
            best_pt, best_val = cand[order[0]], float(vals[order[0]])
        if best_val <= tol:
            break
        centres = [cand[o] for o in order]
        half = 2.0 * half / (points - 1)
    return best_pt, best_val


def open_mapping_probe(
    fun,
    q0,
    r: float = 0.3,
    targets: int = 10,
    seed: int = 0,
    offset_fraction: float = 0.5,
    points: int = 11,
    max_levels: int = 8,
    keep: int = 3,
    boundary_samples: int = 20000,
    tol: float = OPEN_TOL,
) -> ProbeReport:
    """Check that values near ``fun(q0)`` are attained inside ``B(q0, r)``.

    ``spread`` is the smallest ``|fun(q) - fun(q0)|`` seen on the sphere
    ``|q - q0| = r``; targets are drawn at distance below
    ``offset_fraction * spread`` from ``fun(q0)``.  With the default of one
    half, ``|fun - p|`` is smaller at ``q0`` than anywhere on the boundary,
    so an interior minimum (hence a preimage) must exist.

    Raises DegenerateLocusError when ``fun`` is a polynomial and ``q0`` is
    within 1e-3 of a degenerate sphere.
    """
    q0 = Quaternion.coerce(q0)
    if isinstance(fun, RegPoly) and near_degenerate(fun, q0, 1e-3):
        raise DegenerateLocusError(f"{q0} lies within 1e-3 of a degenerate sphere")
    if not 0 < offset_fraction <= 0.5:
        raise ValueError("offset_fraction must be in (0, 0.5]")
    run = _batch(fun)
    rng = np.random.default_rng(seed)
    c = q0.to_array()
    p0 = run(c)
    dirs = rng.standard_normal((boundary_samples, 4))
    dirs = np.concatenate([dirs, np.eye(4), -np.eye(4)])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    spread = float(np.min(abs_arr(run(c + r * dirs) - p0)))
    if spread <= 0:
        return ProbeReport("fail", q0, 0.0, {"note": "image of the boundary touches fun(q0)", "spread": spread})
    eps = offset_fraction * spread
    worst_pt, worst_val, attained = c, 0.0, 0
    for _ in range(targets):
        u = rng.standard_normal(4)
        u /= np.linalg.norm(u)
        target = p0 + eps * rng.uniform(0.0, 1.0) * u
        pt, val = _ball_search(run, c, r, target, points, max_levels, keep, tol)
        attained += val <= tol
        if val >= worst_val:
            worst_pt, worst_val = pt, val
    verdict = "pass" if attained == targets else "fail"
    return ProbeReport(
        verdict,
        Quaternion.from_array(worst_pt),
        float(worst_val),
        {"spread": spread, "epsilon": eps, "targets": targets, "attained": int(attained)},
    )


# --- the q^-2 + 1 counterexample ---------------------------------------------------------


def counterexample_probe(
    delta: float = 0.1,
    samples: int = 400000,
    seed: int = 0,
    radius: float = 0.5,
    min_separation: float = 0.01,
    slab_tol: float = 1e-6,
) -> ProbeReport:
    """Evidence that ``q^-2 + 1`` is not open near the degenerate sphere ``S``.

    Samples the ball ``B(i, radius)`` and reports the smallest distance from
    the sampled image to the target ``delta * j``.  The image of the ball
    meets ``L_j`` only in real values, and ``0 = f(i)`` is in the image, so
    the target stays a fixed distance away however close it is to 0.

    Passes when ``f(i) = 0``, every sampled image value within ``slab_tol``
    of ``L_j`` has ``j``-component at most ``slab_tol``, and the observed
    separation exceeds ``min_separation``.
    """
    f = inverse_square_plus_one()
    f_at_i = abs(f(UNIT_I))
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((samples, 4))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    rad = radius * rng.uniform(0.0, 1.0, samples) ** 0.25
    centre = UNIT_I.to_array()
    pts = centre + rad[:, None] * dirs
    # the purely imaginary segment y*i maps onto real values
    ys = np.linspace(1.0 - radius, 1.0 + radius, 1001)[1:-1]
    seg = np.zeros((ys.size, 4))
    seg[:, 1] = ys
    pts = np.concatenate([pts, seg])
    vals = f.eval_array(pts)
    near_lj = np.hypot(vals[:, 1], vals[:, 3]) <= slab_tol
    slab_ok = bool(np.all(np.abs(vals[near_lj, 2]) <= slab_tol))
    target = np.array([0.0, 0.0, delta, 0.0])
    dist = abs_arr(vals - target)
    k = int(np.argmin(dist))
    bound = float(dist[k])
    ok = f_at_i <= 1e-12 and slab_ok and bound > min_separation
    return ProbeReport(
        "pass" if ok else "fail",
        Quaternion.from_array(pts[k]),
        bound,
        {
            "f_at_i": f_at_i,
            "separation_bound": bound,
            "delta": delta,
            "values_near_Lj": int(np.count_nonzero(near_lj)),
            "slab_ok": slab_ok,
        },
    )
