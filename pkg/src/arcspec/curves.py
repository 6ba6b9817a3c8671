"""
Arc-length parametrized open curves in 3-space.

Every curve exposes the same vectorized surface: positions, Frenet
frames, curvature and torsion with their first two derivatives, the
Tang rotation angle ``beta(s) = int_0^s tau``, and an accurate chord
distance ``|Gamma(s1) - Gamma(s2)|`` that stays cancellation-free for
nearby parameters (the Birman-Schwinger kernel depends on it).

Analytic kinds (segment, circular arc, helix) use closed forms. Curves
defined through curvature/torsion data, sampled points, or extensions
are integrated from the Frenet-Serret system with a classical RK4
scheme on a uniform arc-length grid.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import interpolate, optimize

__all__ = [
    "CurveSpec",
    "ArcCurve",
    "SegmentCurve",
    "CircularArcCurve",
    "HelixCurve",
    "FrenetCurve",
    "ExtendedCurve",
    "FrenetFrame",
    "TubePoint",
    "InjectivityReport",
    "CurveError",
    "FrameError",
    "build_curve",
    "frenet_frame",
    "extend_curve",
    "tube_metric",
    "effective_potential",
    "injectivity_check",
    "shifted_curve",
    "frenet_serret_residuals",
    "read_curve_spec",
    "write_sampled_csv",
    "read_sampled_csv",
    "DEFAULT_GRID",
]

DEFAULT_GRID = 2048

CURVE_KINDS = ("segment", "circular-arc", "helix-arc", "curvature-profile", "sampled-points")


class CurveError(ValueError):
    """Invalid curve input or a geometric construction that cannot proceed."""


class FrameError(CurveError):
    """A Frenet frame cannot be defined (flat curve with nothing to continue from)."""


# --------------------------------------------------------------------------
# value types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CurveSpec:
    """Declarative description of a curve.

    ``params`` per kind:

    * segment: none
    * circular-arc: ``radius``
    * helix-arc: ``a`` (radius), ``b`` (pitch / 2 pi)
    * curvature-profile: ``s``, ``curvature`` and optionally ``torsion`` tables
      (or callables when built from Python)
    * sampled-points: ``points`` (m x 3), optional ``smoothing``; ``length`` is
      then measured, the ``length`` field is ignored
    """

    kind: str
    length: float = 1.0
    params: dict = field(default_factory=dict)
    d0: float = 0.0
    grid: int = DEFAULT_GRID

    def __post_init__(self):
        if self.kind not in CURVE_KINDS:
            raise CurveError(f"unknown curve kind {self.kind!r}; expected one of {CURVE_KINDS}")
        if self.kind != "sampled-points" and not (self.length > 0):
            raise CurveError(f"curve length must be positive, got {self.length}")
        if self.d0 < 0:
            raise CurveError(f"extension margin d0 must be >= 0, got {self.d0}")
        if self.grid < 16:
            raise CurveError("sample grid must have at least 16 points")

    def to_dict(self) -> dict:
        params = {}
        for key, val in self.params.items():
            if callable(val):
                raise CurveError(f"parameter {key!r} is a callable and cannot be serialized")
            params[key] = np.asarray(val).tolist() if isinstance(val, np.ndarray) else val
        return {"kind": self.kind, "L": self.length, "params": params, "d0": self.d0}

    @classmethod
    def from_dict(cls, data: dict, grid: int = DEFAULT_GRID) -> "CurveSpec":
        allowed = {"kind", "L", "params", "d0"}
        unknown = set(data) - allowed
        if unknown:
            raise CurveError(f"unknown curve key(s): {sorted(unknown)}")
        if "kind" not in data:
            raise CurveError("curve spec needs a 'kind'")
        return cls(
            kind=data["kind"],
            length=float(data.get("L", 1.0)),
            params=dict(data.get("params", {})),
            d0=float(data.get("d0", 0.0)),
            grid=grid,
        )


@dataclass(frozen=True)
class FrenetFrame:
    s: float
    t: np.ndarray
    n: np.ndarray
    b: np.ndarray
    beta: float


@dataclass(frozen=True)
class TubePoint:
    s: float
    r: float
    phi: float
    h: float
    sqrt_g: float
    position: np.ndarray


@dataclass(frozen=True)
class InjectivityReport:
    d: float
    h_margin: float
    chord_margin: float
    min_far_chord: float
    passed: bool
    binding: str


# --------------------------------------------------------------------------
# curve classes
# --------------------------------------------------------------------------

class ArcCurve:
    """Unit-speed curve on ``[s_min, s_max]``; the generating arc is ``[0, length]``.

    Subclasses implement ``_eval(s)`` returning position and frame arrays,
    ``_curv(s, k)`` / ``_tors(s, k)`` for derivatives of order k, and
    ``_beta(s)``.
    """

    kind = "abstract"

    def __init__(self, length: float, margin: float = 0.0, d0: float = 0.0, grid: int = DEFAULT_GRID):
        self.length = float(length)
        self.margin = float(margin)
        self.d0 = float(d0)
        self.grid = int(grid)

    # domain ------------------------------------------------------------
    @property
    def s_min(self) -> float:
        return -self.margin

    @property
    def s_max(self) -> float:
        return self.length + self.margin

    @property
    def total_length(self) -> float:
        return self.s_max - self.s_min

    def sample_grid(self, n: int | None = None) -> np.ndarray:
        n = self.grid if n is None else n
        return np.linspace(self.s_min, self.s_max, n)

    def _check_domain(self, s):
        s = np.asarray(s, dtype=float)
        tol = 1e-12 * max(1.0, self.total_length)
        if np.any(s < self.s_min - tol) or np.any(s > self.s_max + tol):
            raise CurveError(
                f"arc-length parameter outside curve domain [{self.s_min}, {self.s_max}]"
            )
        return np.clip(s, self.s_min, self.s_max)

    # public evaluation -------------------------------------------------
    def position(self, s):
        s = self._check_domain(s)
        return self._eval(s)[0]

    def frame(self, s):
        """Return ``(t, n, b)`` arrays of shape ``s.shape + (3,)``."""
        s = self._check_domain(s)
        _, t, n, b = self._eval(s)
        return t, n, b

    def curvature(self, s, deriv: int = 0):
        return self._curv(self._check_domain(s), deriv)

    def torsion(self, s, deriv: int = 0):
        return self._tors(self._check_domain(s), deriv)

    def tang_angle(self, s):
        return self._beta(self._check_domain(s))

    def max_curvature(self) -> float:
        return float(np.max(np.abs(self.curvature(self.sample_grid()))))

    def chord(self, s1, s2):
        """Euclidean distance between ``Gamma(s1)`` and ``Gamma(s2)`` (broadcasting)."""
        s1, s2 = np.broadcast_arrays(self._check_domain(s1), self._check_domain(s2))
        return np.linalg.norm(self.displacement(s1, s2), axis=-1)

    def displacement(self, s1, s2):
        return self.position(s2) - self.position(s1)

    def pairwise_chords(self, s, near: float = 0.0):
        """Matrix of chords between all pairs of ``s``.

        Pairs closer than ``near`` in arc length are recomputed with
        :meth:`chord`; the rest come from position differences.
        """
        s = self._check_domain(np.asarray(s, dtype=float))
        pos = self.position(s)
        rho = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=-1))
        close = np.abs(s[:, None] - s[None, :]) <= near
        if np.any(close):
            i, j = np.nonzero(close)
            rho[i, j] = self.chord(s[i], s[j])
        return rho

    # subclass hooks ----------------------------------------------------
    def _eval(self, s):
        raise NotImplementedError

    def _curv(self, s, k):
        raise NotImplementedError

    def _tors(self, s, k):
        raise NotImplementedError

    def _beta(self, s):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(length={self.length:g}, margin={self.margin:g})"


class SegmentCurve(ArcCurve):
    """Straight segment along the x axis; frame fixed to (e_x, e_y, e_z)."""

    kind = "segment"

    def _eval(self, s):
        s = np.asarray(s, dtype=float)
        shape = s.shape + (3,)
        pos = np.zeros(shape)
        pos[..., 0] = s
        t = np.broadcast_to(np.array([1.0, 0.0, 0.0]), shape).copy()
        n = np.broadcast_to(np.array([0.0, 1.0, 0.0]), shape).copy()
        b = np.broadcast_to(np.array([0.0, 0.0, 1.0]), shape).copy()
        return pos, t, n, b

    def _curv(self, s, k):
        return np.zeros_like(np.asarray(s, dtype=float))

    _tors = _curv

    def _beta(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def chord(self, s1, s2):
        s1, s2 = np.broadcast_arrays(self._check_domain(s1), self._check_domain(s2))
        return np.abs(s1 - s2)

    def pairwise_chords(self, s, near=0.0):
        s = np.asarray(s, dtype=float)
        return self.chord(s[:, None], s[None, :])


class CircularArcCurve(ArcCurve):
    """Arc of a circle of given radius in the xy plane, starting at the origin."""

    kind = "circular-arc"

    def __init__(self, length, radius, **kw):
        if not radius > 0:
            raise CurveError(f"radius must be positive, got {radius}")
        super().__init__(length, **kw)
        self.radius = float(radius)
        if self.total_length >= 2 * math.pi * self.radius:
            raise CurveError("circular arc closes on itself (self-intersection)")

    def _eval(self, s):
        R = self.radius
        th = np.asarray(s, dtype=float) / R
        c, sn = np.cos(th), np.sin(th)
        z = np.zeros_like(th)
        pos = np.stack([R * sn, R * (1 - c), z], axis=-1)
        t = np.stack([c, sn, z], axis=-1)
        n = np.stack([-sn, c, z], axis=-1)
        b = np.stack([z, z, np.ones_like(th)], axis=-1)
        return pos, t, n, b

    def _curv(self, s, k):
        s = np.asarray(s, dtype=float)
        return np.full_like(s, 1.0 / self.radius) if k == 0 else np.zeros_like(s)

    def _tors(self, s, k):
        return np.zeros_like(np.asarray(s, dtype=float))

    def _beta(self, s):
        return np.zeros_like(np.asarray(s, dtype=float))

    def chord(self, s1, s2):
        s1, s2 = np.broadcast_arrays(self._check_domain(s1), self._check_domain(s2))
        return 2 * self.radius * np.abs(np.sin((s1 - s2) / (2 * self.radius)))

    def pairwise_chords(self, s, near=0.0):
        s = np.asarray(s, dtype=float)
        return self.chord(s[:, None], s[None, :])


class HelixCurve(ArcCurve):
    """Circular helix ``(a cos th - a, a sin th, b th)``, ``th = s / sqrt(a^2 + b^2)``."""

    kind = "helix-arc"

    def __init__(self, length, a, b, **kw):
        if not a > 0:
            raise CurveError(f"helix radius a must be positive, got {a}")
        super().__init__(length, **kw)
        self.a, self.b = float(a), float(b)
        self.c = math.hypot(self.a, self.b)

    def _eval(self, s):
        a, b, c = self.a, self.b, self.c
        th = np.asarray(s, dtype=float) / c
        co, si = np.cos(th), np.sin(th)
        z = np.zeros_like(th)
        pos = np.stack([a * co - a, a * si, b * th], axis=-1)
        t = np.stack([-a * si, a * co, np.full_like(th, b)], axis=-1) / c
        n = np.stack([-co, -si, z], axis=-1)
        bn = np.stack([b * si, -b * co, np.full_like(th, a)], axis=-1) / c
        return pos, t, n, bn

    def _curv(self, s, k):
        s = np.asarray(s, dtype=float)
        return np.full_like(s, self.a / self.c**2) if k == 0 else np.zeros_like(s)

    def _tors(self, s, k):
        s = np.asarray(s, dtype=float)
        return np.full_like(s, self.b / self.c**2) if k == 0 else np.zeros_like(s)

    def _beta(self, s):
        return np.asarray(s, dtype=float) * self.b / self.c**2

    def chord(self, s1, s2):
        s1, s2 = np.broadcast_arrays(self._check_domain(s1), self._check_domain(s2))
        dth = (s1 - s2) / self.c
        return np.sqrt((2 * self.a * np.sin(dth / 2)) ** 2 + (self.b * dth) ** 2)

    def pairwise_chords(self, s, near=0.0):
        s = np.asarray(s, dtype=float)
        return self.chord(s[:, None], s[None, :])


def _frenet_rhs(y, g, tau):
    # y[..., :] = (x, t, n, b, beta) -> 13 components
    t = y[..., 3:6]
    n = y[..., 6:9]
    b = y[..., 9:12]
    g = g[..., None]
    tau_ = tau[..., None]
    out = np.empty_like(y)
    out[..., 0:3] = t
    out[..., 3:6] = g * n
    out[..., 6:9] = -g * t + tau_ * b
    out[..., 9:12] = -tau_ * n
    out[..., 12] = tau
    return out


def _rk4_step(y, s, h, gfun, tfun):
    """One classical RK4 step of the Frenet-Serret system (vectorized in s, h)."""
    h1 = h[..., None]
    k1 = _frenet_rhs(y, gfun(s), tfun(s))
    sm = s + h / 2
    gm, tm = gfun(sm), tfun(sm)
    k2 = _frenet_rhs(y + h1 / 2 * k1, gm, tm)
    k3 = _frenet_rhs(y + h1 / 2 * k2, gm, tm)
    se = s + h
    k4 = _frenet_rhs(y + h1 * k3, gfun(se), tfun(se))
    return y + h1 / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


class FrenetCurve(ArcCurve):
    """Curve reconstructed from curvature and torsion by Frenet-Serret integration.

    ``curvature`` / ``torsion`` are callables ``f(s, deriv)`` returning the
    value or derivative of order ``deriv``. The state is integrated from
    ``s_start`` over ``[s_lo, s_hi]`` on a uniform grid; off-grid values are
    one RK4 step from the nearest grid node.
    """

    kind = "frenet"

    def __init__(
        self,
        length: float,
        curvature: Callable,
        torsion: Callable,
        *,
        s_lo: float = 0.0,
        s_hi: float | None = None,
        s_start: float | None = None,
        origin=(0.0, 0.0, 0.0),
        frame0=None,
        beta0: float = 0.0,
        margin: float = 0.0,
        d0: float = 0.0,
        grid: int = DEFAULT_GRID,
        kind: str = "curvature-profile",
    ):
        super().__init__(length, margin=margin, d0=d0, grid=grid)
        self.kind = kind
        self._gfun = curvature
        self._tfun = torsion
        self.s_lo = float(s_lo)
        self.s_hi = float(length if s_hi is None else s_hi)
        s_start = self.s_lo if s_start is None else float(s_start)
        if frame0 is None:
            frame0 = np.eye(3)
        y0 = np.concatenate([np.asarray(origin, float), np.ravel(frame0), [beta0]])
        self._nodes = np.linspace(self.s_lo, self.s_hi, grid)
        self._h = self._nodes[1] - self._nodes[0]
        self._states = self._integrate(y0, s_start)

    @property
    def s_min(self):
        return self.s_lo

    @property
    def s_max(self):
        return self.s_hi

    def _g(self, s):
        return np.asarray(self._gfun(s, 0), dtype=float) * np.ones_like(s)

    def _tau(self, s):
        return np.asarray(self._tfun(s, 0), dtype=float) * np.ones_like(s)

    def _integrate(self, y0, s_start):
        nodes = self._nodes
        states = np.empty((nodes.size, 13))
        i0 = int(np.argmin(np.abs(nodes - s_start)))
        # step from s_start to the nearest node first
        y = _rk4_step(y0[None, :], np.array([s_start]), np.array([nodes[i0] - s_start]),
                      self._g, self._tau)[0]
        states[i0] = _reorthonormalize(y)
        for i in range(i0 + 1, nodes.size):
            y = _rk4_step(states[i - 1][None, :], nodes[i - 1:i], np.array([self._h]),
                          self._g, self._tau)[0]
            states[i] = _reorthonormalize(y)
        for i in range(i0 - 1, -1, -1):
            y = _rk4_step(states[i + 1][None, :], nodes[i + 1:i + 2], np.array([-self._h]),
                          self._g, self._tau)[0]
            states[i] = _reorthonormalize(y)
        return states

    def _state(self, s):
        s = np.asarray(s, dtype=float)
        idx = np.clip(np.rint((s - self.s_lo) / self._h).astype(int), 0, self._nodes.size - 1)
        base = self._states[idx]
        h = s - self._nodes[idx]
        return _rk4_step(base, self._nodes[idx], h, self._g, self._tau)

    def _eval(self, s):
        y = self._state(s)
        return y[..., 0:3], y[..., 3:6], y[..., 6:9], y[..., 9:12]

    def _curv(self, s, k):
        return np.asarray(self._gfun(s, k), dtype=float) * np.ones_like(s)

    def _tors(self, s, k):
        return np.asarray(self._tfun(s, k), dtype=float) * np.ones_like(s)

    def _beta(self, s):
        return self._state(s)[..., 12]

    def displacement(self, s1, s2):
        # Integrate the tangent directly from s1 for short chords; avoids the
        # cancellation of subtracting two nearly equal positions.
        s1 = np.asarray(s1, dtype=float)
        s2 = np.asarray(s2, dtype=float)
        far = self.position(s2) - self.position(s1)
        near = np.abs(s2 - s1) <= self._h
        if not np.any(near):
            return far
        a, bb = s1[near], s2[near]
        y = self._state(a)
        y[..., 0:3] = 0.0
        y = _rk4_step(y, a, bb - a, self._g, self._tau)
        far[near] = y[..., 0:3]
        return far


def _reorthonormalize(y):
    t = y[3:6] / np.linalg.norm(y[3:6])
    n = y[6:9] - np.dot(y[6:9], t) * t
    n /= np.linalg.norm(n)
    b = np.cross(t, n)
    out = y.copy()
    out[3:6], out[6:9], out[9:12] = t, n, b
    return out


class ExtendedCurve(ArcCurve):
    """A curve prolonged by ``d`` at both ends.

    On ``[0, L]`` every query is delegated to the base curve. Outside, the
    curvature and torsion are the second-order Taylor polynomials of the
    base data at the endpoint, and the geometry is integrated from the
    endpoint frame.
    """

    def __init__(self, base: ArcCurve, d: float):
        super().__init__(base.length, margin=d, d0=base.d0, grid=base.grid)
        self.base = base
        self.kind = base.kind
        L = base.length
        self._taylor = {}
        pieces = {}
        n_piece = max(64, int(math.ceil(base.grid * d / max(L, 1e-300))) + 1)
        for side, s0, lo, hi in (("left", 0.0, -d, 0.0), ("right", L, L, L + d)):
            gc = [float(base.curvature(s0, k)) for k in range(3)]
            tc = [float(base.torsion(s0, k)) for k in range(3)]
            self._taylor[side] = (s0, gc, tc)
            t, n, b = (np.asarray(v) for v in base.frame(s0))
            pieces[side] = FrenetCurve(
                L,
                _taylor_fn(s0, gc),
                _taylor_fn(s0, tc),
                s_lo=lo,
                s_hi=hi,
                s_start=s0,
                origin=base.position(s0),
                frame0=np.stack([t, n, b]),
                beta0=float(base.tang_angle(s0)),
                grid=n_piece,
            )
        self._pieces = pieces

    def _split(self, s):
        s = np.asarray(s, dtype=float)
        return s < 0.0, s > self.length

    def _combine(self, s, getter):
        s = np.asarray(s, dtype=float)
        left, right = self._split(s)
        mid = ~(left | right)
        results = None
        for mask, src in ((mid, self.base), (left, self._pieces["left"]), (right, self._pieces["right"])):
            if not np.any(mask):
                continue
            vals = getter(src, s[mask])
            if results is None:
                results = [np.empty(s.shape + np.shape(v)[1:]) for v in vals]
            for out, v in zip(results, vals):
                out[mask] = v
        return results

    def _eval(self, s):
        return tuple(self._combine(s, lambda c, x: c._eval(x)))

    def _curv(self, s, k):
        return self._combine(s, lambda c, x: (c._curv(x, k),))[0]

    def _tors(self, s, k):
        return self._combine(s, lambda c, x: (c._tors(x, k),))[0]

    def _beta(self, s):
        return self._combine(s, lambda c, x: (c._beta(x),))[0]

    def displacement(self, s1, s2):
        s1, s2 = np.broadcast_arrays(np.asarray(s1, float), np.asarray(s2, float))
        out = self.position(s2) - self.position(s1)
        inner = (s1 >= 0) & (s1 <= self.length) & (s2 >= 0) & (s2 <= self.length)
        if np.any(inner):
            out[inner] = self.base.displacement(s1[inner], s2[inner])
        return out

    def chord(self, s1, s2):
        s1, s2 = np.broadcast_arrays(self._check_domain(s1), self._check_domain(s2))
        out = np.linalg.norm(self.displacement(s1, s2), axis=-1)
        inner = (s1 >= 0) & (s1 <= self.length) & (s2 >= 0) & (s2 <= self.length)
        if np.any(inner):
            out[inner] = self.base.chord(s1[inner], s2[inner])
        return out

    def taylor_coefficients(self, side: str):
        """``(s0, curvature derivs, torsion derivs)`` used on one side."""
        return self._taylor[side]


def _taylor_fn(s0, coeffs):
    c0, c1, c2 = coeffs

    def f(s, k=0):
        x = np.asarray(s, dtype=float) - s0
        if k == 0:
            return c0 + c1 * x + 0.5 * c2 * x * x
        if k == 1:
            return c1 + c2 * x
        if k == 2:
            return c2 + 0.0 * x
        return 0.0 * x

    return f


# --------------------------------------------------------------------------
# construction helpers
# --------------------------------------------------------------------------

def _table_fn(s_tab, values, name):
    s_tab = np.asarray(s_tab, dtype=float)
    values = np.asarray(values, dtype=float)
    if s_tab.shape != values.shape or s_tab.ndim != 1:
        raise CurveError(f"{name} table must be 1D and match the s table")
    if np.any(np.diff(s_tab) <= 0):
        raise CurveError(f"{name} table abscissae must be strictly increasing")
    k = 5 if s_tab.size >= 6 else min(3, s_tab.size - 1)
    spl = interpolate.make_interp_spline(s_tab, values, k=k)
    derivs = [spl, spl.derivative(1), spl.derivative(2)]

    def f(s, k=0):
        if k > 2:
            raise CurveError(f"{name} derivatives beyond second order are not available")
        return derivs[k](np.asarray(s, dtype=float))

    return f


def _callable_fn(fun, name):
    """Wrap ``fun(s)`` into ``f(s, k)`` using ``fun(s, k)`` when supported."""
    try:
        fun(np.array([0.0]), 1)
        takes_order = True
    except TypeError:
        takes_order = False
    if takes_order:
        return fun

    def f(s, k=0, _h=1e-4):
        s = np.asarray(s, dtype=float)
        if k == 0:
            return np.asarray(fun(s), dtype=float) * np.ones_like(s)
        if k == 1:
            return (fun(s + _h) - fun(s - _h)) / (2 * _h)
        if k == 2:
            return (fun(s + _h) - 2 * fun(s) + fun(s - _h)) / _h**2
        raise CurveError(f"{name} derivatives beyond second order are not available")

    return f


def _profile_curve(spec: CurveSpec) -> FrenetCurve:
    p = spec.params
    L = spec.length
    if "curvature" not in p:
        raise CurveError("curvature-profile needs a 'curvature' entry")
    curv, tors = p["curvature"], p.get("torsion", 0.0)
    if callable(curv):
        gfun = _callable_fn(curv, "curvature")
    else:
        s_tab = np.asarray(p.get("s"), dtype=float) if "s" in p else None
        if s_tab is None:
            raise CurveError("tabulated curvature needs an 's' table")
        if s_tab[0] > 1e-12 * L or s_tab[-1] < L * (1 - 1e-12):
            raise CurveError("curvature table does not cover [0, L]")
        if np.any(np.asarray(curv, dtype=float) < 0):
            raise CurveError("curvature table has negative entries")
        gfun = _table_fn(s_tab, curv, "curvature")
    if callable(tors):
        tfun = _callable_fn(tors, "torsion")
    elif np.ndim(tors) == 0:
        tval = float(tors)
        tfun = lambda s, k=0: (tval if k == 0 else 0.0) + 0.0 * np.asarray(s, dtype=float)
    else:
        tfun = _table_fn(p["s"], tors, "torsion")
    return FrenetCurve(L, gfun, tfun, d0=spec.d0, grid=spec.grid)


def _sampled_curve(spec: CurveSpec) -> FrenetCurve:
    pts = np.asarray(spec.params.get("points"), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise CurveError("sampled points must be an (m, 3) array")
    if pts.shape[0] < 5:
        raise CurveError("need at least 5 sample points")
    steps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    if np.any(steps <= 1e-14 * max(1.0, steps.max())):
        raise CurveError("degenerate samples: repeated consecutive points")
    # self-intersection screen on the polyline: non-adjacent samples far in index
    # but closer than the local spacing
    if pts.shape[0] <= 4000:
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        idx = np.arange(pts.shape[0])
        cum = np.concatenate([[0.0], np.cumsum(steps)])
        arc = np.abs(cum[:, None] - cum[None, :])
        far = (np.abs(idx[:, None] - idx[None, :]) > 2) & (arc > 3 * steps.max())
        if np.any(dist[far] < 0.5 * steps.min()):
            raise CurveError("sampled curve self-intersects")
    u = np.concatenate([[0.0], np.cumsum(steps)])
    smoothing = spec.params.get("smoothing")
    k = 5 if pts.shape[0] >= 6 else 3
    if smoothing:
        spl = interpolate.make_splrep(u, pts.T, k=k, s=float(smoothing))
    else:
        spl = interpolate.make_interp_spline(u, pts, k=k)
    d1, d2, d3 = spl.derivative(1), spl.derivative(2), spl.derivative(3)

    def vals(x, dd):
        v = np.asarray(dd(x))
        return v.T if v.shape[0] == 3 and v.ndim == 2 and smoothing else v

    # arc length s(u) by Gauss-Legendre on each sample interval
    xg, wg = np.polynomial.legendre.leggauss(12)
    ua, ub = u[:-1], u[1:]
    xs = 0.5 * (ub - ua)[:, None] * (xg + 1) + ua[:, None]
    speed = np.linalg.norm(vals(xs.ravel(), d1), axis=-1).reshape(xs.shape)
    seg = 0.5 * (ub - ua) * (speed * wg).sum(axis=1)
    s_of_u = np.concatenate([[0.0], np.cumsum(seg)])
    L = float(s_of_u[-1])

    # invert s(u) on a uniform arc-length grid (Newton polish)
    n = spec.grid
    s_grid = np.linspace(0.0, L, n)
    uu = np.interp(s_grid, s_of_u, u)
    seg_cum = s_of_u
    for _ in range(8):
        i = np.clip(np.searchsorted(u, uu, side="right") - 1, 0, u.size - 2)
        lo = u[i]
        xs = 0.5 * (uu - lo)[:, None] * (xg + 1) + lo[:, None]
        sp = np.linalg.norm(vals(xs.ravel(), d1), axis=-1).reshape(xs.shape)
        s_now = seg_cum[i] + 0.5 * (uu - lo) * (sp * wg).sum(axis=1)
        uu = uu - (s_now - s_grid) / np.linalg.norm(vals(uu, d1), axis=-1)
        uu = np.clip(uu, 0.0, u[-1])

    r1, r2, r3 = vals(uu, d1), vals(uu, d2), vals(uu, d3)
    cr = np.cross(r1, r2)
    sp = np.linalg.norm(r1, axis=-1)
    crn = np.linalg.norm(cr, axis=-1)
    gamma = crn / sp**3
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(crn > 1e-10 * sp**3, np.einsum("ij,ij->i", cr, r3) / crn**2, 0.0)
    if np.all(gamma < 1e-9):
        raise FrameError(
            "sampled curve is flat everywhere; no Frenet frame to continue "
            "(use kind='segment' for straight curves)"
        )
    # where the curvature vanishes the torsion is undefined; continue it from the
    # neighbours (frame continuation across isolated flat points)
    flat = gamma < 1e-9
    if np.any(flat):
        tau[flat] = np.interp(s_grid[flat], s_grid[~flat], tau[~flat])
    gfun = _table_fn(s_grid, gamma, "curvature")
    tfun = _table_fn(s_grid, tau, "torsion")
    t0 = r1[0] / sp[0]
    i0 = int(np.argmax(gamma > 1e-9))
    # normal at the first curved sample, transported back along the frame
    nvec = np.cross(cr[i0], r1[i0])
    nvec /= np.linalg.norm(nvec)
    nvec = nvec - np.dot(nvec, t0) * t0
    nvec /= np.linalg.norm(nvec)
    frame0 = np.stack([t0, nvec, np.cross(t0, nvec)])
    curve = FrenetCurve(L, gfun, tfun, origin=pts[0], frame0=frame0, d0=spec.d0, grid=n,
                        kind="sampled-points")
    curve.source_points = pts
    return curve


def build_curve(spec: CurveSpec) -> ArcCurve:
    """Construct an :class:`ArcCurve` (margin 0) from a :class:`CurveSpec`."""
    p = spec.params
    kw = dict(d0=spec.d0, grid=spec.grid)
    if spec.kind == "segment":
        curve = SegmentCurve(spec.length, **kw)
    elif spec.kind == "circular-arc":
        curve = CircularArcCurve(spec.length, float(p.get("radius", 1.0)), **kw)
    elif spec.kind == "helix-arc":
        curve = HelixCurve(spec.length, float(p.get("a", 1.0)), float(p.get("b", 1.0)), **kw)
    elif spec.kind == "curvature-profile":
        curve = _profile_curve(spec)
    else:
        curve = _sampled_curve(spec)
    if _closest_far_approach(curve) <= 1e-6 * max(1.0, curve.length):
        raise CurveError("curve self-intersects")
    return curve


def _closest_far_approach(curve: ArcCurve, n: int = 1024) -> float:
    """Smallest distance between curve points more than ``pi / max g`` apart in arc length.

    The sampled minimum is polished by a bounded local minimisation, so a
    crossing between two samples is still found.
    """
    gmax = curve.max_curvature()
    if gmax == 0:
        return math.inf
    s = curve.sample_grid(min(curve.grid, n))
    h = s[1] - s[0]
    sep = max(math.pi / gmax, 2 * h)
    pos = curve.position(s)
    dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
    far = np.abs(s[:, None] - s[None, :]) > sep
    if not np.any(far):
        return math.inf
    dist[~far] = np.inf
    i, j = np.unravel_index(np.argmin(dist), dist.shape)
    best = float(dist[i, j])
    if best > 4 * h:
        return best
    lo, hi = curve.s_min, curve.s_max

    def f(x):
        return float(np.sum(curve.displacement(x[0], x[1]) ** 2))

    res = optimize.minimize(f, [s[i], s[j]], method="L-BFGS-B",
                            bounds=[(max(lo, s[i] - 2 * h), min(hi, s[i] + 2 * h)),
                                    (max(lo, s[j] - 2 * h), min(hi, s[j] + 2 * h))],
                            options={"ftol": 1e-30, "gtol": 1e-16})
    return min(best, math.sqrt(max(res.fun, 0.0)))


# --------------------------------------------------------------------------
# frame, extension, tube coordinates
# --------------------------------------------------------------------------

def frenet_frame(curve: ArcCurve, s: float) -> FrenetFrame:
    """Frenet triple and Tang angle at a single arc-length position."""
    t, n, b = curve.frame(float(s))
    return FrenetFrame(float(s), np.asarray(t), np.asarray(n), np.asarray(b),
                       float(curve.tang_angle(float(s))))


def frenet_serret_residuals(curve: ArcCurve, s, h: float = 1e-4):
    """Central-difference residuals of the Frenet-Serret equations.

    Returns the max over ``s`` of ``|t' - g n|``, ``|n' + g t - tau b|``
    and ``|b' + tau n|``.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    s = np.clip(s, curve.s_min + 2 * h, curve.s_max - 2 * h)
    tp, np_, bp = (np.asarray(v) for v in curve.frame(s + h))
    tm, nm, bm = (np.asarray(v) for v in curve.frame(s - h))
    t, n, b = curve.frame(s)
    # fourth-order central difference
    tpp, npp, bpp = curve.frame(s + 2 * h)
    tmm, nmm, bmm = curve.frame(s - 2 * h)

    def d(fm2, fm1, fp1, fp2):
        return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)

    g = curve.curvature(s)[..., None]
    tau = curve.torsion(s)[..., None]
    r_t = np.linalg.norm(d(tmm, tm, tp, tpp) - g * n, axis=-1).max()
    r_n = np.linalg.norm(d(nmm, nm, np_, npp) + g * t - tau * b, axis=-1).max()
    r_b = np.linalg.norm(d(bmm, bm, bp, bpp) + tau * n, axis=-1).max()
    return float(r_t), float(r_n), float(r_b)


def extend_curve(curve: ArcCurve, d: float) -> ArcCurve:
    """Prolong ``curve`` by ``d`` beyond both ends (regular C^2 extension of the data)."""
    if d == 0:
        return curve
    if not d > 0:
        raise CurveError(f"extension length must be positive, got {d}")
    if d > curve.d0 * (1 + 1e-12):
        raise CurveError(f"extension d={d} exceeds the admissible margin d0={curve.d0}")
    if isinstance(curve, ExtendedCurve):
        curve = curve.base
    ext = ExtendedCurve(curve, d)
    report = injectivity_check(ext, 0.0)
    if report.min_far_chord <= 0.0:
        raise CurveError("extended curve self-intersects")
    return ext


def _unit_offset(curve, s, phi):
    t, n, b = curve.frame(s)
    ang = np.asarray(phi) - curve.tang_angle(s)
    return -(n * np.cos(ang)[..., None] + b * np.sin(ang)[..., None]), ang


def tube_metric(curve: ArcCurve, s: float, r: float, phi: float) -> TubePoint:
    """Tubular coordinates ``(s, r, phi)`` -> lateral factor ``h`` and ``sqrt(g)``."""
    if r < 0:
        raise CurveError("radial coordinate must be nonnegative")
    g = float(curve.curvature(s))
    beta = float(curve.tang_angle(s))
    h = 1.0 + r * g * math.cos(phi - beta)
    if h <= 0:
        raise CurveError(f"lateral factor h={h:.3g} <= 0: tube overlaps itself at r={r}")
    offset, _ = _unit_offset(curve, s, phi)
    pos = curve.position(s) + r * offset
    return TubePoint(float(s), float(r), float(phi), h, h * r, np.asarray(pos))


def effective_potential(curve: ArcCurve, s, r, phi):
    """Curvature-induced potential of the straightened Laplacian.

    ``V = -g^2/(4h) + h_ss/(2h^3) - 5 h_s^2/(4h^4)`` with the s-derivatives of
    ``h = 1 + r g cos(phi - beta)`` taken along the Tang frame (``beta' = tau``).
    """
    s = np.asarray(s, dtype=float)
    g, g1, g2 = (curve.curvature(s, k) for k in range(3))
    tau, tau1 = curve.torsion(s, 0), curve.torsion(s, 1)
    ang = np.asarray(phi) - curve.tang_angle(s)
    c, sn = np.cos(ang), np.sin(ang)
    h = 1.0 + r * g * c
    if np.any(h <= 0):
        raise CurveError("lateral factor h <= 0")
    h_s = r * (g1 * c + g * tau * sn)
    h_ss = r * ((g2 - g * tau**2) * c + (2 * g1 * tau + g * tau1) * sn)
    V = -(g**2) / (4 * h) + h_ss / (2 * h**3) - 5 * h_s**2 / (4 * h**4)
    return float(V) if V.ndim == 0 else V


def injectivity_check(curve: ArcCurve, d: float, n: int | None = None) -> InjectivityReport:
    """Check that the radius-``d`` tube around ``curve`` does not overlap.

    Local overlap is excluded by ``d * max|g| < 1``. Globally, samples whose
    arc separation exceeds ``max(2d, pi / max|g|)`` (beyond the reach of
    local bending) must be more than ``2d`` apart.
    """
    gmax = curve.max_curvature()
    h_margin = 1.0 - d * gmax
    n = min(curve.grid, 1024) if n is None else n
    s = curve.sample_grid(n)
    sep = max(2 * d, math.pi / gmax if gmax > 0 else math.inf, 2 * (s[1] - s[0]))
    pos = curve.position(s)
    diff = np.abs(s[:, None] - s[None, :])
    far = diff > sep
    if np.any(far):
        dist = np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)
        min_far = float(dist[far].min())
    else:
        min_far = math.inf
    chord_margin = min_far - 2 * d
    passed = h_margin > 0 and chord_margin > 0
    binding = "curvature" if h_margin <= (chord_margin / max(2 * d, 1e-300) if d > 0 else math.inf) else "chord"
    return InjectivityReport(float(d), float(h_margin), float(chord_margin), min_far, bool(passed), binding)


def shifted_curve(curve: ArcCurve, rho: float, phi: float, s=None):
    """Points at distance ``rho`` from the curve along the Tang-frame direction ``phi``.

    Returns an ``(m, 3)`` array sampled on ``s`` (the curve grid by default).
    """
    if not rho > 0:
        raise CurveError("shift distance must be positive")
    if rho * curve.max_curvature() >= 1:
        raise CurveError(f"shift rho={rho} exceeds the injectivity margin")
    s = curve.sample_grid() if s is None else np.asarray(s, dtype=float)
    offset, _ = _unit_offset(curve, s, phi)
    return curve.position(s) + rho * offset


# --------------------------------------------------------------------------
# I/O
# --------------------------------------------------------------------------

def read_curve_spec(text: str, grid: int = DEFAULT_GRID) -> CurveSpec:
    return CurveSpec.from_dict(json.loads(text), grid=grid)


def write_sampled_csv(curve: ArcCurve, path, n: int | None = None) -> None:
    s = curve.sample_grid(n)
    pos = curve.position(s)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["s", "x", "y", "z"])
        for si, p in zip(s, pos):
            w.writerow([f"{v:.17g}" for v in (si, *p)])


def read_sampled_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read an ``(s, x, y, z)`` table; returns ``(s, points)``."""
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.shape[1] != 4:
        raise CurveError("sampled curve CSV needs 4 columns (s, x, y, z)")
    return data[:, 0], data[:, 1:]
