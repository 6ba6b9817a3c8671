"""
Composite Gauss-Legendre panels on an interval, dyadically graded toward
both endpoints, with the product-integration weights needed for kernels
that behave like ``1/|s - s'|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "Quadrature",
    "gauss_legendre",
    "graded_breakpoints",
    "graded_panels",
    "single_node",
    "NearFieldTables",
    "near_field_tables",
    "lagrange_matrix",
]


@lru_cache(maxsize=None)
def gauss_legendre(m: int):
    """Nodes and weights of the m-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _bary_weights(x):
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / diff.prod(axis=1)


def lagrange_matrix(nodes, targets):
    """Values ``l_j(targets[i])`` of the Lagrange basis on ``nodes``.

    Barycentric form; exact ones where a target coincides with a node.
    """
    nodes = np.asarray(nodes, dtype=float)
    targets = np.asarray(targets, dtype=float)
    bw = _bary_weights(nodes)
    diff = targets[..., None] - nodes
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        q = bw / diff
        out = q / q.sum(axis=-1, keepdims=True)
    rows = hit.any(axis=-1)
    if np.any(rows):
        out[rows] = hit[rows].astype(float)
    return out


@dataclass(frozen=True)
class Quadrature:
    """Nodes and weights on ``(0, L)`` organised in Gauss panels.

    ``panel_of[i]`` is the panel holding node ``i``; panel ``k`` spans
    ``[breaks[k], breaks[k+1]]`` and holds nodes ``k*order ... (k+1)*order - 1``.
    """

    breaks: np.ndarray
    order: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    @property
    def length(self) -> float:
        return float(self.breaks[-1] - self.breaks[0])

    @property
    def n_panels(self) -> int:
        return self.breaks.size - 1

    @property
    def size(self) -> int:
        return self.nodes.size

    @property
    def panel_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_panels), self.order)

    def panel_slice(self, k: int) -> slice:
        return slice(k * self.order, (k + 1) * self.order)

    def interpolate(self, values, s):
        """Panel-wise polynomial interpolation of nodal ``values`` at ``s``."""
        values = np.asarray(values)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        k = np.clip(np.searchsorted(self.breaks, s, side="right") - 1, 0, self.n_panels - 1)
        out = np.empty(s.shape + values.shape[1:], dtype=values.dtype)
        for kk in np.unique(k):
            sel = k == kk
            sl = self.panel_slice(kk)
            out[sel] = lagrange_matrix(self.nodes[sl], s[sel]) @ values[sl]
        return out


def graded_breakpoints(length: float, width: float, levels: int) -> np.ndarray:
    """Uniform panels of width <= ``width`` with ``levels`` dyadic refinements at each end."""
    if not (length > 0 and width > 0):
        raise ValueError("length and panel width must be positive")
    # end panels of size w, w/2, ..., w/2^levels at each end
    n_mid = max(1, math.ceil(length / width))
    w = length / n_mid
    if n_mid < 2:
        w = length / 2
        n_mid = 2
    inner = np.linspace(0.0, length, n_mid + 1)
    if levels <= 0:
        return inner
    left = w * 2.0 ** -np.arange(levels, 0, -1)
    right = length - left[::-1]
    return np.concatenate([[0.0], left, inner[1:-1], right, [length]])


def graded_panels(length: float, order: int = 16, width: float | None = None,
                  levels: int = 8, min_panels: int = 8) -> Quadrature:
    """Composite Gauss-Legendre quadrature on ``(0, length)``.

    ``width`` caps the interior panel size (default ``length / min_panels``).
    """
    if width is None:
        width = length / min_panels
    width = min(width, length / min_panels)
    breaks = graded_breakpoints(length, width, levels)
    x, w = gauss_legendre(order)
    a, b = breaks[:-1, None], breaks[1:, None]
    nodes = (0.5 * (b - a) * (x + 1) + a).ravel()
    weights = (0.5 * (b - a) * w).ravel()
    return _freeze(Quadrature(breaks, order, nodes, weights))


def single_node(length: float) -> Quadrature:
    """Degenerate one-node rule (midpoint, weight L)."""
    return _freeze(Quadrature(np.array([0.0, length]), 1, np.array([length / 2]), np.array([length])))


def _freeze(q: Quadrature) -> Quadrature:
    for arr in (q.breaks, q.nodes, q.weights):
        arr.setflags(write=False)
    return q


# --------------------------------------------------------------------------
# near-field product integration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NearFieldTables:
    """Geometry-independent corrections for the ``1/|s - s'|`` part.

    For each target node ``i`` (in panel ``P``):

    * ``self_sub``: sub-quadrature points (order*2 per target) splitting
      ``P`` at ``s_i``, with weights ``self_subw`` and Lagrange values
      ``self_lag[i, k, j] = l_j(x_k)``;
    * ``fp_self[i, j] = int_P (l_j(s') - delta_ij) / |s' - s_i| ds'``;
    * ``log_diag[i] = ln((s_i - a)(b - s_i))`` for ``P = [a, b]``;
    * ``adj_idx[i]``: node indices of the panels adjacent to ``P`` (-1 pads) and
      ``adj_w[i]``: product weights ``int l_j(s') / |s' - s_i| ds'`` there.
    """

    self_sub: np.ndarray
    self_subw: np.ndarray
    self_lag: np.ndarray
    fp_self: np.ndarray
    log_diag: np.ndarray
    adj_idx: np.ndarray
    adj_w: np.ndarray


def _near_panel_weights(pnodes, a, b, target, m: int = 20):
    """``int_a^b l_j(x) / |x - target| dx`` for a target outside ``[a, b]``.

    Composite Gauss with subintervals growing geometrically away from the
    edge nearest the target (each no longer than its distance to the target).
    """
    xg, wg = gauss_legendre(m)
    if target <= a:
        edge, sign, far = a, 1.0, b
    else:
        edge, sign, far = b, -1.0, a
    delta = abs(edge - target)
    total = abs(far - edge)
    cuts = [0.0]
    step = max(delta, 1e-300)
    while cuts[-1] < total:
        cuts.append(min(total, cuts[-1] + step))
        step = cuts[-1] + delta
    cuts = np.asarray(cuts)
    lo, hi = cuts[:-1, None], cuts[1:, None]
    off = (0.5 * (hi - lo) * (xg + 1) + lo).ravel()
    ww = (0.5 * (hi - lo) * wg).ravel()
    x = edge + sign * off
    lag = lagrange_matrix(pnodes, x)
    return (ww / np.abs(x - target)) @ lag


def near_field_tables(quad: Quadrature) -> NearFieldTables:
    return _near_field_cached(quad.breaks.tobytes(), quad.order)


@lru_cache(maxsize=16)
def _near_field_cached(breaks_bytes: bytes, order: int) -> NearFieldTables:
    breaks = np.frombuffer(breaks_bytes, dtype=float)
    p = order
    n_pan = breaks.size - 1
    x, w = gauss_legendre(p)
    nq = n_pan * p
    nodes = (0.5 * (breaks[1:, None] - breaks[:-1, None]) * (x + 1) + breaks[:-1, None]).ravel()

    # self panel ----------------------------------------------------------
    m = p
    xs, ws = gauss_legendre(m)
    self_sub = np.empty((nq, 2 * m))
    self_subw = np.empty((nq, 2 * m))
    self_lag = np.empty((nq, 2 * m, p))
    fp_self = np.empty((nq, p))
    log_diag = np.empty(nq)
    for k in range(n_pan):
        a, b = breaks[k], breaks[k + 1]
        pn = nodes[k * p:(k + 1) * p]
        for loc in range(p):
            i = k * p + loc
            si = pn[loc]
            left = 0.5 * (si - a) * (xs + 1) + a
            right = 0.5 * (b - si) * (xs + 1) + si
            sub = np.concatenate([left, right])
            subw = np.concatenate([0.5 * (si - a) * ws, 0.5 * (b - si) * ws])
            lag = lagrange_matrix(pn, sub)
            self_sub[i], self_subw[i], self_lag[i] = sub, subw, lag
            unit = np.zeros(p)
            unit[loc] = 1.0
            fp_self[i] = (subw / np.abs(sub - si)) @ (lag - unit)
            log_diag[i] = math.log((si - a) * (b - si))

    # adjacent panels -----------------------------------------------------
    adj_idx = -np.ones((nq, 2 * p), dtype=np.int64)
    adj_w = np.zeros((nq, 2 * p))
    for k in range(n_pan):
        for loc in range(p):
            i = k * p + loc
            si = nodes[i]
            col = 0
            for kk in (k - 1, k + 1):
                if 0 <= kk < n_pan:
                    sl = slice(kk * p, (kk + 1) * p)
                    adj_idx[i, col:col + p] = np.arange(kk * p, (kk + 1) * p)
                    adj_w[i, col:col + p] = _near_panel_weights(
                        nodes[sl], breaks[kk], breaks[kk + 1], si)
                col += p
    tabs = NearFieldTables(self_sub, self_subw, self_lag, fp_self, log_diag, adj_idx, adj_w)
    for arr in (self_sub, self_subw, self_lag, fp_self, log_diag, adj_idx, adj_w):
        arr.setflags(write=False)
    return tabs
