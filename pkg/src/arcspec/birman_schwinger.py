"""
Regularized Birman-Schwinger operator of a singular interaction on an arc.

For ``kappa > 0`` the operator acts on densities ``omega`` on ``(0, L)`` as

    (Q omega)(s) = 1/(4 pi) [ int K_reg(s, s') omega(s') ds'
                              + int (omega(s') - omega(s)) / |s - s'| ds' ]
                   + omega(s) * D(s)

with ``K_reg = exp(-kappa rho)/rho - 1/|s - s'|`` (``rho`` the chord) and
``D(s) = ln(4 s (L - s)) / (4 pi)``. It is the regular part of the
single-layer potential of ``omega`` on the curve: near the curve the
potential behaves like ``-(omega/2pi) ln(r) + Q omega``. Points
``-kappa^2`` of the discrete spectrum are the values where ``alpha`` is an
eigenvalue of ``Q``.

The Nystrom discretization uses graded Gauss-Legendre panels; the
``1/|s - s'|`` part is handled by product integration on the panel of the
target node and on its two neighbours, the kink of ``K_reg`` at ``s' = s``
by splitting the self panel at the target.
"""

from __future__ import annotations

import csv
import logging
import math
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .curves import ArcCurve, CurveError, shifted_curve
from .quadrature import (
    Quadrature,
    gauss_legendre,
    graded_panels,
    lagrange_matrix,
    near_field_tables,
)

log = logging.getLogger(__name__)

__all__ = [
    "PSI1",
    "BSError",
    "NoCrossingError",
    "RefinementNeeded",
    "BSMatrix",
    "HEigenpair",
    "BSAssembler",
    "green_kernel",
    "regularized_diagonal",
    "default_quadrature",
    "assemble_Q",
    "bs_eigenvalues",
    "solve_kappa",
    "count_eigenvalues",
    "eigenfunction",
    "fit_log_expansion",
    "verify_bc",
    "dump_matrix",
    "load_matrix",
    "write_eigenpairs_csv",
]

PSI1 = -0.57721566490153286
FOUR_PI = 4.0 * math.pi


class BSError(RuntimeError):
    """Failure of a Birman-Schwinger computation."""


class NoCrossingError(BSError):
    """The requested eigenvalue does not exist for this coupling."""


class RefinementNeeded(BSError):
    """The quadrature is too coarse for the requested computation."""


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

def green_kernel(kappa, rho):
    """Free resolvent kernel ``exp(-kappa rho) / (4 pi rho)`` of ``-Laplace + kappa^2``."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise ValueError("green_kernel needs rho > 0; the diagonal goes through the regularized path")
    if np.any(np.asarray(kappa) < 0):
        raise ValueError("kappa must be nonnegative")
    out = np.exp(-kappa * rho) / (FOUR_PI * rho)
    return float(out) if out.ndim == 0 else out


def regularized_diagonal(length: float, s):
    """``ln(4 s (L - s)) / (4 pi)`` -- the kappa-independent diagonal constant."""
    s = np.asarray(s, dtype=float)
    if np.any(s <= 0) or np.any(s >= length):
        raise ValueError("regularized diagonal diverges at the arc endpoints")
    out = np.log(4.0 * s * (length - s)) / FOUR_PI
    return float(out) if out.ndim == 0 else out


def _kreg(kappa, rho, u):
    """``exp(-kappa rho)/rho - 1/u`` for ``rho, u > 0``, cancellation-free."""
    return np.expm1(-kappa * rho) / rho + (u - rho) / (rho * u)


def _kreg_diagonal_limit(kappa, curvature=0.0):
    # chord rho = u (1 - g^2 u^2 / 24 + ...): the flat-chord correction vanishes at u = 0
    return -kappa + 0.0 * curvature


# --------------------------------------------------------------------------
# data types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class BSMatrix:
    """Symmetric Nystrom matrix of ``Q_{-kappa^2}`` in the weighted basis.

    ``matrix = (B + B^T)/2`` with ``B = W^{1/2} A W^{-1/2}`` and ``A`` the
    nodal Nystrom matrix; an eigenvector ``v`` of ``matrix`` maps to the
    nodal density ``v / sqrt(w)`` with unit ``L^2(0, L)`` norm.
    """

    kappa: float
    matrix: np.ndarray = field(repr=False)
    quad: Quadrature = field(repr=False)
    curve: ArcCurve = field(repr=False)
    raw_defect: float = 0.0
    raw: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def symmetry_defect(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m - m.T) / np.linalg.norm(m))

    def apply(self, omega):
        """Apply ``Q`` to nodal values ``omega`` (returns nodal values)."""
        sw = np.sqrt(self.quad.weights)
        return (self.matrix @ (sw * np.asarray(omega))) / sw


@dataclass(frozen=True)
class HEigenpair:
    """Discrete eigenvalue ``-kappa^2`` of the 3D operator with its density."""

    j: int
    alpha: float
    kappa: float
    omega: np.ndarray = field(repr=False)
    residual: float
    iterations: int
    quad: Quadrature = field(repr=False)

    @property
    def energy(self) -> float:
        return -self.kappa**2


# --------------------------------------------------------------------------
# assembly
# --------------------------------------------------------------------------

def default_quadrature(curve: ArcCurve, kappa_ref: float, order: int = 16,
                       levels: int = 8, panels_per_decay: float = 0.5,
                       min_panels: int = 16, n_q: int | None = None) -> Quadrature:
    """Graded panels sized to the decay length ``1/kappa_ref``.

    Interior panel width is ``min(L / min_panels, 1 / (panels_per_decay * kappa_ref))``.
    When ``n_q`` is given, the width is instead chosen so the rule has about
    ``n_q`` nodes.
    """
    L = curve.length
    if n_q is not None:
        n_pan = max(min_panels, n_q // order - 2 * levels)
        return graded_panels(L, order=order, width=L / n_pan, levels=levels, min_panels=min_panels)
    width = L / min_panels
    if kappa_ref > 0:
        width = min(width, 1.0 / (panels_per_decay * kappa_ref))
    return graded_panels(L, order=order, width=width, levels=levels, min_panels=min_panels)


class BSAssembler:
    """Caches the kappa-independent parts of the Nystrom matrix for one curve/rule."""

    def __init__(self, curve: ArcCurve, quad: Quadrature):
        if curve.margin != 0:
            raise CurveError("the Birman-Schwinger operator lives on the original arc (margin 0)")
        if abs(quad.length - curve.length) > 1e-12 * curve.length:
            raise ValueError("quadrature interval does not match the curve length")
        self.curve = curve
        self.quad = quad
        s = quad.nodes
        n = s.size
        self._single = quad.order == 1
        if self._single:
            return
        tabs = near_field_tables(quad)
        self.tabs = tabs
        L = curve.length
        self.rho = curve.pairwise_chords(s)
        self.u = np.abs(s[:, None] - s[None, :])
        np.fill_diagonal(self.rho, 1.0)
        np.fill_diagonal(self.u, 1.0)
        if np.any(self.rho[~np.eye(n, dtype=bool)] < 1e-14):
            raise CurveError("chord distance below 1e-14 between distinct nodes (self-intersection)")
        # self-panel sub-points
        self.sub_u = np.abs(tabs.self_sub - s[:, None])
        self.sub_rho = curve.chord(np.broadcast_to(s[:, None], tabs.self_sub.shape), tabs.self_sub)
        # adjacent pairs: accurate chords
        rows = np.repeat(np.arange(n)[:, None], tabs.adj_idx.shape[1], axis=1)
        valid = tabs.adj_idx >= 0
        self.adj_rows, self.adj_cols = rows[valid], tabs.adj_idx[valid]
        self.adj_pi = tabs.adj_w[valid]
        self.adj_rho = curve.chord(s[self.adj_rows], s[self.adj_cols])
        self.adj_u = np.abs(s[self.adj_rows] - s[self.adj_cols])
        self.rho[self.adj_rows, self.adj_cols] = self.adj_rho
        # diagonal: -(int over I minus own panel of 1/|u|) + 4 pi D(s)
        self.diag = -(np.log(s * (L - s)) - tabs.log_diag) + FOUR_PI * regularized_diagonal(L, s)
        self.panel_of = quad.panel_of

    def nodal_matrix(self, kappa: float) -> np.ndarray:
        """Non-symmetric Nystrom matrix acting on nodal values."""
        quad = self.quad
        s, w = quad.nodes, quad.weights
        if self._single:
            # the one-node rule keeps only the diagonal constant and the kernel limit
            val = regularized_diagonal(self.curve.length, s[0]) + _kreg_diagonal_limit(kappa) * w[0] / FOUR_PI
            return np.array([[val]])
        if kappa * (quad.breaks[1:] - quad.breaks[:-1]).max() > 700:
            raise RefinementNeeded("exp(-kappa * panel width) underflows; refine the quadrature")
        tabs = self.tabs
        p = quad.order
        A = np.exp(-kappa * self.rho) / self.rho * w[None, :]
        # adjacent panels: regular part by Gauss, 1/|u| by product weights
        A[self.adj_rows, self.adj_cols] = (
            _kreg(kappa, self.adj_rho, self.adj_u) * w[self.adj_cols] + self.adj_pi
        )
        # self panel
        sub = _kreg(kappa, self.sub_rho, self.sub_u) * tabs.self_subw
        blocks = np.einsum("ik,ikj->ij", sub, tabs.self_lag) + tabs.fp_self
        n_pan = quad.n_panels
        blocks = blocks.reshape(n_pan, p, p)
        for k in range(n_pan):
            sl = slice(k * p, (k + 1) * p)
            A[sl, sl] = blocks[k]
        A[np.diag_indices_from(A)] += self.diag
        return A / FOUR_PI

    def nodal_derivative(self, kappa: float) -> np.ndarray:
        """``dA/dkappa`` (kernel derivative ``-exp(-kappa rho)/(4 pi)``)."""
        quad = self.quad
        w = quad.weights
        if self._single:
            return np.array([[-w[0] / FOUR_PI]])
        p = quad.order
        D = -np.exp(-kappa * self.rho) * w[None, :]
        sub = -np.exp(-kappa * self.sub_rho) * self.tabs.self_subw
        blocks = np.einsum("ik,ikj->ij", sub, self.tabs.self_lag).reshape(quad.n_panels, p, p)
        for k in range(quad.n_panels):
            sl = slice(k * p, (k + 1) * p)
            D[sl, sl] = blocks[k]
        return D / FOUR_PI

    def bs_matrix(self, kappa: float) -> BSMatrix:
        A = self.nodal_matrix(kappa)
        if not np.all(np.isfinite(A)):
            raise BSError("non-finite entries in the Birman-Schwinger matrix")
        sw = np.sqrt(self.quad.weights)
        B = sw[:, None] * A / sw[None, :]
        norm = np.linalg.norm(B)
        raw = float(np.linalg.norm(B - B.T) / norm) if norm > 0 else 0.0
        S = 0.5 * (B + B.T)
        return BSMatrix(float(kappa), S, self.quad, self.curve, raw, B)


def assemble_Q(curve: ArcCurve, kappa: float, quad: Quadrature | None = None) -> BSMatrix:
    """Nystrom matrix of ``Q_{-kappa^2}`` on ``curve``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    if quad is None:
        quad = default_quadrature(curve, kappa)
    return BSAssembler(curve, quad).bs_matrix(kappa)


def bs_eigenvalues(Q: BSMatrix, k: int, vectors: bool = False, refine: bool = True):
    """The ``k`` largest eigenvalues of ``Q``, descending (optionally with densities).

    The symmetric matrix gives the ordering and starting vectors; with
    ``refine`` each eigenpair is then polished by shifted inverse iteration
    on the unsymmetrized Nystrom matrix, whose eigenvalues converge
    spectrally while those of the symmetric part carry an
    ``O(|B - B^T|^2)`` bias.

    Densities are returned as nodal values with unit ``L^2(0, L)`` norm,
    one per column.
    """
    n = Q.size
    if not 1 <= k <= n:
        raise ValueError(f"k={k} out of range for a matrix of size {n}")
    vals, vecs = linalg.eigh(Q.matrix, subset_by_index=[n - k, n - 1])
    vals, vecs = vals[::-1].copy(), vecs[:, ::-1].copy()
    if refine and Q.raw is not None and n > 1:
        for c in range(k):
            vals[c], vecs[:, c] = _inverse_iteration(Q.raw, vals[c], vecs[:, c])
    if not vectors:
        return vals
    omegas = vecs / np.sqrt(Q.quad.weights)[:, None]
    omegas /= np.sqrt((omegas**2 * Q.quad.weights[:, None]).sum(axis=0))
    # fix the sign: positive overall mass, else positive largest lobe
    for c in range(omegas.shape[1]):
        ref = omegas[:, c] @ Q.quad.weights
        if abs(ref) < 1e-8:
            ref = omegas[np.argmax(np.abs(omegas[:, c])), c]
        if ref < 0:
            omegas[:, c] *= -1
    return vals, omegas


def _inverse_iteration(B, sigma, x, max_iter: int = 12):
    """Eigenpair of ``B`` closest to the shift ``sigma``, started from ``x``."""
    n = B.shape[0]
    scale = max(1.0, abs(sigma))
    # offset the shift slightly so the factorization stays regular
    shift = sigma + 1e-13 * scale
    lu = linalg.lu_factor(B - shift * np.eye(n), check_finite=False)
    lam = sigma
    x = x / np.linalg.norm(x)
    for _ in range(max_iter):
        y = linalg.lu_solve(lu, x, check_finite=False)
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0:
            break
        lam_new = shift + (x @ x) / (x @ y)
        x = y / ny
        if x @ y < 0:
            x = -x
        if abs(lam_new - lam) <= 1e-15 * scale:
            lam = lam_new
            break
        lam = lam_new
    return lam, x


# --------------------------------------------------------------------------
# spectral condition
# --------------------------------------------------------------------------

def _zeta(alpha):
    return 2.0 * math.exp(PSI1 - 2.0 * math.pi * alpha)


def solve_kappa(curve: ArcCurve, alpha: float, j: int = 1, tol: float = 1e-8,
                quad: Quadrature | None = None, kappa_guess: float | None = None,
                max_iter: int = 80, assembler: BSAssembler | None = None) -> HEigenpair:
    """Find ``kappa_j`` with ``mu_j(Q_{-kappa^2}) = alpha``.

    ``mu_j`` (the j-th largest eigenvalue) decreases strictly in ``kappa``,
    so the crossing is bracketed and refined by a bisection-safeguarded
    secant iteration until ``|mu_j - alpha| < tol (1 + |alpha|)``.
    """
    if j < 1:
        raise ValueError("eigenvalue index j starts at 1")
    zeta = _zeta(alpha)
    if assembler is None:
        if quad is None:
            kref = math.sqrt(zeta**2 + 0.25 * curve.max_curvature() ** 2)
            quad = default_quadrature(curve, kref)
        assembler = BSAssembler(curve, quad)
    quad = assembler.quad
    if quad.size < j:
        raise RefinementNeeded(f"quadrature with {quad.size} nodes cannot resolve eigenvalue {j}")
    evals = 0

    def mu(kappa):
        nonlocal evals
        evals += 1
        return bs_eigenvalues(assembler.bs_matrix(kappa), j)[j - 1]

    target_tol = tol * (1 + abs(alpha))
    # bracket [zeta/4, 4 zeta], expanded geometrically
    lo, hi = zeta / 4, 4 * zeta
    if kappa_guess is not None and kappa_guess > 0:
        lo, hi = kappa_guess * 0.98, kappa_guess * 1.02
    f_lo, f_hi = mu(lo) - alpha, mu(hi) - alpha
    expansions = 0
    while f_lo <= 0:
        if lo < 1e-8 / curve.length or expansions > 60:
            raise NoCrossingError(
                f"mu_{j} stays below alpha={alpha} down to kappa={lo:.3g}: eigenvalue {j} does not exist"
            )
        hi, f_hi = lo, f_lo
        lo /= 4
        f_lo = mu(lo) - alpha
        expansions += 1
    while f_hi >= 0:
        if expansions > 60:
            raise BSError("bracket expansion exhausted")
        lo, f_lo = hi, f_hi
        hi *= 4
        f_hi = mu(hi) - alpha
        expansions += 1

    # safeguarded secant (Illinois-type weighting keeps both ends moving)
    x, fx = (lo, f_lo) if abs(f_lo) < abs(f_hi) else (hi, f_hi)
    side = 0
    for _ in range(max_iter):
        if abs(fx) < target_tol:
            break
        cand = hi - f_hi * (hi - lo) / (f_hi - f_lo)
        if not (lo < cand < hi) or (hi - lo) < 1e-15 * hi:
            cand = 0.5 * (lo + hi)
        x, fx = cand, mu(cand) - alpha
        if fx > 0:
            lo, f_lo = x, fx
            if side == 1:
                f_hi *= 0.5
            side = 1
        else:
            hi, f_hi = x, fx
            if side == -1:
                f_lo *= 0.5
            side = -1
    else:
        raise BSError(f"root finder did not converge: |mu - alpha| = {abs(fx):.3g}")
    Q = assembler.bs_matrix(x)
    vals, omegas = bs_eigenvalues(Q, j, vectors=True)
    return HEigenpair(j, float(alpha), float(x), omegas[:, j - 1], float(abs(vals[j - 1] - alpha)),
                      evals, quad)


def count_eigenvalues(curve: ArcCurve, alpha: float, kappa_floor: float | None = None,
                      quad: Quadrature | None = None) -> int:
    """Number of discrete eigenvalues: ``#{j : mu_j(Q at kappa_floor) > alpha}``."""
    if kappa_floor is None:
        kappa_floor = 1e-6 / curve.length
    if quad is None:
        quad = default_quadrature(curve, _zeta(alpha), panels_per_decay=1.0)
    Q = BSAssembler(curve, quad).bs_matrix(kappa_floor)
    vals = linalg.eigvalsh(Q.matrix)
    N = int(np.count_nonzero(vals > alpha))
    if quad.size < 4 * N:
        raise RefinementNeeded(f"{quad.size} nodes are too few to resolve {N} eigenvalues")
    return N


# --------------------------------------------------------------------------
# eigenfunctions and boundary condition check
# --------------------------------------------------------------------------

def eigenfunction(curve: ArcCurve, pair: HEigenpair, x) -> np.ndarray:
    """Evaluate ``f(x) = int G(kappa; |x - Gamma(s)|) omega(s) ds`` at points ``x``.

    The density is interpolated panel-wise; each panel is integrated with a
    rule refined geometrically toward the point of the panel closest to
    ``x``, so the logarithmic near-singularity is resolved down to distances
    of about ``1e-12``.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    quad = pair.quad
    out = np.empty(x.shape[0])
    for i, xi in enumerate(x):
        out[i] = _single_layer(curve, quad, pair.omega, pair.kappa, xi)
    return out


def _closest_param(curve, xi, s_guess):
    s = np.linspace(0.0, curve.length, 2049)
    d = np.linalg.norm(curve.position(s) - xi, axis=-1)
    k = int(np.argmin(d))
    s0 = s[k]
    # Newton on (Gamma(s) - x) . t(s) = 0
    for _ in range(30):
        t, n, _b = curve.frame(s0)
        diff = curve.position(s0) - xi
        g = curve.curvature(s0)
        f = diff @ t
        fp = 1.0 + g * (diff @ n)
        step = f / fp if fp != 0 else 0.0
        s_new = min(max(s0 - step, 0.0), curve.length)
        if abs(s_new - s0) < 1e-15 * curve.length:
            s0 = s_new
            break
        s0 = s_new
    return float(s0), float(np.linalg.norm(curve.position(s0) - xi))


def _single_layer(curve, quad, omega, kappa, xi, m: int = 20):
    s_star, dist = _closest_param(curve, xi, None)
    if dist < 1e-12:
        raise ValueError("evaluation point lies on the curve")
    xg, wg = gauss_legendre(m)
    total = 0.0
    for k in range(quad.n_panels):
        a, b = quad.breaks[k], quad.breaks[k + 1]
        sl = quad.panel_slice(k)
        # breakpoints graded around the closest point, clipped to the panel
        if s_star < a - 8 * (b - a) or s_star > b + 8 * (b - a):
            cuts = np.array([a, b])
        else:
            c = min(max(s_star, a), b)
            cuts = [a, b]
            for side_end in (a, b):
                span = abs(side_end - c)
                step = max(dist, 1e-14)
                pos = 0.0
                while pos + step < span:
                    pos += step
                    cuts.append(c + np.sign(side_end - c) * pos)
                    step = pos + dist
            cuts.append(c)
            cuts = np.unique(np.asarray(cuts))
        lo, hi = cuts[:-1, None], cuts[1:, None]
        sp = (0.5 * (hi - lo) * (xg + 1) + lo).ravel()
        sw = (0.5 * (hi - lo) * wg).ravel()
        dens = lagrange_matrix(quad.nodes[sl], sp) @ omega[sl]
        r = np.linalg.norm(curve.position(sp) - xi, axis=-1)
        total += np.sum(sw * dens * np.exp(-kappa * r) / (FOUR_PI * r))
    return total


def fit_log_expansion(rho, values):
    """Least-squares fit ``values ~ -Xi ln(rho) + Omega``; returns ``(Xi, Omega, cond)``."""
    rho = np.asarray(rho, dtype=float)
    if rho.size < 3:
        raise ValueError("need at least three radii for the logarithmic fit")
    M = np.column_stack([-np.log(rho), np.ones_like(rho)])
    cond = np.linalg.cond(M)
    if cond > 1e8:
        raise ValueError("logarithmic fit is ill-conditioned; widen the radius list")
    (xi, om), *_ = np.linalg.lstsq(M, np.asarray(values, dtype=float), rcond=None)
    return float(xi), float(om), float(cond)


def verify_bc(curve: ArcCurve, alpha: float, pair: HEigenpair, s: float, rho_list,
              phi: float = 0.0):
    """Relative defect of the generalized boundary condition ``2 pi alpha Xi = Omega``.

    The eigenfunction is sampled on shifted curves at distances ``rho_list``
    from ``Gamma(s)``; ``Xi`` and ``Omega`` come from a logarithmic fit.
    Returns ``(residual, Xi, Omega)``.
    """
    rho_list = np.asarray(rho_list, dtype=float)
    if not 0 < s < curve.length:
        raise ValueError("boundary condition is checked at interior points only")
    if np.any(np.diff(rho_list) >= 0):
        raise ValueError("rho_list must be strictly decreasing")
    pts = np.stack([shifted_curve(curve, r, phi, s=np.array([s]))[0] for r in rho_list])
    vals = eigenfunction(curve, pair, pts)
    xi, om, _ = fit_log_expansion(rho_list, vals)
    lhs = 2 * math.pi * alpha * xi
    res = abs(lhs - om) / (abs(om) + abs(lhs))
    return float(res), xi, om


# --------------------------------------------------------------------------
# binary snapshots
# --------------------------------------------------------------------------

_HEADER = struct.Struct("<QddQ")


def dump_matrix(Q: BSMatrix, path) -> None:
    """Write ``Q.matrix`` as little-endian float64 after a 32-byte header.

    Header: ``n_q`` (uint64), ``kappa``, ``L`` (float64), CRC-32 of the payload (uint64).
    """
    payload = np.ascontiguousarray(Q.matrix, dtype="<f8").tobytes()
    header = _HEADER.pack(Q.size, Q.kappa, Q.curve.length, zlib.crc32(payload))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def load_matrix(path):
    """Read a snapshot written by :func:`dump_matrix`; returns ``(matrix, kappa, L)``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    n, kappa, L, crc = _HEADER.unpack_from(raw)
    payload = raw[_HEADER.size:]
    if len(payload) != 8 * n * n:
        raise ValueError("truncated matrix snapshot")
    if zlib.crc32(payload) != crc:
        raise ValueError("matrix snapshot checksum mismatch")
    return np.frombuffer(payload, dtype="<f8").reshape(n, n).copy(), kappa, L


def write_eigenpairs_csv(pairs, path) -> None:
    """Rows ``(j, alpha, kappa, lambda, residual)`` with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "alpha", "kappa", "lambda", "residual"])
        for p in pairs:
            w.writerow([p.j] + [f"{v:.17g}" for v in (p.alpha, p.kappa, p.energy, p.residual)])
