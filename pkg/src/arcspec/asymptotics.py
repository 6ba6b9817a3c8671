"""
Strong-coupling constants and the reports comparing the computed 3D
eigenvalues with the one-dimensional comparison operators.

The leading term of every eigenvalue is the two-dimensional point
interaction energy ``xi_alpha``; the next term is an eigenvalue of
``S = -d^2/ds^2 - g^2/4``, bracketed from below by the Neumann version.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .birman_schwinger import (
    PSI1,
    BSAssembler,
    BSError,
    count_eigenvalues,
    default_quadrature,
    solve_kappa,
)
from .curves import ArcCurve, CurveError
from .operator1d import DEFAULT_N, BC, spectrum_1d

__all__ = [
    "CouplingWarning",
    "CouplingPoint",
    "xi_alpha",
    "zeta_alpha",
    "tube_width",
    "coupling_point",
    "ExpansionRow",
    "DecayFit",
    "AsymptoticsReport",
    "CountingRow",
    "expansion_report",
    "counting_report",
    "fit_decay",
    "residual_monotone",
]


class CouplingWarning(RuntimeWarning):
    """Coupling outside the range where double precision is meaningful."""


def xi_alpha(alpha: float) -> float:
    """Bound-state energy ``-4 exp(2(-2 pi alpha + psi(1)))`` of the planar point interaction.

    Below ``alpha = -5`` a :class:`CouplingWarning` is issued; if the
    exponential overflows, ``-inf`` is returned.
    """
    if alpha < -5:
        warnings.warn(f"alpha={alpha} < -5: xi_alpha is beyond any reachable solver range",
                      CouplingWarning, stacklevel=2)
    try:
        return -4.0 * math.exp(2.0 * (-2.0 * math.pi * alpha + PSI1))
    except OverflowError:
        return -math.inf


def zeta_alpha(alpha: float) -> float:
    """``(-xi_alpha)^{1/2} = 2 exp(psi(1) - 2 pi alpha)``."""
    try:
        return 2.0 * math.exp(PSI1 - 2.0 * math.pi * alpha)
    except OverflowError:
        return math.inf


def tube_width(alpha: float) -> float:
    """Transverse tube size ``exp(pi alpha)``."""
    return math.exp(math.pi * alpha)


@dataclass(frozen=True)
class CouplingPoint:
    alpha: float
    xi: float
    zeta: float
    d: float


def coupling_point(alpha: float) -> CouplingPoint:
    return CouplingPoint(alpha, xi_alpha(alpha), zeta_alpha(alpha), tube_width(alpha))


# --------------------------------------------------------------------------
# expansion report
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionRow:
    """One ``(alpha, j)`` cell.

    ``shifted = lambda_H - xi_alpha`` and ``residual = shifted - lambda_S``.
    ``budget`` is the discretization estimate, ``eps`` the bracket slack.
    """

    alpha: float
    j: int
    lambda_H: float
    shifted: float
    lambda_N: float
    lambda_S: float
    residual: float
    budget: float
    eps: float
    kappa: float
    n_q: int
    bracket_ok: bool
    flags: str = ""

    @property
    def clean(self) -> bool:
        return not self.flags and math.isfinite(self.residual)


@dataclass(frozen=True)
class DecayFit:
    """Least-squares fit ``log|r_j| = c + p * (pi alpha)``; ``p`` is the exponent in units of pi."""

    j: int
    exponent: float
    intercept: float
    n_points: int

    @property
    def exponent_abs(self) -> float:
        return self.exponent * math.pi


@dataclass
class AsymptoticsReport:
    curve_id: str
    length: float
    rows: list = field(default_factory=list)
    fits: list = field(default_factory=list)
    monotone: dict = field(default_factory=dict)

    COLUMNS = ("alpha", "j", "lambda_H", "lambda_H_minus_xi", "lambda_N", "lambda_S",
               "residual", "budget", "eps", "kappa", "n_q", "bracket_ok", "flags")

    def table(self):
        """Header and rows in export order."""
        out = []
        for r in self.rows:
            out.append([r.alpha, r.j, r.lambda_H, r.shifted, r.lambda_N, r.lambda_S,
                        r.residual, r.budget, r.eps, r.kappa, r.n_q, int(r.bracket_ok), r.flags])
        return list(self.COLUMNS), out

    def fit_for(self, j: int) -> DecayFit | None:
        for f in self.fits:
            if f.j == j:
                return f
        return None

    @property
    def brackets_ok(self) -> bool:
        return all(r.bracket_ok for r in self.rows)

    def summary(self) -> dict:
        return {
            "curve": self.curve_id,
            "L": self.length,
            "rows": len(self.rows),
            "failed_rows": sum(1 for r in self.rows if "solver-failure" in r.flags),
            "brackets_ok": self.brackets_ok,
            "residual_monotone": {str(k): v for k, v in self.monotone.items()},
            "decay_fits": [asdict(f) for f in self.fits],
        }


def _solve_cell(curve, alpha, j_max, resolutions, tol, n_q_cap):
    """Eigenvalues ``lambda_1..lambda_jmax`` at each resolution for one alpha."""
    zeta = zeta_alpha(alpha)
    kref = math.sqrt(zeta**2 + 0.25 * curve.max_curvature() ** 2)
    out = []
    guesses = [None] * j_max
    for ppd in resolutions:
        quad = default_quadrature(curve, kref, panels_per_decay=ppd)
        if n_q_cap is not None and quad.size > n_q_cap:
            raise BSError(f"alpha={alpha}: rule needs {quad.size} nodes, above the cap n_q={n_q_cap}")
        asm = BSAssembler(curve, quad)
        pairs = []
        for j in range(1, j_max + 1):
            p = solve_kappa(curve, alpha, j, tol=tol, assembler=asm, kappa_guess=guesses[j - 1])
            guesses[j - 1] = p.kappa
            pairs.append(p)
        out.append(pairs)
    return out


def expansion_report(curve: ArcCurve, alpha_list, j_max: int = 1, resolutions=(0.5, 0.75),
                     n_1d: int = DEFAULT_N, tol: float = 1e-8, eps_frac: float = 0.05,
                     threads: int = 1, curve_id: str = "curve",
                     n_q_cap: int | None = None) -> AsymptoticsReport:
    """Compare ``lambda_j(H) - xi_alpha`` with the bracket ``[lambda_j(S^N), lambda_j(S)]``.

    Parameters
    ----------
    alpha_list : sequence of float
        Strictly decreasing couplings.
    resolutions : pair of float
        Panels per decay length for a coarse and a fine Nystrom rule. The
        fine values are reported; their difference, plus a Richardson
        estimate of the 1D grid error, is the discretization budget.
    eps_frac : float
        Bracket slack ``eps = eps_frac * |lambda_S - lambda_N| + budget``.
    n_q_cap : int, optional
        Largest admissible Nystrom rule; rows needing more nodes are flagged.

    Rows whose budget exceeds ``|r_j|`` are flagged ``discretization-limited``;
    solver failures are flagged per row and the report is still produced.
    """
    alphas = [float(a) for a in alpha_list]
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alpha_list must be strictly decreasing")
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    resolutions = tuple(resolutions)
    if len(resolutions) != 2 or not all(r > 0 for r in resolutions):
        raise ValueError("resolutions must be two positive panels-per-decay factors")

    lam_S = spectrum_1d(curve, j_max, n_1d, BC.DIRICHLET).eigenvalues
    lam_N = spectrum_1d(curve, j_max, n_1d, BC.NEUMANN).eigenvalues
    # second-order FD: error of the fine grid ~ (coarse - fine) / 3
    half = max(8, n_1d // 2)
    b1d = np.maximum(np.abs(spectrum_1d(curve, j_max, half, BC.DIRICHLET).eigenvalues - lam_S),
                     np.abs(spectrum_1d(curve, j_max, half, BC.NEUMANN).eigenvalues - lam_N)) / 3

    def task(alpha):
        try:
            return _solve_cell(curve, alpha, j_max, resolutions, tol, n_q_cap), None
        except (BSError, CurveError, ValueError) as exc:
            return None, f"{type(exc).__name__}: {exc}"

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(task, alphas))
    else:
        results = [task(a) for a in alphas]

    report = AsymptoticsReport(curve_id, curve.length)
    for alpha, (cell, err) in zip(alphas, results):
        xi = xi_alpha(alpha)
        for j in range(1, j_max + 1):
            lS, lN = float(lam_S[j - 1]), float(lam_N[j - 1])
            if cell is None:
                report.rows.append(ExpansionRow(alpha, j, math.nan, math.nan, lN, lS, math.nan,
                                                math.nan, math.nan, math.nan, 0, False,
                                                "solver-failure: " + err.replace(",", ";")))
                continue
            coarse, fine = cell[0][j - 1], cell[1][j - 1]
            lam_H = fine.energy
            shifted = lam_H - xi
            r = shifted - lS
            budget = abs(fine.energy - coarse.energy) + float(b1d[j - 1])
            eps = eps_frac * abs(lS - lN) + budget
            ok = (lN - eps) <= shifted <= (lS + eps)
            flags = "discretization-limited" if budget > abs(r) else ""
            report.rows.append(ExpansionRow(alpha, j, lam_H, shifted, lN, lS, r, budget, eps,
                                            fine.kappa, fine.quad.size, bool(ok), flags))
    for j in range(1, j_max + 1):
        rows = [r for r in report.rows if r.j == j]
        report.monotone[j] = residual_monotone(rows)
        fit = fit_decay([r for r in rows if r.clean], j)
        if fit is not None:
            report.fits.append(fit)
    return report


def residual_monotone(rows) -> bool:
    """``|r_j|`` non-increasing along the rows, allowing one inversion within the budget."""
    vals = [(abs(r.residual), r.budget) for r in rows if math.isfinite(r.residual)]
    inversions = 0
    for (a, _), (b, bb) in zip(vals, vals[1:]):
        if b > a:
            if b - a > bb or inversions:
                return False
            inversions += 1
    return len(vals) == len(rows)


def fit_decay(rows, j: int = 1) -> DecayFit | None:
    """Least-squares slope of ``log|r|`` against ``pi alpha`` (needs three points)."""
    pts = [(r.alpha, abs(r.residual)) for r in rows if r.residual != 0]
    if len(pts) < 3:
        return None
    a = math.pi * np.array([p[0] for p in pts])
    y = np.log([p[1] for p in pts])
    slope, icpt = np.polyfit(a, y, 1)
    return DecayFit(j, float(slope), float(icpt), len(pts))


# --------------------------------------------------------------------------
# counting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CountingRow:
    alpha: float
    N: int
    predicted: float
    rel_deviation: float
    N_refined: int | None = None

    @property
    def stable(self) -> bool:
        return self.N_refined is None or self.N_refined == self.N


COUNT_COLUMNS = ("alpha", "N", "L_zeta_over_pi", "rel_deviation", "N_refined")


def counting_report(curve: ArcCurve, alpha_list, refine: bool = False, threads: int = 1):
    """Rows ``(alpha, N, (L/pi) zeta_alpha, |N - (L/pi) zeta| / ((L/pi) zeta))``.

    With ``refine`` every count is repeated on a rule with twice as many
    panels per decay length and stored in ``N_refined``.
    """
    alphas = [float(a) for a in alpha_list]

    def one(alpha):
        N = count_eigenvalues(curve, alpha)
        Nr = None
        if refine:
            quad = default_quadrature(curve, zeta_alpha(alpha), panels_per_decay=2.0)
            Nr = count_eigenvalues(curve, alpha, quad=quad)
        pred = curve.length / math.pi * zeta_alpha(alpha)
        return CountingRow(alpha, N, pred, abs(N - pred) / pred, Nr)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(one, alphas))
    return [one(a) for a in alphas]
