"""
Finite-difference spectra of the one-dimensional comparison operators

    S   = -d^2/ds^2 - g(s)^2 / 4   on (0, L), Dirichlet ends
    S^N = same symbol, Neumann ends

together with the operator on the prolonged interval ``(-d, L + d)`` and
its rescaled form on ``(0, L)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import linalg

from .curves import ArcCurve, CurveError, extend_curve

__all__ = [
    "BC",
    "Grid1D",
    "Tridiagonal",
    "Spectrum1D",
    "assemble_1d",
    "eigenvalues_1d",
    "spectrum_1d",
    "bracketing_table",
    "extended_rescaled_spectrum",
    "observed_order",
    "write_spectrum_csv",
    "DEFAULT_N",
]

DEFAULT_N = 4096


class BC(str, Enum):
    DIRICHLET = "Dirichlet"
    NEUMANN = "Neumann"


@dataclass(frozen=True)
class Grid1D:
    a: float
    b: float
    n: int

    def __post_init__(self):
        if self.n < 8:
            raise ValueError("a 1D grid needs at least 8 interior nodes")
        if not self.b > self.a:
            raise ValueError("grid interval must have b > a")

    @property
    def spacing(self) -> float:
        return (self.b - self.a) / (self.n + 1)

    def interior(self) -> np.ndarray:
        return self.a + self.spacing * np.arange(1, self.n + 1)

    def with_boundary(self) -> np.ndarray:
        return self.a + self.spacing * np.arange(0, self.n + 2)


@dataclass(frozen=True)
class Tridiagonal:
    """Symmetric tridiagonal matrix by its diagonal and off-diagonal."""

    diag: np.ndarray
    off: np.ndarray
    bc: BC = BC.DIRICHLET
    grid: Grid1D | None = None
    potential: np.ndarray | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.diag.size

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)


@dataclass(frozen=True)
class Spectrum1D:
    eigenvalues: np.ndarray
    bc: BC
    grid: Grid1D | None
    potential: np.ndarray | None = field(default=None, repr=False)

    def __getitem__(self, j):
        return self.eigenvalues[j]

    def __len__(self):
        return self.eigenvalues.size


def _potential(curve: ArcCurve, s):
    return -0.25 * curve.curvature(s) ** 2


def assemble_1d(curve: ArcCurve, grid: Grid1D, bc: BC | str = BC.DIRICHLET,
                kinetic: float = 1.0, potential_fn=None) -> Tridiagonal:
    """Central-difference matrix of ``-kinetic d^2/ds^2 - g^2/4``.

    Dirichlet keeps the ``n`` interior nodes. Neumann adds both boundary
    nodes with mirrored ghost values; the ghost rows are made symmetric by
    the diagonal similarity with boundary weight 1/2, which leaves the
    eigenvalues unchanged.
    """
    bc = BC(bc)
    tol = 1e-12 * max(1.0, curve.total_length)
    if potential_fn is None and (grid.a < curve.s_min - tol or grid.b > curve.s_max + tol):
        raise CurveError(
            f"grid [{grid.a}, {grid.b}] outside curve domain [{curve.s_min}, {curve.s_max}]"
        )
    h2 = grid.spacing**2
    if bc is BC.DIRICHLET:
        s = grid.interior()
    else:
        s = grid.with_boundary()
    V = _potential(curve, s) if potential_fn is None else potential_fn(s)
    diag = 2.0 * kinetic / h2 + V
    off = np.full(s.size - 1, -kinetic / h2)
    if bc is BC.NEUMANN:
        off[0] = off[-1] = -math.sqrt(2.0) * kinetic / h2
    return Tridiagonal(diag, off, bc, grid, V)


def eigenvalues_1d(matrix: Tridiagonal, k: int) -> Spectrum1D:
    """The ``k`` smallest eigenvalues (bisection on the tridiagonal form)."""
    n = matrix.size
    if not 1 <= k <= n:
        raise ValueError(f"k={k} exceeds the matrix dimension {n}")
    if n == 1:
        vals = matrix.diag.copy()
    else:
        vals = linalg.eigh_tridiagonal(matrix.diag, matrix.off, eigvals_only=True,
                                       select="i", select_range=(0, k - 1))
    return Spectrum1D(np.sort(vals), matrix.bc, matrix.grid, matrix.potential)


def spectrum_1d(curve: ArcCurve, k: int, n: int = DEFAULT_N, bc: BC | str = BC.DIRICHLET) -> Spectrum1D:
    """Lowest ``k`` eigenvalues of S (Dirichlet) or S^N (Neumann) on ``(0, L)``."""
    grid = Grid1D(0.0, curve.length, n)
    return eigenvalues_1d(assemble_1d(curve, grid, bc), k)


def bracketing_table(curve: ArcCurve, n: int = DEFAULT_N, k: int = 10):
    """Pairs ``(lambda_j(S^N), lambda_j(S))`` for ``j = 1..k``."""
    dn = spectrum_1d(curve, k, n, BC.NEUMANN).eigenvalues
    dd = spectrum_1d(curve, k, n, BC.DIRICHLET).eigenvalues
    return list(zip(dn.tolist(), dd.tolist()))


def extended_rescaled_spectrum(curve: ArcCurve, d: float, n: int = DEFAULT_N, k: int = 5):
    """Spectra of the prolonged operator and of its rescaled form on ``(0, L)``.

    The prolonged operator lives on ``(-d, L + d)`` with the extended
    curvature and Dirichlet ends. The substitution ``s = (L + 2d) u / L - d``
    maps it to ``-(L/(L+2d))^2 d^2/du^2 - g_ex(s(u))^2/4`` on ``(0, L)``; both
    are discretized on node sets that correspond under this map, so the
    two spectra agree to rounding.
    """
    L = curve.length
    if d == 0:
        sp = spectrum_1d(curve, k, n)
        return sp, sp
    ext = extend_curve(curve, d)
    grid_ex = Grid1D(-d, L + d, n)
    s_ex = eigenvalues_1d(assemble_1d(ext, grid_ex, BC.DIRICHLET), k)
    scale = L / (L + 2 * d)

    def pulled(u):
        return -0.25 * ext.curvature(u / scale - d) ** 2

    grid = Grid1D(0.0, L, n)
    s_tilde = eigenvalues_1d(assemble_1d(curve, grid, BC.DIRICHLET, kinetic=scale**2,
                                         potential_fn=pulled), k)
    return s_ex, s_tilde


def observed_order(errors, ratio: float = 2.0) -> np.ndarray:
    """Convergence orders ``log(e_i / e_{i+1}) / log(ratio)`` of a refinement sequence."""
    e = np.abs(np.asarray(errors, dtype=float))
    return np.log(e[:-1] / e[1:]) / math.log(ratio)


def write_spectrum_csv(spectra, path, length: float) -> None:
    """Rows ``(j, lambda, bc, n, L)``, 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["j", "lambda", "bc", "n", "L"])
        for sp in spectra:
            n = sp.grid.n if sp.grid is not None else 0
            for j, lam in enumerate(sp.eigenvalues, start=1):
                w.writerow([j, f"{lam:.17g}", sp.bc.value, n, f"{length:.17g}"])
