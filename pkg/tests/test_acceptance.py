"""
Acceptance suite. Each criterion records one PASS/FAIL line (printed in the
pytest terminal summary, or directly when run as a script) and asserts.

Criterion 5 (the operator oracle) gates criteria 1-4.
"""

import math
import time

import numpy as np
import pytest

from arcspec.asymptotics import counting_report, expansion_report, tube_width, xi_alpha, zeta_alpha
from arcspec.birman_schwinger import (
    PSI1,
    BSAssembler,
    bs_eigenvalues,
    default_quadrature,
    solve_kappa,
    verify_bc,
)
from arcspec.curves import (
    CurveSpec,
    build_curve,
    extend_curve,
    frenet_serret_residuals,
    tube_metric,
)
from arcspec.operator1d import bracketing_table, extended_rescaled_spectrum, observed_order, spectrum_1d

RESULTS = {}

SEG = CurveSpec("segment", 1.0, d0=0.1)
ARC = CurveSpec("circular-arc", math.pi / 2, {"radius": 1.0}, d0=0.1)
HELIX = CurveSpec("helix-arc", 3.0, {"a": 1.0, "b": 1.0}, d0=0.1)
PROFILE = CurveSpec("curvature-profile", 1.0,
                    {"s": np.linspace(0, 1, 101).tolist(),
                     "curvature": (2 * np.sin(np.pi * np.linspace(0, 1, 101)) + 0.5).tolist(),
                     "torsion": 0.4}, d0=0.1)
PRESETS = {"segment": SEG, "circular-arc": ARC, "helix-arc": HELIX, "curvature-profile": PROFILE}


def record(key, ok, detail):
    RESULTS[key] = f"{key}: {'PASS' if ok else 'FAIL'} | {detail}"
    return ok


def line_mu(kappa):
    return (math.log(2) + PSI1 - math.log(kappa)) / (2 * math.pi)


@pytest.fixture(scope="module")
def curves():
    return {name: build_curve(spec) for name, spec in PRESETS.items()}


# --------------------------------------------------------------------------
# criterion 5: oracle gate
# --------------------------------------------------------------------------

def _criterion5():
    parts, ok = [], True
    # centre node action on constants, kappa L >= 50
    for L, kappa in ((1.0, 50.0), (1.0, 100.0), (10.0, 5.0)):
        seg = build_curve(CurveSpec("segment", L))
        quad = default_quadrature(seg, kappa)
        A = BSAssembler(seg, quad).nodal_matrix(kappa)
        i = int(np.argmin(np.abs(quad.nodes - L / 2)))
        err = abs((A @ np.ones(quad.size))[i] - line_mu(kappa))
        ok &= err < 1e-3
        parts.append(f"kL={kappa * L:g} err={err:.1e}")
    # mu = alpha inversion on a long segment
    alpha = -0.3
    L = 60.0 / zeta_alpha(alpha)
    pair = solve_kappa(build_curve(CurveSpec("segment", L)), alpha)
    rel = abs(pair.energy - xi_alpha(alpha)) / abs(xi_alpha(alpha))
    ok &= rel < 5e-3
    parts.append(f"L*zeta=60 |lambda-xi|/|xi|={rel:.2e} (tol 5e-3)")
    return ok, "; ".join(parts)


@pytest.fixture(scope="module")
def gate():
    if "gate" not in RESULTS:
        ok, detail = _criterion5()
        record("C5 operator oracle (gate)", ok, detail)
        RESULTS["gate"] = ok
    return RESULTS["gate"]


def test_c5_oracle_gate(gate):
    assert gate, RESULTS["C5 operator oracle (gate)"]


def _require(gate):
    if not gate:
        pytest.fail("criterion 5 gate failed; criteria 1-4 are not evaluated")


# --------------------------------------------------------------------------
# criteria 1 and 2: flat segment expansion and residual decay
# --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def segment_report(gate, curves):
    _require(gate)
    t0 = time.perf_counter()
    rep = expansion_report(curves["segment"], [-0.4, -0.55, -0.7], j_max=2)
    rep.elapsed = time.perf_counter() - t0
    return rep


def test_c1_segment_expansion(segment_report):
    rep = segment_report
    detail = []
    for r in rep.rows:
        detail.append(f"a={r.alpha:g} j={r.j} lH-xi={r.shifted:.5f} in [{r.lambda_N - r.eps:.4f}, "
                      f"{r.lambda_S + r.eps:.4f}] r={r.residual:.4f} n_q={r.n_q}")
    ok = rep.brackets_ok and all(rep.monotone.values())
    per_alpha = rep.elapsed / 3
    ok &= per_alpha < 120
    record("C1 segment expansion", ok,
           f"brackets={rep.brackets_ok} |r| non-increasing={all(rep.monotone.values())} "
           f"time/alpha={per_alpha:.1f}s; " + "; ".join(detail))
    assert ok, RESULTS["C1 segment expansion"]


def test_c2_residual_decay_order(segment_report):
    fit = segment_report.fit_for(1)
    ok = fit is not None and 0.5 <= fit.exponent <= 1.5
    rs = ", ".join(f"{r.residual:.4f}" for r in segment_report.rows if r.j == 1)
    expo = f"{fit.exponent:.3f}" if fit else "n/a"
    record("C2 residual decay order", ok,
           f"fitted exponent of |r_1| vs alpha = {expo} pi (band [0.5, 1.5] pi); r_1 = {rs}")
    assert ok, RESULTS["C2 residual decay order"]


# --------------------------------------------------------------------------
# criterion 3: circular arc
# --------------------------------------------------------------------------

def test_c3_curved_arc(gate, curves):
    _require(gate)
    rep = expansion_report(curves["circular-arc"], [-0.6], j_max=1)
    (r,) = rep.rows
    lo, hi = -0.25 - r.eps, 3.75 + r.eps
    closer = abs(r.shifted - 3.75) < abs(r.shifted + 0.25)
    ok = lo <= r.shifted <= hi and closer
    record("C3 curved arc", ok,
           f"lambda_1(H)-xi = {r.shifted:.5f} in [{lo:.4f}, {hi:.4f}], closer to 3.75: {closer}")
    assert ok, RESULTS["C3 curved arc"]


# --------------------------------------------------------------------------
# criterion 4: counting
# --------------------------------------------------------------------------

def test_c4_counting(gate, curves):
    _require(gate)
    (row,) = counting_report(curves["segment"], [-0.6], refine=True)
    ok = abs(row.N - row.predicted) <= 2 and row.stable
    record("C4 counting law", ok,
           f"N={row.N} (L/pi)zeta={row.predicted:.3f} |diff|={abs(row.N - row.predicted):.3f} "
           f"N(doubled rule)={row.N_refined}")
    assert ok, RESULTS["C4 counting law"]


# --------------------------------------------------------------------------
# criterion 6: property suites
# --------------------------------------------------------------------------

def test_c6_properties(curves):
    checks = {}
    # frames
    fs, orth = 0.0, 0.0
    for c in curves.values():
        s = np.linspace(0.05 * c.length, 0.95 * c.length, 41)
        fs = max(fs, *frenet_serret_residuals(c, s))
        t, n, b = (np.asarray(v) for v in c.frame(s))
        G = np.stack([t, n, b], axis=1)
        orth = max(orth, np.abs(G @ G.transpose(0, 2, 1) - np.eye(3)).max())
    checks["frenet"] = (fs < 1e-6 and orth < 1e-6, f"FS residual {fs:.1e}, orthonormality {orth:.1e}")
    # lateral factor bound
    rng = np.random.default_rng(11)
    worst = -np.inf
    for c in curves.values():
        d = 0.5 / max(c.max_curvature(), 1.0)
        gmax = c.max_curvature()
        for s, r, phi in zip(rng.uniform(0, c.length, 100), rng.uniform(0, d, 100), rng.uniform(0, 6.3, 100)):
            worst = max(worst, abs(tube_metric(c, s, r, phi).h - 1) - d * gmax)
    checks["h-bound"] = (worst <= 1e-15, f"max(|h-1| - d max g) = {worst:.1e}")
    # Q symmetry and kappa monotonicity
    sym, mono = 0.0, True
    for name in ("segment", "circular-arc", "helix-arc"):
        c = curves[name]
        asm = BSAssembler(c, default_quadrature(c, 30.0))
        grid = np.geomspace(0.5, 30.0, 20)
        mus = []
        for k in grid:
            Q = asm.bs_matrix(k)
            sym = max(sym, np.linalg.norm(Q.matrix - Q.matrix.T) / np.linalg.norm(Q.matrix))
            mus.append(bs_eigenvalues(Q, 10, refine=False))
        mono &= bool(np.all(np.diff(np.array(mus), axis=0) < 0))
    checks["Q"] = (sym < 1e-12 and mono, f"symmetry defect {sym:.1e}, mu_j strictly decreasing (j<=10): {mono}")
    # Dirichlet-Neumann ordering
    dn = all(a <= b for c in curves.values() for a, b in bracketing_table(c, 2048, 10))
    checks["DN"] = (dn, f"lambda_j(S^N) <= lambda_j(S), j<=10, all presets: {dn}")
    # FD order against box levels
    seg = curves["segment"]
    errs = [spectrum_1d(seg, 1, n)[0] - math.pi**2 for n in (127, 255, 511, 1023)]
    order = observed_order(errs)
    checks["FD"] = (bool(np.all(np.abs(order - 2) <= 0.2)), f"orders {np.round(order, 3).tolist()}")
    # O(d) prolongation
    arc = curves["circular-arc"]
    lam = spectrum_1d(arc, 1, 4096)[0]
    e = [abs(extended_rescaled_spectrum(arc, d, 4096, 1)[0][0] - lam) for d in (0.04, 0.02, 0.01)]
    ratios = [e[0] / e[1], e[1] / e[2]]
    checks["O(d)"] = (all(1.5 <= q <= 2.5 for q in ratios), f"halving ratios {np.round(ratios, 3).tolist()}")
    ok = all(v[0] for v in checks.values())
    record("C6 property suites", ok, "; ".join(f"{k}: {v[1]}" for k, v in checks.items()))
    assert ok, RESULTS["C6 property suites"]


# --------------------------------------------------------------------------
# criterion 7: boundary-condition residual
# --------------------------------------------------------------------------

def test_c7_boundary_condition(curves):
    seg = curves["segment"]
    alpha = -0.4
    pair = solve_kappa(seg, alpha)
    rho = seg.length * 2.0 ** -np.arange(6, 13)
    res, Xi, Om = verify_bc(seg, alpha, pair, seg.length / 2, rho)
    # negative control: white-noise density on the nodes. The interpolated
    # density varies on the node spacing, so the logarithmic regime needs
    # radii below it; s is taken at a node so the fitted Xi is omega(s)/(2 pi).
    rng = np.random.default_rng(20240607)
    noise = rng.standard_normal(pair.omega.size)
    noise /= np.sqrt(np.sum(noise**2 * pair.quad.weights))
    from dataclasses import replace

    fake = replace(pair, omega=noise)
    s_node = float(pair.quad.nodes[np.argmin(np.abs(pair.quad.nodes - seg.length / 2))])
    res_neg, *_ = verify_bc(seg, alpha, fake, s_node, seg.length * 2.0 ** -np.arange(14, 21))
    ok = res < 1e-2 and res_neg > 0.3
    record("C7 boundary condition", ok,
           f"eigenpair residual {res:.2e} (< 1e-2), random-density residual {res_neg:.3f} (> 0.3)")
    assert ok, RESULTS["C7 boundary condition"]


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
