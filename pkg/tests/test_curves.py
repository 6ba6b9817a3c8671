import math

import numpy as np
import pytest

from arcspec.curves import (
    CurveError,
    CurveSpec,
    FrameError,
    build_curve,
    effective_potential,
    extend_curve,
    frenet_frame,
    frenet_serret_residuals,
    injectivity_check,
    read_curve_spec,
    read_sampled_csv,
    shifted_curve,
    tube_metric,
    write_sampled_csv,
)


def _unit_speed_defect(curve, n=513):
    s = curve.sample_grid(n)
    h = 1e-5
    s = np.clip(s, curve.s_min + h, curve.s_max - h)
    v = (curve.position(s + h) - curve.position(s - h)) / (2 * h)
    return np.abs(np.linalg.norm(v, axis=-1) - 1).max()


# --- construction -----------------------------------------------------------

def test_segment_closed_form(segment):
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(segment.position(s), np.c_[s, 0 * s, 0 * s], atol=1e-15)
    assert np.all(segment.curvature(s) == 0)
    assert np.all(segment.torsion(s) == 0)


def test_arc_constant_curvature(arc):
    s = np.linspace(0, math.pi / 2, 9)
    np.testing.assert_allclose(arc.curvature(s), 1.0)
    np.testing.assert_allclose(arc.torsion(s), 0.0, atol=1e-15)


def test_helix_curvature_torsion(helix):
    # a/(a^2+b^2), b/(a^2+b^2)
    np.testing.assert_allclose(helix.curvature(np.r_[0.3, 1.7]), 0.5)
    np.testing.assert_allclose(helix.torsion(np.r_[0.3, 1.7]), 0.5)


def test_helix_curvature_finite_differences(helix):
    s, h = 1.1, 1e-3
    p = helix.position(np.r_[s - h, s, s + h])
    acc = (p[0] - 2 * p[1] + p[2]) / h**2
    assert abs(np.linalg.norm(acc) - 0.5) < 1e-6


@pytest.mark.parametrize("name", ["segment", "arc", "helix", "profile"])
def test_unit_speed(name, request):
    assert _unit_speed_defect(request.getfixturevalue(name)) < 1e-6


def test_profile_matches_table(profile):
    s = np.linspace(0.05, 0.95, 7)
    np.testing.assert_allclose(profile.curvature(s), s * (1 - s), atol=1e-10)
    np.testing.assert_allclose(profile.torsion(s), 0.3, atol=1e-12)


def test_sampled_points_reproduce_helix():
    a = b = 1.0
    c = math.hypot(a, b)
    th = np.linspace(0, 2.0, 81)
    pts = np.c_[a * np.cos(th) - a, a * np.sin(th), b * th]
    curve = build_curve(CurveSpec("sampled-points", params={"points": pts.tolist()}))
    assert abs(curve.length - 2.0 * c) < 1e-8
    s = np.linspace(0.2, curve.length - 0.2, 9)
    np.testing.assert_allclose(curve.curvature(s), 0.5, atol=1e-5)
    np.testing.assert_allclose(curve.torsion(s), 0.5, atol=1e-4)


@pytest.mark.parametrize(
    "spec, match",
    [
        (CurveSpec("curvature-profile", 1.0, {"s": [0, 0.5, 1], "curvature": [0.1, -0.2, 0.1]}), "negative"),
        (CurveSpec("curvature-profile", 1.0, {"s": [0, 0.5], "curvature": [0.1, 0.1]}), "cover"),
        (CurveSpec("sampled-points", params={"points": [[0, 0, 0], [1, 0, 0], [1, 0, 0], [2, 1, 0], [3, 0, 1]]}),
         "degenerate"),
        (CurveSpec("sampled-points", params={"points": [[0, 0, 0], [1, 0, 0], [2, 1, 0]]}), "at least 5"),
    ],
)
def test_invalid_specs(spec, match):
    with pytest.raises(CurveError, match=match):
        build_curve(spec)


def test_self_intersecting_samples_rejected():
    # figure eight in the plane, passing the origin twice
    t = np.linspace(-0.5, math.pi + 0.5, 301)
    pts = np.c_[np.sin(t), np.sin(t) * np.cos(t), 0 * t]
    with pytest.raises(CurveError, match="self-intersect"):
        build_curve(CurveSpec("sampled-points", params={"points": pts.tolist()}))


def test_arc_that_closes_rejected():
    with pytest.raises(CurveError):
        build_curve(CurveSpec("circular-arc", 2 * math.pi + 0.1, {"radius": 1.0}))


def test_flat_samples_have_no_frame():
    pts = np.c_[np.linspace(0, 1, 10), np.zeros(10), np.zeros(10)]
    with pytest.raises(FrameError):
        build_curve(CurveSpec("sampled-points", params={"points": pts.tolist()}))


def test_spec_json_round_trip():
    spec = CurveSpec("helix-arc", 2.5, {"a": 1.0, "b": 0.5}, d0=0.1)
    import json

    again = read_curve_spec(json.dumps(spec.to_dict()))
    assert again == spec
    with pytest.raises(CurveError, match="unknown"):
        CurveSpec.from_dict({"kind": "segment", "length": 1})


def test_sampled_csv_round_trip(tmp_path, helix):
    path = tmp_path / "h.csv"
    write_sampled_csv(helix, path, n=64)
    s, pts = read_sampled_csv(path)
    np.testing.assert_array_equal(pts, helix.position(s))
    assert path.read_text().splitlines()[0] == "s,x,y,z"


# --- frames -----------------------------------------------------------------

def test_segment_frame_constant(segment):
    for s in (0.0, 0.3, 1.0):
        f = frenet_frame(segment, s)
        np.testing.assert_allclose(f.t, [1, 0, 0])


def test_arc_frame_rotates_quarter_turn(arc):
    f0, f1 = frenet_frame(arc, 0.0), frenet_frame(arc, math.pi / 2)
    assert abs(f0.t @ f1.t) < 1e-12
    # normal points to the circle centre
    for f in (f0, f1):
        centre = arc.position(f.s) + 1.0 * f.n
        np.testing.assert_allclose(centre, [0.0, 1.0, 0.0], atol=1e-12)


@pytest.mark.parametrize("name", ["segment", "arc", "helix", "profile"])
def test_frame_orthonormal(name, request):
    curve = request.getfixturevalue(name)
    s = curve.sample_grid(101)
    t, n, b = (np.asarray(v) for v in curve.frame(s))
    for u in (t, n, b):
        assert np.abs(np.linalg.norm(u, axis=-1) - 1).max() < 1e-8
    for u, v in ((t, n), (t, b), (n, b)):
        assert np.abs(np.einsum("ij,ij->i", u, v)).max() < 1e-8
    assert np.abs(np.cross(t, n) - b).max() < 1e-8


@pytest.mark.parametrize("name", ["helix", "profile", "arc"])
def test_frenet_serret_residuals(name, request):
    curve = request.getfixturevalue(name)
    s = np.linspace(0.1, curve.length - 0.1, 25)
    assert max(frenet_serret_residuals(curve, s)) < 1e-6


def test_tang_angle_integrates_torsion(helix):
    assert abs(helix.tang_angle(2.0) - 0.5 * 2.0) < 1e-12
    assert frenet_frame(helix, 0.0).beta == 0.0


# --- extension ---------------------------------------------------------------

def test_segment_extension_straight(segment):
    ext = extend_curve(segment, 0.1)
    assert ext.total_length == pytest.approx(1.2)
    np.testing.assert_allclose(ext.position(np.r_[-0.1, 1.1]), [[-0.1, 0, 0], [1.1, 0, 0]], atol=1e-12)


def test_arc_extension_stays_on_circle(arc):
    ext = extend_curve(arc, 0.1)
    p = ext.position(np.r_[-0.1, math.pi / 2 + 0.1])
    np.testing.assert_allclose(np.linalg.norm(p - [0, 1, 0], axis=-1), 1.0, atol=1e-10)
    np.testing.assert_allclose(ext.curvature(np.r_[-0.1, 1.65]), 1.0)


@pytest.mark.parametrize("name", ["arc", "helix", "profile"])
def test_extension_restricts_to_original(name, request):
    curve = request.getfixturevalue(name)
    ext = extend_curve(curve, 0.1)
    s = np.linspace(0, curve.length, 97)
    assert np.abs(ext.position(s) - curve.position(s)).max() < 1e-10
    assert np.abs(ext.curvature(s) - curve.curvature(s)).max() < 1e-10


def test_profile_extension_is_c2(profile):
    ext = extend_curve(profile, 0.05)
    eps = 1e-7
    for s0 in (0.0, 1.0):
        for k in range(3):
            left = ext.curvature(s0 - eps, k)
            right = ext.curvature(s0 + eps, k)
            assert abs(left - right) < 1e-5
    # quadratic continuation of s(1-s)
    assert ext.curvature(-0.05) == pytest.approx(-0.05 * 1.05, abs=1e-9)


def test_extension_beyond_margin(segment):
    with pytest.raises(CurveError, match="exceeds"):
        extend_curve(segment, 0.3)


# --- tube coordinates --------------------------------------------------------

def test_tube_metric_examples(segment, arc):
    on_axis = tube_metric(arc, 0.4, 0.0, 1.0)
    assert on_axis.h == 1.0 and on_axis.sqrt_g == 0.0
    assert tube_metric(segment, 0.5, 0.07, 2.0).h == 1.0
    p = tube_metric(arc, 0.4, 0.1, 0.0)
    assert p.h == pytest.approx(1.1)
    assert p.sqrt_g == pytest.approx(0.11)
    # phi - beta = 0 is the outward direction
    assert np.linalg.norm(p.position - [0, 1, 0]) == pytest.approx(1.1)


def test_tube_overlap_detected(arc):
    with pytest.raises(CurveError):
        tube_metric(arc, 0.4, 1.5, math.pi)


@pytest.mark.parametrize("name", ["arc", "helix", "profile"])
def test_lateral_factor_bound(name, request):
    curve = request.getfixturevalue(name)
    d = 0.2
    gmax = curve.max_curvature()
    rng = np.random.default_rng(3)
    for s, r, phi in zip(rng.uniform(0, curve.length, 200), rng.uniform(0, d, 200),
                         rng.uniform(0, 2 * math.pi, 200)):
        assert abs(tube_metric(curve, s, r, phi).h - 1) <= d * gmax + 1e-15


def test_effective_potential_examples(segment, arc, profile):
    assert effective_potential(segment, 0.3, 0.1, 0.4) == 0.0
    assert effective_potential(arc, 0.3, 0.1, 0.0) == pytest.approx(-1 / (4 * 1.1), abs=1e-12)
    s = np.linspace(0.1, 0.9, 5)
    np.testing.assert_allclose(effective_potential(profile, s, 0.0, 0.0), -(s * (1 - s)) ** 2 / 4)


def test_effective_potential_against_finite_differences(helix):
    # h(s) along a fixed tube line, differentiated numerically
    r, phi, s0, e = 0.15, 0.7, 1.3, 1e-3

    def h(s):
        return 1 + r * helix.curvature(s) * math.cos(phi - helix.tang_angle(s))

    hs = (h(s0 + e) - h(s0 - e)) / (2 * e)
    hss = (h(s0 + e) - 2 * h(s0) + h(s0 - e)) / e**2
    h0 = h(s0)
    expect = -0.25 / h0 * 0.25 + hss / (2 * h0**3) - 5 * hs**2 / (4 * h0**4)
    assert effective_potential(helix, s0, r, phi) == pytest.approx(expect, abs=1e-6)


def test_injectivity_examples(segment, arc):
    rep = injectivity_check(segment, 0.3)
    assert rep.passed and rep.h_margin == 1.0
    rep = injectivity_check(arc, 0.5)
    assert rep.passed and rep.h_margin == pytest.approx(0.5)
    assert not injectivity_check(arc, 1.2).passed


def test_injectivity_detects_near_approach():
    # nearly closed circle: the two ends come within ~0.06 of each other
    curve = build_curve(CurveSpec("circular-arc", 2 * math.pi - 0.06, {"radius": 1.0}))
    assert injectivity_check(curve, 0.01).passed
    rep = injectivity_check(curve, 0.05)
    assert not rep.passed and rep.binding == "chord"


# --- shifted curves ----------------------------------------------------------

def test_shifted_segment_parallel(segment):
    pts = shifted_curve(segment, 0.1, 0.0, np.linspace(0, 1, 5))
    np.testing.assert_allclose(np.linalg.norm(pts[:, 1:], axis=1), 0.1)
    np.testing.assert_allclose(pts[:, 0], np.linspace(0, 1, 5), atol=1e-15)


def test_shifted_arc_inward_is_concentric(arc):
    pts = shifted_curve(arc, 0.1, math.pi)
    np.testing.assert_allclose(np.linalg.norm(pts - [0, 1, 0], axis=1), 0.9, atol=1e-12)


def test_shifted_helix_distance(helix):
    rho = 0.05
    s = np.linspace(0.2, 2.8, 41)
    pts = shifted_curve(helix, rho, 1.1, s)
    # distance to the base curve: local minimisation over a fine window
    for si, p in zip(s, pts):
        u = np.linspace(si - 0.02, si + 0.02, 4001)
        dist = np.linalg.norm(helix.position(u) - p, axis=1)
        k = np.argmin(dist)
        # refine by a parabola through the discrete minimum
        d0, d1, d2 = dist[k - 1:k + 2]
        dmin = d1 - (d2 - d0) ** 2 / (8 * (d2 - 2 * d1 + d0))
        assert abs(dmin - rho) < 1e-8


def test_shift_beyond_margin(arc):
    with pytest.raises(CurveError):
        shifted_curve(arc, 1.0, 0.0)
