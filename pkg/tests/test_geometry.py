"""Cutoffs, profiles, model coefficients, critical values, grids."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conelab.errors import (
    ConfigError,
    GridMismatch,
    GridTooCoarse,
    NonPositiveDefinite,
    NonPositiveDensity,
    TooManyCritical,
)
from conelab.geometry import (
    GaussianBump,
    GridSpec,
    ManifoldModel,
    ModelTerm,
    PowerTail,
    TrigPoly,
    check_aligned,
    critical_points,
    critical_values,
    cutoff_j,
    cutoff_j_d1,
    cutoff_j_tilde,
    default_model,
    flat_free_model,
    seeded_well_model,
    smoothstep,
    smoothstep_d1,
)


# ---------------------------------------------------------------- cutoffs

def test_smoothstep_endpoints():
    assert smoothstep(-1.0) == 0.0
    assert smoothstep(0.0) == 0.0
    assert smoothstep(1.0) == 1.0
    assert smoothstep(2.0) == 1.0
    # midpoint is exactly 1/2 by the symmetry of the glue
    assert smoothstep(0.5) == pytest.approx(0.5, abs=1e-15)


@given(st.floats(min_value=-2.0, max_value=3.0, allow_nan=False))
@settings(max_examples=200, deadline=None)
def test_smoothstep_complement_symmetry(x):
    s = smoothstep(x) + smoothstep(1.0 - x)
    assert s == pytest.approx(1.0, abs=1e-12)


def test_smoothstep_monotone():
    x = np.linspace(-0.5, 1.5, 801)
    s = smoothstep(x)
    assert np.all(np.diff(s) >= 0.0)
    assert np.all((s >= 0.0) & (s <= 1.0))


def test_smoothstep_derivative_matches_finite_difference():
    x = np.linspace(0.05, 0.95, 91)
    h = 1e-6
    fd = (smoothstep(x + h) - smoothstep(x - h)) / (2 * h)
    np.testing.assert_allclose(smoothstep_d1(x), fd, rtol=1e-7, atol=1e-9)
    # exact value at the midpoint: derivative equals 2 there
    assert smoothstep_d1(0.5) == pytest.approx(2.0, rel=1e-12)


def test_cutoff_j_frozen_values():
    r = np.array([0.0, 0.3, 0.5, 0.6, 0.75, 1.0, 4.0])
    j = cutoff_j(r)
    assert np.all(j[:3] == 0.0)
    assert j[3] == pytest.approx(0.02297736991002561, rel=1e-12)
    assert j[4] == pytest.approx(0.5, abs=1e-14)
    assert np.all(j[5:] == 1.0)
    # even in r
    np.testing.assert_allclose(cutoff_j(-r), j, atol=0.0)


def test_cutoff_j_derivative():
    r = np.linspace(0.45, 1.05, 121)
    h = 1e-6
    fd = (cutoff_j(r + h) - cutoff_j(r - h)) / (2 * h)
    np.testing.assert_allclose(cutoff_j_d1(r), fd, rtol=1e-6, atol=1e-8)
    assert cutoff_j_d1(0.3) == 0.0
    assert cutoff_j_d1(1.5) == 0.0


def test_cutoff_j_tilde_branches_and_frozen_value():
    assert cutoff_j_tilde(0.2) == 1.0
    assert cutoff_j_tilde(0.5) == 1.0
    for r in (1.0, 1.7, 5.0):
        assert cutoff_j_tilde(r) == pytest.approx(r**-2, rel=1e-14)
    assert cutoff_j_tilde(0.8) == pytest.approx(1.36491010346553158, rel=1e-13)
    assert cutoff_j_tilde(-0.8) == cutoff_j_tilde(0.8)


def test_cutoff_j_tilde_positive_with_bounded_overshoot():
    # any smooth glue between 1 and 1/r^2 exceeds 1 on (1/2, 1); this one
    # stays below 1.37
    r = np.linspace(0.501, 0.999, 2000)
    jt = cutoff_j_tilde(r)
    assert np.all(jt >= 1.0)
    assert np.all(cutoff_j_tilde(np.linspace(0.6, 0.95, 200)) > 1.0)
    assert np.max(jt) < 1.37
    assert np.all(cutoff_j_tilde(np.linspace(0.01, 20.0, 500)) > 0.0)


# ---------------------------------------------------------------- profiles

def test_trigpoly_values_and_derivatives():
    p = TrigPoly(const=0.5, cos_coeffs=(1.0, 0.3), sin_coeffs=(0.0, -0.2))
    t = np.linspace(0.0, 2 * math.pi, 37)
    expect = 0.5 + np.cos(t) + 0.3 * np.cos(2 * t) - 0.2 * np.sin(2 * t)
    np.testing.assert_allclose(p.value(t), expect, rtol=1e-14)
    h = 1e-6
    fd1 = (p.value(t + h) - p.value(t - h)) / (2 * h)
    np.testing.assert_allclose(p.d1(t), fd1, rtol=1e-7, atol=1e-8)
    fd2 = (p.d1(t + h) - p.d1(t - h)) / (2 * h)
    np.testing.assert_allclose(p.d2(t), fd2, rtol=1e-6, atol=1e-7)


@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5))
@settings(max_examples=50, deadline=None)
def test_trigpoly_periodicity(c1, c2):
    p = TrigPoly(const=0.1, cos_coeffs=(c1,), sin_coeffs=(c2,))
    t = np.array([0.3, 1.1, 4.0])
    np.testing.assert_allclose(p.value(t + 2 * math.pi), p.value(t),
                               rtol=1e-12, atol=1e-12)


def test_power_tail():
    tail = PowerTail(amp=0.2, mu=2.0)
    assert tail.value(0.4) == 0.0
    assert tail.value(2.0) == pytest.approx(0.05, rel=1e-14)
    r = np.linspace(0.55, 4.0, 200)
    h = 1e-6
    fd = (tail.value(r + h) - tail.value(r - h)) / (2 * h)
    np.testing.assert_allclose(tail.d1(r), fd, rtol=1e-5, atol=1e-7)
    assert tail.decay_rate() == 2.0
    assert tail.decay_const() == pytest.approx(0.2)


def test_gaussian_bump():
    well = GaussianBump(amp=-1.5, center=3.0, width=0.8)
    assert well.value(3.0) == -1.5
    r = np.linspace(0.0, 8.0, 100)
    h = 1e-6
    fd = (well.value(r + h) - well.value(r - h)) / (2 * h)
    np.testing.assert_allclose(well.d1(r), fd, rtol=1e-5, atol=1e-7)
    assert np.isfinite(well.decay_const())


# ---------------------------------------------------------------- model

def test_default_model_coefficients():
    m = default_model()
    r = np.full(5, 2.0)
    th = np.linspace(0, 2 * math.pi, 5, endpoint=False)
    c = m.eval_coefficients(r, th)
    np.testing.assert_allclose(c.a1, 1.0 + 0.1 / 4.0, rtol=1e-14)
    np.testing.assert_allclose(c.a2, 0.05 / 4.0, rtol=1e-14)
    np.testing.assert_allclose(c.a3, 1.0 + 0.1 / 4.0, rtol=1e-14)
    np.testing.assert_allclose(c.v, np.cos(2 * th) + 0.2 / 4.0, rtol=1e-12)
    np.testing.assert_allclose(c.g, 2.0, rtol=1e-14)


def test_model_partials_match_finite_difference():
    m = default_model()
    rng = np.random.default_rng(7)
    r = rng.uniform(0.6, 6.0, size=40)
    th = rng.uniform(0.0, 2 * math.pi, size=40)
    h = 1e-6
    pairs = [
        (m.da1_dr, lambda rr, tt: m.a1(rr, tt), "r"),
        (m.da2_dr, lambda rr, tt: m.a2(rr, tt), "r"),
        (m.da3_dr, lambda rr, tt: m.a3(rr, tt), "r"),
        (m.dV_dr, lambda rr, tt: m.potential(rr, tt), "r"),
        (m.da1_dth, lambda rr, tt: m.a1(rr, tt), "t"),
        (m.da2_dth, lambda rr, tt: m.a2(rr, tt), "t"),
        (m.da3_dth, lambda rr, tt: m.a3(rr, tt), "t"),
        (m.dV_dth, lambda rr, tt: m.potential(rr, tt), "t"),
    ]
    for deriv, f, which in pairs:
        if which == "r":
            fd = (f(r + h, th) - f(r - h, th)) / (2 * h)
        else:
            fd = (f(r, th + h) - f(r, th - h)) / (2 * h)
        np.testing.assert_allclose(deriv(r, th), fd, rtol=2e-5, atol=1e-7)


def test_potential_switches_off_in_cap():
    m = default_model()
    th = np.linspace(0, 2 * math.pi, 9)
    # inside r < 1/4 both the angular part (via j(2r)) and the tail vanish
    np.testing.assert_allclose(m.potential(np.full(9, 0.2), th), 0.0, atol=0.0)
    # far out the angular part is the pure angular potential plus the tail
    v = m.potential(np.full(9, 10.0), th)
    np.testing.assert_allclose(v, np.cos(2 * th) + 0.2 / 100.0, rtol=1e-12)


def test_eval_coefficients_rejects_bad_density():
    m = default_model().with_(density_profile=TrigPoly(const=1.0, cos_coeffs=(1.5,)))
    th = np.linspace(0, 2 * math.pi, 32, endpoint=False)
    with pytest.raises(NonPositiveDensity):
        m.eval_coefficients(np.full(32, 2.0), th)


def test_eval_coefficients_rejects_indefinite_block():
    m = default_model().with_(mixed_metric_pert=ModelTerm(PowerTail(amp=5.0)))
    th = np.linspace(0, 2 * math.pi, 8, endpoint=False)
    with pytest.raises(NonPositiveDefinite):
        m.eval_coefficients(np.full(8, 1.0), th)


def test_flat_free_model_is_trivial():
    m = flat_free_model()
    r = np.array([0.3, 1.0, 5.0])
    th = np.array([0.1, 2.0, 4.0])
    c = m.eval_coefficients(r, th)
    np.testing.assert_allclose(c.a1, 1.0)
    np.testing.assert_allclose(c.a2, 0.0)
    np.testing.assert_allclose(c.a3, 1.0)
    np.testing.assert_allclose(c.v, 0.0)
    np.testing.assert_allclose(c.g, r)


def test_seeded_well_depth():
    m = seeded_well_model(depth=1.5, center=3.0, width=0.8)
    assert m.potential(3.0, 0.0) == pytest.approx(-1.5)


# ------------------------------------------------------- critical values

def test_critical_values_default_model():
    m = default_model()  # angular potential cos(2t)
    pts = critical_points(m)
    np.testing.assert_allclose(
        pts, [0.0, math.pi / 2, math.pi, 3 * math.pi / 2], atol=1e-9
    )
    np.testing.assert_allclose(critical_values(m), [-1.0, 1.0], atol=1e-12)


def test_critical_values_frozen_oracle():
    # cos t + 0.3 cos 2t: stationary at t = 0, pi, +-arccos(-5/6);
    # distinct values are exactly {13/10, -7/10, -43/60}
    m = ManifoldModel(angular_potential=TrigPoly(cos_coeffs=(1.0, 0.3)))
    pts = critical_points(m)
    assert pts.size == 4
    star = math.acos(-5.0 / 6.0)
    np.testing.assert_allclose(
        pts, [0.0, star, math.pi, 2 * math.pi - star], atol=1e-9
    )
    np.testing.assert_allclose(
        critical_values(m), [-43.0 / 60.0, -7.0 / 10.0, 13.0 / 10.0], atol=1e-12
    )


def test_critical_values_constant_potential():
    vals = critical_values(flat_free_model())
    np.testing.assert_allclose(vals, [0.0])
    m = ManifoldModel(angular_potential=TrigPoly(const=2.5))
    np.testing.assert_allclose(critical_values(m), [2.5])


def test_too_many_critical_points():
    m = ManifoldModel(angular_potential=TrigPoly(cos_coeffs=(0.0,) * 39 + (1.0,)))
    with pytest.raises(TooManyCritical):
        critical_points(m)


# ---------------------------------------------------------------- grids

def test_gridspec_default_geometry():
    spec = GridSpec()
    cone = spec.cone_grid()
    assert cone.dr == pytest.approx(0.25)
    assert cone.r[0] == pytest.approx(spec.r_min + cone.dr)
    assert cone.r[-1] == pytest.approx(spec.r_max - cone.dr)
    assert cone.n_r == spec.n_r and cone.n_theta == spec.n_theta
    assert cone.size == spec.n_r * spec.n_theta
    assert cone.theta[0] == 0.0
    assert cone.theta[-1] == pytest.approx(2 * math.pi - cone.dtheta)


def test_tube_snaps_to_cone_lattice():
    spec = GridSpec()
    cone, tube = spec.cone_grid(), spec.tube_grid()
    assert tube.dr == cone.dr
    assert tube.r_lo <= spec.tube_r_min + cone.dr  # snapped nearby
    assert tube.r[-1] == pytest.approx(cone.r[-1])
    idx = check_aligned(cone, tube)
    np.testing.assert_allclose(tube.r[idx], cone.r, atol=1e-12)


def test_check_aligned_rejects_mismatch():
    spec = GridSpec()
    other = GridSpec(n_theta=32)
    with pytest.raises(GridMismatch):
        check_aligned(spec.cone_grid(), other.tube_grid())


def test_refine_halves_spacing():
    spec = GridSpec()
    fine = spec.refine()
    assert fine.dr == pytest.approx(spec.dr / 2)
    assert fine.dtheta == pytest.approx(spec.dtheta / 2)
    # coarse nodes survive refinement
    coarse, dense = spec.cone_grid(), fine.cone_grid()
    assert set(np.round(coarse.r, 12)).issubset(set(np.round(dense.r, 12)))


def test_gridspec_validation():
    with pytest.raises(ConfigError):
        GridSpec(r_min=0.6)
    with pytest.raises(ConfigError):
        GridSpec(r_max=0.9)
    with pytest.raises(ConfigError):
        GridSpec(n_r=4)
    with pytest.raises(ConfigError):
        GridSpec(n_theta=4)
    with pytest.raises(ConfigError):
        GridSpec(tube_r_min=1.0)
    with pytest.raises(GridTooCoarse):
        GridSpec(e_max=400.0)  # needs dr <= pi/(4 sqrt(800)) ~ 0.028
    # generous bound passes
    GridSpec(e_max=2.0)


def test_reduced_radial_gridspec():
    spec = GridSpec.reduced_radial(n_r=200, r_max=40.0)
    assert spec.n_theta == 1
    g = spec.cone_grid()
    assert g.size == 200


def test_weights_and_far_mask():
    spec = GridSpec()
    m = default_model()
    cone, tube = spec.cone_grid(), spec.tube_grid()
    w = cone.weights(m)
    assert w.shape == (cone.size,)
    assert np.all(w > 0.0)
    rr, _ = cone.flat_meshes()
    np.testing.assert_allclose(w, rr * cone.dr * cone.dtheta, rtol=1e-14)
    wt = tube.weights(m)
    np.testing.assert_allclose(wt, tube.dr * tube.dtheta, rtol=1e-14)
    far = cone.far_mask(2.0, outer_collar=4.0)
    assert np.all(rr[far] > 2.0)
    assert np.all(rr[far] < cone.r_hi - 4.0)
    assert far.sum() > 0
