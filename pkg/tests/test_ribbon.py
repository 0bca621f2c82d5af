import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_ribbons import jets
from cartan_ribbons.curves import cylinder_circle, darboux_frame, latitude, sample_curve
from cartan_ribbons.development import develop_curve
from cartan_ribbons.errors import (GridMismatch, RibbonError, UndefinedStriction,
                                   VanishingNormalCurvature)
from cartan_ribbons.ribbon import (Ribbon, build_ribbon, cap_cone, develop_ribbon,
                                   flatness_residual, lattice_fractions, ruling_direction,
                                   striction_curve, striction_parameter)
from cartan_ribbons.rolling import PlaneTrack, check_plane_rolling
from cartan_ribbons.surface import builtin_surface

from oracles import angle_defects, ellipsoid_striction_rederived, first_fundamental_form

ABC = (5.0, 4.0, 1.0)


@pytest.fixture(scope="module")
def torus_ribbon(torus_curves):
    return build_ribbon(torus_curves[0], 512, w_max=0.3)


def test_lattice_fractions():
    f = lattice_fractions(5)
    assert list(f) == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert 0.0 in lattice_fractions(33)
    with pytest.raises(ValueError):
        lattice_fractions(4)


def test_ruling_is_tangent_and_along_rolling_axis(torus_curves):
    c = torus_curves[0]
    track = PlaneTrack(c, n=512)
    for t in (-2.0, 0.3, 1.9):
        d = darboux_frame(c, t)
        beta = ruling_direction(d)
        assert abs(beta @ d.N) < 1e-14
        m = check_plane_rolling(c, t, track)
        axis = d.e * m.omega_pulled[0] + d.h * m.omega_pulled[1] + d.N * m.omega_pulled[2]
        axis /= np.linalg.norm(axis)
        assert abs(abs(axis @ beta) - 1) < 1e-12


def test_ruling_needs_normal_curvature():
    circle = latitude(builtin_surface("sphere", [1]), np.pi / 3)
    d = darboux_frame(circle, 0.0)
    flat = type(d)(d.t, d.point, d.e, d.h, d.N, d.speed, d.kg, np.asarray(0.0), d.tg)
    with pytest.raises(VanishingNormalCurvature):
        ruling_direction(flat)


def test_cartan_ribbon_is_developable(torus_ribbon):
    assert flatness_residual(torus_ribbon) < 1e-6
    defects = angle_defects(torus_ribbon.points(lattice_fractions(17)))
    assert np.max(np.abs(defects)) < 1e-9


def test_normal_ruling_control_is_not_developable(torus_curves):
    c = torus_curves[0]
    d = sample_curve(c, 512)
    control = Ribbon(c, d, d.N, np.ones(513), np.full(513, -0.3), np.full(513, 0.3))
    assert flatness_residual(control) > 0.1
    assert np.max(np.abs(angle_defects(control.points(lattice_fractions(17))))) > 1e-5


def test_torus_ribbon_develops_isometrically(torus_curves, torus_ribbon):
    rb = torus_ribbon
    w = min(float(np.min(rb.w_plus)), float(np.min(-rb.w_minus)))
    rb = rb.with_widths(np.full(rb.n + 1, -w), np.full(rb.n + 1, w))
    flat = develop_ribbon(rb, develop_curve(torus_curves[0], 512))
    u = lattice_fractions(17)
    dt, du = rb.t[1] - rb.t[0], w * (u[1] - u[0])
    ff3 = first_fundamental_form(rb.points(u), dt, du)
    ff2 = first_fundamental_form(flat.points(u), dt, du)
    for a, b in zip(ff3, ff2):
        assert np.max(np.abs(a - b)) < 1e-4 * max(1.0, np.max(np.abs(a)))


def test_flat_ribbon_keeps_rulings_unit(torus_curves, torus_ribbon):
    flat = develop_ribbon(torus_ribbon, develop_curve(torus_curves[0], 512))
    assert np.allclose(np.linalg.norm(flat.ruling, axis=-1), 1, atol=1e-13)
    outline = flat.outline()
    assert outline.shape == (2 * 513, 2)


def test_grid_mismatch(torus_curves, torus_ribbon):
    with pytest.raises(GridMismatch):
        develop_ribbon(torus_ribbon, develop_curve(torus_curves[0], 256))


def test_cylinder_striction_undefined():
    circle = cylinder_circle(builtin_surface("cylinder", [1.0]))
    rb = build_ribbon(circle, 256, w_max=0.5)
    assert np.allclose(rb.w_plus, 0.5) and np.allclose(rb.w_minus, -0.5)
    with pytest.raises(UndefinedStriction):
        striction_parameter(rb)
    with pytest.raises(RibbonError):
        build_ribbon(circle, 256)


def test_provisional_widths_stop_short_of_striction(torus_ribbon):
    ustar = striction_parameter(torus_ribbon, strict=False)
    assert np.all(torus_ribbon.w_plus <= 0.3) and np.all(torus_ribbon.w_minus >= -0.3)
    ahead = np.isfinite(ustar) & (ustar > 0)
    behind = np.isfinite(ustar) & (ustar < 0)
    assert np.all(torus_ribbon.w_plus[ahead] < ustar[ahead])
    assert np.all(torus_ribbon.w_minus[behind] > ustar[behind])


def test_ellipsoid_striction_matches_rederived_closed_form():
    from cartan_ribbons.curves import ellipsoid_u_curve
    from cartan_ribbons.surface import ellipsoid_coords
    c = ellipsoid_u_curve(ABC, 2.5)
    rb = build_ribbon(c, 2048, w_max=3.0)
    z = striction_curve(rb)
    s = rb.t
    mask = (s > 0.02) & (s < np.pi / 2 - 0.02)
    w = c.uv(s[mask])[:, 1]
    u, v = ellipsoid_coords(ABC, s[mask], w)
    ref = ellipsoid_striction_rederived(u, v)
    # compare up to octant signs
    assert np.allclose(np.abs(z[mask]), np.abs(ref), atol=1e-6)


def test_sphere_latitude_cone_caps_at_apex():
    theta = np.pi / 3
    rb = build_ribbon(latitude(builtin_surface("sphere", [1]), theta), 512)
    capped = cap_cone(rb)
    apex = capped.cone_points[0]
    assert np.allclose(apex, [0, 0, 1 / np.cos(theta)], atol=1e-8)
    # the apex-side edge reaches the apex
    assert np.max(np.linalg.norm(capped.edge(+1 if striction_parameter(rb)[0] > 0 else -1)
                                 - apex, axis=-1)) < 1e-8


def test_cap_cone_rejects_non_cones(torus_ribbon):
    with pytest.raises(RibbonError):
        cap_cone(torus_ribbon)


def test_closed_ribbon_beta_continuous(torus_ribbon):
    b = torus_ribbon.beta
    assert np.min(np.sum(b[1:] * b[:-1], -1)) > 0.9
    assert not torus_ribbon.mobius
    assert np.allclose(b[0], b[-1], atol=1e-12)


@settings(max_examples=20)
@given(st.sampled_from([0, 1]), st.floats(-3.0, 3.0))
def test_ruling_line_unchanged_by_normal_flip(which, t):
    torus = builtin_surface("torus")
    from cartan_ribbons.curves import torus_unknot
    c = torus_unknot(torus, 3, 1, which * np.pi / 3)
    a = ruling_direction(darboux_frame(c, t))
    b = ruling_direction(darboux_frame(c.reversed_normal(), t))
    assert abs(abs(a @ b) - 1) < 1e-12


@settings(max_examples=20)
@given(st.floats(0.0, 0.9), st.floats(-3.0, 3.0))
def test_ruling_line_unchanged_by_reparametrization(a, s):
    from cartan_ribbons.curves import torus_unknot
    c = torus_unknot(builtin_surface("torus"), 3, 1)
    phi = lambda x: x + a * jets.sin(x)
    r = c.reparametrized(phi, c.interval)
    b1 = ruling_direction(darboux_frame(c, phi(s)))
    b2 = ruling_direction(darboux_frame(r, s))
    assert abs(abs(b1 @ b2) - 1) < 1e-12


def test_torus_ribbon_is_regular(torus_curves):
    rb = build_ribbon(torus_curves[0], 512, w_max=0.3)
    u = lattice_fractions(17)
    dt = rb.t[1] - rb.t[0]
    # width varies with t, so difference in (t, fraction) coordinates
    E, F, G = first_fundamental_form(rb.points(u), dt, u[1] - u[0])
    assert np.min(E * G - F * F) > 1e-6
