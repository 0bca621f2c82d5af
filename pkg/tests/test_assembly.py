import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cartan_ribbons.assembly import (Tolerances, assemble, overlap_excess, self_trim,
                                     solve_widths, wedge_consistency)
from cartan_ribbons.curves import cylinder_circle
from cartan_ribbons.errors import NoIntersection
from cartan_ribbons.ribbon import build_ribbon
from cartan_ribbons.surface import builtin_surface

from oracles import lattice_search_widths


def band(height, w_max=0.4, n=64):
    # the ruling of a circle on the cylinder points along -z
    return build_ribbon(cylinder_circle(builtin_surface("cylinder", [1.0]), height), n,
                        w_max=w_max)


def test_two_bands_meet_halfway():
    a, b = band(0.0), band(0.5)
    a2, b2, wedges = solve_widths(a, b)
    assert np.allclose(a2.w_minus, -0.25, atol=1e-12)   # upward side of the lower band
    assert np.allclose(a2.w_plus, 0.4)
    assert np.allclose(b2.w_plus, 0.25, atol=1e-12)
    assert np.allclose(b2.w_minus, -0.4)
    assert len(wedges) == 1 and wedges[0].closed
    assert {wedges[0].left, wedges[0].right} == {(0, -1), (1, 1)}
    assert np.allclose(wedges[0].points[:, 2], 0.25, atol=1e-12)


def test_two_bands_match_exhaustive_lattice_search():
    a, b = band(0.0), band(0.5)
    a2, _, _ = solve_widths(a, b)
    wm, wp = lattice_search_widths(a.frames.point, a.beta, b.frames.point, b.beta, 0.4, 32)
    # the lattice resolves widths to one cell
    cell = 0.4 / 32
    assert np.max(np.abs(a2.w_minus - wm)) <= cell
    assert np.max(np.abs(a2.w_plus - wp)) <= cell


def test_middle_band_trimmed_on_both_sides():
    rz = assemble([band(0.0), band(0.5), band(1.0)])
    mid = rz.ribbons[1]
    assert np.allclose(mid.w_minus, -0.25, atol=1e-12)
    assert np.allclose(mid.w_plus, 0.25, atol=1e-12)
    assert len(rz.wedges) == 2
    assert not rz.issues


def test_separated_bands_do_not_meet():
    with pytest.raises(NoIntersection):
        solve_widths(band(0.0), band(2.0))
    with pytest.raises(NoIntersection):
        self_trim(band(0.0))


@settings(max_examples=25)
@given(st.floats(0.05, 0.75))
def test_band_widths_are_symmetric(d):
    a2, b2, _ = solve_widths(band(0.0), band(d))
    assert np.allclose(-a2.w_minus, d / 2, atol=1e-10)
    assert np.allclose(b2.w_plus, d / 2, atol=1e-10)


def test_torus_widths_only_shrink(torus_scene):
    rz = torus_scene.rz
    for rb, (wm, wp) in zip(rz.ribbons, rz.provisional):
        assert np.all(rb.w_plus <= wp) and np.all(rb.w_minus >= wm)
        assert np.all(rb.w_plus > 0) and np.all(rb.w_minus < 0)


def test_torus_trimmed_edges_meet_partner_rulings(torus_scene):
    rz = torus_scene.rz
    assert wedge_consistency(rz) < 1e-5
    # the partner's width is interpolated linearly between samples, so the
    # excess is bounded by that interpolation error, far below a grid cell
    assert overlap_excess(rz) < 1e-4


def test_torus_wedges_pair_the_two_ribbons(torus_scene):
    rz = torus_scene.rz
    assert rz.wedges
    for w in rz.wedges:
        assert w.right is not None
    assert all(name == "NonTransversalContact" for name, _ in rz.issues)


def test_wedge_points_lie_on_both_ribbons(torus_scene):
    # each wedge point is an edge point of one ribbon and sits on a ruling of the other
    rz = torus_scene.rz
    for k, rb in enumerate(rz.ribbons):
        for s in (+1, -1):
            c = rz.contacts[k][s]
            idx = np.nonzero(c.partner >= 0)[0]
            other = rz.ribbons[int(c.partner[idx[0]])]
            d, beta = other.frame_at(c.t_partner[idx])
            q = d.point + c.u_partner[idx][:, None] * beta
            assert np.max(np.linalg.norm(rb.edge(s)[idx] - q, axis=-1)) < 1e-5


def test_assembly_is_deterministic(torus_curves):
    rbs = [build_ribbon(c, 256, w_max=3.0) for c in torus_curves]
    a, b = assemble(rbs), assemble(rbs)
    for x, y in zip(a.ribbons, b.ribbons):
        assert np.array_equal(x.w_minus, y.w_minus) and np.array_equal(x.w_plus, y.w_plus)


def test_tolerances_defaults():
    tol = Tolerances()
    assert tol.guard_cells == 3 and tol.root_iterations > 0
