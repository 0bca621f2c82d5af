from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cartan_ribbons.assembly import assemble
from cartan_ribbons.curves import cylinder_circle, latitude
from cartan_ribbons.ribbon import build_ribbon, cap_cone
from cartan_ribbons.surface import builtin_surface
from cartan_ribbons.topology import (Character, Vertex, WedgeGraph, character_for_degree,
                                     cut_ribbon_total, detect_vertices, develop_all,
                                     euler_characteristic, gauss_bonnet_audit, polyhedron_euler)


def audit_single(rb):
    rz = assemble([rb])
    g = detect_vertices(rz)
    return g, gauss_bonnet_audit(rz, g, develop_all(rz))


@pytest.mark.parametrize("counts, chi", [((6, 12, 8), 2), ((4, 6, 4), 2), ((16, 32, 16), 0)])
def test_polyhedron_examples(counts, chi):
    ribbon_route, direct = polyhedron_euler(*counts)
    assert ribbon_route == direct == chi


@given(st.integers(0, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_polyhedron_ribbon_route_equals_v_minus_e_plus_f(f, e, v):
    ribbon_route, direct = polyhedron_euler(f, e, v)
    assert ribbon_route == direct == v - e + f
    assert isinstance(ribbon_route, Fraction)


def test_polyhedron_rejects_negative_counts():
    with pytest.raises(ValueError):
        polyhedron_euler(-1, 0, 0)


@pytest.mark.parametrize("d, ch", [(0, Character.ConePoint), (1, Character.WedgeEndPoint),
                                   (2, Character.ZeroContributing), (3, Character.Conventional),
                                   (7, Character.Conventional)])
def test_character_by_degree(d, ch):
    assert character_for_degree(d) is ch


def _graph(degrees):
    return WedgeGraph([Vertex(np.zeros(3), d, []) for d in degrees], [])


def test_euler_characteristic_is_exact_half_integer():
    assert euler_characteristic(_graph([1, 1, 1, 1])) == 2
    assert euler_characteristic(_graph([3])) == Fraction(-1, 2)
    assert euler_characteristic(_graph([])) == 0


@given(st.lists(st.integers(0, 8), max_size=20), st.integers(0, 10))
def test_degree_two_vertices_do_not_change_chi(degrees, extra):
    assert euler_characteristic(_graph(degrees + [2] * extra)) == euler_characteristic(_graph(degrees))


def test_torus_scene_topology(torus_scene):
    assert torus_scene.graph.vertices == []
    assert torus_scene.audit.chi == 0
    assert abs(torus_scene.audit.total_over_2pi) < 0.02


def test_ellipsoid_scene_topology(ellipsoid_scene):
    g = ellipsoid_scene.graph
    assert len(g.vertices) == 4
    assert all(v.degree == 1 and v.character is Character.WedgeEndPoint for v in g.vertices)
    pts = np.array([v.point for v in g.vertices])
    # on the xz principal section, symmetric in x and z
    assert np.allclose(pts[:, 1], 0, atol=1e-3)
    assert np.allclose(np.sort(np.abs(pts[:, 0])), np.abs(pts[0, 0]), atol=1e-3)
    # ribbons are tangent developables of a convex surface, so their edges lie
    # just outside it
    level = np.sum(pts**2 / np.array([5.0, 4.0, 1.0]), -1)
    assert np.all((level > 1) & (level < 1.05))
    assert ellipsoid_scene.audit.chi == 2
    assert abs(ellipsoid_scene.audit.total_over_2pi - 2) < 0.02


def test_closed_cylinder_ribbon_audits_to_zero():
    rb = build_ribbon(cylinder_circle(builtin_surface("cylinder", [1.0])), 256, w_max=0.5)
    g, audit = audit_single(rb)
    assert g.vertices == [] and audit.chi == 0
    assert abs(audit.total) < 1e-3 * 2 * np.pi


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3])
def test_closed_latitude_band_audits_to_zero(theta):
    rb = build_ribbon(latitude(builtin_surface("sphere", [1]), theta), 512)
    _, audit = audit_single(rb)
    assert abs(audit.total) < 1e-3 * 2 * np.pi


def test_cut_cylinder_ribbon_totals_two_pi():
    rb = build_ribbon(cylinder_circle(builtin_surface("cylinder", [1.0])), 256, w_max=0.5)
    pr = develop_all(assemble([rb]))[0]
    assert cut_ribbon_total(pr) == pytest.approx(2 * np.pi, abs=1e-3 * 2 * np.pi)


@pytest.mark.parametrize("theta", [np.pi / 6, np.pi / 3, 2 * np.pi / 3])
def test_capped_cone_is_a_disk(theta):
    rb = cap_cone(build_ribbon(latitude(builtin_surface("sphere", [1]), theta), 512))
    g, audit = audit_single(rb)
    assert len(g.vertices) == 1
    v = g.vertices[0]
    assert v.degree == 0 and v.cone and v.character is Character.ConePoint
    assert np.allclose(v.point, [0, 0, 1 / np.cos(theta)], atol=1e-6)
    assert audit.chi == 1
    assert abs(audit.total_over_2pi - 1) < 1e-3


def test_chi_stable_under_grid_refinement(torus_curves):
    chis = []
    for n in (1024, 2048):
        rz = assemble([build_ribbon(c, n, w_max=3.0) for c in torus_curves])
        chis.append(euler_characteristic(detect_vertices(rz)))
    assert chis == [0, 0]


def test_audit_table_lists_everything(ellipsoid_scene):
    text = ellipsoid_scene.audit.table()
    assert text.count("WedgeEndPoint") == 4
    assert "chi (exact)      2" in text
    assert len([ln for ln in text.splitlines() if ln.strip().startswith(("0 ", "5 "))]) >= 2
