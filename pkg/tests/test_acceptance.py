"""The ten acceptance criteria, each at its stated tolerance.

Every criterion records a PASS/FAIL line with its measured numbers; the
lines are printed in the terminal summary (see ``conftest.py``).
"""
import sys
import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from cartan_ribbons.assembly import assemble, solve_widths
from cartan_ribbons.curves import (cylinder_circle, darboux_frame, ellipsoid_octant_u_curve,
                                   ellipsoid_u_curve, latitude, sample_curve)
from cartan_ribbons.development import develop_curve, develop_profile
from cartan_ribbons.ribbon import (Ribbon, build_ribbon, develop_ribbon, flatness_residual,
                                   lattice_fractions, striction_curve)
from cartan_ribbons.rolling import (PlaneTrack, check_plane_rolling, omega_matrix,
                                    plane_rotation_at, rotation_by_differences)
from cartan_ribbons.surface import builtin_surface, ellipsoid_coords
from cartan_ribbons.topology import (cut_ribbon_total, detect_vertices, develop_all,
                                     gauss_bonnet_audit, polyhedron_euler)

from conftest import ELLIPSOID, ELLIPSOID_V, Scene
from oracles import (angle_defects, congruence_distance, ellipsoid_kg,
                     ellipsoid_striction_displayed, ellipsoid_striction_rederived,
                     first_fundamental_form, lattice_search_widths)

RESULTS = {}
TWO_PI = 2 * np.pi


@contextmanager
def criterion(number, title):
    notes = []
    try:
        yield notes
    except AssertionError:
        RESULTS[number] = (False, title, "; ".join(notes))
        raise
    RESULTS[number] = (True, title, "; ".join(notes))


def check(notes, ok, message):
    notes.append(message)
    assert ok, message


def fixture_curves():
    torus = builtin_surface("torus")
    from cartan_ribbons.curves import torus_unknot
    return {
        "torus": torus_unknot(torus, 3, 1, 0.0, name="gamma1"),
        "torus2": torus_unknot(torus, 3, 1, np.pi / 3, name="gamma2"),
        "ellipsoid": ellipsoid_u_curve(ELLIPSOID, ELLIPSOID_V[1]),
        "cylinder": cylinder_circle(builtin_surface("cylinder", [1.0])),
        "sphere": latitude(builtin_surface("sphere", [1]), np.pi / 3),
    }


def test_1_torus_topology(torus_curves):
    with criterion(1, "torus topology") as notes:
        start = time.perf_counter()
        sc = Scene([build_ribbon(c, 2048, w_max=3.0) for c in torus_curves])
        elapsed = time.perf_counter() - start
        check(notes, len(sc.graph.vertices) == 0, f"{len(sc.graph.vertices)} vertices")
        check(notes, sc.audit.chi == 0, f"chi = {sc.audit.chi}")
        dev = abs(sc.audit.total) / TWO_PI
        check(notes, dev < 0.02, f"audit/2pi = {sc.audit.total_over_2pi:+.2e}")
        check(notes, elapsed <= 60, f"{elapsed:.1f} s")


def test_2_ellipsoid_topology(ellipsoid_scene):
    with criterion(2, "ellipsoid topology") as notes:
        g, a = ellipsoid_scene.graph, ellipsoid_scene.audit
        degrees = [v.degree for v in g.vertices]
        check(notes, degrees == [1, 1, 1, 1], f"degrees {degrees}")
        check(notes, a.chi == 2, f"chi = {a.chi}")
        check(notes, abs(a.total - 2 * TWO_PI) < 0.02 * TWO_PI,
              f"audit/2pi = {a.total_over_2pi:.6f}")


def test_3_ellipsoid_closed_forms():
    with criterion(3, "ellipsoid closed forms") as notes:
        abc = ELLIPSOID
        worst_kg, worst_tg = 0.0, 0.0
        for v in ELLIPSOID_V:
            c = ellipsoid_octant_u_curve((*abc, 1, 1, 1), v)
            t = np.linspace(abc[1], abc[0], 52)[1:-1]
            d = darboux_frame(c, t)
            ref = ellipsoid_kg(t, v, *abc)
            worst_kg = max(worst_kg, float(np.max(np.abs(np.abs(d.kg) - ref) / ref)))
            worst_tg = max(worst_tg, float(np.max(np.abs(d.tg))))
        check(notes, worst_kg < 1e-5, f"kg rel err {worst_kg:.1e}")
        check(notes, worst_tg < 1e-7, f"|tg| max {worst_tg:.1e}")

        err_shown, err_rederived = np.zeros(3), np.zeros(3)
        for v in ELLIPSOID_V:
            c = ellipsoid_u_curve(abc, v)
            rb = build_ribbon(c, 2048, w_max=3.0)
            z = striction_curve(rb)
            s = rb.t
            m = (s > 0.02) & (s < np.pi / 2 - 0.02)
            u, vv = ellipsoid_coords(abc, s[m], c.uv(s[m])[:, 1])
            err_shown = np.maximum(err_shown, np.max(np.abs(z[m] - ellipsoid_striction_displayed(u, vv, *abc)), 0))
            err_rederived = np.maximum(err_rederived, np.max(np.abs(z[m] - ellipsoid_striction_rederived(u, vv, *abc)), 0))
        # the displayed third component carries (a - b) where the derivation gives
        # (a - c); with the latter the striction points agree to rounding level
        check(notes, err_shown.max() < 1e-6,
              f"striction vs displayed form: x {err_shown[0]:.1e}, y {err_shown[1]:.1e}, "
              f"z {err_shown[2]:.2f}; with (a-c) in the z denominator {err_rederived.max():.1e}")


@pytest.mark.parametrize("key, width", [("torus", 0.3), ("ellipsoid", None),
                                        ("cylinder", 0.5), ("sphere", 0.3)])
def test_4_isometry(key, width):
    with criterion(f"4{key}", f"isometry ({key})") as notes:
        c = fixture_curves()[key]
        rb = build_ribbon(c, 512, w_max=width)
        w = min(float(np.min(rb.w_plus)), float(np.min(-rb.w_minus)))
        rb = rb.with_widths(np.full(rb.n + 1, -w), np.full(rb.n + 1, w))
        flat = develop_ribbon(rb, develop_curve(c, 512))
        u = lattice_fractions(17)
        dt, du = rb.t[1] - rb.t[0], w * (u[1] - u[0])
        ff3 = first_fundamental_form(rb.points(u), dt, du)
        ff2 = first_fundamental_form(flat.points(u), dt, du)
        worst = max(float(np.max(np.abs(a - b))) for a, b in zip(ff3, ff2))
        check(notes, worst < 1e-5, f"max |dE|,|dF|,|dG| = {worst:.1e} on 513x17 nodes, width {w:.3g}")


def test_5_flatness():
    with criterion(5, "flatness") as notes:
        curves = fixture_curves()
        worst_res, worst_def = 0.0, 0.0
        for key in ("torus", "ellipsoid", "cylinder", "sphere"):
            rb = build_ribbon(curves[key], 2048, w_max=0.3)
            worst_res = max(worst_res, flatness_residual(rb))
            worst_def = max(worst_def, float(np.max(np.abs(angle_defects(rb.points(lattice_fractions(33)))))))
        check(notes, worst_res < 1e-5, f"Cartan residual {worst_res:.1e}")
        check(notes, worst_def < 1e-6, f"Cartan angle defect {worst_def:.1e}")
        c = curves["torus"]
        d = sample_curve(c, 2048)
        ones = np.ones(2049)
        control = Ribbon(c, d, d.N, ones, -0.3 * ones, 0.3 * ones)
        res = flatness_residual(control)
        defect = float(np.max(np.abs(angle_defects(control.points(lattice_fractions(33))))))
        check(notes, res > 1e-5 and defect > 1e-6,
              f"normal-ruling control residual {res:.2f}, defect {defect:.1e}")


def test_6_development_convergence(torus_curves):
    with criterion(6, "development convergence") as notes:
        gaps = {}
        for n in (256, 512, 1024, 2048):
            t = np.linspace(-np.pi, np.pi, n + 1)
            gaps[n] = develop_profile(t, 1.0, 1.0).closed_gap
        p1, p2 = (develop_curve(c, 2048) for c in torus_curves)
        h = congruence_distance(p1.points, p2.points)
        check(notes, h < 1e-6, f"center curves Hausdorff {h:.1e}")
        check(notes, gaps[2048] < 1e-6, f"gap(2048) {gaps[2048]:.1e}")
        ratios = [gaps[n] / max(gaps[2 * n], np.finfo(float).tiny) for n in (256, 512)]
        check(notes, all(r >= 8 for r in ratios),
              "gaps " + ", ".join(f"{gaps[n]:.1e}" for n in (256, 512, 1024))
              + ", ratios " + ", ".join(f"{r:.2f}" for r in ratios)
              + "; Simpson on a periodic integrand is at rounding level from n = 256 on,"
              " so no reduction is left to observe")


def test_7_rolling_identities():
    with criterion(7, "rolling identities") as notes:
        worst_fd, worst_n, worst_norm = 0.0, 0.0, 0.0
        for c in fixture_curves().values():
            track = PlaneTrack(c, n=1024)
            lo, hi = c.interval
            for t in np.linspace(lo, hi, 9)[1:-1]:
                d = darboux_frame(c, t)
                m = check_plane_rolling(c, t, track)
                fd = rotation_by_differences(plane_rotation_at(track), t)
                worst_fd = max(worst_fd, float(np.max(np.abs(fd - omega_matrix(d, track.sample(t, d))))))
                worst_n = max(worst_n, abs(float(m.omega @ np.array([0.0, 0.0, 1.0])))
                              / float(np.linalg.norm(m.omega)))
                expected = float(d.speed * np.hypot(d.kn, d.tg))
                worst_norm = max(worst_norm, abs(float(np.linalg.norm(m.omega_pulled)) - expected))
        check(notes, worst_fd < 1e-5, f"FD vs closed-form Omega {worst_fd:.1e}")
        check(notes, worst_n < 1e-7, f"normal component / |omega| {worst_n:.1e}")
        check(notes, worst_norm < 1e-9, f"| |omega_hat| - v sqrt(kn^2+tg^2) | {worst_norm:.1e}")


def test_8_ribbon_formula_algebra():
    with criterion(8, "ribbon formula algebra") as notes:
        rng = np.random.default_rng(8)
        triples = rng.integers(0, 10**6, size=(1000, 3))
        bad = 0
        for v, e, f in triples:
            ribbon_route, direct = polyhedron_euler(int(f), int(e), int(v))
            bad += ribbon_route != Fraction(int(v) - int(e) + int(f)) or ribbon_route != direct
        check(notes, bad == 0, f"{1000 - bad}/1000 random triples exact")
        cube, tet, grid = (polyhedron_euler(*x)[0] for x in ((6, 12, 8), (4, 6, 4), (16, 32, 16)))
        check(notes, (cube, tet, grid) == (2, 2, 0), f"cube {cube}, tetrahedron {tet}, torus grid {grid}")


def test_9_closed_ribbon_nullity():
    with criterion(9, "closed-ribbon nullity") as notes:
        rb = build_ribbon(cylinder_circle(builtin_surface("cylinder", [1.0])), 2048, w_max=0.5)
        rz = assemble([rb])
        g = detect_vertices(rz)
        planar = develop_all(rz)
        audit = gauss_bonnet_audit(rz, g, planar)
        check(notes, not g.vertices and abs(audit.total) < 1e-3 * TWO_PI,
              f"closed audit {audit.total:.1e}")
        cut = cut_ribbon_total(planar[0])
        check(notes, abs(cut - TWO_PI) < 1e-3 * TWO_PI, f"cut total - 2pi = {cut - TWO_PI:.1e}")


def test_10_oracle_equivalence():
    with criterion(10, "oracle equivalence") as notes:
        cyl = builtin_surface("cylinder", [1.0])
        d, w_max, cells = 0.5, 0.4, 32
        a = build_ribbon(cylinder_circle(cyl, 0.0), 64, w_max=w_max)
        b = build_ribbon(cylinder_circle(cyl, d), 64, w_max=w_max)
        a2, b2, _ = solve_widths(a, b)
        wm, wp = lattice_search_widths(a.frames.point, a.beta, b.frames.point, b.beta, w_max, cells)
        cell = w_max / cells
        err = max(float(np.max(np.abs(a2.w_minus - wm))), float(np.max(np.abs(a2.w_plus - wp))))
        check(notes, err <= cell, f"solver vs lattice search {err:.2e} (cell {cell:.4f})")
        check(notes, np.allclose(-a2.w_minus, d / 2) and np.allclose(b2.w_plus, d / 2),
              f"meeting width {-a2.w_minus[0]:.6f} on both bands (d/2 = {d / 2})")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
