"""Convergence of the planar development under grid doubling.

A closed circle closes to rounding level at every n (Simpson on a periodic
integrand), so its gap shows no rate.  The same integrator on an open
half-circle, compared with the exact end point, shows the fourth-order rate.
"""
import numpy as np

from cartan_ribbons.development import develop_profile

prev = None
print("   n   closed-circle gap   half-circle end error   ratio")
for n in (64, 128, 256, 512, 1024, 2048):
    t = np.linspace(-np.pi, np.pi, n + 1)
    gap = develop_profile(t, 1.0, 1.0).closed_gap
    # unit geodesic curvature at the non-uniform speed c (1 + s^2 / 10): the
    # heading is c (s + s^3 / 30), scaled so the arc ends at heading pi
    s = np.linspace(0.0, 1.0, n + 1)
    c = np.pi / (1 + 1 / 30)
    p = develop_profile(s, c * (1 + s * s / 10), 1.0, closed=False)
    exact_phi = c * (s + s**3 / 30)
    exact_end = np.array([np.sin(exact_phi[-1]), 1 - np.cos(exact_phi[-1])])
    err = float(np.linalg.norm(p.points[-1] - exact_end))
    ratio = "" if prev is None else f"{prev / err:6.1f}"
    print(f"{n:5d}   {gap:16.2e}   {err:20.2e}   {ratio}")
    prev = err
