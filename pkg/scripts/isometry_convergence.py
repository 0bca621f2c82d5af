"""First fundamental forms of a torus ribbon and its development under refinement.

The mismatch is set by the fourth-order development of the center curve,
so it drops about 16x per doubling of the samples.
"""
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from cartan_ribbons.curves import torus_unknot  # noqa: E402
from cartan_ribbons.development import develop_curve  # noqa: E402
from cartan_ribbons.ribbon import build_ribbon, develop_ribbon, lattice_fractions  # noqa: E402
from cartan_ribbons.surface import builtin_surface  # noqa: E402
from oracles import first_fundamental_form  # noqa: E402

c = torus_unknot(builtin_surface("torus"), 3, 1)
u = lattice_fractions(17)
prev = None
for n in (128, 256, 512, 1024):
    rb = build_ribbon(c, n, w_max=0.3)
    w = min(float(np.min(rb.w_plus)), float(np.min(-rb.w_minus)))
    rb = rb.with_widths(np.full(n + 1, -w), np.full(n + 1, w))
    flat = develop_ribbon(rb, develop_curve(c, n))
    dt, du = rb.t[1] - rb.t[0], w * (u[1] - u[0])
    err = max(float(np.max(np.abs(a - b))) for a, b in
              zip(first_fundamental_form(rb.points(u), dt, du),
                  first_fundamental_form(flat.points(u), dt, du)))
    print(f"n = {n:5d}  max first-form mismatch {err:.2e}" + ("" if prev is None else f"  ratio {prev / err:.1f}"))
    prev = err
