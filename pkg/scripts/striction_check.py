"""Compare computed ellipsoid striction points with two closed forms.

The displayed closed form has ``(a - b)(b - c)`` under the third component;
working ``gamma + h / kg`` out by hand gives ``(a - c)(b - c)``.  This prints
the largest deviation of the numerically computed striction curve from each.
"""
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from cartan_ribbons.curves import ellipsoid_u_curve  # noqa: E402
from cartan_ribbons.ribbon import build_ribbon, striction_curve  # noqa: E402
from cartan_ribbons.surface import ellipsoid_coords  # noqa: E402
from oracles import ellipsoid_striction_displayed, ellipsoid_striction_rederived  # noqa: E402

ABC = (5.0, 4.0, 1.0)

for v in (1.5, 2.5, 3.5):
    c = ellipsoid_u_curve(ABC, v)
    rb = build_ribbon(c, 2048, w_max=3.0)
    z = striction_curve(rb)
    m = (rb.t > 0.02) & (rb.t < np.pi / 2 - 0.02)
    u, vv = ellipsoid_coords(ABC, rb.t[m], c.uv(rb.t[m])[:, 1])
    shown = np.max(np.abs(z[m] - ellipsoid_striction_displayed(u, vv, *ABC)), axis=0)
    fixed = np.max(np.abs(z[m] - ellipsoid_striction_rederived(u, vv, *ABC)), axis=0)
    ratio = np.median(z[m][:, 2] / ellipsoid_striction_displayed(u, vv, *ABC)[:, 2])
    print(f"v = {v}: displayed form err (x, y, z) = {np.array2string(shown, precision=2)}, "
          f"re-derived err = {fixed.max():.1e}, z ratio {ratio:.6f} "
          f"(sqrt((a-b)/(a-c)) = {np.sqrt((ABC[0] - ABC[1]) / (ABC[0] - ABC[2])):.6f})")
