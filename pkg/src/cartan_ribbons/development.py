"""Planar Cartan development of surface curves.

The development integrates the geodesic curvature in the plane::

    phi(t)   = int_0^t v kg
    gdev(t)  = int_0^t v (cos phi, sin phi)

It starts at the origin heading along +x.  Closed curves generally do not
develop into closed planar curves; the mismatch is reported, not corrected.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import cumulative_simpson

from .curves import CurveOnSurface, darboux_frame, sample_curve
from .errors import TooFewSamples

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


@dataclass
class PlanarCurve:
    t: np.ndarray
    points: np.ndarray
    heading: np.ndarray
    speed: np.ndarray
    closed_gap: float
    heading_gap: float
    source: Optional[CurveOnSurface] = None

    def __len__(self):
        return len(self.t)

    def heading_at(self, t: float) -> float:
        """Heading at an off-grid parameter by Gauss-Legendre panels from ``t[0]``."""
        if self.source is None:
            return float(np.interp(t, self.t, self.heading))
        t0 = self.t[0]
        dt = self.t[1] - self.t[0]
        panels = max(1, int(np.ceil(abs(t - t0) / dt)))
        edges = np.linspace(t0, t, panels + 1)
        mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
        x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
        d = darboux_frame(self.source, x)
        f = (d.speed * d.kg).reshape(panels, -1)
        return float(np.sum(half * (f @ _GL_WEIGHTS)))


def integrate_heading(t, speed, kg):
    """Cumulative Simpson integration of heading and position on a uniform grid."""
    phi = cumulative_simpson(speed * kg, x=t, initial=0.0)
    x = cumulative_simpson(speed * np.cos(phi), x=t, initial=0.0)
    y = cumulative_simpson(speed * np.sin(phi), x=t, initial=0.0)
    return phi, np.stack([x, y], axis=-1)


def develop_profile(t, speed, kg, closed: bool = True) -> PlanarCurve:
    """Develop a curve given only its speed and geodesic curvature samples."""
    t = np.asarray(t, float)
    speed = np.broadcast_to(np.asarray(speed, float), t.shape)
    kg = np.broadcast_to(np.asarray(kg, float), t.shape)
    phi, pts = integrate_heading(t, speed, kg)
    gap = float(np.linalg.norm(pts[-1] - pts[0])) if closed else float("nan")
    hgap = float(np.angle(np.exp(1j * (phi[-1] - phi[0])))) if closed else float("nan")
    return PlanarCurve(t, pts, phi, speed.copy(), gap, hgap)


def develop_curve(c: CurveOnSurface, n: int = 2048) -> PlanarCurve:
    if n < 64:
        raise TooFewSamples("develop_curve needs n >= 64")
    d = sample_curve(c, n)
    p = develop_profile(d.t, d.speed, d.kg, closed=c.closed)
    p.source = c
    return p


def planar_derivatives(p: PlanarCurve):
    from .ribbon import grid_derivative
    d1 = grid_derivative(p.points, p.t, closed=False)
    d2 = grid_derivative(d1, p.t, closed=False)
    return d1, d2


def developed_curvature(p: PlanarCurve) -> np.ndarray:
    """Signed curvature of the planar polyline at interior samples.

    Computed from the developed points alone (fourth-order differences),
    independently of the stored heading.
    """
    if len(p) < 5:
        raise TooFewSamples("developed_curvature needs at least 5 samples")
    d1, d2 = planar_derivatives(p)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    k = cross / np.linalg.norm(d1, axis=-1) ** 3
    return k[2:-2]


def arc_length(points: np.ndarray, t: np.ndarray, closed_speed=None) -> float:
    """Arc length of a sampled curve by Simpson on ``|p'|`` (fourth-order tangents)."""
    from .ribbon import grid_derivative
    from scipy.integrate import simpson
    d1 = grid_derivative(points, t, closed=False)
    return float(simpson(np.linalg.norm(d1, axis=-1), x=t))


@dataclass
class Transport:
    t: np.ndarray
    field: np.ndarray
    angle: np.ndarray      # angle from the transported vector to e, unwrapped
    rotation_rate: np.ndarray
    kg_speed: np.ndarray

    @property
    def holonomy(self) -> float:
        """Rotation of the transported vector relative to the tangent, mod 2pi."""
        return float(np.mod(-(self.angle[-1] - self.angle[0]), 2 * np.pi))


def parallel_transport(c: CurveOnSurface, n: int = 256) -> Transport:
    """Levi-Civita transport of ``e(t0)`` along ``c`` (RK4 on the t-grid).

    The transported vector obeys ``Y' = -(Y . N') N``; ``N'`` comes from
    central differences of the exact normal field.
    """
    if n < 64:
        raise TooFewSamples("parallel transport needs n >= 64")
    t = c.grid(n)
    dt = t[1] - t[0]
    fine = np.linspace(t[0], t[-1], 2 * n + 1)
    eps = 1e-6 * max(1.0, float(np.max(np.abs(fine))))
    n_mid = darboux_frame(c, fine).N
    dn = (darboux_frame(c, fine + eps).N - darboux_frame(c, fine - eps).N) / (2 * eps)

    def rhs(y, k):
        return -np.dot(y, dn[k]) * n_mid[k]

    d = darboux_frame(c, t)
    y = d.e[0].copy()
    out = [y]
    for i in range(n):
        k = 2 * i
        k1 = rhs(y, k)
        k2 = rhs(y + 0.5 * dt * k1, k + 1)
        k3 = rhs(y + 0.5 * dt * k2, k + 1)
        k4 = rhs(y + dt * k3, k + 2)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out.append(y)
    field = np.array(out)
    theta = np.unwrap(np.arctan2(np.sum(field * d.h, -1), np.sum(field * d.e, -1)))
    angle = -theta
    from .ribbon import grid_derivative
    rate = grid_derivative(angle, t, closed=False)
    return Transport(t, field, angle, rate, d.speed * d.kg)


def parallel_transport_check(c: CurveOnSurface, n: int = 256) -> float:
    """Max deviation between d/dt angle(Y, gamma') and ``v kg``."""
    tr = parallel_transport(c, n)
    return float(np.max(np.abs(tr.rotation_rate - tr.kg_speed)))
