"""Cartan surface ribbons, their planar developments and striction curves.

A Cartan ribbon along ``gamma`` is the ruled surface
``r(t, u) = gamma(t) + u * beta(t)`` with ``beta`` the normalised pulled-back
angular velocity ``kn * h - tg * e`` of the rolling on a plane.  It is the
unique developable surface tangent to the underlying surface along
``gamma``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .curves import CurveOnSurface, DarbouxSample, darboux_frame, sample_curve
from .development import PlanarCurve
from .errors import (GridMismatch, RibbonError, TooFewSamples, UndefinedStriction,
                     VanishingNormalCurvature)

NORMAL_CURVATURE_TOL = 1e-8
TANGENT_GUARD = 1e-9


def ruling_direction(d: DarbouxSample, tol: float = NORMAL_CURVATURE_TOL) -> np.ndarray:
    """Unit ruling ``(kn h - tg e) / sqrt(kn^2 + tg^2)``; batched over samples."""
    kn, tg = np.asarray(d.kn), np.asarray(d.tg)
    bad = np.abs(kn) < tol
    if np.any(bad):
        ts = np.atleast_1d(d.t)[np.atleast_1d(bad)]
        if np.all(np.abs(np.atleast_1d(tg)[np.atleast_1d(bad)]) < tol):
            raise VanishingNormalCurvature("kn and tg both vanish; ruling undefined", t=ts)
        raise VanishingNormalCurvature("kn vanishes; ruling would be tangent to the curve", t=ts)
    w = kn[..., None] * d.h - tg[..., None] * d.e
    return w / np.linalg.norm(w, axis=-1, keepdims=True)


@dataclass
class Ribbon:
    """Sampled Cartan ribbon with per-sample widths ``w_minus < 0 < w_plus``.

    ``sign`` records the flips applied to the raw ruling to keep ``beta``
    continuous; ``mobius`` is set when a closed ribbon comes back flipped.
    """

    center: CurveOnSurface
    frames: DarbouxSample
    beta: np.ndarray
    sign: np.ndarray
    w_minus: np.ndarray
    w_plus: np.ndarray
    mobius: bool = False
    cone_points: list = field(default_factory=list)
    name: str = ""

    @property
    def t(self) -> np.ndarray:
        return self.frames.t

    @property
    def n(self) -> int:
        return len(self.frames.t) - 1

    @property
    def closed(self) -> bool:
        return self.center.closed

    def wrap(self, t):
        """Map parameters into the curve interval (periodically when closed)."""
        t0, t1 = self.center.interval
        if self.closed:
            return t0 + np.mod(np.asarray(t) - t0, t1 - t0)
        return np.clip(t, t0, t1)

    def sign_at(self, t) -> np.ndarray:
        t0, t1 = self.center.interval
        idx = np.rint((self.wrap(t) - t0) / (t1 - t0) * self.n).astype(int)
        return self.sign[np.clip(idx, 0, self.n)]

    def frame_at(self, t):
        """Exact frame and sign-consistent ruling at arbitrary parameters."""
        t = self.wrap(t)
        d = darboux_frame(self.center, t)
        beta = ruling_direction(d) * self.sign_at(t)[..., None]
        return d, beta

    def points(self, u: Optional[np.ndarray] = None) -> np.ndarray:
        """Lattice ``r(t_i, u_j)``; ``u`` in [-1, 1] is scaled by the widths."""
        if u is None:
            u = lattice_fractions(33)
        w = np.where(u[None, :] < 0, -u[None, :] * self.w_minus[:, None],
                     u[None, :] * self.w_plus[:, None])
        return self.frames.point[:, None, :] + w[..., None] * self.beta[:, None, :]

    def edge(self, side: int) -> np.ndarray:
        w = self.w_plus if side > 0 else self.w_minus
        return self.frames.point + w[:, None] * self.beta

    def with_widths(self, w_minus, w_plus) -> "Ribbon":
        return replace(self, w_minus=np.asarray(w_minus, float), w_plus=np.asarray(w_plus, float))


def lattice_fractions(m: int) -> np.ndarray:
    """``m`` (odd) fractions in [-1, 1] that include 0 exactly."""
    if m % 2 == 0:
        raise ValueError("lattice u-resolution must be odd so that u = 0 is a node")
    return np.concatenate([np.linspace(-1, 0, m // 2 + 1)[:-1], [0.0], np.linspace(0, 1, m // 2 + 1)[1:]])


def build_ribbon(c: CurveOnSurface, n: int = 2048, w_max: Optional[float] = None,
                 striction_fraction: float = 0.25, striction_margin: float = 1e-6,
                 tol: float = NORMAL_CURVATURE_TOL) -> Ribbon:
    """Cartan ribbon along ``c`` with provisional widths.

    Without ``w_max`` the width defaults to ``striction_fraction`` times the
    smallest striction distance (the ribbon stays regular); with ``w_max``
    each side is additionally capped just short of the striction point,
    ``(1 - striction_margin) |u*|``, on the side where it lies.
    """
    d = sample_curve(c, n)
    raw = ruling_direction(d, tol)
    sign = np.ones(len(raw))
    for i in range(1, len(raw)):
        # keep the nearer of +-beta to the previous sample
        sign[i] = sign[i - 1] if np.dot(raw[i], raw[i - 1]) >= 0 else -sign[i - 1]
    beta = raw * sign[:, None]
    mobius = False
    if c.closed and np.dot(beta[-1], beta[0]) < 0:
        mobius = True
    if np.any(np.abs(np.sum(beta * d.e, axis=-1)) > 1 - TANGENT_GUARD):
        raise RibbonError("ruling tangent to the center curve")
    rb = Ribbon(c, d, beta, sign, np.zeros(len(raw)), np.zeros(len(raw)), mobius=mobius,
                name=c.name)
    ustar = striction_parameter(rb, strict=False)
    finite = np.isfinite(ustar)
    if w_max is None:
        if not np.any(finite):
            raise RibbonError("no striction to size the ribbon from; pass w_max")
        width = striction_fraction * np.min(np.abs(ustar[finite]))
        w_plus = np.full(len(raw), width)
        w_minus = -w_plus
    else:
        if w_max <= 0:
            raise RibbonError("w_max must be positive")
        cap = np.where(finite, (1 - striction_margin) * np.abs(ustar), np.inf)
        w_plus = np.where(ustar > 0, np.minimum(w_max, cap), w_max)
        w_minus = -np.where(ustar < 0, np.minimum(w_max, cap), w_max)
    return rb.with_widths(w_minus, w_plus)


def cap_cone(rb: Ribbon, tol: float = 1e-6) -> Ribbon:
    """Extend a cone-shaped closed ribbon to its apex and record the cone point.

    The striction curve of a cone collapses to the apex; the width on the
    apex side is set to reach it, so the ribbon caps the point.
    """
    if not rb.closed:
        raise RibbonError("only closed ribbons can cap a cone point")
    ustar = striction_parameter(rb)
    if not np.all(np.isfinite(ustar)):
        raise RibbonError("rulings are parallel somewhere; not a cone")
    apex_pts = rb.frames.point + ustar[:, None] * rb.beta
    apex = apex_pts.mean(axis=0)
    scale = max(1.0, float(np.max(np.abs(rb.frames.point))))
    if np.max(np.linalg.norm(apex_pts - apex, axis=-1)) > tol * scale:
        raise RibbonError("striction curve is not a single point; not a cone")
    if np.any(np.sign(ustar) != np.sign(ustar[0])):
        raise RibbonError("apex switches sides of the center curve")
    if ustar[0] > 0:
        out = rb.with_widths(rb.w_minus, ustar)
    else:
        out = rb.with_widths(ustar, rb.w_plus)
    out.cone_points = [apex]
    return out


def grid_derivative(values: np.ndarray, t: np.ndarray, closed: bool) -> np.ndarray:
    """Fourth-order central differences on a uniform grid (periodic if closed)."""
    if len(t) < 5:
        raise TooFewSamples("need at least 5 samples")
    dt = t[1] - t[0]
    f = values
    if closed:
        core = f[:-1]
        d = (np.roll(core, 2, 0) - 8 * np.roll(core, 1, 0) + 8 * np.roll(core, -1, 0)
             - np.roll(core, -2, 0)) / (12 * dt)
        return np.concatenate([d, d[:1]], axis=0)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dt)
    # one-sided fourth-order stencils at the ends
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * dt)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * dt)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12 * dt)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12 * dt)
    return d


def beta_derivative(rb: Ribbon) -> np.ndarray:
    return grid_derivative(rb.beta, rb.t, rb.closed)


def flatness_residual(rb: Ribbon) -> float:
    """``max |beta' . (beta x e)|``; zero for developable ribbons."""
    if len(rb.t) < 5:
        raise TooFewSamples("flatness residual needs at least 5 samples")
    db = beta_derivative(rb)
    return float(np.max(np.abs(np.sum(db * np.cross(rb.beta, rb.frames.e), axis=-1))))


def striction_parameter(rb: Ribbon, strict: bool = True) -> np.ndarray:
    """Ruling coordinate ``u* = -(gamma' . beta') / |beta'|^2`` of the striction point."""
    db = beta_derivative(rb)
    vel = rb.frames.e * rb.frames.speed[:, None]
    nb2 = np.sum(db * db, axis=-1)
    # |beta'| below this is indistinguishable from the differencing noise
    floor = max(1e-12 * float(np.max(nb2, initial=0.0)), 1e-20 * float(np.max(rb.frames.speed)) ** 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ustar = np.where(nb2 > floor, -np.sum(vel * db, axis=-1) / nb2, np.inf)
    if strict and not np.any(np.isfinite(ustar)):
        raise UndefinedStriction("rulings are parallel; no striction curve")
    return ustar


def striction_curve(rb: Ribbon) -> np.ndarray:
    """Striction points ``gamma + u* beta``; NaN where the rulings are parallel."""
    ustar = striction_parameter(rb)
    pts = rb.frames.point + np.where(np.isfinite(ustar), ustar, np.nan)[:, None] * rb.beta
    return pts


# --- planar development ----------------------------------------------------

@dataclass
class PlanarRibbon:
    """Developed ribbon: planar center curve, planar rulings and outline."""

    center: PlanarCurve
    ruling: np.ndarray
    w_minus: np.ndarray
    w_plus: np.ndarray
    mobius: bool = False
    name: str = ""

    def edge(self, side: int) -> np.ndarray:
        w = self.w_plus if side > 0 else self.w_minus
        return self.center.points + w[:, None] * self.ruling

    def points(self, u: Optional[np.ndarray] = None) -> np.ndarray:
        if u is None:
            u = lattice_fractions(33)
        w = np.where(u[None, :] < 0, -u[None, :] * self.w_minus[:, None],
                     u[None, :] * self.w_plus[:, None])
        return self.center.points[:, None, :] + w[..., None] * self.ruling[:, None, :]

    def outline(self) -> np.ndarray:
        """Closed polygon: ``w_plus`` edge forward, ``w_minus`` edge back.

        The two transversal segments joining them are the cut ends of a
        closed ribbon (the first and last rulings).
        """
        return np.concatenate([self.edge(+1), self.edge(-1)[::-1]], axis=0)


def develop_ribbon(rb: Ribbon, p: PlanarCurve) -> PlanarRibbon:
    """Roll the ribbon onto the plane along its developed center curve.

    The planar ruling keeps the signed angle between ``beta`` and ``e``,
    measured in the ``(e, h)`` frame, relative to the planar tangent.
    """
    if len(p.t) != len(rb.t) or not np.allclose(p.t, rb.t, rtol=0, atol=1e-12):
        raise GridMismatch("planar curve and ribbon use different t grids")
    ca = np.sum(rb.beta * rb.frames.e, axis=-1)
    sa = np.sum(rb.beta * rb.frames.h, axis=-1)
    tangent = np.stack([np.cos(p.heading), np.sin(p.heading)], axis=-1)
    normal = np.stack([-np.sin(p.heading), np.cos(p.heading)], axis=-1)
    ruling = ca[:, None] * tangent + sa[:, None] * normal
    return PlanarRibbon(p, ruling, rb.w_minus.copy(), rb.w_plus.copy(), rb.mobius, rb.name)
