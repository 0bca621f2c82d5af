"""Curves on surfaces and their Darboux frames ``{e, h, N}``.

The three scalars come straight out of the frame equations::

    e' =  |g'| ( kg h + kn N)
    h' =  |g'| (-kg e + tg N)
    N' = -|g'| ( kn e + tg h)

so ``kg = g''.h / |g'|^2``, ``kn = g''.N / |g'|^2`` and
``tg = -h.N' / |g'|``, with ``g''`` and ``N'`` assembled from exact surface
and path jets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import jets
from .errors import ClosureMismatch, IrregularCurve, TooFewSamples
from .jets import Jet
from .surface import EPS, ParametricSurface, builtin_surface, ellipsoid_w_for_v

REGULARITY = 1e-9


@dataclass(frozen=True)
class CurveOnSurface:
    """Parameter-space path ``t -> (u(t), v(t))`` on ``surface``.

    ``derivatives`` optionally overrides the path jet with a callable
    returning ``(uv, duv, d2uv)`` arrays of shape (..., 2).
    """

    surface: ParametricSurface
    path: Callable
    interval: tuple
    closed: bool = False
    name: str = "curve"
    exact_jets: bool = True
    derivatives: Optional[Callable] = None
    closure_tol: float = 1e-8
    normal_sign: float = 1.0
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        if self.check:
            verify_closure(self)

    @property
    def length(self) -> float:
        return float(self.interval[1] - self.interval[0])

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.interval[0], self.interval[1], n + 1)

    def path_jet(self, t):
        t = np.asarray(t, dtype=float)
        if self.derivatives is not None:
            return self.derivatives(t)
        if self.exact_jets:
            out = self.path(Jet.seed(t, 0))
            cols = []
            for name in ("f", "fu", "fuu"):
                parts = []
                for comp in out:
                    if isinstance(comp, Jet):
                        parts.append(np.broadcast_to(getattr(comp, name), t.shape))
                    else:
                        parts.append(np.broadcast_to(comp if name == "f" else 0.0, t.shape))
                cols.append(np.stack(parts, axis=-1))
            return tuple(cols)
        return _fd_path_jet(self.path, t)

    def uv(self, t) -> np.ndarray:
        return self.path_jet(t)[0]

    def point(self, t) -> np.ndarray:
        uv = self.uv(t)
        return self.surface.point(uv[..., 0], uv[..., 1])

    def velocity(self, t) -> np.ndarray:
        uv, duv, _ = self.path_jet(t)
        sj = self.surface.jet(uv[..., 0], uv[..., 1])
        return sj.du * duv[..., :1] + sj.dv * duv[..., 1:]

    def reversed_normal(self) -> "CurveOnSurface":
        return _replace(self, normal_sign=-self.normal_sign)

    def reparametrized(self, phi: Callable, interval: tuple) -> "CurveOnSurface":
        """Compose with an increasing map ``phi`` taking ``interval`` onto ours."""
        return _replace(self, path=lambda s: self.path(phi(s)), interval=interval,
                        derivatives=None, name=self.name + "-reparam")


def _replace(curve, **changes):
    from dataclasses import replace
    return replace(curve, **changes)


def _fd_path_jet(path, t):
    h1 = np.cbrt(EPS) * np.maximum(1.0, np.abs(t))
    h2 = EPS ** 0.25 * np.maximum(1.0, np.abs(t))
    p = lambda x: np.stack(np.broadcast_arrays(*[np.asarray(c, float) for c in path(x)]), -1)
    f = p(t)
    d1 = (p(t + h1) - p(t - h1)) / (2 * h1[..., None])
    d2 = (p(t + h2) - 2 * f + p(t - h2)) / (h2[..., None] ** 2)
    return f, d1, d2


@dataclass(frozen=True)
class DarbouxSample:
    """Darboux frame and scalars; fields may carry a leading batch axis."""

    t: np.ndarray
    point: np.ndarray
    e: np.ndarray
    h: np.ndarray
    N: np.ndarray
    speed: np.ndarray
    kg: np.ndarray
    kn: np.ndarray
    tg: np.ndarray

    def __len__(self):
        return len(np.atleast_1d(self.t))

    def __getitem__(self, i) -> "DarbouxSample":
        return DarbouxSample(*(getattr(self, f)[i] for f in self.__dataclass_fields__))

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def darboux_frame(c: CurveOnSurface, t) -> DarbouxSample:
    t = np.asarray(t, dtype=float)
    uv, d1, d2 = c.path_jet(t)
    sj = c.surface.jet(uv[..., 0], uv[..., 1])
    up, vp = d1[..., :1], d1[..., 1:]
    upp, vpp = d2[..., :1], d2[..., 1:]
    vel = sj.du * up + sj.dv * vp
    acc = sj.duu * up * up + 2 * sj.duv * up * vp + sj.dvv * vp * vp + sj.du * upp + sj.dv * vpp
    speed = np.linalg.norm(vel, axis=-1)
    if np.any(~(speed > REGULARITY)):
        bad = np.atleast_1d(t)[np.atleast_1d(~(speed > REGULARITY))]
        raise IrregularCurve(f"curve {c.name!r} has |gamma'| <= {REGULARITY} at t={bad[:3]}")

    n_raw = np.cross(sj.du, sj.dv)
    n_norm = np.linalg.norm(n_raw, axis=-1, keepdims=True)
    if np.any(n_norm < c.surface.regularity):
        from .errors import DegenerateChart
        raise DegenerateChart(f"degenerate chart along {c.name!r}")
    N = c.normal_sign * n_raw / n_norm
    dsu = sj.duu * up + sj.duv * vp
    dsv = sj.duv * up + sj.dvv * vp
    dn_raw = c.normal_sign * (np.cross(dsu, sj.dv) + np.cross(sj.du, dsv)) / n_norm
    dN = dn_raw - _dot(dn_raw, N)[..., None] * N

    e = vel / speed[..., None]
    h = np.cross(N, e)
    s2 = speed * speed
    kg = _dot(acc, h) / s2
    kn = _dot(acc, N) / s2
    tg = -_dot(h, dN) / speed
    return DarbouxSample(t, sj.point, e, h, N, speed, kg, kn, tg)


def sample_curve(c: CurveOnSurface, n: int) -> DarbouxSample:
    if n < 16:
        raise TooFewSamples("sample_curve needs n >= 16")
    return darboux_frame(c, c.grid(n))


def frame_matrix(d: DarbouxSample) -> np.ndarray:
    """Matrix with columns ``e, h, N`` (batched over leading axes)."""
    return np.stack([d.e, d.h, d.N], axis=-1)


def verify_closure(c: CurveOnSurface) -> None:
    t0, t1 = c.interval
    ends = np.array([t0, t1])
    pts = c.point(ends)
    vel = c.velocity(ends)
    speed = np.linalg.norm(vel, axis=-1)
    scale = max(1.0, float(np.max(np.abs(pts))))
    gap = np.linalg.norm(pts[1] - pts[0]) / scale
    dgap = np.linalg.norm(vel[1] / speed[1] - vel[0] / speed[0])
    closes = gap < c.closure_tol and dgap < c.closure_tol
    if c.closed and not closes:
        raise ClosureMismatch(
            f"curve {c.name!r} declared closed but gap={gap:.3e}, tangent gap={dgap:.3e}")
    if not c.closed and closes:
        raise ClosureMismatch(f"curve {c.name!r} declared open but closes up")


# --- curve families used by scenes ----------------------------------------

def torus_unknot(surface: ParametricSurface, p: float, q: float, phase: float = 0.0,
                 name: Optional[str] = None) -> CurveOnSurface:
    """``t -> sigma(p t, q t + phase)`` for ``t in [-pi, pi]``."""
    return CurveOnSurface(surface, lambda t: (p * t, q * t + phase), (-np.pi, np.pi),
                          closed=True, name=name or f"torus-unknot({p},{q},{phase:.6g})")


def latitude(surface: ParametricSurface, colatitude: float,
             name: Optional[str] = None) -> CurveOnSurface:
    """Latitude circle ``t -> sigma(theta, t)`` on a sphere chart."""
    return CurveOnSurface(surface, lambda t: (colatitude, t), (-np.pi, np.pi), closed=True,
                          name=name or f"latitude({colatitude:.6g})")


def cylinder_circle(surface: ParametricSurface, height: float = 0.0,
                    name: Optional[str] = None) -> CurveOnSurface:
    return CurveOnSurface(surface, lambda t: (t, height), (-np.pi, np.pi), closed=True,
                          name=name or f"circle(z={height:.6g})")


def ellipsoid_u_curve(params, v: float, lower: bool = False,
                      name: Optional[str] = None) -> CurveOnSurface:
    """Closed curvature line of constant ``v`` on the smooth ellipsoid chart.

    The curve winds once about the shortest axis; ``lower`` selects the
    mirror copy with ``z < 0``.
    """
    surf = builtin_surface("ellipsoid", params[:3])
    w = ellipsoid_w_for_v(params, v)
    if lower:
        w = -w
    return CurveOnSurface(surf, lambda s: (s, w), (-np.pi, np.pi), closed=True,
                          name=name or f"ellipsoid-u-curve({v:.6g}{', lower' if lower else ''})")


def ellipsoid_v_curve(params, u: float, negative_x: bool = False,
                      name: Optional[str] = None) -> CurveOnSurface:
    """Closed curvature line of constant ``u`` (winds about the longest axis)."""
    a, b, c = (float(x) for x in params[:3])
    if not b < u < a:
        from .errors import BadParams
        raise BadParams(f"u must lie in ({b}, {a})")
    surf = builtin_surface("ellipsoid", params[:3])
    s = float(np.arcsin(np.sqrt((u - b) / (a - b))))
    if negative_x:
        s = np.pi - s
    return CurveOnSurface(surf, lambda w: (s, w), (-np.pi, np.pi), closed=True,
                          name=name or f"ellipsoid-v-curve({u:.6g})")


def ellipsoid_octant_u_curve(params, v: float, t_range: Optional[tuple] = None,
                             name: Optional[str] = None) -> CurveOnSurface:
    """Open ``u``-curve ``t -> sigma(t, v)`` on the octant chart, ``t in (b, a)``."""
    surf = builtin_surface("ellipsoid-octant", params)
    lo, hi = surf.domain[0]
    if t_range is None:
        t_range = (lo, hi)
    return CurveOnSurface(surf, lambda t: (t, v), tuple(t_range), closed=False,
                          name=name or f"ellipsoid-octant-u-curve({v:.6g})")


def sampled_path(surface: ParametricSurface, t, uv, closed: bool = True,
                 name: str = "sampled") -> CurveOnSurface:
    """Cubic-spline path through parameter-space samples ``uv`` at ``t``."""
    t = np.asarray(t, float)
    uv = np.asarray(uv, float)
    if len(t) < 5:
        raise TooFewSamples("a sampled path needs at least 5 points")
    spline = CubicSpline(t, uv, axis=0, bc_type="periodic" if closed else "not-a-knot")
    d1, d2 = spline.derivative(1), spline.derivative(2)

    def path(x):
        p = spline(jets.value(x))
        return p[..., 0], p[..., 1]

    return CurveOnSurface(surface, path, (float(t[0]), float(t[-1])), closed=closed, name=name,
                          exact_jets=False, derivatives=lambda x: (spline(x), d1(x), d2(x)))
