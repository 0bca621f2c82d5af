"""Parametric surfaces, derivative jets, normals and Gauss curvature.

The normal convention is global: ``N = normalize(sigma_u x sigma_v)``.
Every signed curvature in the package inherits its sign from this choice.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import jets
from .errors import BadParams, DegenerateChart, UnknownSurface
from .jets import Jet

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class SurfaceJet:
    """Point and partial derivatives of a chart, each of shape (..., 3)."""

    point: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    duu: np.ndarray
    duv: np.ndarray
    dvv: np.ndarray


@dataclass(frozen=True)
class ParametricSurface:
    """A single-chart surface ``chart(u, v) -> (x, y, z)``.

    ``chart`` should be written with the helpers in :mod:`cartan_ribbons.jets`
    so exact jets are available; otherwise set ``exact_jets=False`` and
    central differences are used.
    """

    chart: Callable
    domain: tuple
    periodic: tuple = (None, None)
    name: str = "surface"
    exact_jets: bool = True
    regularity: float = 1e-9

    def point(self, u, v) -> np.ndarray:
        comps = self.chart(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
        return _stack([jets.value(c) for c in comps])

    def jet(self, u, v) -> SurfaceJet:
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.exact_jets:
            comps = self.chart(Jet.seed(u, 0), Jet.seed(v, 1))
            shape = np.broadcast(u, v).shape
            fields = []
            for name in ("f", "fu", "fv", "fuu", "fuv", "fvv"):
                parts = []
                for c in comps:
                    if isinstance(c, Jet):
                        parts.append(np.broadcast_to(getattr(c, name), shape))
                    else:
                        parts.append(np.broadcast_to(c if name == "f" else 0.0, shape))
                fields.append(_stack(parts))
            return SurfaceJet(*fields)
        return finite_difference_jet(self.point, u, v)

    def in_domain(self, u, v) -> np.ndarray:
        ok = np.ones(np.broadcast(u, v).shape, dtype=bool)
        for x, (lo, hi), period in zip((u, v), self.domain, self.periodic):
            if period is None:
                ok &= (np.asarray(x) >= lo) & (np.asarray(x) <= hi)
        return ok


def _stack(parts) -> np.ndarray:
    parts = np.broadcast_arrays(*[np.asarray(p, dtype=float) for p in parts])
    return np.stack(parts, axis=-1)


def finite_difference_jet(point: Callable, u, v) -> SurfaceJet:
    """Central-difference jet for charts that cannot take :class:`Jet` input."""
    u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
    h1u = np.cbrt(EPS) * np.maximum(1.0, np.abs(u))[..., None]
    h1v = np.cbrt(EPS) * np.maximum(1.0, np.abs(v))[..., None]
    h2u = EPS ** 0.25 * np.maximum(1.0, np.abs(u))[..., None]
    h2v = EPS ** 0.25 * np.maximum(1.0, np.abs(v))[..., None]
    p = point(u, v)
    du = (point(u + h1u[..., 0], v) - point(u - h1u[..., 0], v)) / (2 * h1u)
    dv = (point(u, v + h1v[..., 0]) - point(u, v - h1v[..., 0])) / (2 * h1v)
    duu = (point(u + h2u[..., 0], v) - 2 * p + point(u - h2u[..., 0], v)) / h2u**2
    dvv = (point(u, v + h2v[..., 0]) - 2 * p + point(u, v - h2v[..., 0])) / h2v**2
    a, b = h2u[..., 0], h2v[..., 0]
    duv = (point(u + a, v + b) - point(u + a, v - b) - point(u - a, v + b)
           + point(u - a, v - b)) / (4 * h2u * h2v)
    return SurfaceJet(p, du, dv, duu, duv, dvv)


def normal_from_jet(jet: SurfaceJet, threshold: float = 1e-9) -> np.ndarray:
    n = np.cross(jet.du, jet.dv)
    norm = np.linalg.norm(n, axis=-1, keepdims=True)
    if np.any(norm < threshold):
        raise DegenerateChart(f"|sigma_u x sigma_v| below {threshold}")
    return n / norm


def unit_normal(s: ParametricSurface, u, v) -> np.ndarray:
    return normal_from_jet(s.jet(u, v), s.regularity)


def fundamental_forms(jet: SurfaceJet, threshold: float = 1e-9):
    """Return ``(E, F, G, L, M, N)`` of the first and second fundamental forms."""
    n = normal_from_jet(jet, threshold)
    dot = lambda a, b: np.sum(a * b, axis=-1)
    return (dot(jet.du, jet.du), dot(jet.du, jet.dv), dot(jet.dv, jet.dv),
            dot(jet.duu, n), dot(jet.duv, n), dot(jet.dvv, n))


def gauss_curvature(s: ParametricSurface, u, v):
    E, F, G, L, M, N = fundamental_forms(s.jet(u, v), s.regularity)
    return (L * N - M * M) / (E * G - F * F)


# --- builtin surfaces ------------------------------------------------------

TWO_PI = 2 * np.pi


def plane(params: Sequence[float] = ()) -> ParametricSurface:
    """``z = 0`` plane, or the affine plane ``origin + u*a + v*b`` for 9 params."""
    if len(params) == 0:
        return ParametricSurface(lambda u, v: (u, v, 0.0), ((-np.inf, np.inf),) * 2, name="plane")
    if len(params) != 9:
        raise BadParams("plane takes 0 or 9 parameters (origin, axis a, axis b)")
    o, a, b = (np.asarray(params[i:i + 3], float) for i in (0, 3, 6))
    if np.linalg.norm(np.cross(a, b)) < 1e-12:
        raise BadParams("plane axes are parallel")

    def chart(u, v):
        return tuple(o[k] + u * a[k] + v * b[k] for k in range(3))

    return ParametricSurface(chart, ((-np.inf, np.inf),) * 2, name="plane")


def cylinder(params: Sequence[float] = ()) -> ParametricSurface:
    """Circular cylinder about the z axis: ``(R cos u, R sin u, v)``."""
    radius = float(params[0]) if params else 1.0
    if radius <= 0:
        raise BadParams("cylinder radius must be positive")

    def chart(u, v):
        return (radius * jets.cos(u), radius * jets.sin(u), v)

    return ParametricSurface(chart, ((-np.pi, np.pi), (-np.inf, np.inf)),
                             periodic=(TWO_PI, None), name="cylinder")


def sphere(params: Sequence[float] = ()) -> ParametricSurface:
    """Sphere with colatitude ``u`` in (0, pi) and longitude ``v``."""
    radius = float(params[0]) if params else 1.0
    if radius <= 0:
        raise BadParams("sphere radius must be positive")

    def chart(u, v):
        su = jets.sin(u)
        return (radius * su * jets.cos(v), radius * su * jets.sin(v), radius * jets.cos(u))

    return ParametricSurface(chart, ((0.0, np.pi), (-np.pi, np.pi)),
                             periodic=(None, TWO_PI), name="sphere")


def torus(params: Sequence[float] = ()) -> ParametricSurface:
    """``((R + r cos u) cos v, (R + r cos u) sin v, r sin u)``, default R=2, r=1."""
    big, small = (float(params[0]), float(params[1])) if params else (2.0, 1.0)
    if not big > small > 0:
        raise BadParams("torus needs R > r > 0")

    def chart(u, v):
        ring = big + small * jets.cos(u)
        return (ring * jets.cos(v), ring * jets.sin(v), small * jets.sin(u))

    return ParametricSurface(chart, ((-np.pi, np.pi),) * 2,
                             periodic=(TWO_PI, TWO_PI), name="torus")


def _ellipsoid_axes(params):
    if len(params) < 3:
        raise BadParams("ellipsoid needs a, b, c")
    a, b, c = (float(p) for p in params[:3])
    if not a > b > c > 0:
        raise BadParams("ellipsoid needs a > b > c > 0")
    return a, b, c


def _sign(x) -> float:
    if isinstance(x, str):
        if x.strip() in ("+", "+1", "1"):
            return 1.0
        if x.strip() in ("-", "-1"):
            return -1.0
        raise BadParams(f"octant sign must be + or -, got {x!r}")
    if x not in (1, -1):
        raise BadParams(f"octant sign must be +1 or -1, got {x!r}")
    return float(x)


def ellipsoid_octant(params: Sequence, umbilic_margin: float = 1e-4) -> ParametricSurface:
    """Curvature-line chart of ``x^2/a + y^2/b + z^2/c = 1`` on one octant.

    ``params = (a, b, c, sx, sy, sz)``; ``u in (b, a)``, ``v in (c, b)``.
    """
    a, b, c = _ellipsoid_axes(params)
    if len(params) != 6:
        raise BadParams("ellipsoid-octant takes a, b, c and three octant signs")
    sx, sy, sz = (_sign(p) for p in params[3:])
    kx = a / ((a - b) * (a - c))
    ky = b / ((b - a) * (b - c))
    kz = c / ((c - a) * (c - b))

    def chart(u, v):
        return (sx * jets.sqrt(kx * (a - u) * (a - v)),
                sy * jets.sqrt(ky * (b - u) * (b - v)),
                sz * jets.sqrt(kz * (c - u) * (c - v)))

    m = umbilic_margin
    return ParametricSurface(chart, ((b + m, a - m), (c + m, b - m)),
                             name="ellipsoid-octant")


def ellipsoid(params: Sequence[float]) -> ParametricSurface:
    """Whole ellipsoid in smooth curvature-line coordinates ``(s, w)``.

    Substituting ``u = b + (a-b) sin^2 s`` and ``v = c + (b-c) sin^2 w`` in the
    octant chart removes the square-root branch points, so coordinate curves
    cross octant boundaries smoothly.  Fixed ``w`` gives the closed
    ``u``-curves, fixed ``s`` the closed ``v``-curves.  The chart is singular
    only at the four umbilics (``sin s = 0`` and ``cos w = 0``).
    """
    a, b, c = _ellipsoid_axes(params)
    k = (b - c) / (a - c)
    m = (a - b) / (a - c)
    ra, rb, rc = np.sqrt(a), np.sqrt(b), np.sqrt(c)

    def chart(s, w):
        sw, ss = jets.sin(w), jets.sin(s)
        return (ra * jets.cos(s) * jets.sqrt(1.0 - k * sw * sw),
                rb * ss * jets.cos(w),
                rc * sw * jets.sqrt(k + m * ss * ss))

    return ParametricSurface(chart, ((-np.pi, np.pi),) * 2,
                             periodic=(TWO_PI, TWO_PI), name="ellipsoid")


def ellipsoid_coords(params, s, w):
    """Map smooth ``(s, w)`` coordinates to the octant-chart ``(u, v)``."""
    a, b, c = _ellipsoid_axes(params)
    return b + (a - b) * np.sin(s) ** 2, c + (b - c) * np.sin(w) ** 2


def ellipsoid_w_for_v(params, v) -> float:
    """Inverse of ``v = c + (b-c) sin^2 w`` on ``w in (0, pi/2)``."""
    a, b, c = _ellipsoid_axes(params)
    if not c < v < b:
        raise BadParams(f"v must lie in ({c}, {b})")
    return float(np.arcsin(np.sqrt((v - c) / (b - c))))


_BUILTINS = {
    "plane": plane,
    "cylinder": cylinder,
    "sphere": sphere,
    "torus": torus,
    "ellipsoid": ellipsoid,
    "ellipsoid-octant": ellipsoid_octant,
}


def builtin_surface(name: str, params: Optional[Sequence] = None) -> ParametricSurface:
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownSurface(f"unknown surface {name!r}; known: {sorted(_BUILTINS)}") from None
    return factory(list(params or ()))


def builtin_names():
    return sorted(_BUILTINS)
