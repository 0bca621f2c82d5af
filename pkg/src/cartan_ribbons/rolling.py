"""Rolling one surface on another along matched curves.

The motion at parameter ``t`` is the rigid map that carries the Darboux
frame of the source curve onto the frame of the target curve::

    g_t(x) = Dt D^T (x - gamma(t)) + gamma_target(t)

Its angular velocity follows from the differences of the frame scalars,
``Omega = Dt Xi Dt^T`` with ``Xi = Lambda - Lambda_target``; in target frame
coordinates ``omega = |gamma'| (tg~ - tg, kn - kn~, kg~ - kg)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .curves import CurveOnSurface, DarbouxSample, darboux_frame, frame_matrix
from .development import PlanarCurve, develop_curve
from .errors import InitialConditionMismatch, SpeedMismatch, VanishingNormalCurvature

CLASSIFY_TOL = 1e-8
SPEED_TOL = 1e-6
INITIAL_TOL = 1e-6
# a sample within this factor of a classification threshold is flagged
BORDERLINE_FACTOR = 10.0


class Motion(enum.Enum):
    PureSpinning = "pure spinning"
    PureTwisting = "pure twisting"
    StandardRolling = "standard rolling"
    NotRotational = "not rotational"
    Mixed = "mixed"


@dataclass(frozen=True)
class RigidMotion:
    rotation: np.ndarray
    translation: np.ndarray

    def __call__(self, x):
        return np.asarray(x) @ self.rotation.T + self.translation

    def apply_vector(self, v):
        return np.asarray(v) @ self.rotation.T

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(np.eye(3), np.zeros(3))


@dataclass
class MotionSample:
    t: float
    motion: RigidMotion
    omega: np.ndarray           # world coordinates
    omega_frame: np.ndarray     # coordinates in the target Darboux frame
    omega_pulled: np.ndarray    # R^T omega in the source Darboux frame
    classification: Motion
    scale: float = 1.0          # speed times the largest frame scalar involved
    borderline: bool = False


def motion_map(source: DarbouxSample, target: DarbouxSample) -> RigidMotion:
    """Rigid motion taking the source frame at ``gamma`` to the target frame."""
    R = frame_matrix(target) @ frame_matrix(source).T
    return RigidMotion(R, target.point - R @ source.point)


def frame_coefficients(d: DarbouxSample) -> np.ndarray:
    """Skew matrix ``Lambda`` with ``D' = D Lambda^T`` along the curve."""
    kg, kn, tg = float(d.kg), float(d.kn), float(d.tg)
    return float(d.speed) * np.array([[0.0, kg, kn], [-kg, 0.0, tg], [-kn, -tg, 0.0]])


def relative_coefficients(source: DarbouxSample, target: DarbouxSample) -> np.ndarray:
    """``Xi = Lambda - Lambda_target`` built from the scalar differences.

    Both curves run at the same speed, so the source speed scales all entries.
    """
    v = float(source.speed)
    dg = float(source.kg - target.kg)
    dn = float(source.kn - target.kn)
    dt = float(source.tg - target.tg)
    return v * np.array([[0.0, dg, dn], [-dg, 0.0, dt], [-dn, -dt, 0.0]])


def omega_matrix(source: DarbouxSample, target: DarbouxSample) -> np.ndarray:
    Dt = frame_matrix(target)
    return Dt @ relative_coefficients(source, target) @ Dt.T


def axial(Omega: np.ndarray) -> np.ndarray:
    """Vector ``w`` with ``w x x = Omega x``."""
    return np.array([Omega[2, 1], Omega[0, 2], Omega[1, 0]])


def classify_omega(omega_frame, tol: float = CLASSIFY_TOL, scale: float = 1.0):
    """Classify an angular velocity given in target frame coordinates.

    Returns ``(classification, borderline)``; ``borderline`` flags samples
    within a factor of ten of a threshold, where the verdict depends on the
    tolerance.
    """
    a, b, c = (float(x) for x in omega_frame)
    norm = float(np.linalg.norm(omega_frame))
    ratios = []
    if norm < tol * scale:
        return Motion.NotRotational, norm > tol * scale / BORDERLINE_FACTOR
    ratios.append(norm / (tol * scale))
    tangential = np.hypot(a, b) / norm
    off_tangent = np.hypot(b, c) / norm
    normal = abs(c) / norm
    ratios += [tangential / tol, off_tangent / tol, normal / tol]
    borderline = any(1 / BORDERLINE_FACTOR < r < BORDERLINE_FACTOR for r in ratios)
    if tangential < tol:
        return Motion.PureSpinning, borderline
    if off_tangent < tol:
        return Motion.PureTwisting, borderline
    if normal < tol and abs(b) / norm >= tol:
        return Motion.StandardRolling, borderline
    return Motion.Mixed, borderline


def classify_motion(m: MotionSample, tol: float = CLASSIFY_TOL) -> Motion:
    return classify_omega(m.omega_frame, tol, m.scale)[0]


def _scale(source: DarbouxSample, target: DarbouxSample) -> float:
    vals = [abs(float(x)) for x in (source.kg, source.kn, source.tg,
                                    target.kg, target.kn, target.tg)]
    return float(source.speed) * max(1.0, *vals)


def motion_sample(source: DarbouxSample, target: DarbouxSample,
                  tol: float = CLASSIFY_TOL) -> MotionSample:
    motion = motion_map(source, target)
    Xi = relative_coefficients(source, target)
    omega_frame = np.array([-Xi[1, 2], Xi[0, 2], -Xi[0, 1]])
    omega = frame_matrix(target) @ omega_frame
    # R^T omega has the same coordinates in the source frame as omega in the target frame
    omega_pulled = frame_matrix(source).T @ (motion.rotation.T @ omega)
    scale = _scale(source, target)
    kind, borderline = classify_omega(omega_frame, tol, scale)
    return MotionSample(float(source.t), motion, omega, omega_frame, omega_pulled, kind,
                        scale, borderline)


def check_compatibility(source_curve: CurveOnSurface, target_curve: CurveOnSurface,
                        t, speed_tol: float = SPEED_TOL, initial_tol: float = INITIAL_TOL):
    """Raise unless the curves start together and run at the same speed at ``t``."""
    t0 = source_curve.interval[0]
    p0, q0 = source_curve.point(t0), target_curve.point(t0)
    v0, w0 = source_curve.velocity(t0), target_curve.velocity(t0)
    scale = max(1.0, float(np.linalg.norm(p0)))
    if np.linalg.norm(p0 - q0) > initial_tol * scale or \
            np.linalg.norm(v0 - w0) > initial_tol * max(1.0, float(np.linalg.norm(v0))):
        raise InitialConditionMismatch(
            "curves must share their initial point and velocity "
            f"(|dp|={np.linalg.norm(p0 - q0):.3e}, |dv|={np.linalg.norm(v0 - w0):.3e})")
    ts = np.atleast_1d(np.asarray(t, float))
    vs = np.linalg.norm(source_curve.velocity(ts), axis=-1)
    vt = np.linalg.norm(target_curve.velocity(ts), axis=-1)
    bad = np.abs(vs - vt) > speed_tol * np.maximum(1.0, vs)
    if np.any(bad):
        raise SpeedMismatch(f"speeds differ at t={ts[bad][:3]}: {vs[bad][:3]} vs {vt[bad][:3]}")


def angular_velocity(source_curve: CurveOnSurface, target_curve: CurveOnSurface, t: float,
                     tol: float = CLASSIFY_TOL, speed_tol: float = SPEED_TOL,
                     initial_tol: float = INITIAL_TOL) -> MotionSample:
    check_compatibility(source_curve, target_curve, t, speed_tol, initial_tol)
    return motion_sample(darboux_frame(source_curve, t), darboux_frame(target_curve, t), tol)


# --- rolling on a plane ------------------------------------------------------

class PlaneTrack:
    """Darboux frames of the planar development, at arbitrary parameters.

    The heading is integrated exactly (Gauss-Legendre panels) so the frame
    can be differenced off the grid; the position uses a cubic spline
    through the developed samples.
    """

    def __init__(self, curve: CurveOnSurface, development: Optional[PlanarCurve] = None,
                 n: int = 2048):
        self.curve = curve
        self.development = development if development is not None else develop_curve(curve, n)
        self._xy = CubicSpline(self.development.t, self.development.points, axis=0)

    def sample(self, t: float, source: Optional[DarbouxSample] = None) -> DarbouxSample:
        src = darboux_frame(self.curve, t) if source is None else source
        phi = self.development.heading_at(float(t))
        e = np.array([np.cos(phi), np.sin(phi), 0.0])
        h = np.array([-np.sin(phi), np.cos(phi), 0.0])
        x, y = self._xy(float(t))
        # in the plane the normal curvature and geodesic torsion vanish and the
        # geodesic curvature is the heading rate per unit length
        return DarbouxSample(np.asarray(float(t)), np.array([x, y, 0.0]), e, h,
                             np.array([0.0, 0.0, 1.0]), src.speed, src.kg, np.asarray(0.0),
                             np.asarray(0.0))


def check_plane_rolling(c: CurveOnSurface, t: float, track: Optional[PlaneTrack] = None,
                        tol: float = CLASSIFY_TOL) -> MotionSample:
    """Roll the surface on a plane along the development of ``c``."""
    d = darboux_frame(c, t)
    if abs(float(d.kn)) < tol:
        raise VanishingNormalCurvature(
            f"kn = {float(d.kn):.3e} at t={t}; no rolling axis, Cartan ribbon undefined", t=t)
    track = track or PlaneTrack(c)
    return motion_sample(d, track.sample(t, d), tol)


def rotation_by_differences(rotation_at: Callable[[float], np.ndarray], t: float,
                            h: float = 1e-3) -> np.ndarray:
    """``R'(t) R(t)^T`` with a fourth-order central difference of ``R``."""
    dR = (-rotation_at(t + 2 * h) + 8 * rotation_at(t + h) - 8 * rotation_at(t - h)
          + rotation_at(t - 2 * h)) / (12 * h)
    return dR @ rotation_at(t).T


def plane_rotation_at(track: PlaneTrack) -> Callable[[float], np.ndarray]:
    def rotation(t):
        d = darboux_frame(track.curve, t)
        return motion_map(d, track.sample(t, d)).rotation
    return rotation


def curve_rotation_at(source_curve: CurveOnSurface,
                      target_curve: CurveOnSurface) -> Callable[[float], np.ndarray]:
    def rotation(t):
        return motion_map(darboux_frame(source_curve, t), darboux_frame(target_curve, t)).rotation
    return rotation


def rolling_trace(c: CurveOnSurface, n: int = 256, track: Optional[PlaneTrack] = None,
                  tol: float = CLASSIFY_TOL) -> list:
    """Plane-rolling samples on a uniform grid (for CSV traces)."""
    track = track or PlaneTrack(c)
    return [check_plane_rolling(c, t, track, tol) for t in c.grid(n)]
