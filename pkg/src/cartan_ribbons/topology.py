"""Vertices of the wedge system, Euler characteristic and Gauss-Bonnet audit.

For a ribbonization whose wedge system has vertices of degrees ``d_k``::

    chi = 1/2 * sum_k (2 - d_k)

The audit recomputes ``2 pi chi`` from geometry: ribbons are flat, so the
total is the geodesic curvature integrated along every trimmed edge in the
developed ribbons, plus the outer corner angles, plus ``2 pi - pi d_k`` per
vertex.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage
from scipy.integrate import trapezoid

from .assembly import SIDES, Ribbonization
from .development import develop_curve
from .errors import AmbiguousCluster, MissingAngles
from .ribbon import PlanarRibbon, Ribbon, develop_ribbon, grid_derivative


class Character(enum.Enum):
    ConePoint = 0
    WedgeEndPoint = 1
    ZeroContributing = 2
    Conventional = 3


def character_for_degree(d: int) -> Character:
    return Character(min(d, 3))


@dataclass
class Corner:
    """A ribbon corner at a vertex: edge sample and measured angles."""

    ribbon: int
    side: int
    index: int
    outer: float

    @property
    def inner(self) -> float:
        return np.pi - self.outer


@dataclass
class Vertex:
    point: np.ndarray
    degree: int
    ends: list                      # (segment index, 0 for start / 1 for end)
    corners: list = field(default_factory=list)
    cone: bool = False

    @property
    def character(self) -> Character:
        return character_for_degree(self.degree)

    @property
    def outer_angles(self) -> list:
        return [c.outer for c in self.corners]

    @property
    def inner_angles(self) -> list:
        return [c.inner for c in self.corners]


@dataclass
class WedgeGraph:
    vertices: list
    segments: list
    loops: int = 0


def _end_direction(points: np.ndarray, at_start: bool, reach: float) -> np.ndarray:
    """Unit direction from a segment end into the segment."""
    seq = points if at_start else points[::-1]
    dist = np.linalg.norm(seq - seq[0], axis=-1)
    far = np.nonzero(dist > reach)[0]
    j = far[0] if len(far) else len(seq) - 1
    d = seq[j] - seq[0]
    n = np.linalg.norm(d)
    return d / n if n > 0 else d


def _count_directions(dirs, angle_tol: float) -> int:
    kept = []
    for d in dirs:
        if not any(np.arccos(np.clip(np.dot(d, k), -1, 1)) < angle_tol for k in kept):
            kept.append(d)
    return len(kept)


def detect_vertices(r: Ribbonization, tol: float = 1e-4, angle_tol: float = 1e-2) -> WedgeGraph:
    """Cluster open wedge-segment ends into vertices and attach cone points.

    The degree counts distinct directions leaving the vertex; two ends whose
    directions agree within ``angle_tol`` are the same wedge continuing.
    """
    ends, dirs = [], []
    loops = 0
    scale = max(1.0, max(float(np.max(np.abs(rb.frames.point))) for rb in r.ribbons)) \
        if r.ribbons else 1.0
    for s, seg in enumerate(r.wedges):
        seg.endpoints = []
        if seg.closed:
            loops += 1
            continue
        if len(seg.points) < 2:
            continue
        for which, at_start in ((0, True), (1, False)):
            ends.append((s, which, seg.points[0] if at_start else seg.points[-1]))
            dirs.append(_end_direction(seg.points, at_start, 50 * tol * scale))
    vertices = []
    if ends:
        pts = np.array([e[2] for e in ends])
        if len(pts) == 1:
            labels = np.array([1])
        else:
            labels = fcluster(linkage(pts, method="single"), t=tol * scale, criterion="distance")
        for lab in np.unique(labels):
            members = np.nonzero(labels == lab)[0]
            centre = pts[members].mean(axis=0)
            deg = _count_directions([dirs[m] for m in members], angle_tol)
            v = Vertex(centre, deg, [(ends[m][0], ends[m][1]) for m in members])
            for m in members:
                r.wedges[ends[m][0]].endpoints.append(len(vertices))
            vertices.append(v)
    for rb in r.ribbons:
        for apex in rb.cone_points:
            vertices.append(Vertex(np.asarray(apex, float), 0, [], cone=True))
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if np.linalg.norm(vertices[i].point - vertices[j].point) < 2 * tol * scale:
                raise AmbiguousCluster(
                    f"vertices {i} and {j} are closer than 2*tol; refine the sampling or tol")
    return WedgeGraph(vertices, list(r.wedges), loops)


def euler_characteristic(g: WedgeGraph) -> Fraction:
    return Fraction(sum(2 - v.degree for v in g.vertices), 2)


# --- Gauss-Bonnet audit ------------------------------------------------------

def develop_all(r: Ribbonization) -> list:
    """Planar developments of the trimmed ribbons on their own grids."""
    out = []
    for rb in r.ribbons:
        p = develop_curve(rb.center, rb.n)
        out.append(develop_ribbon(rb, p))
    return out


# edges whose extent is below this (relative) are treated as a single point
COLLAPSED_EDGE = 1e-6


def orientation(pr: PlanarRibbon) -> float:
    """Sign of ``det[r_t, r_u]`` at the center curve (+1 when ``+u`` is to the left)."""
    d1 = grid_derivative(pr.center.points, pr.center.t, closed=False)
    det = d1[:, 0] * pr.ruling[:, 1] - d1[:, 1] * pr.ruling[:, 0]
    return float(np.sign(np.median(det)))


def _signed_curvature_speed(points: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``kappa * |p'|`` of a planar curve sampled on a uniform grid."""
    d1 = grid_derivative(points, t, closed=False)
    d2 = grid_derivative(d1, t, closed=False)
    cross = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    return cross / np.sum(d1 * d1, axis=-1)


def _turning(a: np.ndarray, b: np.ndarray) -> float:
    """Signed angle from direction ``a`` to direction ``b`` in (-pi, pi]."""
    return float(np.arctan2(a[0] * b[1] - a[1] * b[0], a[0] * b[0] + a[1] * b[1]))


def edge_integral(pr: PlanarRibbon, side: int, corners=(), o: Optional[float] = None) -> float:
    """Region-left geodesic curvature integral along one developed edge.

    The edge is split at corner samples and each smooth piece integrated
    with the trapezoid rule on ``kappa |p'| dt``.
    """
    o = orientation(pr) if o is None else o
    pts, t = pr.edge(side), pr.center.t
    if np.ptp(pts, axis=0).max() < COLLAPSED_EDGE * max(1.0, np.abs(pts).max()):
        # an edge capped at a cone apex is the limit of small arcs about the
        # apex, whose tangent turns with the ruling
        angle = np.unwrap(np.arctan2(pr.ruling[:, 1], pr.ruling[:, 0]))
        total = float(angle[-1] - angle[0])
        return o * total if side < 0 else -o * total
    cuts = sorted({0, len(t) - 1, *corners})
    total = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi - lo < 5:
            # too short for fourth-order stencils; sum the polyline turning instead
            seg = np.diff(pts[lo:hi + 1], axis=0)
            total += sum(_turning(a, b) for a, b in zip(seg[:-1], seg[1:]))
            continue
        ks = _signed_curvature_speed(pts[lo:hi + 1], t[lo:hi + 1])
        total += trapezoid(ks, t[lo:hi + 1])
    # bottom edge runs with the region on its left, the top edge against it
    return o * total if side < 0 else -o * total


def _edge_window(pr: PlanarRibbon, side: int, index: int, m: int):
    """Edge samples ``index - m .. index + m`` and the rulings there.

    For closed ribbons the window may run across the seam; samples from the
    far end are carried over by the rigid motion that matches the planar
    frames at the two ends (the development does not close up).
    """
    pts, ruling = pr.edge(side), pr.ruling
    n = len(pts) - 1
    idx = np.arange(index - m, index + m + 1)
    if idx[0] >= 0 and idx[-1] <= n:
        return pts[idx], ruling[idx]
    if not pr.center.closed_gap == pr.center.closed_gap:  # NaN gap: open curve
        raise MissingAngles("corner too close to an open end to measure")
    c, phi = pr.center.points, pr.center.heading
    turn = phi[n] - phi[0]
    rot = np.array([[np.cos(turn), -np.sin(turn)], [np.sin(turn), np.cos(turn)]])
    out_p, out_r = [], []
    near_start = index <= n // 2
    for j in idx:
        jj = j % n
        q, b = pts[jj], ruling[jj]
        if near_start and j < 0:
            q, b = (q - c[n]) @ rot + c[0], b @ rot          # end frame -> start frame
        elif not near_start and j > n:
            q, b = (q - c[0]) @ rot.T + c[n], b @ rot.T      # start frame -> end frame
        elif not near_start and j == n:
            q, b = pts[n], ruling[n]
        out_p.append(q)
        out_r.append(b)
    return np.array(out_p), np.array(out_r)


def corner_angle(pr: PlanarRibbon, side: int, index: int, o: Optional[float] = None,
                 stencil: int = 4) -> float:
    """Outer angle of the developed edge at sample ``index`` (region-left sign).

    When the edge doubles back (a cusp, turning by nearly pi) the sign is
    fixed by where the cusp arms point: into the ribbon gives an inner angle
    of 0, away from it an inner angle of 2 pi.
    """
    o = orientation(pr) if o is None else o
    local, rulings = _edge_window(pr, side, index, stencil)
    # one-sided fourth-order tangents on either side of the corner
    w = np.array([3, -16, 36, -48, 25]) / 12.0
    back = w @ local[stencil - 4:stencil + 1]
    fwd = -(w @ local[stencil:stencil + 5][::-1])
    alpha = _turning(back, fwd)
    alpha = o * alpha if side < 0 else -o * alpha
    if abs(alpha) > np.pi - 0.1:
        arms = 0.5 * (local[0] + local[-1]) - local[stencil]
        inward = -side * rulings[stencil]       # from the edge toward the center curve
        alpha = np.pi if np.dot(arms, inward) > 0 else -np.pi
    return alpha


@dataclass
class AuditReport:
    edge_integrals: list            # per ribbon: (bottom, top)
    angle_sum: float
    vertex_sum: float
    total: float
    chi: Fraction
    vertices: list
    issues: list = field(default_factory=list)

    @property
    def total_over_2pi(self) -> float:
        return self.total / (2 * np.pi)

    @property
    def deviation(self) -> float:
        return self.total_over_2pi - float(self.chi)

    def table(self) -> str:
        lines = ["vertex  position                               degree  character"]
        for k, v in enumerate(self.vertices):
            p = ", ".join(f"{x: .5f}" for x in v.point)
            lines.append(f"{k:>6}  ({p})  {v.degree:>6}  {v.character.name}")
        if not self.vertices:
            lines.append("  (none)")
        lines.append("")
        lines.append("ribbon  edge w-      edge w+      sum")
        for k, (lo, hi) in enumerate(self.edge_integrals):
            lines.append(f"{k:>6}  {lo: .6f}  {hi: .6f}  {lo + hi: .6f}")
        lines.append("")
        lines.append(f"outer angles     {self.angle_sum: .6f}")
        lines.append(f"vertex terms     {self.vertex_sum: .6f}")
        lines.append(f"audit total/2pi  {self.total_over_2pi: .6f}")
        lines.append(f"chi (exact)      {self.chi}")
        return "\n".join(lines)


def _locate_corners(v: Vertex, r: Ribbonization, planar: list, tol: float) -> list:
    """Every ribbon edge sample that sits at the vertex point."""
    found = []
    for k, rb in enumerate(r.ribbons):
        for s in SIDES:
            edge = rb.edge(s)
            dist = np.linalg.norm(edge[:rb.n + (0 if rb.closed else 1)] - v.point, axis=-1)
            near = np.nonzero(dist < tol)[0]
            if len(near):
                found.append((k, s, int(near[np.argmin(dist[near])])))
    return found


def gauss_bonnet_audit(r: Ribbonization, g: WedgeGraph, planar: Optional[list] = None,
                       corner_tol: float = 1e-3) -> AuditReport:
    planar = develop_all(r) if planar is None else planar
    signs = [orientation(pr) for pr in planar]
    corners_by_edge = {}
    angle_sum = 0.0
    for v in g.vertices:
        if v.cone:
            continue
        v.corners = []
        for k, s, i in _locate_corners(v, r, planar, corner_tol):
            alpha = corner_angle(planar[k], s, i, signs[k])
            v.corners.append(Corner(k, s, i, alpha))
            corners_by_edge.setdefault((k, s), []).append(i)
            angle_sum += alpha
        if not v.corners:
            raise MissingAngles(f"no ribbon corner found at vertex {v.point}")
    edges = []
    for k, pr in enumerate(planar):
        edges.append(tuple(edge_integral(pr, s, corners_by_edge.get((k, s), ()), signs[k])
                           for s in (-1, +1)))
    vertex_sum = sum(2 * np.pi - np.pi * v.degree for v in g.vertices)
    total = sum(a + b for a, b in edges) + angle_sum + vertex_sum
    return AuditReport(edges, angle_sum, vertex_sum, total, euler_characteristic(g), g.vertices)


def cut_ribbon_total(pr: PlanarRibbon) -> float:
    """Boundary turning of a ribbon cut open along its first and last rulings.

    Both trimmed edges plus the four corners where they meet the cut rulings.
    """
    o = orientation(pr)
    total = edge_integral(pr, -1, (), o) + edge_integral(pr, +1, (), o)
    bottom, top = pr.edge(-1), pr.edge(+1)
    t = pr.center.t
    d_bot = grid_derivative(bottom, t, closed=False)
    d_top = grid_derivative(top, t, closed=False)
    # outline: bottom forward, up the last ruling, top backward, down the
    # first ruling; the region is on the left of this walk when o > 0
    up, down = top[-1] - bottom[-1], bottom[0] - top[0]
    legs = [(d_bot[-1], up), (up, -d_top[-1]), (-d_top[0], down), (down, d_bot[0])]
    return total + o * sum(_turning(a, b) for a, b in legs)


def polyhedron_euler(faces: int, edges: int, vertices: int):
    """Euler characteristic of a polyhedron by the ribbon formula and by ``V - E + F``.

    Every face center and every polyhedron vertex becomes a vertex of the
    wedge system and the degrees add up to twice the edge count.
    """
    if min(faces, edges, vertices) < 0:
        raise ValueError("counts must be nonnegative")
    points = vertices + faces
    degree_sum = 2 * edges
    ribbon_route = Fraction(2 * points - degree_sum, 2)
    direct = vertices - edges + faces
    assert ribbon_route == direct
    return ribbon_route, Fraction(direct)
