"""Trimming provisional ribbons against each other along wedge curves.

Every ruling of a ribbon is a line.  A ruling of ribbon ``a`` meets ribbon
``b`` exactly where it meets one of ``b``'s rulings, i.e. where the two
lines are coplanar::

    G(t') = (gamma_b(t') - gamma_a(t)) . (beta_a(t) x beta_b(t')) = 0

Roots are bracketed on ``b``'s sample grid and refined with the exact frame
evaluator.  Ribbons grow simultaneously: a contact between ruling
coordinates ``u`` (on ``a``) and ``u'`` (on ``b``) is reached at growth
``max(|u|, |u'|)``, and contacts are accepted in that order as long as the
partner sheet still reaches the contact point.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from .errors import NoIntersection, RibbonError
from .ribbon import Ribbon

log = logging.getLogger(__name__)

SIDES = (+1, -1)


@dataclass
class Tolerances:
    line: float = 1e-7          # line-line distance accepted as an intersection
    root_iterations: int = 40
    root_tol: float = 1e-13     # parameter tolerance of the ruling root
    guard_cells: int = 3        # self-contact exclusion around t' = t, in grid cells
    partner_slack: float = 1e-2  # relative slack when checking the partner still reaches
    match: float = 1e-2          # pairing distance of the two sides of one wedge
    fold_cells: int = 12         # longest self-contact gap bridged as a fold


@dataclass
class Contact:
    """Accepted contacts for one side of one ribbon (arrays over samples)."""

    partner: np.ndarray      # ribbon index, -1 when the edge is free
    t_partner: np.ndarray
    u_partner: np.ndarray
    fold: np.ndarray         # True at fold points of a self-contact


@dataclass
class WedgeSegment:
    points: np.ndarray
    left: tuple               # (ribbon index, side)
    right: Optional[tuple]
    left_t: np.ndarray
    right_t: Optional[np.ndarray]
    kappa_left: Optional[np.ndarray] = None
    kappa_right: Optional[np.ndarray] = None
    closed: bool = False
    endpoints: list = field(default_factory=list)

    @property
    def is_self(self) -> bool:
        return self.right is not None and self.right[0] == self.left[0]


@dataclass
class Ribbonization:
    ribbons: list
    wedges: list
    adjacency: list
    contacts: list            # per ribbon: {side: Contact}
    provisional: list         # per ribbon: (w_minus, w_plus) before trimming
    issues: list = field(default_factory=list)


# --- ruling-ruling intersections ------------------------------------------

def _line_params(p1, b1, p2, b2):
    """Closest-point parameters of lines ``p1 + u b1`` and ``p2 + v b2``."""
    r = p1 - p2
    c = np.sum(b1 * b2, axis=-1)
    p = -np.sum(b1 * r, axis=-1)
    q = -np.sum(b2 * r, axis=-1)
    den = 1.0 - c * c
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (p - c * q) / den
        v = c * u - q
        gap = np.linalg.norm(r + u[..., None] * b1 - v[..., None] * b2, axis=-1)
    return u, v, gap, den


def _refine_roots(a_pt, a_beta, b: Ribbon, lo, hi, g_lo, g_hi, tol: Tolerances):
    """Illinois iteration for ``G(t') = 0`` on brackets ``[lo, hi]``."""
    lo, hi, g_lo, g_hi = lo.copy(), hi.copy(), g_lo.copy(), g_hi.copy()
    side = np.zeros(len(lo), dtype=int)

    def g(tq):
        d, beta = b.frame_at(tq)
        return np.sum((d.point - a_pt) * np.cross(a_beta, beta), axis=-1)

    x = lo.copy()
    for _ in range(tol.root_iterations):
        with np.errstate(divide="ignore", invalid="ignore"):
            x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo)
        bad = ~np.isfinite(x) | (x <= np.minimum(lo, hi)) | (x >= np.maximum(lo, hi))
        x = np.where(bad, 0.5 * (lo + hi), x)
        gx = g(x)
        left = np.sign(gx) == np.sign(g_lo)
        # Illinois: halve the retained endpoint's value after a repeat
        g_hi = np.where(left & (side == 1), 0.5 * g_hi, g_hi)
        g_lo = np.where(~left & (side == -1), 0.5 * g_lo, g_lo)
        lo, g_lo = np.where(left, x, lo), np.where(left, gx, g_lo)
        hi, g_hi = np.where(left, hi, x), np.where(left, g_hi, gx)
        side = np.where(left, 1, -1)
        if np.all(np.abs(hi - lo) < tol.root_tol * np.maximum(1.0, np.abs(x))):
            break
    return x


def _outside_guard(ii, kk, n1, closed, cells):
    """Drop self pairs closer than ``cells`` grid cells (periodically when closed)."""
    dist = np.abs(ii - kk)
    if closed:
        dist = np.minimum(dist, (n1 - 1) - dist)
    keep = dist > cells
    return ii[keep], kk[keep]


def ruling_contacts(a: Ribbon, b: Ribbon, same: bool, tol: Tolerances = Tolerances()):
    """All intersections of ``a``'s ruling lines with ``b``'s rulings.

    Returns a dict of arrays ``i, u, t, v, kind`` where ``i`` indexes ``a``'s
    samples, ``u``/``v`` are the ruling coordinates on ``a``/``b`` and ``t``
    the parameter on ``b``.  Only contacts inside both provisional extents are
    kept.  Coincident rulings (tangential overlap) yield the point midway in
    growth, ``|u| = |v|``.
    """
    P1, B1 = a.frames.point, a.beta
    P2, B2 = b.frames.point, b.beta
    scale = max(1.0, float(np.max(np.abs(P1))), float(np.max(np.abs(P2))))
    na, nb = len(P1), len(P2)
    G = B1 @ np.cross(B2, P2).T - np.cross(P1, B1) @ B2.T
    S = np.signbit(G)
    ii, kk = np.nonzero(S[:, :-1] != S[:, 1:])
    # roots sitting exactly on a node do not always show up as a sign change
    zi, zk = np.nonzero(np.abs(G) <= 1e-14 * scale * scale)
    if same:
        ii, kk = _outside_guard(ii, kk, na, a.closed, tol.guard_cells)
        zi, zk = _outside_guard(zi, zk, na, a.closed, tol.guard_cells)
    out = {k: [] for k in ("i", "u", "t", "v", "kind")}

    if len(ii):
        g0, g1 = G[ii, kk], G[ii, kk + 1]
        frac = g0 / (g0 - g1)
        p2 = P2[kk] + frac[:, None] * (P2[kk + 1] - P2[kk])
        b2 = B2[kk] + frac[:, None] * (B2[kk + 1] - B2[kk])
        b2 /= np.linalg.norm(b2, axis=-1, keepdims=True)
        u, v, gap, den = _line_params(P1[ii], B1[ii], p2, b2)
        wa_hi, wa_lo = a.w_plus[ii], a.w_minus[ii]
        wb_hi, wb_lo = b.w_plus[kk], b.w_minus[kk]
        slack = 0.05 * (wa_hi - wa_lo)
        ok = ((den > 1e-10) & (gap < 0.05 * scale) & (np.abs(u) > 1e-12)
              & (u <= wa_hi + slack) & (u >= wa_lo - slack)
              & (v <= wb_hi + slack) & (v >= wb_lo - slack))
        ii, kk, g0, g1 = ii[ok], kk[ok], g0[ok], g1[ok]
        if len(ii):
            t = b.t
            x = _refine_roots(P1[ii], B1[ii], b, t[kk], t[kk + 1], g0, g1, tol)
            d, beta = b.frame_at(x)
            u, v, gap, den = _line_params(P1[ii], B1[ii], d.point, beta)
            wb_hi = np.interp(b.wrap(x), t, b.w_plus)
            wb_lo = np.interp(b.wrap(x), t, b.w_minus)
            ok = ((gap < tol.line * scale) & (den > 1e-10)
                  & (u <= a.w_plus[ii]) & (u >= a.w_minus[ii])
                  & (v <= wb_hi) & (v >= wb_lo) & (np.abs(u) > 1e-12))
            out["i"].append(ii[ok])
            out["u"].append(u[ok])
            out["t"].append(x[ok])
            out["v"].append(v[ok])
            out["kind"].append(np.zeros(int(ok.sum()), dtype=int))

    if len(zi):
        u, v, gap, den = _line_params(P1[zi], B1[zi], P2[zk], B2[zk])
        ok = ((gap < tol.line * scale) & (den > 1e-10) & (np.abs(u) > 1e-12)
              & (u <= a.w_plus[zi]) & (u >= a.w_minus[zi])
              & (v <= b.w_plus[zk]) & (v >= b.w_minus[zk]))
        out["i"].append(zi[ok])
        out["u"].append(u[ok])
        out["t"].append(b.t[zk[ok]])
        out["v"].append(v[ok])
        out["kind"].append(np.zeros(int(ok.sum()), dtype=int))

    if not same:
        # coincident rulings: parallel and collinear lines
        cross = np.linalg.norm(np.cross(B1[:, None, :], B2[None, :, :]), axis=-1)
        ci, ck = np.nonzero(cross < 1e-8)
        if len(ci):
            off = np.linalg.norm(np.cross(P2[ck] - P1[ci], B1[ci]), axis=-1)
            m = off < tol.line * scale
            ci, ck = ci[m], ck[m]
        if len(ci):
            s = np.sign(np.sum(B1[ci] * B2[ck], axis=-1))
            u0 = np.sum((P1[ci] - P2[ck]) * B2[ck], axis=-1)
            sigma = -np.sign(s * u0)
            u = sigma * np.abs(u0) / 2
            v = u0 / 2
            ok = ((sigma != 0) & (u <= a.w_plus[ci]) & (u >= a.w_minus[ci])
                  & (v <= b.w_plus[ck]) & (v >= b.w_minus[ck]))
            out["i"].append(ci[ok])
            out["u"].append(u[ok])
            out["t"].append(b.t[ck[ok]])
            out["v"].append(v[ok])
            out["kind"].append(np.ones(int(ok.sum()), dtype=int))

    res = {k: (np.concatenate(vs) if vs else np.zeros(0, dtype=int if k in ("i", "kind") else float))
           for k, vs in out.items()}
    apexes = list(a.cone_points) + list(b.cone_points)
    if apexes and len(res["i"]):
        # every ruling of a capped cone passes through the apex; that is the
        # cap itself, not a wedge
        hit = P1[res["i"]] + res["u"][:, None] * B1[res["i"]]
        near = np.min(np.linalg.norm(hit[:, None, :] - np.asarray(apexes)[None], axis=-1), axis=1)
        keep = near > 1e-6 * scale
        res = {k: v[keep] for k, v in res.items()}
    return res


# --- growth sweep ----------------------------------------------------------

def _aabb(rb: Ribbon):
    pts = np.concatenate([rb.edge(+1), rb.edge(-1), rb.frames.point])
    return pts.min(axis=0), pts.max(axis=0)


def candidate_pairs(ribbons):
    """Ordered ribbon pairs whose provisional bounding boxes overlap (plus self pairs)."""
    boxes = [_aabb(r) for r in ribbons]
    pairs = []
    for i, (lo_i, hi_i) in enumerate(boxes):
        for j, (lo_j, hi_j) in enumerate(boxes):
            if i == j:
                if ribbons[i].closed:
                    pairs.append((i, i))
            elif np.all(lo_i <= hi_j) and np.all(lo_j <= hi_i):
                pairs.append((i, j))
    return pairs


def _partner_reach(stop, w_prov, t_grid, wrap, t):
    """Width the partner sheet currently reaches at parameter ``t``."""
    tq = wrap(t)
    j = np.clip(np.searchsorted(t_grid, tq) - 1, 0, len(t_grid) - 2)
    reach = np.minimum(stop, np.abs(w_prov))
    return np.maximum(reach[j], reach[j + 1])


def sweep(ribbons, events, tol: Tolerances):
    """Accept contacts in order of growth; returns per-ribbon stop widths and partners."""
    state = []
    for rb in ribbons:
        n1 = len(rb.t)
        state.append({s: dict(stop=np.full(n1, np.inf), partner=np.full(n1, -1),
                              t=np.full(n1, np.nan), v=np.full(n1, np.nan)) for s in SIDES})
    if not events:
        return state
    cat = {k: np.concatenate([e[k] for e in events]) for k in events[0]}
    order = np.argsort(np.maximum(np.abs(cat["u"]), np.abs(cat["v"])), kind="stable")
    for idx in order:
        a, b, i = int(cat["a"][idx]), int(cat["b"][idx]), int(cat["i"][idx])
        u, v, tb = cat["u"][idx], cat["v"][idx], cat["t"][idx]
        sa = state[a][+1 if u > 0 else -1]
        if np.isfinite(sa["stop"][i]):
            continue  # this ray already stopped growing
        rb = ribbons[b]
        sb = state[b][+1 if v > 0 else -1]
        prov = rb.w_plus if v > 0 else rb.w_minus
        reach = _partner_reach(sb["stop"], prov, rb.t, rb.wrap, np.array([tb]))[0]
        if reach < abs(v) * (1 - tol.partner_slack) - 1e-12:
            continue
        sa["stop"][i] = abs(u)
        sa["partner"][i] = b
        sa["t"][i] = tb
        sa["v"][i] = v
    return state


def _periodic_delta(t, tp, period):
    return (tp - t + 0.5 * period) % period - 0.5 * period


def _bridge_gaps(ribbons, me: int, st, tol: Tolerances, issues):
    """Fill short runs of unresolved rays flanked by contacts with one partner.

    Where two sheets touch tangentially the ruling roots become ill
    conditioned and a few rays end up without an accepted contact.  Near a
    fold of a self-contact the guard band hides the contact as well.  The
    width, partner parameter and partner coordinate are bridged by cubics
    through four samples on either side; a self-contact whose partner
    parameter crosses the ray's own parameter inside the gap marks a fold.
    Returns the boolean fold mask over samples.
    """
    rb = ribbons[me]
    n = rb.n if rb.closed else rb.n + 1
    fold = np.zeros(rb.n + 1, dtype=bool)
    has = np.isfinite(st["stop"][:n]) & (st["partner"][:n] >= 0)
    if has.all() or not has.any():
        return fold
    if rb.closed:
        # begin the walk at the start of a resolved run so every gap is interior
        start = int(np.nonzero(has & ~np.roll(has, 1))[0][0])
        lo, hi = -np.inf, np.inf
    else:
        start, lo, hi = 0, 0, n
    k = 0
    while k < n:
        if has[(start + k) % n]:
            k += 1
            continue
        g0 = k
        while k < n and not has[(start + k) % n]:
            k += 1
        if k - g0 > tol.fold_cells or g0 - 4 < lo or k + 4 > hi:
            continue
        flank_pos = np.r_[g0 - 4:g0, k:k + 4]
        flank = (start + flank_pos) % n
        partners = st["partner"][flank]
        if not has[flank].all() or np.any(partners != partners[0]):
            continue
        other = int(partners[0])
        gap = (start + np.arange(g0, k)) % n
        gpos = np.arange(g0, k, dtype=float)
        partner_rb = ribbons[other]
        tp = st["t"][flank]
        # unroll the partner parameter across its periodic seam
        tp_rel = tp[3] + _periodic_delta(tp[3], tp, partner_rb.center.length) \
            if partner_rb.closed else tp
        st["stop"][gap] = CubicSpline(flank_pos, st["stop"][flank])(gpos)
        st["v"][gap] = CubicSpline(flank_pos, st["v"][flank])(gpos)
        st["t"][gap] = CubicSpline(flank_pos, tp_rel)(gpos)
        st["partner"][gap] = other
        where = f"t={rb.t[gap[0]]:.6g}..{rb.t[gap[-1]]:.6g}"
        if other == me:
            own = rb.t[flank]
            delta = _periodic_delta(own, st["t"][flank], rb.center.length)
            if np.sign(delta[3]) != np.sign(delta[4]):
                d_fit = CubicSpline(flank_pos, delta)
                roots = [r for r in d_fit.roots(extrapolate=False) if g0 - 1 <= r <= k]
                centre = int(np.rint(roots[0] if roots else 0.5 * (g0 + k - 1)))
                fold[(start + centre) % n] = True
                where = f"fold near t={rb.t[(start + centre) % n]:.6g}"
        st["t"][gap] = partner_rb.wrap(st["t"][gap])
        issues.append(("NonTransversalContact",
                       f"ribbon {me} meets ribbon {other} tangentially ({where}); "
                       f"bridged {len(gap)} samples"))
    if rb.closed:
        for key in ("stop", "partner", "t", "v"):
            st[key][rb.n] = st[key][0]
        fold[rb.n] = fold[0]
    return fold


def solve_widths(a: Ribbon, b: Ribbon, tol: Tolerances = Tolerances()):
    """Mutually trim two ribbons; returns ``(a_trimmed, b_trimmed, wedges)``.

    Raises :class:`NoIntersection` when the provisional ribbons do not meet.
    """
    rz = assemble([a, b], tol=tol, self_trim=False)
    if not rz.wedges and all(np.all(c[s].partner < 0) for c in rz.contacts for s in SIDES):
        raise NoIntersection("ribbons do not meet within their provisional widths")
    return rz.ribbons[0], rz.ribbons[1], rz.wedges


def self_trim(a: Ribbon, tol: Tolerances = Tolerances()):
    """Trim a closed ribbon against itself; returns ``(trimmed, wedges)``."""
    rz = assemble([a], tol=tol, self_trim=True)
    if all(np.all(rz.contacts[0][s].partner < 0) for s in SIDES):
        raise NoIntersection("ribbon does not touch itself")
    return rz.ribbons[0], rz.wedges


def assemble(ribbons, tol: Tolerances = Tolerances(), self_trim: bool = True,
             pairs=None) -> Ribbonization:
    ribbons = list(ribbons)
    issues = []
    if pairs is None:
        pairs = candidate_pairs(ribbons)
    if not self_trim:
        pairs = [p for p in pairs if p[0] != p[1]]
    events = []
    for ia, ib in pairs:
        try:
            c = ruling_contacts(ribbons[ia], ribbons[ib], ia == ib, tol)
        except RibbonError as exc:  # keep going with the other pairs
            issues.append((type(exc).__name__, f"pair ({ia}, {ib}): {exc}"))
            continue
        if len(c["i"]):
            c["a"] = np.full(len(c["i"]), ia)
            c["b"] = np.full(len(c["i"]), ib)
            events.append(c)
    state = sweep(ribbons, events, tol)

    trimmed, contacts, provisional = [], [], []
    for k, rb in enumerate(ribbons):
        provisional.append((rb.w_minus.copy(), rb.w_plus.copy()))
        per_side = {}
        widths = {}
        for s in SIDES:
            st = state[k][s]
            if rb.closed:
                # the duplicated end sample mirrors the first one
                for key in ("stop", "partner", "t", "v"):
                    st[key][-1] = st[key][0]
            fold = _bridge_gaps(ribbons, k, st, tol, issues)
            prov = rb.w_plus if s > 0 else -rb.w_minus
            w = np.minimum(np.where(np.isfinite(st["stop"]), st["stop"], prov), prov)
            widths[s] = w
            per_side[s] = Contact(st["partner"].copy(), st["t"].copy(), st["v"].copy(), fold)
        trimmed.append(rb.with_widths(-widths[-1], widths[+1]))
        contacts.append(per_side)

    wedges = extract_wedges(trimmed, contacts, tol)
    adjacency = sorted({(w.left[0], w.left[1], w.right[0], w.right[1])
                        for w in wedges if w.right is not None})
    for w in wedges:
        if w.right is None:
            issues.append(("UnpairedWedge", f"ribbon {w.left[0]} side {w.left[1]}: "
                           f"{len(w.points)} edge samples without a matching partner edge"))
    return Ribbonization(trimmed, wedges, adjacency, contacts, provisional, issues)


# --- wedge extraction ------------------------------------------------------

def _runs(labels, closed):
    """Maximal runs of equal labels; circular when ``closed``.

    Returns ``(label, indices, wraps_fully)`` triples over samples ``0..n-1``.
    """
    n = len(labels)
    if n == 0:
        return []
    if closed and np.all(labels == labels[0]):
        return [(labels[0], np.arange(n), True)]
    change = np.nonzero(labels != np.roll(labels, 1))[0] if closed else \
        np.concatenate([[0], np.nonzero(labels[1:] != labels[:-1])[0] + 1])
    runs = []
    for j, s in enumerate(change):
        e = change[(j + 1) % len(change)] if (closed or j + 1 < len(change)) else n
        if closed and e <= s:
            e += n
        idx = np.arange(s, e) % n
        runs.append((labels[s], idx, False))
    return runs


def extract_wedges(ribbons, contacts, tol: Tolerances):
    """Group trimmed edge samples into wedge segments and pair their two sides."""
    halves = []
    for k, rb in enumerate(ribbons):
        n = rb.n if rb.closed else rb.n + 1
        for s in SIDES:
            c = contacts[k][s]
            labels = c.partner[:n].copy()
            # fold points split self-contact runs
            cut = np.cumsum(c.fold[:n]) if np.any(c.fold[:n]) else np.zeros(n, int)
            if np.any(c.fold[:n]):
                first = int(np.argmax(c.fold[:n]))
                cut = np.cumsum(np.roll(c.fold[:n], -first))
                cut = np.roll(cut, first)
            key = labels * 10000 + np.where(labels == k, cut % 10000, 0)
            edge = rb.edge(s)
            for label, idx, full in _runs(key, rb.closed):
                partner = int(labels[idx[0]])
                if partner < 0:
                    continue
                if not full and np.any(c.fold[:n]) and partner == k:
                    # include the fold sample itself at both ends of the run
                    nxt = (idx[-1] + 1) % n
                    idx = np.append(idx, nxt) if c.fold[nxt] else idx
                halves.append(dict(ribbon=k, side=s, partner=partner, idx=idx,
                                   points=edge[idx], full=full,
                                   t=rb.t[idx], tp=c.t_partner[idx]))
    used = set()
    wedges = []
    scale = max(1.0, max(float(np.max(np.abs(r.frames.point))) for r in ribbons)) if ribbons else 1.0
    for a_i, ha in enumerate(halves):
        if a_i in used:
            continue
        used.add(a_i)
        best, best_d = None, np.inf
        tree = cKDTree(ha["points"])
        for b_i, hb in enumerate(halves):
            if b_i in used or hb["ribbon"] != ha["partner"] or hb["partner"] != ha["ribbon"]:
                continue
            dist, _ = tree.query(hb["points"])
            d = float(np.median(dist))
            if d < best_d:
                best, best_d = b_i, d
        if best is not None and best_d < tol.match * scale:
            used.add(best)
            hb = halves[best]
            wedges.append(WedgeSegment(ha["points"], (ha["ribbon"], ha["side"]),
                                       (hb["ribbon"], hb["side"]), ha["t"], hb["t"],
                                       closed=ha["full"] and hb["full"]))
        else:
            wedges.append(WedgeSegment(ha["points"], (ha["ribbon"], ha["side"]), None,
                                       ha["t"], None, closed=ha["full"]))
    return wedges


# --- diagnostics -----------------------------------------------------------

def wedge_consistency(rz: Ribbonization) -> float:
    """Largest distance from a trimmed edge point to its partner's ruling point."""
    worst = 0.0
    for k, rb in enumerate(rz.ribbons):
        for s in SIDES:
            c = rz.contacts[k][s]
            idx = np.nonzero(c.partner >= 0)[0]
            edge = rb.edge(s)[idx]
            for other in np.unique(c.partner[idx]):
                m = c.partner[idx] == other
                d, beta = rz.ribbons[other].frame_at(c.t_partner[idx][m])
                q = d.point + c.u_partner[idx][m][:, None] * beta
                worst = max(worst, float(np.max(np.linalg.norm(edge[m] - q, axis=-1))))
    return worst


def overlap_excess(rz: Ribbonization) -> float:
    """Largest amount by which a contact lies beyond the partner's trimmed width."""
    worst = 0.0
    for k in range(len(rz.ribbons)):
        for s in SIDES:
            c = rz.contacts[k][s]
            idx = np.nonzero(c.partner >= 0)[0]
            for other in np.unique(c.partner[idx]):
                rb = rz.ribbons[other]
                m = c.partner[idx] == other
                tq, v = rb.wrap(c.t_partner[idx][m]), c.u_partner[idx][m]
                reach = np.where(v > 0, np.interp(tq, rb.t, rb.w_plus),
                                 -np.interp(tq, rb.t, rb.w_minus))
                worst = max(worst, float(np.max(np.abs(v) - reach)))
    return worst
