"""Scene-to-artifacts driver: curves, ribbons, development, assembly, topology, exports."""
from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from . import export
from .assembly import Ribbonization, Tolerances, assemble
from .curves import (CurveOnSurface, cylinder_circle, darboux_frame, ellipsoid_u_curve,
                     ellipsoid_v_curve, latitude, sample_curve, sampled_path, torus_unknot)
from .development import develop_curve
from .errors import IoError, RibbonError, ValidationError
from .ribbon import build_ribbon, cap_cone, develop_ribbon
from .rolling import (PlaneTrack, check_plane_rolling, omega_matrix, plane_rotation_at,
                      rotation_by_differences)
from .scene import SceneConfig
from .surface import builtin_surface
from .topology import detect_vertices, gauss_bonnet_audit

log = logging.getLogger(__name__)

VERBS = ("ribbonize", "develop", "inspect", "curvature")
ROLLING_TRACE_SAMPLES = 256
ROLLING_SPOT_CHECKS = 8


@dataclass
class StageResult:
    name: str
    seconds: float
    ok: bool
    error: str = ""


@dataclass
class RunReport:
    scene: str
    verb: str
    stages: list = field(default_factory=list)
    header: list = field(default_factory=list)
    body: list = field(default_factory=list)
    files: list = field(default_factory=list)
    ribbonization: Optional[Ribbonization] = None
    audit: object = None
    audit_tol: float = 0.02
    summary: str = ""

    @property
    def exit_code(self) -> int:
        return 0 if all(s.ok for s in self.stages) else 1

    def text(self) -> str:
        lines = list(self.header)
        lines.append("")
        lines.append("stage         seconds  status")
        for s in self.stages:
            status = "ok" if s.ok else f"FAILED {s.error}"
            lines.append(f"{s.name:<12}  {s.seconds:7.3f}  {status}")
        if self.body:
            lines.append("")
            lines += self.body
        if self.files:
            lines.append("")
            lines += [f"wrote {f}" for f in self.files]
        lines.append("")
        lines.append(self.summary)
        return "\n".join(lines) + "\n"


def make_curve(cfg: SceneConfig, spec, surface) -> CurveOnSurface:
    a = spec.args
    fam = spec.family
    if fam == "torus-unknot":
        c = torus_unknot(surface, a[0], a[1], a[2] if len(a) > 2 else 0.0, name=spec.name)
    elif fam in ("ellipsoid-u-curve", "ellipsoid-v-curve"):
        if cfg.surface != "ellipsoid":
            raise ValidationError(f"{fam} needs the ellipsoid surface", field=f"curve {spec.name}")
        flag = bool(a[1]) if len(a) > 1 else False
        make = ellipsoid_u_curve if fam == "ellipsoid-u-curve" else ellipsoid_v_curve
        c = make(cfg.surface_params, a[0], flag, name=spec.name)
    elif fam == "latitude":
        c = latitude(surface, a[0], name=spec.name)
    elif fam == "cylinder-circle":
        c = cylinder_circle(surface, a[0] if a else 0.0, name=spec.name)
    elif fam == "sampled":
        path = Path(spec.points)
        if not path.is_absolute() and cfg.base_dir is not None:
            path = Path(cfg.base_dir) / path
        try:
            data = np.loadtxt(path, delimiter=",", ndmin=2)
        except (OSError, ValueError) as exc:
            raise IoError(f"cannot read sampled curve {path}: {exc}") from None
        if data.shape[1] != 3:
            raise ValidationError("sampled curve rows must be t, u, v", field=f"curve {spec.name}")
        c = sampled_path(surface, data[:, 0], data[:, 1:], closed=spec.closed, name=spec.name)
    else:  # parse_scene rejects unknown families
        raise ValidationError(f"unknown family {fam}", field=f"curve {spec.name}")
    if cfg.tolerance("closure") != c.closure_tol:
        c = replace(c, closure_tol=cfg.tolerance("closure"))
    return c


def assembly_tolerances(cfg: SceneConfig) -> Tolerances:
    return Tolerances(line=cfg.tolerance("line"), root_iterations=cfg.tolerance("root_iterations"),
                      root_tol=cfg.tolerance("root_tol"), guard_cells=cfg.tolerance("guard_cells"),
                      partner_slack=cfg.tolerance("partner_slack"), match=cfg.tolerance("match"),
                      fold_cells=cfg.tolerance("fold_cells"))


class _Stages:
    """Runs named stages, timing each and stopping after the first failure."""

    def __init__(self, report: RunReport):
        self.report = report
        self.failed = False

    def run(self, name, fn):
        if self.failed:
            return None
        start = time.perf_counter()
        try:
            value = fn()
        except RibbonError as exc:
            self.failed = True
            msg = f"{type(exc).__name__}: {exc}"
            self.report.stages.append(StageResult(name, time.perf_counter() - start, False, msg))
            log.error("stage %s failed: %s", name, msg)
            return None
        self.report.stages.append(StageResult(name, time.perf_counter() - start, True))
        log.info("stage %s done in %.3f s", name, self.report.stages[-1].seconds)
        return value


def _header(cfg: SceneConfig, verb: str, seed: Optional[int]) -> list:
    lines = [f"scene {cfg.name}: {verb}",
             f"surface {cfg.surface} {list(cfg.surface_params)}",
             f"curves {len(cfg.curves)}: " + ", ".join(f"{c.name}={c.family}{list(c.args)}"
                                                       for c in cfg.curves),
             f"samples {cfg.samples}, w_max {'auto' if cfg.w_max is None else cfg.w_max}, "
             f"self_trim {cfg.self_trim}"]
    if seed is not None:
        lines.append(f"seed {seed}")
    for key, val in cfg.defaults_used:
        lines.append(f"default {key} = {val}")
    tols = cfg.all_tolerances()
    lines.append("tolerances " + ", ".join(
        f"{k}={v}{'*' if k in cfg.tolerances else ''}" for k, v in tols.items()))
    return lines


def run_pipeline(cfg: SceneConfig, verb: str = "ribbonize", out_dir=None,
                 seed: Optional[int] = None) -> RunReport:
    """Run ``verb`` on a scene and return the report (see ``RunReport.text``)."""
    if verb not in VERBS:
        raise ValueError(f"unknown verb {verb!r}; known: {VERBS}")
    report = RunReport(cfg.name, verb, header=_header(cfg, verb, seed),
                       audit_tol=cfg.tolerance("audit"))
    for line in report.header:
        log.info(line)
    st = _Stages(report)
    out = Path(out_dir) if out_dir is not None else None
    want = set(cfg.outputs) if out is not None else set()
    n = cfg.samples

    surface = st.run("surface", lambda: builtin_surface(cfg.surface, cfg.surface_params))
    curves = st.run("curves", lambda: [make_curve(cfg, s, surface) for s in cfg.curves])
    frames = st.run("sampling", lambda: [sample_curve(c, n) for c in curves])
    developed = st.run("development", lambda: [develop_curve(c, n) for c in curves])

    if verb == "curvature":
        rng = np.random.default_rng(seed)

        def rolling():
            traces, worst = [], 0.0
            for c, p in zip(curves, developed):
                track = PlaneTrack(c, p)
                ts = c.grid(ROLLING_TRACE_SAMPLES)
                traces.append([check_plane_rolling(c, t, track, cfg.tolerance("classify"))
                               for t in ts])
                lo, hi = c.interval
                for t in rng.uniform(lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo),
                                     ROLLING_SPOT_CHECKS):
                    d = darboux_frame(c, t)
                    fd = rotation_by_differences(plane_rotation_at(track), t)
                    worst = max(worst, float(np.max(np.abs(fd - omega_matrix(d, track.sample(t, d))))))
            return traces, worst

        res = st.run("rolling", rolling)
        if res is not None:
            traces, worst = res
            report.body.append(f"rolling: finite-difference vs closed-form Omega, max {worst:.3e} "
                               f"over {ROLLING_SPOT_CHECKS} random t per curve")
            for c, tr in zip(curves, traces):
                kinds = sorted({m.classification.name for m in tr})
                report.body.append(f"  {c.name}: {', '.join(kinds)}")
        if out is not None and "csv" in want and res is not None:
            def write():
                export.ensure_dir(out)
                for k, (c, f, tr) in enumerate(zip(curves, frames, traces)):
                    stem = export.safe_name(c.name, k)
                    for suffix, text in (("curvature", export.curvature_csv(f)),
                                         ("rolling", export.rolling_csv(tr))):
                        p = out / f"{stem}_{suffix}.csv"
                        export.write_csv(text, p)
                        report.files.append(str(p))
            st.run("export", write)
        report.summary = _status_line(report)
        return report

    def ribbons():
        out_r = []
        for c, spec in zip(curves, cfg.curves):
            rb = build_ribbon(c, n, w_max=cfg.w_max,
                              striction_margin=cfg.tolerance("striction_margin"),
                              tol=cfg.tolerance("normal_curvature"))
            if spec.cap_cone:
                rb = cap_cone(rb)
            out_r.append(rb)
        return out_r

    rbs = st.run("ribbons", ribbons)
    rz = st.run("assembly", lambda: assemble(rbs, assembly_tolerances(cfg), self_trim=cfg.self_trim))
    report.ribbonization = rz
    if rz is not None:
        for name, msg in rz.issues:
            report.body.append(f"assembly note: {name}: {msg}")
    planar = st.run("flatten", lambda: [develop_ribbon(rb, p) for rb, p in zip(rz.ribbons, developed)])

    if verb in ("ribbonize", "inspect"):
        def topo():
            g = detect_vertices(rz, tol=cfg.tolerance("vertex"), angle_tol=cfg.tolerance("vertex_angle"))
            return gauss_bonnet_audit(rz, g, planar, corner_tol=cfg.tolerance("corner"))
        audit = st.run("topology", topo)
        report.audit = audit
        if audit is not None:
            report.body += audit.table().splitlines()

    if out is not None and not st.failed and verb != "inspect":
        def write():
            export.ensure_dir(out)
            if "obj" in want and verb == "ribbonize":
                p = out / f"{cfg.name}.obj"
                export.export_mesh(rz, p)
                report.files.append(str(p))
            if "svg" in want:
                p = out / f"{cfg.name}_flat.svg"
                export.export_flat_patterns(planar, p)
                report.files.append(str(p))
            if "csv" in want:
                for k, rb in enumerate(rz.ribbons):
                    p = out / f"{export.safe_name(rb.name, k)}_widths.csv"
                    export.write_csv(export.widths_csv(rb), p)
                    report.files.append(str(p))
        st.run("export", write)

    if out is not None and "report" in want:
        p = out / f"{cfg.name}_{verb}_report.txt"
        try:
            export.ensure_dir(out)
            report.files.append(str(p))
            report.summary = _status_line(report)
            export.write_csv(report.text(), p)
        except IoError as exc:
            report.stages.append(StageResult("report", 0.0, False, f"IoError: {exc}"))
    report.summary = _status_line(report)
    return report


def _status_line(report: RunReport) -> str:
    failed = [s for s in report.stages if not s.ok]
    if failed:
        return f"FAILED at stage {failed[0].name}: {failed[0].error}"
    a = report.audit
    if a is not None:
        tol = report.audit_tol
        return (f"χ = {a.chi} (exact), audit {a.total_over_2pi:.3f} ± {tol:g}"
                + ("" if abs(a.deviation) < tol else f" (deviation {a.deviation:+.3f})"))
    return "ok"
