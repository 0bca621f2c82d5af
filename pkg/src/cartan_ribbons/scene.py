"""Scene files: which surface, which center curves, and how to build them.

Grammar (UTF-8, line oriented, ``#`` or ``;`` start a comment line)::

    [scene]
    name = torus                 # optional, default "scene"
    samples = 2048               # samples per curve, >= 64
    w_max = 3.0                  # provisional half width, > 0, or "auto"
    self_trim = true             # optional
    outputs = obj, svg, csv, report

    [surface]
    type = torus                 # builtin surface name
    params = 2, 1                # comma separated reals (may be empty)

    [curve gamma1]               # one section per center curve
    family = torus-unknot        # see CURVE_FAMILIES
    args = 3, 1, 0
    cap_cone = false             # optional: extend a cone ribbon to its apex
    points = path.csv            # only for family "sampled": rows t, u, v
    closed = true                # only for family "sampled"

    [tolerances]                 # optional overrides, see TOLERANCES
    line = 1e-7

Unknown sections or keys are errors.  Curve order follows the file.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import ParseError, ValidationError
from .surface import builtin_names

# family -> (argument names, required count)
CURVE_FAMILIES = {
    "torus-unknot": (("p", "q", "phase"), 2),
    "ellipsoid-u-curve": (("v", "lower"), 1),
    "ellipsoid-v-curve": (("u", "negative_x"), 1),
    "latitude": (("colatitude",), 1),
    "cylinder-circle": (("height",), 0),
    "sampled": ((), 0),
}

# every numeric tolerance the pipeline hands to the library
TOLERANCES = {
    "line": 1e-7,               # assembly: ray-ruling gap accepted as a hit (relative)
    "root_iterations": 40,      # assembly: root refinement steps
    "root_tol": 1e-13,          # assembly: parameter tolerance of a ruling root
    "guard_cells": 3,           # assembly: self-contact exclusion band, grid cells
    "partner_slack": 1e-2,      # assembly: partner reach slack (relative)
    "match": 1e-2,              # assembly: pairing distance of wedge sides (relative)
    "fold_cells": 12,           # assembly: longest unresolved run bridged
    "normal_curvature": 1e-8,   # ribbon: |kn| below this is treated as zero
    "striction_margin": 1e-6,   # ribbon: provisional width stops this far short of u*
    "closure": 1e-8,            # curves: closed-curve endpoint mismatch
    "vertex": 1e-4,             # topology: endpoint clustering distance
    "vertex_angle": 1e-2,       # topology: merged end directions, radians
    "corner": 1e-3,             # topology: edge samples counted as vertex corners
    "classify": 1e-8,           # rolling: motion classification (relative)
    "speed": 1e-6,              # rolling: speed match of source and target
    "initial": 1e-6,            # rolling: initial point and direction match
    "audit": 0.02,              # report: accepted |audit/2pi - chi|
}
INTEGER_TOLERANCES = {"root_iterations", "guard_cells", "fold_cells"}

OUTPUTS = ("obj", "svg", "csv", "report")
SCENE_KEYS = {"name", "samples", "w_max", "self_trim", "outputs"}
SURFACE_KEYS = {"type", "params"}
CURVE_KEYS = {"family", "args", "cap_cone", "points", "closed"}
DEFAULT_SAMPLES = 2048
MIN_SAMPLES = 64


@dataclass
class CurveSpec:
    name: str
    family: str
    args: tuple = ()
    cap_cone: bool = False
    points: str = ""
    closed: bool = True


@dataclass
class SceneConfig:
    surface: str
    surface_params: tuple
    curves: list
    name: str = "scene"
    samples: int = DEFAULT_SAMPLES
    w_max: Optional[float] = None       # None: sized from the striction distance
    self_trim: bool = True
    outputs: tuple = OUTPUTS
    tolerances: dict = field(default_factory=dict)
    defaults_used: list = field(default_factory=list, compare=False)
    base_dir: Optional[Path] = field(default=None, compare=False)

    def tolerance(self, key: str):
        return self.tolerances.get(key, TOLERANCES[key])

    def all_tolerances(self) -> dict:
        return {k: self.tolerance(k) for k in TOLERANCES}


def _reals(text: str, where: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise ValidationError(f"{where}: expected comma separated numbers, got {text!r}",
                              field=where) from None


def _bool(text: str, where: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValidationError(f"{where}: expected true or false, got {text!r}", field=where)


def _check_keys(section, allowed, where):
    for key in section:
        if key not in allowed:
            raise ValidationError(f"unknown key {key!r} in [{where}]", field=f"{where}.{key}")


def parse_scene(text, base_dir: Optional[Path] = None) -> SceneConfig:
    """Parse and validate scene text (bytes or str)."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"scene is not UTF-8: {exc}") from None
    cp = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",), interpolation=None,
                                   strict=True, empty_lines_in_values=False)
    try:
        cp.read_string(text)
    except configparser.MissingSectionHeaderError as exc:
        raise ParseError("content before the first [section]", line=exc.lineno) from None
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as exc:
        raise ParseError(exc.message.split(": ", 1)[-1], line=exc.lineno) from None
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("expected 'key = value' or '[section]'", line=line) from None

    defaults = []
    sections = cp.sections()
    for sec in sections:
        if sec not in ("scene", "surface", "tolerances") and not sec.startswith("curve "):
            raise ValidationError(f"unknown section [{sec}]", field=sec)
    if "surface" not in sections:
        raise ValidationError("missing [surface] section", field="surface")

    surf = cp["surface"]
    _check_keys(surf, SURFACE_KEYS, "surface")
    if "type" not in surf:
        raise ValidationError("surface type missing", field="surface.type")
    stype = surf["type"].strip()
    if stype not in builtin_names():
        raise ValidationError(f"unknown surface {stype!r}; known: {builtin_names()}",
                              field="surface.type")
    sparams = _reals(surf.get("params", ""), "surface.params")

    cfg = SceneConfig(stype, sparams, [])
    scene = cp["scene"] if "scene" in sections else {}
    _check_keys(scene, SCENE_KEYS, "scene")
    if "name" in scene:
        cfg.name = scene["name"].strip()
    else:
        defaults.append(("scene.name", cfg.name))
    if "samples" in scene:
        try:
            cfg.samples = int(scene["samples"])
        except ValueError:
            raise ValidationError("samples must be an integer", field="scene.samples") from None
    else:
        defaults.append(("scene.samples", cfg.samples))
    if cfg.samples < MIN_SAMPLES:
        raise ValidationError(f"samples must be >= {MIN_SAMPLES}", field="scene.samples")
    if "w_max" in scene and scene["w_max"].strip().lower() != "auto":
        (cfg.w_max,) = _reals(scene["w_max"], "scene.w_max") or (None,)
        if cfg.w_max is None or not cfg.w_max > 0:
            raise ValidationError("w_max must be positive", field="scene.w_max")
    elif "w_max" not in scene:
        defaults.append(("scene.w_max", "auto"))
    if "self_trim" in scene:
        cfg.self_trim = _bool(scene["self_trim"], "scene.self_trim")
    else:
        defaults.append(("scene.self_trim", cfg.self_trim))
    if "outputs" in scene:
        outs = tuple(x.strip() for x in scene["outputs"].split(",") if x.strip())
        for o in outs:
            if o not in OUTPUTS:
                raise ValidationError(f"unknown output {o!r}; known: {OUTPUTS}",
                                      field="scene.outputs")
        cfg.outputs = outs
    else:
        defaults.append(("scene.outputs", ", ".join(cfg.outputs)))

    for sec in sections:
        if not sec.startswith("curve "):
            continue
        name = sec[len("curve "):].strip()
        where = f"curve {name}"
        body = cp[sec]
        _check_keys(body, CURVE_KEYS, where)
        if "family" not in body:
            raise ValidationError(f"[{where}] has no family", field=f"{where}.family")
        fam = body["family"].strip()
        if fam not in CURVE_FAMILIES:
            raise ValidationError(f"unknown curve family {fam!r}; known: {sorted(CURVE_FAMILIES)}",
                                  field=f"{where}.family")
        names, required = CURVE_FAMILIES[fam]
        args = _reals(body.get("args", ""), f"{where}.args")
        if not required <= len(args) <= len(names):
            raise ValidationError(f"{fam} takes {required}..{len(names)} args {names}",
                                  field=f"{where}.args")
        spec = CurveSpec(name, fam, args)
        if "cap_cone" in body:
            spec.cap_cone = _bool(body["cap_cone"], f"{where}.cap_cone")
        if fam == "sampled":
            if "points" not in body:
                raise ValidationError("sampled curves need points = file", field=f"{where}.points")
            spec.points = body["points"].strip()
            if "closed" in body:
                spec.closed = _bool(body["closed"], f"{where}.closed")
        elif "points" in body or "closed" in body:
            raise ValidationError("points/closed only apply to sampled curves",
                                  field=f"{where}.points")
        cfg.curves.append(spec)
    if not cfg.curves:
        raise ValidationError("scene has no [curve ...] sections", field="curves")

    if "tolerances" in sections:
        for key, val in cp["tolerances"].items():
            if key not in TOLERANCES:
                raise ValidationError(f"unknown tolerance {key!r}", field=f"tolerances.{key}")
            cfg.tolerances[key] = _tolerance_value(key, val)
    cfg.defaults_used = defaults
    cfg.base_dir = base_dir
    return cfg


def _tolerance_value(key, val):
    try:
        num = float(val)
    except ValueError:
        raise ValidationError(f"tolerance {key} must be a number", field=f"tolerances.{key}") from None
    if key in INTEGER_TOLERANCES:
        if num != int(num):
            raise ValidationError(f"tolerance {key} must be an integer", field=f"tolerances.{key}")
        num = int(num)
    if num < 0:
        raise ValidationError(f"tolerance {key} must be nonnegative", field=f"tolerances.{key}")
    return num


def apply_overrides(cfg: SceneConfig, pairs) -> None:
    """Apply ``key=value`` tolerance overrides (command line)."""
    for item in pairs:
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or key not in TOLERANCES:
            raise ValidationError(f"bad tolerance override {item!r}", field=f"tolerances.{key}")
        cfg.tolerances[key] = _tolerance_value(key, val.strip())


def _fmt(x) -> str:
    return repr(float(x)) if not isinstance(x, int) else str(x)


def serialize_scene(cfg: SceneConfig) -> str:
    """Canonical text; ``parse_scene(serialize_scene(cfg)) == cfg``."""
    out = ["[scene]", f"name = {cfg.name}", f"samples = {cfg.samples}",
           f"w_max = {'auto' if cfg.w_max is None else repr(float(cfg.w_max))}",
           f"self_trim = {'true' if cfg.self_trim else 'false'}",
           f"outputs = {', '.join(cfg.outputs)}", "",
           "[surface]", f"type = {cfg.surface}",
           f"params = {', '.join(repr(float(p)) for p in cfg.surface_params)}", ""]
    for c in cfg.curves:
        out += [f"[curve {c.name}]", f"family = {c.family}",
                f"args = {', '.join(repr(float(a)) for a in c.args)}",
                f"cap_cone = {'true' if c.cap_cone else 'false'}"]
        if c.family == "sampled":
            out += [f"points = {c.points}", f"closed = {'true' if c.closed else 'false'}"]
        out.append("")
    if cfg.tolerances:
        out.append("[tolerances]")
        out += [f"{k} = {_fmt(v)}" for k, v in sorted(cfg.tolerances.items())]
        out.append("")
    return "\n".join(out)


def load_scene(path) -> SceneConfig:
    path = Path(path)
    return parse_scene(path.read_bytes(), base_dir=path.parent)
