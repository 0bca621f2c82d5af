"""Command line: ``cartan-ribbons {ribbonize,develop,inspect,curvature} SCENE``."""
from __future__ import annotations

import argparse
import logging
import sys

from .errors import RibbonError
from .pipeline import VERBS, run_pipeline
from .scene import MIN_SAMPLES, TOLERANCES, apply_overrides, load_scene

HELP = {
    "ribbonize": "assemble the ribbonization and write OBJ, SVG, CSV and the report",
    "develop": "assemble and write the flat patterns and width tables",
    "inspect": "assemble and report the vertices, Euler characteristic and audit",
    "curvature": "write frame scalars and plane-rolling traces per curve",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cartan-ribbons",
                                     description="Cartan ribbonizations of surfaces.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb, help=HELP[verb])
        p.add_argument("scene", help="scene file")
        p.add_argument("--out-dir", default=None, help="directory for output files")
        p.add_argument("--samples", type=int, default=None,
                       help="override samples per curve from the scene")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized spot checks")
        p.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                       help=f"tolerance override; keys: {', '.join(TOLERANCES)}")
        p.add_argument("-v", "--verbose", action="store_true", help="log stage progress")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_scene(args.scene)
        if args.samples is not None:
            if args.samples < MIN_SAMPLES:
                raise SystemExit(f"--samples must be >= {MIN_SAMPLES}")
            cfg.samples = args.samples
        apply_overrides(cfg, args.tol)
    except OSError as exc:
        print(f"error: cannot read scene: {exc}", file=sys.stderr)
        return 2
    except RibbonError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    report = run_pipeline(cfg, args.verb, out_dir=args.out_dir, seed=args.seed)
    sys.stdout.write(report.text())
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
