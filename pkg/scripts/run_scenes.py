"""Run the shipped scenes through the command line and print each summary line.

    python3 scripts/run_scenes.py [--out-dir out]
"""
import argparse
import io
import time
from contextlib import redirect_stdout
from pathlib import Path

from cartan_ribbons.cli import main

ROOT = Path(__file__).resolve().parents[1]


def run():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out-dir", default=str(ROOT / "out"))
    args = parser.parse_args()
    for scene in sorted((ROOT / "scenes").glob("*.scene")):
        for verb in ("ribbonize", "curvature"):
            buf = io.StringIO()
            start = time.perf_counter()
            with redirect_stdout(buf):
                code = main([verb, str(scene), "--out-dir", str(Path(args.out_dir) / scene.stem),
                             "--seed", "0"])
            last = buf.getvalue().rstrip().splitlines()[-1]
            print(f"{scene.stem:<10} {verb:<10} exit {code}  {time.perf_counter() - start:5.1f} s  {last}")


if __name__ == "__main__":
    run()
