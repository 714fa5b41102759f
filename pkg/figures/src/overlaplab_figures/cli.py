"""`overlaplab-plot <kind> <inputs...> -o out.png` and make-figures."""

from __future__ import annotations

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from .render import KINDS, PlotJob, SchemaError, render


def _parse_pair(text):
    lo, _, hi = text.partition(":")
    return float(lo), float(hi)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="overlaplab-plot")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("inputs", nargs="+")
    parser.add_argument("-o", "--output", required=True)
    parser.add_argument("--x-range", default=None, help="lo:hi")
    parser.add_argument("--y-range", default=None, help="lo:hi")
    args = parser.parse_args(argv)
    job = PlotJob(
        kind=args.kind, inputs=args.inputs, output=args.output,
        x_range=_parse_pair(args.x_range) if args.x_range else None,
        y_range=_parse_pair(args.y_range) if args.y_range else None)
    try:
        render(job)
    except (SchemaError, OSError, ValueError) as err:
        print(f"overlaplab-plot: {err}", file=sys.stderr)
        return 2
    return 0


def _overlaplab_cmd(override=None) -> list[str]:
    if override:
        return override.split()
    if shutil.which("overlaplab"):
        return ["overlaplab"]
    return [sys.executable, "-m", "overlaplab.cli"]


def _run(cmd, cwd) -> None:
    proc = subprocess.run(cmd, cwd=cwd, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(
            f"command failed ({proc.returncode}): {' '.join(cmd)}\n"
            f"{proc.stderr}")


PORTRAIT_WINDOWS = {
    "cubic": "-pi:3pi:-1.1:2.1",
    "torus": "-pi:3pi:-pi:3pi",
}

ORBIT_RECIPES = {
    # the two reference unstable-orbit runs
    "orbit_a": ["--eps", "0.8", "--y0", "0.1"],
    "orbit_b": ["--eps", "0.99", "--y0", "0.01"],
}


def make_figures_main(argv=None) -> int:
    """Run the documented export recipes end-to-end, then render them.

    Exports land in <out>/data, images in <out>; rendering consumes the
    exported files alone.
    """
    parser = argparse.ArgumentParser(prog="overlaplab-make-figures")
    parser.add_argument("--out-dir", default="figures_out")
    parser.add_argument("--overlaplab", default=None,
                        help="override the primary CLI command")
    parser.add_argument("--skip-exports", action="store_true",
                        help="render from an existing data directory")
    args = parser.parse_args(argv)
    out = Path(args.out_dir)
    data = out / "data"
    out.mkdir(parents=True, exist_ok=True)
    data.mkdir(exist_ok=True)
    cmd = _overlaplab_cmd(args.overlaplab)

    if not args.skip_exports:
        for family in ("cubic", "torus"):
            for eps in ("0.5", "1", "1.5"):
                tag = f"{family}_{eps.replace('.', 'p')}"
                _run(cmd + ["portrait", "--family", family, "--eps", eps,
                            f"--window={PORTRAIT_WINDOWS[family]}",
                            "--grid", "361", "--prefix", tag,
                            "--out-dir", str(data), "--quiet"], cwd=None)
        for tag, extra in ORBIT_RECIPES.items():
            _run(cmd + ["orbit", "--family", "torus", "--mu", "0.1",
                        "--coupling", "mu-only", "--f", "1.0*cos(x+2y+t)",
                        "--x0", "0", "--tmax", "500", "--sample-dt", "0.05",
                        "--prefix", tag, "--out-dir", str(data), "--quiet",
                        *extra], cwd=None)

    images = []
    for family in ("cubic", "torus"):
        inputs = [str(data / f"{family}_{e}_levels.csv")
                  for e in ("0p5", "1", "1p5")]
        target = str(out / f"portraits_{family}.png")
        render(PlotJob("portrait", inputs, target))
        images.append(target)
    for tag in ORBIT_RECIPES:
        target = str(out / f"{tag}.png")
        render(PlotJob("orbit", [str(data / f"{tag}_trajectory.csv")],
                       target))
        images.append(target)
    for path in images:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
