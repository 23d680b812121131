"""mmx-plot: render figures from mmx trace/sweep/spectral files.

Exit codes: 0 figure written, 1 input failed schema validation (the
message names the offending column or key), 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import KINDS, FigureSpec, build_figure, save_figure
from .schema import SchemaError


def _parse_inputs(raw: list[str]) -> tuple[Path, ...]:
    paths: list[Path] = []
    for chunk in raw:
        paths.extend(Path(p) for p in chunk.split(",") if p)
    return tuple(paths)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mmx-plot",
        description="render figures from mmx CSV/JSON artifacts",
    )
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument(
        "--in",
        dest="inputs",
        action="append",
        required=True,
        metavar="PATH",
        help="input file; repeat the flag or comma-separate for overlays",
    )
    p.add_argument("--out", required=True, help="output image path")
    p.add_argument(
        "--eps", type=float, help="target level drawn on convergence figures"
    )
    p.add_argument("--xscale", choices=["linear", "log"])
    p.add_argument("--yscale", choices=["linear", "log"])
    p.add_argument("--title")
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    inputs = _parse_inputs(args.inputs)
    if not inputs:
        print("mmx-plot: error: no input paths given", file=sys.stderr)
        return 2
    missing = [str(p) for p in inputs if not p.is_file()]
    if missing:
        print(
            f"mmx-plot: error: input not found: {', '.join(missing)}",
            file=sys.stderr,
        )
        return 2
    spec = FigureSpec(
        kind=args.kind,
        inputs=inputs,
        output=Path(args.out),
        epsilon=args.eps,
        xscale=args.xscale,
        yscale=args.yscale,
        title=args.title,
    )
    try:
        fig, info = build_figure(spec)
    except SchemaError as exc:
        print(f"mmx-plot: error: {exc}", file=sys.stderr)
        return 1
    save_figure(fig, spec.output)
    if args.kind == "slope" and info.get("annotated_slope") is not None:
        print(f"annotated_slope={info['annotated_slope']:.3f}")
    print(spec.output)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
