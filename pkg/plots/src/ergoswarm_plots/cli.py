"""Plot CLI: regenerate figures from a results bundle.

    ergoswarm-plot entropy <DIR> -o fig.png [--strategies a,b] [--dump t.csv]
    ergoswarm-plot space-time <DIR> --trial T -o fig.png [--strategy NAME]

Exit codes: 0 success, 1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import PlotSpec, render


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit(self.prog + ": error: " + message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ergoswarm-plot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p_e = sub.add_parser("entropy", help="median/IQR entropy comparison figure")
    p_e.add_argument("bundle")
    p_e.add_argument("-o", "--out", required=True)
    p_e.add_argument("--strategies", help="comma-separated subset to overlay (default: all)")
    p_e.add_argument("--y-scale", default="linear")
    p_e.add_argument("--dump", help="also write the plotted arrays to this delimited file")

    p_s = sub.add_parser("space-time", help="per-region space/time average figure")
    p_s.add_argument("bundle")
    p_s.add_argument("-o", "--out", required=True)
    p_s.add_argument("--trial", type=int, default=0)
    p_s.add_argument("--strategy", default="annealed")
    p_s.add_argument("--y-scale", default="linear")
    p_s.add_argument("--dump", help="also write the plotted arrays to this delimited file")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        return 0 if exc.code in (0, None) else 1
    try:
        if args.verb == "entropy":
            strategies = tuple(s for s in (args.strategies or "").split(",") if s)
            spec = PlotSpec(
                bundle=Path(args.bundle),
                kind="entropy-comparison",
                out=Path(args.out),
                strategies=strategies,
                y_scale=args.y_scale,
                dump=Path(args.dump) if args.dump else None,
            )
        else:
            spec = PlotSpec(
                bundle=Path(args.bundle),
                kind="space-time-average",
                out=Path(args.out),
                strategies=(args.strategy,),
                trial=args.trial,
                y_scale=args.y_scale,
                dump=Path(args.dump) if args.dump else None,
            )
        path = render(spec)
        print(f"wrote {path}")
        return 0
    except (FileNotFoundError, ValueError) as exc:
        print(f"ergoswarm-plot: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"ergoswarm-plot: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
