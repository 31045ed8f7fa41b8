"""``sim`` command line: run JSON configs or the built-in figure presets."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .bath import ANGLE_CONVENTIONS
from .config import ConfigError, parse_config
from .presets import DESCRIPTIONS, get_preset, preset_names
from .runner import run_config, with_overrides

log = logging.getLogger("hubsim")


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--shots", type=int, help="measurements per step (overrides config)")
    p.add_argument("--seed", type=int, help="random seed (overrides config)")
    p.add_argument("--exact", action="store_true", help="exact probabilities only, no sampling")
    p.add_argument("--raw-inverse", action="store_true", default=None,
                   help="undo readout error by plain matrix inversion (may go negative)")
    p.add_argument("--angle-convention", choices=ANGLE_CONVENTIONS,
                   help="collision angle convention (default: circuit)")
    p.add_argument("--output-dir", help="output directory (default: $SIM_OUTPUT_DIR or config)")
    p.add_argument("--parallel", action="store_true", help="run independent configs concurrently")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one or more JSON config files")
    run.add_argument("configs", nargs="+", type=Path)
    _add_run_flags(run)

    pre = sub.add_parser("preset", help="run named presets ('all' for every preset)")
    pre.add_argument("names", nargs="+")
    _add_run_flags(pre)

    sub.add_parser("list-presets", help="show available presets")
    return parser


def _job(args):
    config, out_dir, stem = args
    return run_config(config, out_dir, stem)["files"]


def _execute(jobs, parallel: bool):
    if parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as pool:
            return list(pool.map(_job, jobs))
    return [_job(j) for j in jobs]


def _overrides(args):
    return dict(shots=args.shots, seed=args.seed, exact=args.exact, raw_inverse=args.raw_inverse,
                angle_convention=args.angle_convention)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "list-presets":
        for name in preset_names():
            print(f"{name:18s} {DESCRIPTIONS[name]}")
        return 0

    jobs = []
    try:
        if args.command == "run":
            for path in args.configs:
                config = with_overrides(parse_config(path.read_text(encoding="utf-8")), **_overrides(args))
                jobs.append((config, args.output_dir, config.name or path.stem))
        else:
            names = preset_names() if args.names == ["all"] else args.names
            for name in names:
                jobs.append((with_overrides(get_preset(name), **_overrides(args)), args.output_dir, name))
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else exc
        print(f"sim: error: {msg}", file=sys.stderr)
        return 2

    for (_, _, stem), files in zip(jobs, _execute(jobs, args.parallel)):
        print(f"{stem}: " + ", ".join(files.values()))
    return 0


if __name__ == "__main__":
    sys.exit(main())
