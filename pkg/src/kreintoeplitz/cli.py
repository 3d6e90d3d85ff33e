"""Command-line front end: ``run``, ``catalog`` and ``verify``.

Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 configuration error,
3 numerical rejection (for instance a symbol with nonzero winding number).
"""

from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from . import io
from .catalog import list_catalog
from .config import ConfigError, load_config
from .errors import NumericalRejection

EXIT_OK, EXIT_VERDICT, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def shipped_config(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``shipped_config("s1_bo.cfg")``."""
    return Path(str(resources.files("kreintoeplitz") / "configs" / name))


def _resolve_config(arg: str) -> Path:
    p = Path(arg)
    if not p.exists() and not p.is_absolute() and (shipped := shipped_config(arg)).exists():
        return shipped
    return p


def cmd_run(args) -> int:
    from .experiment import run_experiment
    try:
        cfg = load_config(_resolve_config(args.config))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    stem = Path(args.config).stem
    out = Path(args.out or cfg.output_dir or Path(io.default_output_dir()) / stem)
    try:
        report = run_experiment(cfg, out, args.jobs)
    except NumericalRejection as exc:
        print(f"numerical rejection: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for name, ok in report.verdicts.items():
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    print(f"outputs in {out}")
    return EXIT_OK if report.passed else EXIT_VERDICT


def cmd_catalog(args) -> int:
    print(list_catalog())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verify_suite
    return verify_suite(args.level, args.out, args.golden, args.jobs)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kreintoeplitz", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run the experiment described by a config file")
    r.add_argument("config_pos", nargs="?", metavar="CONFIG")
    r.add_argument("--config", help="config path, or the name of a shipped config")
    r.add_argument("--out", help="output directory (default: $KREINTOEPLITZ_OUT/<config name>)")
    r.add_argument("--jobs", type=int, default=1, help="worker threads for per-order work")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("catalog", help="list the built-in test symbols")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify", help="run the self-check suite")
    v.add_argument("--level", choices=("quick", "full"), default="quick")
    v.add_argument("--out", help="output directory (default: $KREINTOEPLITZ_OUT)")
    v.add_argument("--golden", help="golden values JSON (default: the packaged file)")
    v.add_argument("--jobs", type=int, default=2, help="workers for the second determinism run")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "run":
        args.config = args.config or args.config_pos
        if not args.config:
            print("run needs a config (--config PATH)", file=sys.stderr)
            return EXIT_CONFIG
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
