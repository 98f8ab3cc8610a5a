"""Command-line batch runner.

Subcommands:

* ``run <config>``       execute the configured checks, write the bundle
* ``presets``            list the preset catalogue
* ``run --preset NAME``  run a preset (optionally overriding output dir)
* ``validate <config>``  parse + validate only
* ``norm <snapshot.csv> --space s,q,r --dim d``  norm of a field snapshot

Exit codes: 0 all checks consistent, 2 some verdict not consistent,
3 a solve diverged, 4 configuration error.  The environment variable
HHLAB_OUTPUT_DIR overrides the configured output directory.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .exponents import SpaceIndex
from .fields import RadialField
from .lorentz import lorentz_quasi_norm
from .presets import list_presets, preset_config, preset_text
from .reporting import EXIT_CONFIG, write_bundle
from .runner import run_checks


def _parse_space(text: str) -> SpaceIndex:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (2, 3):
        raise ValueError("space must be s,q or s,q,r")

    def num(v):
        if v.lower() in ("inf", "infinity"):
            return math.inf
        if "/" in v:
            a, b = v.split("/")
            return float(a) / float(b)
        return float(v)

    s, q = num(parts[0]), num(parts[1])
    r = num(parts[2]) if len(parts) == 3 else math.inf
    return SpaceIndex(s, q, r)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="hhlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment config or preset")
    p_run.add_argument("config", nargs="?", help="path to a flat config file")
    p_run.add_argument("--preset", help="run a named preset instead of a file")
    p_run.add_argument("--output-dir", help="override the configured output directory")
    p_run.add_argument("--no-figures", action="store_true", help="skip figure rendering")

    sub.add_parser("presets", help="list preset names")

    p_show = sub.add_parser("show-preset", help="print a preset's config text")
    p_show.add_argument("name")

    p_val = sub.add_parser("validate", help="parse and validate a config")
    p_val.add_argument("config")

    p_norm = sub.add_parser("norm", help="weighted Lorentz norm of a snapshot CSV")
    p_norm.add_argument("snapshot")
    p_norm.add_argument("--space", required=True, help="s,q,r (r optional; inf allowed)")
    p_norm.add_argument("--dim", type=int, default=3)
    p_norm.add_argument("--json", action="store_true", help="emit a JSON norm record")

    args = parser.parse_args(argv)

    if args.command == "presets":
        for name in list_presets():
            print(name)
        return 0

    if args.command == "show-preset":
        try:
            print(preset_text(args.name).strip())
        except KeyError as exc:
            print(exc, file=sys.stderr)
            return EXIT_CONFIG
        return 0

    if args.command == "validate":
        try:
            cfg = load_config(args.config)
        except (ConfigError, OSError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"ok: {len(cfg.checks)} check(s): {', '.join(cfg.checks) or '(none)'}")
        return 0

    if args.command == "norm":
        try:
            field = RadialField.read_csv(Path(args.snapshot).read_text(), dim=args.dim)
            idx = _parse_space(args.space)
        except (ValueError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        value = lorentz_quasi_norm(field, idx)
        if args.json:
            import json

            from .reporting import norm_record

            print(json.dumps(norm_record(idx, value)))
        else:
            print(f"{idx.label()} = {value!r}")
        return 0

    # run
    try:
        if args.preset:
            cfg = preset_config(args.preset)
        elif args.config:
            cfg = load_config(args.config)
        else:
            print("run: need a config path or --preset", file=sys.stderr)
            return EXIT_CONFIG
    except (ConfigError, KeyError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    outdir = args.output_dir or os.environ.get("HHLAB_OUTPUT_DIR") or cfg.output_dir
    results = run_checks(cfg)
    bundle = write_bundle(cfg, results, directory=outdir, render=not args.no_figures)
    for res in results:
        print(f"{res.name}: {res.verdict}")
    print(f"bundle: {bundle.directory} ({len(bundle.files)} files)")
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
