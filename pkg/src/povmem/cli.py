"""Command-line entry point.

Verbs mirror the experiment drivers::

    povmem fig2|fig3|fig4|radius-sweep|hologram|validate-pov \
        [--config FILE] [--out DIR] [--seed N]

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__, experiments
from .config import default_config, load_config
from .errors import ConfigError, PovmemError

_COMMANDS = {
    "fig2": experiments.run_fig2,
    "fig3": experiments.run_fig3,
    "fig4": experiments.run_fig4,
    "radius-sweep": experiments.run_radius_sweep,
    "hologram": experiments.run_hologram,
    "validate-pov": experiments.run_validate_pov,
}

_HELP = {
    "fig2": "interference scans for the configured states",
    "fig3": "tomography, density matrices and fidelities per state",
    "fig4": "estimated-fidelity grid over all (L1, L2) pairs",
    "radius-sweep": "ring radius and storage efficiency vs topological charge",
    "hologram": "export the phase mask for the configured target mode",
    "validate-pov": "residual of the analytic ring vs the numeric transform",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="povmem",
        description="Desk-scale simulator for storing perfect Poincare beams "
                    "in a mode-independent atomic memory.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name, help=_HELP[name])
        cmd.add_argument("--config", metavar="FILE", default=None,
                         help="TOML or JSON configuration (defaults used if omitted)")
        cmd.add_argument("--out", metavar="DIR", default=None,
                         help="output directory (default: ./povmem_out/<verb>)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="override the configured random seed")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else default_config()
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be nonnegative")
            cfg = dataclasses.replace(cfg, seed=args.seed)
    except ConfigError as exc:
        print(f"povmem: config error: {exc}", file=sys.stderr)
        return 2
    out_dir = args.out if args.out else f"povmem_out/{args.command}"
    try:
        _COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        print(f"povmem: config error: {exc}", file=sys.stderr)
        return 2
    except (PovmemError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"povmem: numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"povmem: {exc}", file=sys.stderr)
        return 3
    print(f"povmem {args.command}: outputs written to {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
