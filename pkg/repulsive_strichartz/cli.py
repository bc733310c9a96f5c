import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from repulsive_strichartz.config_parser.run_config import COMMAND_PARAMETERS, TYPE_DESCRIPTIONS, parse_config
from repulsive_strichartz.errors import ConfigError, ToolkitError
from repulsive_strichartz.runner import run

logger = logging.getLogger("repulsive_strichartz")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="key = value configuration file")
    common.add_argument("--output", default=argparse.SUPPRESS, help="artifact directory (default: output)")
    common.add_argument("--jobs", default=argparse.SUPPRESS, help="worker threads for resolvent scans")
    common.add_argument("--seed", default=argparse.SUPPRESS, help="power-iteration seed")
    common.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help="debug logging")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="repulsive-strichartz",
        description="Dispersive, Strichartz and resolvent checks for -Δ - τ²x² + V.",
        parents=[common],
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND")
    for command, parameters in COMMAND_PARAMETERS.items():
        sub = commands.add_parser(command, parents=[common], help=f"run the {command} scan")
        for p in parameters:
            sub.add_argument(
                f"--{p.name}",
                dest=f"param:{p.name}",
                default=argparse.SUPPRESS,
                metavar=p.type.upper(),
                help=f"{p.help} [{TYPE_DESCRIPTIONS[p.type]}; default {p.default}]",
            )
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values: dict[str, Any] = {}
    for key, value in vars(args).items():
        if key.startswith("param:"):
            values[key.removeprefix("param:")] = value
        elif key in ("command", "output", "jobs", "seed") and value is not None:
            values[key] = value
    return values


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Entry point. Exit status 0 on success, 2 for invalid configuration or
    usage, 3 when a scan fails its numerical preconditions.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if getattr(args, "verbose", False) else logging.INFO,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        text = ""
        config_path = getattr(args, "config", None)
        if config_path is not None:
            try:
                text = config_path.read_text(encoding="utf-8")
            except OSError as e:
                raise ConfigError(f"Cannot read configuration file {config_path}: {e}") from e
        config = parse_config(text, _overrides(args))
        run(config)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2
    except ToolkitError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
