"""Run configuration parsing."""

from repulsive_strichartz.config_parser.run_config import (
    COMMAND_PARAMETERS,
    COMMANDS,
    RunConfig,
    RunConfigParser,
    config_from_manifest,
    parse_config,
)

__all__ = [
    "COMMAND_PARAMETERS",
    "COMMANDS",
    "RunConfig",
    "RunConfigParser",
    "config_from_manifest",
    "parse_config",
]
