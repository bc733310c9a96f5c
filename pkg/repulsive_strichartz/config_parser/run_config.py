"""
Run configuration: the line-oriented ``key = value`` format, the parameter
table of every command and the pydantic models built from it.
"""

import logging
import re
from pathlib import Path
from typing import Annotated, Any, Literal, NamedTuple, Optional, Type

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, PlainSerializer, ValidationError, create_model

from repulsive_strichartz.core.exponents import as_extended_real, format_exponent
from repulsive_strichartz.errors import ConfigError

logger = logging.getLogger(__name__)


def _split_floats(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def _int_text(value: Any) -> Any:
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            return value
    return value


Exponent = Annotated[Any, BeforeValidator(as_extended_real), PlainSerializer(format_exponent, return_type=str)]
FloatList = Annotated[list[float], BeforeValidator(_split_floats)]
Sign = Annotated[Literal[1, -1], BeforeValidator(_int_text)]

TYPE_MAPPING: dict[str, Any] = {
    "int": int,
    "float": float,
    "str": str,
    "bool": bool,
    "exponent": Exponent,
    "floats": FloatList,
    "method": Literal["exact", "split"],
    "potential_kind": Literal["zero", "power_decay"],
    "weight_kind": Literal["x_weight", "potential_weight"],
    "sign": Sign,
}

TYPE_DESCRIPTIONS = {
    "int": "integer",
    "float": "real number",
    "str": "string",
    "bool": "boolean",
    "exponent": "exponent (integer, fraction such as 2/3, or inf)",
    "floats": "comma-separated list of real numbers",
    "method": "one of exact, split",
    "potential_kind": "one of zero, power_decay",
    "weight_kind": "one of x_weight, potential_weight",
    "sign": "one of 1, -1",
}


class Parameter(NamedTuple):
    name: str
    type: str
    default: Any
    help: str


_GRID_1D = [
    Parameter("L", "float", 16.0, "half-width of the box [-L, L)"),
    Parameter("N", "int", 1024, "grid points per axis (power of two)"),
    Parameter("tau", "float", 1.0, "coupling of the repulsive term -tau^2 x^2"),
]
_POTENTIAL = [
    Parameter("potential", "potential_kind", "power_decay", "perturbation V"),
    Parameter("amplitude", "float", 1.0, "c in V(x) = c <x>^-decay"),
    Parameter("decay", "float", 1.0, "decay exponent of V"),
]
_GAUSSIAN = [
    Parameter("width", "float", 1.0, "Gaussian width a in exp(-a|x - c|^2/2)"),
    Parameter("center", "float", 0.0, "Gaussian center (every axis)"),
    Parameter("momentum", "float", 0.0, "Gaussian momentum (every axis)"),
]


def _with(parameters: list[Parameter], **defaults: Any) -> list[Parameter]:
    return [p._replace(default=defaults[p.name]) if p.name in defaults else p for p in parameters]


COMMAND_PARAMETERS: dict[str, list[Parameter]] = {
    "propagate": [
        Parameter("n", "int", 1, "space dimension (1 or 2)"),
        *_GRID_1D,
        Parameter("sigma", "float", 0.5, "propagation time"),
        *_GAUSSIAN,
        Parameter("max_norm_loss", "float", 1e-9, "largest relative l2 norm allowed to leave the box"),
    ],
    "decay-fit": [
        Parameter("n", "int", 1, "space dimension (1 or 2)"),
        *_with(_GRID_1D, L=8.0, N=128),
        *_GAUSSIAN,
        Parameter("t_min", "float", 3.0, "first fitted time"),
        Parameter("t_max", "float", 8.0, "last fitted time"),
        Parameter("t_step", "float", 0.5, "time spacing"),
    ],
    "strichartz": [
        Parameter("method", "method", "exact", "exact Mehler samples (V = 0) or split-step evolution"),
        Parameter("n", "int", 1, "space dimension (1 or 2)"),
        *_with(_GRID_1D, L=8.0, N=256),
        *_with(_POTENTIAL, potential="zero"),
        *_GAUSSIAN,
        Parameter("q", "exponent", "2", "time exponent"),
        Parameter("r", "exponent", "inf", "space exponent"),
        Parameter("t_max", "float", 12.0, "end of the time window"),
        Parameter("t_step", "float", 0.25, "sample spacing of the exact method"),
        Parameter("dt", "float", 2.0**-10, "split-step time step"),
        Parameter("record_every", "int", 8, "split-step steps between samples"),
        Parameter(
            "max_norm_loss", "float", 1e-9, "largest relative l2 norm allowed to leave the box (exact method, finite r)"
        ),
    ],
    "region": [
        Parameter("n", "int", 3, "space dimension"),
        Parameter("resolution", "int", 64, "lattice intervals per axis on [0, 1/2]"),
    ],
    "resolvent-scan": [
        *_GRID_1D,
        *_POTENTIAL,
        Parameter("lambda_min", "float", -20.0, "lowest energy"),
        Parameter("lambda_max", "float", 20.0, "highest energy"),
        Parameter("lambda_count", "int", 81, "number of energies"),
        Parameter("nu", "float", 1.0, "absorption parameter"),
        Parameter("nu0", "float", 1.0, "largest admissible nu"),
        Parameter("weight_kind", "weight_kind", "potential_weight", "weight family"),
        Parameter("weight_exponent", "float", 0.5, "exponent of the weight"),
        Parameter("min_certificate", "float", 0.5, "smallest accepted nu / level spacing"),
    ],
    "high-energy": [
        *_with(_GRID_1D, L=32.0, N=8192),
        Parameter("thetas", "floats", "0.5,1,2", "weight exponents theta in [0, 2]"),
        Parameter("lambdas", "floats", "50,100,200,400,800", "increasing positive energies"),
        Parameter("nu", "float", 2.0, "absorption parameter"),
        Parameter("nu0", "float", 2.0, "largest admissible nu"),
        Parameter("min_certificate", "float", 0.5, "smallest accepted nu / level spacing"),
    ],
    "smoothing": [
        *_with(_GRID_1D, L=24.0, N=1024),
        *_POTENTIAL,
        *_GAUSSIAN,
        Parameter("dt", "float", 2.0**-10, "time step"),
        Parameter("steps", "int", 1024, "steps per time direction"),
        Parameter("record_every", "int", 4, "steps between quadrature samples"),
    ],
    "duhamel": [
        *_with(_GRID_1D, L=12.0, N=32768),
        *_POTENTIAL,
        *_GAUSSIAN,
        Parameter("dt", "float", 2.0**-11, "time step"),
        Parameter("steps", "int", 1024, "number of steps"),
        Parameter("quad_points", "int", 128, "trapezoid intervals in s"),
    ],
    "weighted-decay": [
        *_GRID_1D,
        *_GAUSSIAN,
        Parameter("rho", "float", 1.0, "weight exponent rho"),
        Parameter("Q", "float", 2.0, "envelope exponent Q"),
        Parameter("sigma_min", "float", 0.5, "first time"),
        Parameter("sigma_max", "float", 12.0, "last time"),
        Parameter("sigma_step", "float", 0.25, "time spacing"),
        Parameter("fit_min", "float", 2.0, "start of the slope fit window"),
        Parameter("fit_max", "float", 6.0, "end of the slope fit window"),
    ],
    "birman-schwinger": [
        *_with(_GRID_1D, N=512),
        *_with(_POTENTIAL, amplitude=0.3),
        Parameter("lambda", "float", 100.0, "energy"),
        Parameter("nu", "float", 0.5, "absorption parameter"),
        Parameter("sign", "sign", 1, "side of the real axis, 1 or -1"),
    ],
    "kappa-envelope": [
        Parameter("n", "int", 1, "space dimension"),
        Parameter("tau", "float", 1.0, "coupling"),
        Parameter("kappa", "exponent", "1/2", "polynomial decay exponent"),
        Parameter("t_min", "float", 1e-6, "smallest time"),
        Parameter("t_max", "float", 100.0, "largest time"),
        Parameter("count", "int", 400, "log-spaced sample count"),
    ],
    "retarded": [
        Parameter("n", "int", 1, "space dimension (1 or 2)"),
        *_with(_GRID_1D, N=2048),
        *_GAUSSIAN,
        Parameter("q", "exponent", "2", "time exponent of the response"),
        Parameter("r", "exponent", "inf", "space exponent of the response"),
        Parameter("q_source", "exponent", "inf", "time exponent whose conjugate measures the forcing"),
        Parameter("r_source", "exponent", "2", "space exponent whose conjugate measures the forcing"),
        Parameter("support", "float", 1.0, "forcing sin(pi s / support) f for s <= support, zero after"),
        Parameter("t_max", "float", 2.0, "end of the time window"),
        Parameter("dt", "float", 0.125, "trapezoid step in s"),
        Parameter(
            "max_norm_loss", "float", 1e-9, "largest relative l2 norm allowed to leave the box (finite r)"
        ),
    ],
}

COMMANDS = tuple(COMMAND_PARAMETERS)
RESERVED_KEYS = ("command", "output", "seed", "jobs")

_LINE = re.compile(r"^\s*([A-Za-z_][A-Za-z0-9_-]*)\s*=\s*(.*?)\s*$")


def _shared_types() -> dict[str, str]:
    """Keys declared with one type by every command that uses them."""
    seen: dict[str, set[str]] = {}
    for parameters in COMMAND_PARAMETERS.values():
        for p in parameters:
            seen.setdefault(p.name, set()).add(p.type)
    return {name: next(iter(types)) for name, types in seen.items() if len(types) == 1}


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    command: Literal[COMMANDS]  # type: ignore[valid-type]
    parameters: BaseModel
    output_dir: Path = Path("output")
    seed: int = 0
    jobs: int = Field(default=1, ge=1)

    def resolved(self) -> dict[str, Any]:
        """Every value that influences the run, defaults included."""
        return {
            "command": self.command,
            "parameters": self.parameters.model_dump(mode="json", by_alias=True),
            "seed": self.seed,
            "jobs": self.jobs,
        }


class RunConfigParser:
    """
    Builds validated RunConfig objects from ``key = value`` text.

    Per-command parameter models are generated from COMMAND_PARAMETERS with
    ``create_model``; unknown keys are rejected.
    """

    def __init__(self) -> None:
        self.type_mapping = dict(TYPE_MAPPING)
        self.shared_types = _shared_types()
        self._models: dict[str, Type[BaseModel]] = {}

    def resolve_field_type(self, type_name: str) -> Any:
        if type_name not in self.type_mapping:
            raise ConfigError(f"Unsupported parameter type: {type_name}")
        return self.type_mapping[type_name]

    def parameter_model(self, command: str) -> Type[BaseModel]:
        if command not in COMMAND_PARAMETERS:
            raise ConfigError(f"Unknown command '{command}'; expected one of {', '.join(COMMANDS)}", key="command")
        if command not in self._models:
            fields: dict[str, Any] = {}
            for p in COMMAND_PARAMETERS[command]:
                # fields are addressed by alias; "lambda" needs a different attribute name
                field_name = p.name + "_" if p.name == "lambda" else p.name
                fields[field_name] = (
                    self.resolve_field_type(p.type),
                    Field(default=p.default, alias=p.name, description=p.help, validate_default=True),
                )
            self._models[command] = create_model(
                f"{command.title().replace('-', '')}Parameters",
                __config__=ConfigDict(extra="forbid", frozen=True, populate_by_name=False),
                **fields,
            )
        return self._models[command]

    def parse_lines(self, text: str) -> dict[str, str]:
        """Raw key/value pairs; later keys override earlier ones."""
        values: dict[str, str] = {}
        for number, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0]
            if not line.strip():
                continue
            match = _LINE.match(line)
            if match is None:
                raise ConfigError(f"Line {number}: expected 'key = value', got {raw.strip()!r}", line=number)
            key, value = match.groups()
            if key in self.shared_types:
                self._check_type(key, self.shared_types[key], value)
            values[key] = value
        return values

    def _check_type(self, key: str, type_name: str, value: str) -> None:
        checker = create_model("ValueCheck", value=(self.resolve_field_type(type_name), ...))
        try:
            checker(value=value)
        except ValidationError as e:
            raise ConfigError(
                f"Invalid value {value!r} for '{key}': expected {TYPE_DESCRIPTIONS[type_name]}", key=key
            ) from e

    def build(self, values: dict[str, Any]) -> RunConfig:
        values = dict(values)
        command = values.pop("command", None)
        if command is None:
            raise ConfigError("Missing 'command'", key="command")
        model = self.parameter_model(str(command))
        reserved = {k: values.pop(k) for k in RESERVED_KEYS if k in values}

        declared = {p.name: p.type for p in COMMAND_PARAMETERS[str(command)]}
        for key in values:
            if key not in declared:
                raise ConfigError(f"Unknown key '{key}' for command '{command}'", key=key)
        try:
            parameters = model.model_validate(values)
        except ValidationError as e:
            key = str(e.errors()[0]["loc"][0])
            expected = TYPE_DESCRIPTIONS.get(declared.get(key, ""), "a valid value")
            raise ConfigError(f"Invalid value for '{key}': expected {expected}", key=key) from e

        try:
            config = RunConfig(
                command=command,
                parameters=parameters,
                output_dir=Path(reserved.get("output", "output")),
                seed=reserved.get("seed", 0),
                jobs=reserved.get("jobs", 1),
            )
        except ValidationError as e:
            key = str(e.errors()[0]["loc"][0])
            raise ConfigError(f"Invalid value for '{key}': {e.errors()[0]['msg']}", key=key) from e
        logger.debug(f"Resolved configuration: {config.resolved()}")
        return config


def parse_config(text: str, overrides: Optional[dict[str, Any]] = None) -> RunConfig:
    """
    Parse ``key = value`` text; ``#`` starts a comment. Entries of
    ``overrides`` (command-line flags) win over the text.

    Raises:
        ConfigError: syntax error (with line number), unknown key, bad type
            or missing command.
    """
    parser = RunConfigParser()
    values: dict[str, Any] = parser.parse_lines(text)
    values.update(overrides or {})
    return parser.build(values)


def config_from_manifest(manifest: dict[str, Any], output_dir: Path) -> RunConfig:
    """Rebuild the RunConfig recorded in a manifest."""
    values: dict[str, Any] = {
        "command": manifest["command"],
        "seed": manifest["seed"],
        "jobs": manifest["jobs"],
        "output": str(output_dir),
    }
    for key, value in manifest["parameters"].items():
        values[key] = ",".join(repr(v) for v in value) if isinstance(value, list) else value
    return RunConfigParser().build(values)
