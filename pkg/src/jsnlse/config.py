"""Flat ``key = value`` run configuration.

One assignment per line; ``#`` starts a comment.  Every scenario has a
fixed key set with defaults.  In strict mode an unknown key is an error,
otherwise it is skipped with a warning.  Errors carry the 1-based line
number of the offending assignment.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any, Callable

from .errors import ConfigError, ConfigTypeError, MissingKey, UnknownKey
from .evolution import NONLINEARITIES, SCHEMES, EvolutionConfig
from .grid import DEFAULT_FLOOR, Grid, centered_grid
from .potential import ModelParams, PotentialSpec

SCENARIOS = ("evolve", "measures", "potential", "verify", "separability", "sweep")
REQUIRED = object()
SWEEP_PARAMETERS = ("l", "dt", "n", "delta", "pi")
SWEEP_METRICS = ("linear_deviation", "energy_drift", "norm_drift", "scheme_difference",
                 "expansion_residual", "small_shift_error")
DEFAULT_METRIC = {"l": "linear_deviation", "dt": "energy_drift", "n": "expansion_residual",
                  "delta": "small_shift_error", "pi": "small_shift_error"}


def _to_int(text: str) -> int:
    return int(text)


def _to_float(text: str) -> float:
    return float(text)


def _to_opt_float(text: str) -> float | None:
    return None if text.lower() == "none" else float(text)


def _to_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _to_str(text: str) -> str:
    if not text:
        raise ValueError("empty string")
    return text


def _to_opt_str(text: str) -> str | None:
    return None if text.lower() == "none" else _to_str(text)


def _to_float_list(text: str) -> list[float]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise ValueError("empty list")
    return [float(t) for t in items]


def _fmt_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


@dataclass(frozen=True)
class Key:
    convert: Callable[[str], Any]
    default: Any
    choices: tuple | None = None
    check: Callable[[Any], bool] | None = None
    check_msg: str = ""


def _positive(v):
    return v > 0


_GRID = {"grid.n": Key(_to_int, 256, check=lambda n: n >= 8 and n % 2 == 0,
                       check_msg="must be an even integer >= 8"),
         "grid.length": Key(_to_float, 25.6, check=_positive, check_msg="must be positive")}
_PHYS = {"hbar": Key(_to_float, 1.0, check=_positive, check_msg="must be positive"),
         "mass": Key(_to_float, 1.0, check=_positive, check_msg="must be positive"),
         "l": Key(_to_float, 0.2, check=_positive, check_msg="must be positive"),
         "pi": Key(_to_float, 0.5, check=lambda p: 0 < p < 1, check_msg="must lie in (0, 1)"),
         "zeta_override": Key(_to_opt_float, None),
         "floor": Key(_to_float, DEFAULT_FLOOR, check=_positive, check_msg="must be positive")}
_OUT = {"out.dir": Key(_to_str, "out")}
_RUN = {"potential.kind": Key(_to_str, "harmonic", choices=("zero", "harmonic")),
        "potential.k": Key(_to_float, 1.0),
        "dt": Key(_to_float, 1e-3, check=_positive, check_msg="must be positive"),
        "steps": Key(_to_int, 1000, check=lambda n: n >= 0, check_msg="must be >= 0"),
        "scheme": Key(_to_str, "strang", choices=SCHEMES),
        "nonlinearity": Key(_to_str, "js", choices=NONLINEARITIES),
        "record_every": Key(_to_int, 100, check=lambda n: n >= 1, check_msg="must be >= 1"),
        "dealias": Key(_to_bool, True),
        "initial.kind": Key(_to_str, "gaussian", choices=("gaussian", "periodic_gaussian", "random")),
        "initial.sigma": Key(_to_float, 1.0, check=_positive, check_msg="must be positive"),
        "initial.x0": Key(_to_float, 0.0),
        "initial.k0": Key(_to_float, 0.0)}
_INPUT = {"input.normalize": Key(_to_bool, True)}

SCHEMA: dict[str, dict[str, Key]] = {
    "evolve": {**_GRID, **_PHYS, **_RUN, **_OUT},
    "measures": {**_GRID, "pi": _PHYS["pi"], "floor": _PHYS["floor"], **_INPUT,
                 "input.rho0": Key(_to_str, REQUIRED), "input.rho1": Key(_to_str, REQUIRED),
                 "fisher_path.n_theta": Key(_to_int, 128, check=lambda n: n >= 16,
                                            check_msg="must be >= 16"), **_OUT},
    "potential": {**_GRID, **_PHYS, **_INPUT, "input.rho": Key(_to_str, REQUIRED), **_OUT},
    "verify": {"verify.states": Key(_to_int, 5, check=_positive, check_msg="must be positive"),
               **_OUT},
    "separability": {
        "grid.n": Key(_to_int, 128, check=lambda n: n >= 8 and n % 2 == 0,
                      check_msg="must be an even integer >= 8"),
        "grid.length": Key(_to_float, 24.0, check=_positive, check_msg="must be positive"),
        "hbar": _PHYS["hbar"], "mass": _PHYS["mass"],
        "l": Key(_to_float, 0.375, check=_positive, check_msg="must be positive"),
        "floor": _PHYS["floor"],
        "initial.kind": Key(_to_str, "product", choices=("product", "entangled")),
        "initial.sigma": Key(_to_float, 0.7, check=_positive, check_msg="must be positive"),
        "initial.x0": Key(_to_float, 1.5), "initial.x2": Key(_to_float, 6.0),
        "initial.k0": Key(_to_float, 0.0),
        "potential.k": Key(_to_float, 1.0), "potential.k2": Key(_to_float, 1.0),
        "coupling": Key(_to_float, 0.0),
        "dt": _RUN["dt"], "steps": Key(_to_int, 500, check=lambda n: n >= 0, check_msg="must be >= 0"),
        "record_every": Key(_to_int, 50, check=lambda n: n >= 1, check_msg="must be >= 1"),
        "nonlinearity": Key(_to_str, "js", choices=("js", "none")),
        "tolerance": Key(_to_float, 1e-10, check=_positive, check_msg="must be positive"),
        **_OUT},
    "sweep": {**_GRID, **_PHYS, **_RUN, **_OUT,
              "sweep.parameter": Key(_to_str, REQUIRED, choices=SWEEP_PARAMETERS),
              "sweep.values": Key(_to_float_list, REQUIRED),
              "sweep.metric": Key(_to_opt_str, None, choices=SWEEP_METRICS + (None,)),
              "delta": Key(_to_float, 0.1, check=_positive, check_msg="must be positive"),
              "measure": Key(_to_str, "js", choices=("js", "pi_js"))},
}


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration: every key of the scenario with its value."""

    scenario: str
    values: dict[str, Any]
    output_dir: str
    seed: int = 0
    lines: dict[str, int] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    def with_values(self, **changes) -> "RunConfig":
        vals = dict(self.values)
        vals.update(changes)
        return RunConfig(self.scenario, vals, self.output_dir, self.seed, self.lines)

    def grid(self) -> Grid:
        return centered_grid(self["grid.length"], self["grid.n"])

    @property
    def shift_steps(self) -> int:
        """Lattice steps in ``l`` on the configured grid."""
        return self.grid().shift_steps(self["l"])

    def model_params(self) -> ModelParams:
        return ModelParams(hbar=self["hbar"], mass=self["mass"], length_scale_l=self["l"],
                           zeta=self.get("zeta_override"), pi_weight=self.get("pi", 0.5),
                           floor=self.get("floor", DEFAULT_FLOOR))

    def potential_spec(self) -> PotentialSpec:
        return PotentialSpec(self["potential.kind"], k=self["potential.k"])

    def evolution_config(self) -> EvolutionConfig:
        return EvolutionConfig(self.model_params(), self.potential_spec(), dt=self["dt"],
                               n_steps=self["steps"], scheme=self["scheme"],
                               record_every=self["record_every"],
                               nonlinearity=self["nonlinearity"], dealias=self["dealias"])

    def manifest_text(self) -> str:
        """Fully resolved configuration, one ``key = value`` per line, keys sorted."""
        rows = [f"scenario = {self.scenario}", f"seed = {self.seed}",
                f"output_dir = {self.output_dir}"]
        rows += [f"{k} = {_fmt_value(v)}" for k, v in sorted(self.values.items())]
        return "\n".join(rows) + "\n"


def _split(text: str):
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", number)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("missing key before '='", number)
        yield number, key, value


def parse_config(text: str, scenario: str, strict: bool = True, seed: int = 0,
                 output_dir: str | None = None) -> RunConfig:
    """Parse ``text`` for ``scenario`` and apply defaults.

    ``output_dir`` overrides ``out.dir``.  Raises :class:`UnknownKey`,
    :class:`MissingKey` or :class:`ConfigTypeError`; each names the line.
    """
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}")
    schema = SCHEMA[scenario]
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for number, key, raw in _split(text):
        if key not in schema:
            if strict:
                raise UnknownKey(f"unknown key {key!r} for scenario {scenario!r}", number)
            warnings.warn(f"line {number}: ignoring unknown key {key!r}", stacklevel=2)
            continue
        if key in lines:
            raise ConfigError(f"key {key!r} already set on line {lines[key]}", number)
        spec = schema[key]
        try:
            value = spec.convert(raw)
        except ValueError as exc:
            raise ConfigTypeError(f"{key}: cannot read {raw!r} ({exc})", number) from None
        if spec.choices is not None and value not in spec.choices:
            allowed = ", ".join(str(c) for c in spec.choices if c is not None)
            raise ConfigTypeError(f"{key}: {raw!r} is not one of {allowed}", number)
        if spec.check is not None and value is not None and not spec.check(value):
            raise ConfigTypeError(f"{key} = {raw} is out of range: {spec.check_msg}", number)
        values[key] = value
        lines[key] = number
    for key, spec in schema.items():
        if key not in values:
            if spec.default is REQUIRED:
                raise MissingKey(f"required key {key!r} is missing for scenario {scenario!r}")
            values[key] = spec.default
    out = output_dir if output_dir is not None else values.get("out.dir", "out")
    values["out.dir"] = out
    cfg = RunConfig(scenario, values, out, seed, lines)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    """Commensurability of l with the configured grid.

    Skipped for ``potential``, whose grid comes from the input file, and for
    sweeps over l or n, where each row is checked when it runs.
    """
    if cfg.scenario not in ("evolve", "sweep", "separability"):
        return
    if cfg.scenario == "sweep" and cfg["sweep.parameter"] in ("l", "n"):
        return
    try:
        steps = cfg.shift_steps
    except ValueError as exc:
        raise ConfigTypeError(f"l: {exc}", cfg.lines.get("l")) from None
    if steps < 1:
        raise ConfigTypeError("l must be at least one grid step", cfg.lines.get("l"))
