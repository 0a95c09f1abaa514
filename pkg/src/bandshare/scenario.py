"""Scenario files (``key = value`` lines) and sweep grids."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .exceptions import InvalidParameterError, ScenarioParseError
from .model import Scheme, SystemParams

PARAM_KEYS = tuple(f.name for f in dataclasses.fields(SystemParams))
SOLVERS = ("exact", "iterative")
SWEEP_VARIABLES = ("lambda_total", "rho", "theta_u")

# Default grids follow the axis ranges of the published sweeps.
DEFAULT_GRIDS = {
    "lambda_total": (0.0, 400.0, 20.0),
    "rho": (0.0, 1.0, 0.05),
    "theta_u": (0.0, 12.0, 1.0),
}

_INT_KEYS = {"max_iter", "seed", "reps"}
_FLOAT_KEYS = {"alpha", "horizon", "warmup"}


@dataclass(frozen=True)
class Scenario:
    params: SystemParams = field(default_factory=SystemParams)
    scheme: Scheme = Scheme.PROPOSED
    solver: str = "exact"
    alpha: float = 1e-6
    max_iter: int = 100_000
    seed: int = 42
    horizon: float = 1e5
    warmup: float | None = None
    reps: int = 10

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme.parse(self.scheme))
        if self.solver not in SOLVERS:
            raise InvalidParameterError("solver", f"expected one of {', '.join(SOLVERS)}, got {self.solver!r}")
        if not self.alpha > 0:
            raise InvalidParameterError("alpha", f"must be > 0, got {self.alpha}")
        if self.max_iter < 1:
            raise InvalidParameterError("max_iter", f"must be >= 1, got {self.max_iter}")
        if self.reps < 1:
            raise InvalidParameterError("reps", f"must be >= 1, got {self.reps}")
        if self.seed < 0:
            raise InvalidParameterError("seed", f"must be >= 0, got {self.seed}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


SCENARIO_KEYS = PARAM_KEYS + ("scheme", "solver") + tuple(sorted(_INT_KEYS | _FLOAT_KEYS))


def _number(key, raw, lineno):
    try:
        if key in _INT_KEYS:
            return int(raw)
        value = float(raw)
    except ValueError:
        raise ScenarioParseError(lineno, f"{key}: not a number: {raw!r}") from None
    return value


def parse_scenario(text: str) -> Scenario:
    """Parse scenario text. Syntax problems raise ScenarioParseError; bad values raise InvalidParameterError."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioParseError(lineno, f"expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in SCENARIO_KEYS:
            raise ScenarioParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ScenarioParseError(lineno, f"duplicate key {key!r}")
        if not raw:
            raise ScenarioParseError(lineno, f"{key}: missing value")
        if key in ("scheme", "solver"):
            values[key] = raw.lower()
        else:
            values[key] = _number(key, raw, lineno)
    params = SystemParams(**{k: values.pop(k) for k in PARAM_KEYS if k in values})
    return Scenario(params=params, **values)


def load_scenario(path=None) -> Scenario:
    """Read a scenario file; ``None`` loads the bundled default."""
    if path is None:
        text = resources.files("bandshare").joinpath("data/default.cfg").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return parse_scenario(text)


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    start: float
    stop: float
    step: float
    schemes: tuple = tuple(Scheme)

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise InvalidParameterError("var", f"expected one of {', '.join(SWEEP_VARIABLES)}, got {self.variable!r}")
        for name in ("start", "stop", "step"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidParameterError(name, "must be finite")
        if self.start > self.stop:
            raise InvalidParameterError("start", f"must not exceed stop ({self.start} > {self.stop})")
        if not self.step > 0:
            raise InvalidParameterError("step", f"must be > 0, got {self.step}")
        if self.variable == "rho" and not (0 <= self.start and self.stop <= 1):
            raise InvalidParameterError("rho", "sweep range must lie within [0, 1]")
        if self.variable != "rho" and self.start < 0:
            raise InvalidParameterError(self.variable, "sweep values must be >= 0")
        object.__setattr__(self, "schemes", tuple(Scheme.parse(s) for s in self.schemes))

    @classmethod
    def default(cls, variable, schemes=tuple(Scheme)):
        if variable not in DEFAULT_GRIDS:
            raise InvalidParameterError("var", f"expected one of {', '.join(SWEEP_VARIABLES)}, got {variable!r}")
        return cls(variable, *DEFAULT_GRIDS[variable], schemes=schemes)

    def values(self):
        count = int(math.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return [round(self.start + k * self.step, 12) for k in range(count)]
