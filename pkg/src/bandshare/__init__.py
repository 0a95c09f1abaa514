"""Blocking analysis of D2D, cellular and Wi-Fi traffic sharing licensed and unlicensed bands."""

from .exceptions import CapacityError, InvalidParameterError, ScenarioParseError, SingularSystemError
from .model import (
    Kind, Scheme, State, SystemParams, Transition, admission_limits, admit_cc,
    admit_d2d_licensed, admit_d2d_unlicensed, admit_wifi, default_params, transitions_out,
)
from .scenario import Scenario, SweepSpec, load_scenario, parse_scenario
from .sim import SimConfig, SimStats, occupancy_distribution, simulate
from .solver import (
    BlockingReport, StationaryDistribution, balance_residual, blocking_probabilities,
    solve_exact, solve_iterative,
)
from .statespace import StateSpace, contains, enumerate_states

__version__ = "0.1.0"
