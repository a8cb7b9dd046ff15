"""Transition rates and population dynamics of rotating two-level atoms in a cavity."""

from .core import (
    CODATA,
    AtomSpec,
    CavitySpec,
    Constants,
    FreeSpace,
    MotionSpec,
    dos_lorentzian,
    lab_frame_frequency,
    lorentz_gamma,
    response,
)
from .engine import (
    Channel,
    Direction,
    Flag,
    Label,
    QuadratureParams,
    RateResult,
    build_channels,
    response_oracle,
    transition_rates,
)
from .dynamics import PopulationState, TrajectoryStats, evolve, simulate_jumps, steady_state
from .scan import find_peak_omega_c, run_scan, run_scenario

__version__ = "0.1.0"
