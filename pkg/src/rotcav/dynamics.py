"""
Two-state Markov dynamics driven by an excitation rate and an emission rate.

The ensemble picture (independent identical atoms) uses the exact solution
of the rate equation; single-atom behaviour is sampled as an alternating
renewal process with exponential sojourn times.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import BothRatesZeroError, NegativeTimeError, RotcavError

__all__ = [
    "PopulationState",
    "TrajectoryStats",
    "RNG_ALGORITHM",
    "steady_state",
    "evolve",
    "relaxation_time",
    "expected_jump_rate",
    "simulate_jumps",
    "simulate_ensemble",
]

RNG_ALGORITHM = "numpy.random.PCG64"
_CHUNK = 1 << 16


@dataclass(frozen=True)
class PopulationState:
    p_ground: float
    p_excited: float
    time: float = 0.0

    def __post_init__(self):
        for p in (self.p_ground, self.p_excited):
            if not -1e-15 <= p <= 1 + 1e-15:
                raise RotcavError(f"probability out of range: {p}")
        if abs(self.p_ground + self.p_excited - 1.0) > 1e-12:
            raise RotcavError("populations must sum to 1")

    @classmethod
    def excited_fraction(cls, p_excited: float, time: float = 0.0) -> "PopulationState":
        return cls(1.0 - p_excited, p_excited, time)


@dataclass(frozen=True)
class TrajectoryStats:
    n_up: int
    n_down: int
    duration: float
    excited_fraction: float
    seed: int
    rng: str = RNG_ALGORITHM

    @property
    def jumps(self) -> int:
        return self.n_up + self.n_down


def _check_rates(gamma_up, gamma_down):
    if gamma_up < 0 or gamma_down < 0:
        raise RotcavError("rates must be non-negative")
    if gamma_up + gamma_down <= 0:
        raise BothRatesZeroError("excitation and emission rates are both zero")


def steady_state(gamma_up: float, gamma_down: float) -> PopulationState:
    _check_rates(gamma_up, gamma_down)
    # 1 - p_excited computed directly to keep tiny ground populations accurate
    total = gamma_up + gamma_down
    return PopulationState(gamma_down / total, gamma_up / total, math.inf)


def relaxation_time(gamma_up: float, gamma_down: float) -> float:
    _check_rates(gamma_up, gamma_down)
    return 1.0 / (gamma_up + gamma_down)


def evolve(
    initial: PopulationState, gamma_up: float, gamma_down: float, t: float
) -> PopulationState:
    """Exact solution of the two-level rate equation after time ``t``."""
    if t < 0:
        raise NegativeTimeError(f"t must be >= 0, got {t}")
    fixed = steady_state(gamma_up, gamma_down)
    decay = math.exp(-(gamma_up + gamma_down) * t)
    p_e = fixed.p_excited + (initial.p_excited - fixed.p_excited) * decay
    p_g = fixed.p_ground + (initial.p_ground - fixed.p_ground) * decay
    return PopulationState(p_g, p_e, initial.time + t)


def expected_jump_rate(gamma_up: float, gamma_down: float) -> float:
    """Long-run jumps per second of a single atom: two per up-down cycle."""
    _check_rates(gamma_up, gamma_down)
    if gamma_up == 0 or gamma_down == 0:
        return 0.0
    return 2.0 / (1.0 / gamma_up + 1.0 / gamma_down)


def simulate_jumps(
    gamma_up: float,
    gamma_down: float,
    duration: float,
    seed: int,
    start_excited: bool = False,
) -> TrajectoryStats:
    """Sample one single-atom trajectory and count its quantum jumps.

    Sojourn times are exponential with mean ``1/gamma_up`` in the ground
    state and ``1/gamma_down`` in the excited state.  The result depends only
    on the arguments.
    """
    _check_rates(gamma_up, gamma_down)
    if not duration > 0:
        raise RotcavError(f"duration must be > 0, got {duration}")
    rng = np.random.Generator(np.random.PCG64(seed))
    leave = (gamma_up, gamma_down)  # exit rate indexed by state (0 ground, 1 excited)

    state = 1 if start_excited else 0
    t = 0.0
    jumps_from = [0, 0]
    occupancy = [0.0, 0.0]
    while True:
        states = (state + np.arange(_CHUNK)) % 2
        rates = np.where(states == 0, leave[0], leave[1])
        draws = rng.standard_exponential(_CHUNK)
        # subnormal rates overflow to an infinite wait, which is the right answer
        with np.errstate(divide="ignore", over="ignore"):
            waits = np.where(rates > 0, draws / np.where(rates > 0, rates, 1.0), np.inf)
            ends = t + np.cumsum(waits)
        done = int(np.searchsorted(ends, duration, side="left"))
        # the first `done` sojourns end before `duration`
        starts = np.concatenate(([t], ends[:-1]))
        for s in (0, 1):
            sel = states[:done] == s
            jumps_from[s] += int(np.count_nonzero(sel))
            occupancy[s] += float(np.sum(waits[:done][sel]))
        if done < _CHUNK:
            last = int(states[done])
            occupancy[last] += duration - float(starts[done])
            break
        t = float(ends[-1])
        state = int((states[-1] + 1) % 2)

    return TrajectoryStats(
        n_up=jumps_from[0],
        n_down=jumps_from[1],
        duration=duration,
        excited_fraction=min(1.0, max(0.0, occupancy[1] / duration)),
        seed=seed,
    )


def simulate_ensemble(
    gamma_up: float,
    gamma_down: float,
    duration: float,
    seeds,
    start_excited: bool = False,
    workers: int = 1,
) -> list[TrajectoryStats]:
    """Independent trajectories, returned in the order of ``seeds``."""
    seeds = list(seeds)

    def one(seed):
        return simulate_jumps(gamma_up, gamma_down, duration, seed, start_excited)

    if workers <= 1:
        return [one(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, seeds))
