"""
Constants, input specifications, kinematics and spectral response functions.

All frequencies are angular frequencies in rad/s and all quantities are SI.

The two response functions share one convention: a channel of amplitude
``A`` (m^3/s^2) at frequency ``w`` contributes ``A * response(env, w)`` to a
transition rate (1/s).

Cavity
    ``pi * rho(w) / V`` with ``rho`` the normalized Lorentzian mode density,
    i.e. ``(Q w_c / V) / (Q^2 (w - w_c)^2 + w_c^2)``.

Free space
    ``w^2 / (pi c^3)``.  This is fixed by requiring that the channel sums
    reproduce the free-space rates of a rotating dipole.  The inertial
    Z channel, for example, has amplitude ``w0 d_z^2 / (3 eps0 hbar)``, and
    ``w0^3 d_z^2 / (3 pi eps0 hbar c^3)`` is the textbook Wigner-Weisskopf rate,
    which leaves ``w0^2 / (pi c^3)`` as the only possible factor.  The two
    transverse channels at ``w0 +/- W`` then sum to
    ``w0^3 (1 + 3 W^2 / w0^2) (d_rho^2 + d_phi^2) / (3 pi eps0 hbar c^3)``,
    because ``(w0 + W)^3 + (w0 - W)^3 = 2 w0^3 + 6 w0 W^2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import NonPositiveFrequencyError, RotcavError, SuperluminalOrbitError

__all__ = [
    "Constants",
    "CODATA",
    "AtomSpec",
    "MotionSpec",
    "CavitySpec",
    "FreeSpace",
    "Environment",
    "speed_ratio",
    "lorentz_gamma",
    "lab_frame_frequency",
    "dos_lorentzian",
    "response",
]


@dataclass(frozen=True)
class Constants:
    c: float
    hbar: float
    eps0: float


# CODATA 2018.  c is exact by definition of the metre.
CODATA = Constants(
    c=2.99792458e8,
    hbar=1.054571817e-34,
    eps0=8.8541878128e-12,
)


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise RotcavError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class AtomSpec:
    """Two-level atom: proper transition frequency and real dipole elements."""

    omega0: float
    d_rho: float = 0.0
    d_phi: float = 0.0
    d_z: float = 0.0

    def __post_init__(self):
        for name in ("omega0", "d_rho", "d_phi", "d_z"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.omega0 <= 0:
            raise NonPositiveFrequencyError(f"omega0 must be > 0, got {self.omega0}")

    @classmethod
    def isotropic(cls, omega0: float, d: float) -> "AtomSpec":
        return cls(omega0, d, d, d)

    @property
    def transverse_sq(self) -> float:
        """d_rho^2 + d_phi^2"""
        return self.d_rho**2 + self.d_phi**2

    @property
    def axial_sq(self) -> float:
        return self.d_z**2

    @property
    def total_sq(self) -> float:
        return self.axial_sq + self.transverse_sq


@dataclass(frozen=True)
class MotionSpec:
    """Circular orbit of radius ``radius`` at angular velocity ``omega_rot``."""

    radius: float = 0.0
    omega_rot: float = 0.0

    def __post_init__(self):
        for name in ("radius", "omega_rot"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.radius < 0:
            raise RotcavError(f"radius must be >= 0, got {self.radius}")
        if self.omega_rot < 0:
            raise RotcavError(f"omega_rot must be >= 0, got {self.omega_rot}")

    @property
    def speed(self) -> float:
        return self.radius * self.omega_rot


@dataclass(frozen=True)
class CavitySpec:
    """Single-mode cavity with a Lorentzian density of states."""

    omega_c: float
    q_factor: float
    volume: float

    def __post_init__(self):
        for name in ("omega_c", "q_factor", "volume"):
            object.__setattr__(self, name, _finite(name, getattr(self, name)))
        if self.omega_c <= 0:
            raise NonPositiveFrequencyError(f"omega_c must be > 0, got {self.omega_c}")
        if self.q_factor <= 1:
            raise RotcavError(f"q_factor must be > 1, got {self.q_factor}")
        if self.volume <= 0:
            raise RotcavError(f"volume must be > 0, got {self.volume}")

    @property
    def linewidth(self) -> float:
        """Half width at half maximum, omega_c / Q."""
        return self.omega_c / self.q_factor

    def tuned(self, omega_c: float) -> "CavitySpec":
        """Same Q and V, different normal-mode frequency."""
        return CavitySpec(omega_c, self.q_factor, self.volume)


@dataclass(frozen=True)
class FreeSpace:
    pass


Environment = Union[FreeSpace, CavitySpec]


def speed_ratio(motion: MotionSpec, constants: Constants = CODATA) -> float:
    """v/c, raising if the orbit is not subluminal."""
    beta = motion.speed / constants.c
    if beta >= 1:
        raise SuperluminalOrbitError(
            f"orbital speed R*Omega = {motion.speed:g} m/s is not below c"
        )
    return beta


def lorentz_gamma(motion: MotionSpec, constants: Constants = CODATA) -> float:
    beta = speed_ratio(motion, constants)
    return 1.0 / math.sqrt(1.0 - beta * beta)


def lab_frame_frequency(
    atom: AtomSpec, motion: MotionSpec, constants: Constants = CODATA
) -> float:
    """Time-dilated transition frequency seen from the laboratory frame."""
    beta = speed_ratio(motion, constants)
    return atom.omega0 * math.sqrt(1.0 - beta * beta)


def dos_lorentzian(cavity: CavitySpec, omega_k):
    """Normalized Lorentzian mode density (s); accepts scalars or arrays."""
    kappa = cavity.linewidth
    return (kappa / math.pi) / (kappa * kappa + (omega_k - cavity.omega_c) ** 2)


def response(env: Environment, omega: float, constants: Constants = CODATA) -> float:
    """Environment response density (s m^-3) at angular frequency ``omega``."""
    if not omega > 0:
        raise NonPositiveFrequencyError(f"response needs omega > 0, got {omega}")
    if isinstance(env, CavitySpec):
        q, wc = env.q_factor, env.omega_c
        detuning = omega - wc
        return (q * wc / env.volume) / (q * q * detuning * detuning + wc * wc)
    if isinstance(env, FreeSpace):
        return omega * omega / (math.pi * constants.c**3)
    raise TypeError(f"not an environment: {env!r}")
