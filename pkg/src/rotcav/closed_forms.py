"""
Closed-form peak values, special cases and free-space rates.

These are written out term by term, independently of the channel engine in
:mod:`rotcav.engine`, so that each side can check the other.  Unless noted
otherwise the cavity formulas are leading order in ``1/Q`` and in ``v/c``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

from .core import CODATA, AtomSpec, CavitySpec, Constants, MotionSpec, speed_ratio
from .engine import LOW_Q, Flag
from .errors import (
    CoincidentPeaksError,
    DivergentAtResonanceError,
    NotAtResonanceError,
    WrongRegimeError,
)

__all__ = [
    "PeakKind",
    "PeakReport",
    "Coincidence",
    "CoincidenceClass",
    "Enhancement",
    "EnhancementKind",
    "FreeSpaceRates",
    "InversionAudit",
    "ValidityWarning",
    "cavity_emission_rate",
    "cavity_excitation_rate",
    "inertial_resonant_peak",
    "rotating_emission_at_resonance",
    "off_resonant_emission_peak",
    "inertial_off_resonant_emission",
    "free_space_rates",
    "excitation_peak_high_rotation",
    "excitation_peak_low_rotation",
    "emission_at_excitation_peak_high",
    "emission_at_excitation_peak_low",
    "enhancement_factor",
    "classify_coincidence",
    "inversion_ratio_audit",
]

RESONANCE_RTOL = 1e-9
# "far from a coincidence" means at least this many cavity linewidths apart
SEPARATION_LINEWIDTHS = 10.0
# Q must exceed max(1, Omega/omega0) by this factor before we stop warning
Q_MARGIN = LOW_Q


class PeakKind(str, enum.Enum):
    EMISSION_AT_RESONANCE = "EmissionAtResonance"
    EMISSION_OFF_RESONANT = "EmissionOffResonant"
    EXCITATION_HIGH_ROTATION = "ExcitationHighRotation"
    EXCITATION_LOW_ROTATION = "ExcitationLowRotation"


@dataclass(frozen=True)
class PeakReport:
    peak_kind: PeakKind
    omega_c_star: float
    rate_at_peak: float
    omega_rot_star: float | None = None
    diagnostics: tuple = ()


class Coincidence(str, enum.Enum):
    NONE = "None"
    OMEGA_EQ_2_OMEGA0 = "OmegaEq2Omega0"
    OMEGA_EQ_OMEGA0 = "OmegaEqOmega0"
    OMEGA_EQ_TWO_THIRDS_OMEGA0 = "OmegaEqTwoThirdsOmega0"


@dataclass(frozen=True)
class CoincidenceClass:
    variant: Coincidence
    tolerance: float


class EnhancementKind(str, enum.Enum):
    EMISSION_LOW = "EmissionLow"
    EMISSION_HIGH = "EmissionHigh"
    EXCITATION_HIGH = "ExcitationHigh"
    EXCITATION_LOW = "ExcitationLow"


@dataclass(frozen=True)
class Enhancement:
    """Cavity-over-free-space factor at ``omega``.

    ``nominal`` is ``Q c^3 / (V omega^3)``; ``exact`` is the ratio of the two
    response functions, which carries an extra factor of pi.
    """

    omega: float
    nominal: float
    exact: float


@dataclass(frozen=True)
class FreeSpaceRates:
    gamma_down: float
    gamma_up: float
    diagnostics: tuple = ()


@dataclass(frozen=True)
class InversionAudit:
    """Excitation/emission ratio at the high-rotation excitation peak.

    ``quotient`` divides the two transcribed peak formulas (transverse
    dipoles only), ``exact`` is its simplified form ``4 Q^2 w0^2/(W^2-w0^2)``
    and ``approximate`` the commonly quoted ``Q^2/((W/w0)^2 - 1)``.  The two
    differ by a constant factor of 4, reported as ``factor``.
    """

    quotient: float
    exact: float
    approximate: float
    factor: float
    note: str


def _eh(constants):
    return constants.eps0 * constants.hbar


class ValidityWarning(RuntimeWarning):
    """A closed form is evaluated outside its stated approximation."""


def _warn_low_q(q, needed=LOW_Q):
    if q < needed:
        warnings.warn(f"Q={q:g} is not >> {needed / LOW_Q:g}", ValidityWarning, stacklevel=3)


def _heaviside(x):
    # value at 0 is immaterial: every use multiplies it by x
    return 1.0 if x > 0 else 0.0


def cavity_emission_rate(
    atom: AtomSpec,
    motion: MotionSpec,
    cavity: CavitySpec,
    constants: Constants = CODATA,
) -> float:
    """Leading-order emission rate inside a Lorentzian cavity."""
    speed_ratio(motion, constants)
    w0, rot = atom.omega0, motion.omega_rot
    wc, q, v = cavity.omega_c, cavity.q_factor, cavity.volume
    pre = wc * q / (6 * _eh(constants) * v)
    axial = 2 * w0 / (q**2 * (w0 - wc) ** 2 + wc**2) * atom.axial_sq
    plus = (w0 + rot) / (q**2 * (w0 + rot - wc) ** 2 + wc**2)
    minus = (w0 - rot) * _heaviside(w0 - rot) / (q**2 * (w0 - rot - wc) ** 2 + wc**2)
    return pre * (axial + atom.transverse_sq * (plus + minus))


def cavity_excitation_rate(
    atom: AtomSpec,
    motion: MotionSpec,
    cavity: CavitySpec,
    constants: Constants = CODATA,
) -> float:
    """Leading-order excitation rate inside a Lorentzian cavity.

    Piecewise in the rotation speed: the counter-rotating term for
    ``W > w0``, the order ``(R W / c)^2`` term for ``w0/2 < W <= w0`` and
    zero below.
    """
    speed_ratio(motion, constants)
    w0, rot = atom.omega0, motion.omega_rot
    wc, q, v = cavity.omega_c, cavity.q_factor, cavity.volume
    eh = _eh(constants)
    if rot > w0:
        return (q * wc * (rot - w0) * atom.transverse_sq
                / (6 * eh * v * (q**2 * (rot - w0 - wc) ** 2 + wc**2)))
    if 2 * rot > w0:
        s = 2 * rot - w0
        return (q * motion.radius**2 * wc * s**3 * atom.transverse_sq
                / (40 * constants.c**2 * eh * v * (q**2 * (s - wc) ** 2 + wc**2)))
    return 0.0


def inertial_resonant_peak(
    atom: AtomSpec, cavity: CavitySpec, constants: Constants = CODATA
) -> float:
    """Emission rate of an inertial atom on resonance with the cavity."""
    _warn_low_q(cavity.q_factor)
    return cavity.q_factor * atom.total_sq / (3 * _eh(constants) * cavity.volume)


def rotating_emission_at_resonance(
    atom: AtomSpec,
    motion: MotionSpec,
    cavity: CavitySpec,
    constants: Constants = CODATA,
) -> float:
    w0, rot = atom.omega0, motion.omega_rot
    if abs(cavity.omega_c - w0) > RESONANCE_RTOL * w0:
        raise NotAtResonanceError(
            f"omega_c={cavity.omega_c:g} is not tuned to omega0={w0:g}"
        )
    q, v, eh = cavity.q_factor, cavity.volume, _eh(constants)
    axial = q * atom.axial_sq / (3 * eh * v)
    bracket = w0 + rot + (w0 - rot) * _heaviside(w0 - rot)
    transverse = (q * w0 * bracket * atom.transverse_sq
                  / (6 * eh * v * (q * q * rot * rot + w0 * w0)))
    return axial + transverse


def off_resonant_emission_peak(
    atom: AtomSpec, cavity: CavitySpec, constants: Constants = CODATA
) -> PeakReport:
    """Maximum over rotation speed of the detuned emission rate.

    The maximum sits where one transverse sideband ``w0 +/- W`` hits the
    cavity, i.e. at ``W = |omega_c - w0|``.
    """
    w0, wc = atom.omega0, cavity.omega_c
    flags = ()
    if abs(w0 - wc) < SEPARATION_LINEWIDTHS * cavity.linewidth:
        flags = ("NearResonance",)
    rate = cavity.q_factor * atom.transverse_sq / (6 * _eh(constants) * cavity.volume)
    return PeakReport(PeakKind.EMISSION_OFF_RESONANT, wc, rate,
                      omega_rot_star=abs(wc - w0), diagnostics=flags)


def inertial_off_resonant_emission(
    atom: AtomSpec, cavity: CavitySpec, constants: Constants = CODATA
) -> float:
    w0, wc = atom.omega0, cavity.omega_c
    detuning = w0 - wc
    if abs(detuning) < 1e-12 * wc:
        raise DivergentAtResonanceError("inertial off-resonant rate diverges at omega0 = omega_c")
    return (w0 * wc * atom.total_sq
            / (3 * _eh(constants) * cavity.volume * cavity.q_factor * detuning**2))


def free_space_rates(
    atom: AtomSpec, motion: MotionSpec, constants: Constants = CODATA
) -> FreeSpaceRates:
    """Emission and excitation rates of a rotating atom in vacuum."""
    speed_ratio(motion, constants)
    w0, rot = atom.omega0, motion.omega_rot
    c, eh = constants.c, _eh(constants)
    dt2, dz2 = atom.transverse_sq, atom.axial_sq

    if rot <= w0:
        down = w0**3 / (3 * math.pi * eh * c**3) * ((1 + 3 * rot**2 / w0**2) * dt2 + dz2)
    else:
        s = rot + w0
        down = s**3 / (6 * math.pi * eh * c**3) * (dt2 + 2 * w0**3 / s**3 * dz2)

    flags = ()
    if rot > w0:
        up = (rot - w0) ** 3 / (6 * math.pi * eh * c**3) * dt2
    elif 2 * rot > w0:
        up = motion.radius**2 * (2 * rot - w0) ** 5 / (40 * math.pi * eh * c**5) * dt2
    else:
        up = 0.0
        flags = (Flag.BELOW_LEADING_ORDER,)
    return FreeSpaceRates(down, up, flags)


def excitation_peak_high_rotation(
    atom: AtomSpec,
    motion: MotionSpec,
    q_factor: float,
    volume: float,
    constants: Constants = CODATA,
) -> PeakReport:
    """Excitation peak for ``W > w0``, reached at ``omega_c = W - w0``.

    The peak height depends on neither ``w0`` nor ``W`` nor the radius.
    """
    w0, rot = atom.omega0, motion.omega_rot
    if rot <= w0:
        raise WrongRegimeError(f"needs omega_rot > omega0 (got {rot:g} <= {w0:g})")
    rate = q_factor * atom.transverse_sq / (6 * _eh(constants) * volume)
    return PeakReport(PeakKind.EXCITATION_HIGH_ROTATION, rot - w0, rate,
                      omega_rot_star=rot)


def excitation_peak_low_rotation(
    atom: AtomSpec,
    motion: MotionSpec,
    q_factor: float,
    volume: float,
    constants: Constants = CODATA,
) -> PeakReport:
    """Excitation peak for ``w0/2 < W <= w0``, reached at ``omega_c = 2W - w0``."""
    w0, rot = atom.omega0, motion.omega_rot
    if not (w0 / 2 < rot <= w0):
        raise WrongRegimeError(f"needs omega0/2 < omega_rot <= omega0 (got {rot:g}, {w0:g})")
    s = 2 * rot - w0
    rate = (q_factor * motion.radius**2 * s**2 * atom.transverse_sq
            / (40 * _eh(constants) * volume * constants.c**2))
    return PeakReport(PeakKind.EXCITATION_LOW_ROTATION, s, rate, omega_rot_star=rot)


def emission_at_excitation_peak_high(
    atom: AtomSpec,
    motion: MotionSpec,
    q_factor: float,
    volume: float,
    constants: Constants = CODATA,
) -> float:
    """Emission rate with the cavity tuned to the excitation peak ``W - w0``.

    Valid for ``Q >> 1``, ``Q >> W/w0`` and ``W`` away from ``2 w0``, where
    the excitation and Z-emission peaks would merge.
    """
    w0, rot = atom.omega0, motion.omega_rot
    if rot <= w0:
        raise WrongRegimeError(f"needs omega_rot > omega0 (got {rot:g} <= {w0:g})")
    linewidth = (rot - w0) / q_factor
    if abs(rot - 2 * w0) < SEPARATION_LINEWIDTHS * linewidth:
        raise CoincidentPeaksError("omega_rot is within 10 linewidths of 2*omega0")
    _warn_low_q(q_factor, Q_MARGIN * max(1.0, rot / w0))
    bracket = (atom.transverse_sq
               + 8 * w0**3 / ((rot - 2 * w0) ** 2 * (rot + w0)) * atom.axial_sq)
    return (rot**2 - w0**2) / (24 * _eh(constants) * volume * q_factor * w0**2) * bracket


def emission_at_excitation_peak_low(
    atom: AtomSpec,
    motion: MotionSpec,
    q_factor: float,
    volume: float,
    constants: Constants = CODATA,
) -> float:
    """Emission rate with the cavity tuned to the excitation peak ``2W - w0``."""
    w0, rot = atom.omega0, motion.omega_rot
    if not (w0 / 2 < rot <= w0):
        raise WrongRegimeError(f"needs omega0/2 < omega_rot <= omega0 (got {rot:g}, {w0:g})")
    s = 2 * rot - w0
    window = SEPARATION_LINEWIDTHS * s / q_factor
    # cavity at 2W - w0 meets the emission peaks at w0 (W = w0) and
    # w0 - W (W = 2 w0 / 3)
    if abs(s - w0) < window or abs(s - (w0 - rot)) < window:
        raise CoincidentPeaksError(
            "cavity frequency 2*omega_rot - omega0 is within 10 linewidths of an emission peak"
        )
    transverse = (2 * (4 * rot**3 + w0 * (rot**2 - 8 * w0 * rot + 4 * w0**2))
                  / ((rot - 2 * w0) ** 2 * (3 * rot - 2 * w0) ** 2))
    axial = w0 / (2 * (rot - w0) ** 2)
    return (s / (6 * _eh(constants) * volume * q_factor)
            * (transverse * atom.transverse_sq + axial * atom.axial_sq))


def _check_regime(kind, w0, rot):
    ok = {
        EnhancementKind.EMISSION_LOW: rot <= w0,
        EnhancementKind.EMISSION_HIGH: rot > w0,
        EnhancementKind.EXCITATION_HIGH: rot > w0,
        EnhancementKind.EXCITATION_LOW: w0 / 2 < rot <= w0,
    }[kind]
    if not ok:
        raise WrongRegimeError(f"{kind.value} does not apply at omega_rot={rot:g}, omega0={w0:g}")


def enhancement_factor(
    atom: AtomSpec,
    motion: MotionSpec,
    q_factor: float,
    volume: float,
    which: EnhancementKind | str,
    constants: Constants = CODATA,
) -> Enhancement:
    which = EnhancementKind(which)
    w0, rot = atom.omega0, motion.omega_rot
    _check_regime(which, w0, rot)
    omega = {
        EnhancementKind.EMISSION_LOW: w0,
        EnhancementKind.EMISSION_HIGH: rot + w0,
        EnhancementKind.EXCITATION_HIGH: rot - w0,
        EnhancementKind.EXCITATION_LOW: 2 * rot - w0,
    }[which]
    c3 = constants.c**3
    nominal = q_factor * c3 / (volume * omega**3)
    # peak cavity response Q/(omega V) over free response omega^2/(pi c^3)
    exact = (q_factor / (omega * volume)) / (omega**2 / (math.pi * c3))
    return Enhancement(omega, nominal, exact)


_COINCIDENCE_RATIOS = (
    (Coincidence.OMEGA_EQ_2_OMEGA0, 2.0),
    (Coincidence.OMEGA_EQ_OMEGA0, 1.0),
    (Coincidence.OMEGA_EQ_TWO_THIRDS_OMEGA0, 2.0 / 3.0),
)


def classify_coincidence(
    atom: AtomSpec, motion: MotionSpec, tol: float = 1e-3
) -> CoincidenceClass:
    """Which rotation speed, if any, makes an emission and an excitation peak meet."""
    if not 0 < tol < 0.1:
        raise ValueError(f"tol must lie in (0, 0.1), got {tol}")
    ratio = motion.omega_rot / atom.omega0
    for variant, r in _COINCIDENCE_RATIOS:
        if abs(ratio - r) <= tol * r:
            return CoincidenceClass(variant, tol)
    return CoincidenceClass(Coincidence.NONE, tol)


def inversion_ratio_audit(
    omega0: float, omega_rot: float, q_factor: float, constants: Constants = CODATA
) -> InversionAudit:
    atom = AtomSpec(omega0, d_rho=1.0, d_phi=0.0, d_z=0.0)
    motion = MotionSpec(0.0, omega_rot)
    up = excitation_peak_high_rotation(atom, motion, q_factor, 1.0, constants).rate_at_peak
    down = emission_at_excitation_peak_high(atom, motion, q_factor, 1.0, constants)
    exact = 4 * q_factor**2 * omega0**2 / (omega_rot**2 - omega0**2)
    approx = q_factor**2 / ((omega_rot / omega0) ** 2 - 1)
    factor = exact / approx
    note = (f"exact ratio is {factor:.6g} times the approximate Q^2/((W/w0)^2-1) "
            "expression; the approximate form understates the inversion")
    return InversionAudit(up / down, exact, approx, factor, note)
