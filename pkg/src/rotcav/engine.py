"""
Channel decomposition of the transition rates of a rotating two-level atom.

Every rate is a sum over spectral channels, each contributing
``amplitude * response(env, frequency)``.  Five channels exist at the
order kept here:

================  ==========  ============  ==================================
label             direction   frequency     amplitude * eps0 * hbar
================  ==========  ============  ==================================
Z_RESONANT        emission    w0            w0 d_z^2 / 3
TRANSVERSE_PLUS   emission    w0 + W        (w0 + W) d_t^2 / 6
TRANSVERSE_MINUS  emission    w0 - W        (w0 - W) d_t^2 / 6
COUNTER_ROTATING  excitation  W - w0        (W - w0) d_t^2 / 6
SECOND_HARMONIC   excitation  2W - w0       R^2 (2W - w0)^3 d_t^2 / (40 c^2)
================  ==========  ============  ==================================

with ``d_t^2 = d_rho^2 + d_phi^2``.  A channel is present only when its
frequency is strictly positive, so all channels are active simultaneously
wherever they exist; this keeps the excitation rate continuous across
``W = w0``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CODATA,
    AtomSpec,
    CavitySpec,
    Constants,
    Environment,
    MotionSpec,
    lab_frame_frequency,
    lorentz_gamma,
    response,
    speed_ratio,
)
from .errors import NonPositiveFrequencyError, QuadratureNotConvergedError

__all__ = [
    "Label",
    "Direction",
    "Flag",
    "Channel",
    "RateResult",
    "build_channels",
    "transition_rates",
    "QuadratureParams",
    "response_oracle",
]


class Label(str, enum.Enum):
    Z_RESONANT = "Z_RESONANT"
    TRANSVERSE_PLUS = "TRANSVERSE_PLUS"
    TRANSVERSE_MINUS = "TRANSVERSE_MINUS"
    COUNTER_ROTATING = "COUNTER_ROTATING"
    SECOND_HARMONIC = "SECOND_HARMONIC"


class Direction(str, enum.Enum):
    EMISSION = "emission"
    EXCITATION = "excitation"


class Flag(str, enum.Enum):
    NON_RELATIVISTIC_STRAINED = "NonRelativisticStrained"
    LOW_Q = "LowQ"
    BELOW_LEADING_ORDER = "BelowLeadingOrder"
    PEAK_OVERLAP = "PeakOverlap"


# v/c above which the leading-order expansion is questionable
STRAINED_SPEED_RATIO = 0.1
LOW_Q = 100.0
OVERLAP_LINEWIDTHS = 3.0


@dataclass(frozen=True)
class Channel:
    label: Label
    direction: Direction
    frequency: float
    amplitude: float

    @property
    def velocity_order(self) -> int:
        return 2 if self.label is Label.SECOND_HARMONIC else 0


@dataclass(frozen=True)
class RateResult:
    gamma_down: float
    gamma_up: float
    channels: tuple = ()  # (Channel, contribution) pairs
    diagnostics: tuple = ()
    gamma_lorentz: float = 1.0
    omega_lab: float = float("nan")

    def contribution(self, label: Label) -> float:
        """Contribution of one channel, 0.0 if the channel is inactive."""
        for ch, rate in self.channels:
            if ch.label is label:
                return rate
        return 0.0

    def subset(self, labels) -> tuple[float, float]:
        """(gamma_down, gamma_up) restricted to the given channel labels."""
        labels = set(labels)
        down = sum(r for ch, r in self.channels
                   if ch.label in labels and ch.direction is Direction.EMISSION)
        up = sum(r for ch, r in self.channels
                 if ch.label in labels and ch.direction is Direction.EXCITATION)
        return down, up


def build_channels(
    atom: AtomSpec, motion: MotionSpec, constants: Constants = CODATA
) -> list[Channel]:
    speed_ratio(motion, constants)
    w0, rot = atom.omega0, motion.omega_rot
    eh = constants.eps0 * constants.hbar
    dt2 = atom.transverse_sq

    out = [
        Channel(Label.Z_RESONANT, Direction.EMISSION, w0, w0 * atom.axial_sq / (3 * eh)),
        Channel(Label.TRANSVERSE_PLUS, Direction.EMISSION, w0 + rot,
                (w0 + rot) * dt2 / (6 * eh)),
    ]
    if rot < w0:
        out.append(Channel(Label.TRANSVERSE_MINUS, Direction.EMISSION, w0 - rot,
                           (w0 - rot) * dt2 / (6 * eh)))
    if rot > w0:
        out.append(Channel(Label.COUNTER_ROTATING, Direction.EXCITATION, rot - w0,
                           (rot - w0) * dt2 / (6 * eh)))
    if 2 * rot > w0:
        sh = 2 * rot - w0
        amp = motion.radius**2 * sh**3 * dt2 / (40 * constants.c**2 * eh)
        out.append(Channel(Label.SECOND_HARMONIC, Direction.EXCITATION, sh, amp))
    return out


def _diagnostics(atom, motion, env, channels, constants):
    flags = []
    if speed_ratio(motion, constants) > STRAINED_SPEED_RATIO:
        flags.append(Flag.NON_RELATIVISTIC_STRAINED)
    if isinstance(env, CavitySpec):
        if env.q_factor < LOW_Q:
            flags.append(Flag.LOW_Q)
    if 2 * motion.omega_rot <= atom.omega0:
        flags.append(Flag.BELOW_LEADING_ORDER)
    if isinstance(env, CavitySpec):
        # only emission-vs-excitation pairs: emission channels coincide
        # trivially for slow rotation
        window = OVERLAP_LINEWIDTHS * env.linewidth
        emit = [c.frequency for c in channels if c.direction is Direction.EMISSION]
        exc = [c.frequency for c in channels if c.direction is Direction.EXCITATION]
        if any(abs(a - b) <= window for a in emit for b in exc):
            flags.append(Flag.PEAK_OVERLAP)
    return tuple(flags)


def transition_rates(
    atom: AtomSpec,
    motion: MotionSpec,
    env: Environment,
    constants: Constants = CODATA,
) -> RateResult:
    """Emission and excitation rates with a per-channel breakdown.

    For ``W <= w0/2`` no excitation channel exists at this order; the rate is
    then reported as zero and the ``BelowLeadingOrder`` flag is set.
    """
    channels = build_channels(atom, motion, constants)
    pairs = tuple((ch, ch.amplitude * response(env, ch.frequency, constants))
                  for ch in channels)
    down = sum(r for ch, r in pairs if ch.direction is Direction.EMISSION)
    up = sum(r for ch, r in pairs if ch.direction is Direction.EXCITATION)
    return RateResult(
        gamma_down=float(down),
        gamma_up=float(up),
        channels=pairs,
        diagnostics=_diagnostics(atom, motion, env, channels, constants),
        gamma_lorentz=lorentz_gamma(motion, constants),
        omega_lab=lab_frame_frequency(atom, motion, constants),
    )


@dataclass(frozen=True)
class QuadratureParams:
    """Controls for :func:`response_oracle`.

    ``truncation`` is the upper time limit in seconds; ``None`` selects
    ``decay_times`` cavity decay times (``decay_times * Q / omega_c``).
    """

    truncation: float | None = None
    decay_times: float = 20.0
    order: int = 16
    rtol: float = 1e-6
    max_panels: int = 1 << 18


def _field_correlation(cavity: CavitySpec, t, frame: float = 0.0):
    """Time-domain mode correlation of a Lorentzian cavity.

    Fourier transform of the normalized mode density over the full line,
    ``exp(-i w_c t - (w_c/Q) |t|)``, written in a frame rotating at ``frame``
    (multiplied by ``exp(i frame t)``).
    """
    return np.exp(-1j * (cavity.omega_c - frame) * t - cavity.linewidth * np.abs(t))


def _gauss_legendre(f, upper, panels, order):
    x, w = np.polynomial.legendre.leggauss(order)
    h = upper / panels
    left = np.arange(panels) * h
    t = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * h * w, panels)
    return np.dot(weights, f(t))


def response_oracle(
    cavity: CavitySpec,
    omega: float,
    quad: QuadratureParams = QuadratureParams(),
) -> float:
    """Cavity response from a direct time-domain integral.

    Computes ``Re int_0^T exp(i omega t) C(t) dt / V`` by composite
    Gauss-Legendre quadrature, where ``C`` is the mode correlation function.
    Panels are doubled until two successive estimates agree to ``quad.rtol``.
    The neglected tail beyond ``T`` is estimated from the integrand's value
    and logarithmic derivative at ``T``; if either estimate exceeds the
    tolerance :class:`QuadratureNotConvergedError` is raised.
    """
    if not omega > 0:
        raise NonPositiveFrequencyError(f"oracle needs omega > 0, got {omega}")
    kappa = cavity.linewidth
    detuning = omega - cavity.omega_c
    upper = quad.truncation
    if upper is None:
        upper = quad.decay_times / kappa
    if not upper > 0:
        raise QuadratureNotConvergedError(f"truncation must be > 0, got {upper}")

    def integrand(t):
        # exp(i omega t) C(t); evaluated in the frame rotating at omega so two
        # large phases never cancel numerically
        return _field_correlation(cavity, t, frame=omega)

    panels = max(8, math.ceil(upper * (abs(detuning) + kappa) / 2.0))
    if 2 * panels > quad.max_panels:
        raise QuadratureNotConvergedError(
            f"{2 * panels} panels needed, budget is {quad.max_panels}"
        )
    prev = _gauss_legendre(integrand, upper, panels, quad.order)
    while True:
        panels *= 2
        if panels > quad.max_panels:
            raise QuadratureNotConvergedError(
                f"node budget exhausted at {panels // 2} panels"
            )
        cur = _gauss_legendre(integrand, upper, panels, quad.order)
        if abs(cur - prev) <= quad.rtol * abs(cur.real):
            break
        prev = cur

    h = 1e-6 / max(kappa, abs(detuning))
    f_T = integrand(np.array([upper - h, upper, upper + h]))
    log_deriv = (f_T[2] - f_T[0]) / (2 * h * f_T[1])
    tail = abs(f_T[1]) / abs(log_deriv)
    if tail > quad.rtol * abs(cur.real):
        raise QuadratureNotConvergedError(
            f"integrand not decayed at T={upper:g} s: tail estimate "
            f"{tail:.3g} vs integral {cur.real:.3g}"
        )
    return float(cur.real) / cavity.volume
