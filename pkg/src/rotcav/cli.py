"""Command-line interface.

Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.
"""
from __future__ import annotations

import json
import math
import sys

import click

from . import closed_forms as cf
from .core import AtomSpec, CavitySpec, FreeSpace, MotionSpec
from .dynamics import expected_jump_rate, simulate_ensemble, steady_state
from .engine import QuadratureParams, response, response_oracle, transition_rates
from .errors import QuadratureNotConvergedError, RotcavError
from .scan import load_config, records_to_csv, records_to_json, run_scan, run_scenario

EXIT_INVALID = 2
EXIT_NONCONVERGED = 3


def _emit(obj):
    click.echo(json.dumps(obj, indent=2, default=str))


class _Group(click.Group):
    """Maps library errors onto the documented exit codes."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except QuadratureNotConvergedError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_NONCONVERGED)
        except (RotcavError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_INVALID)


def _physics_options(f):
    opts = [
        click.option("--omega0", type=float, required=True, help="Proper transition frequency."),
        click.option("--omega-rot", type=float, default=0.0, show_default=True),
        click.option("--radius", type=float, default=0.0, show_default=True, help="Orbit radius (m)."),
        click.option("--d-rho", type=float, default=0.0, show_default=True, help="Dipole element (C m)."),
        click.option("--d-phi", type=float, default=0.0, show_default=True),
        click.option("--d-z", type=float, default=0.0, show_default=True),
        click.option("--cyclic", is_flag=True,
                     help="Frequencies are given in Hz; multiply by 2*pi on input."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _cavity_options(f):
    f = click.option("--volume", type=float, help="Cavity volume (m^3).")(f)
    f = click.option("--q", "q_factor", type=float, help="Quality factor.")(f)
    f = click.option("--omega-c", type=float, help="Cavity normal-mode frequency.")(f)
    return f


def _inputs(omega0, omega_rot, radius, d_rho, d_phi, d_z, cyclic, omega_c=None):
    scale = 2 * math.pi if cyclic else 1.0
    atom = AtomSpec(omega0 * scale, d_rho, d_phi, d_z)
    motion = MotionSpec(radius, omega_rot * scale)
    return atom, motion, (omega_c * scale if omega_c is not None else None)


@click.group(cls=_Group)
def main():
    """Transition rates of a rotating two-level atom in free space or a cavity."""


@main.command()
@_physics_options
@click.option("--env", type=click.Choice(["free", "cavity"]), default="free", show_default=True)
@_cavity_options
@click.option("--verify", is_flag=True,
              help="Cross-check each cavity response against the time-domain oracle.")
def rates(omega0, omega_rot, radius, d_rho, d_phi, d_z, cyclic, env, omega_c,
          q_factor, volume, verify):
    """Single evaluation of the emission and excitation rates."""
    atom, motion, omega_c = _inputs(omega0, omega_rot, radius, d_rho, d_phi, d_z,
                                    cyclic, omega_c)
    if env == "cavity":
        missing = [n for n, v in (("--omega-c", omega_c), ("--q", q_factor),
                                  ("--volume", volume)) if v is None]
        if missing:
            raise click.UsageError("env=cavity requires " + ", ".join(missing))
        environment = CavitySpec(omega_c, q_factor, volume)
    else:
        environment = FreeSpace()
    res = transition_rates(atom, motion, environment)
    out = {
        "gamma_down_per_s": res.gamma_down,
        "gamma_up_per_s": res.gamma_up,
        "channels": [
            {"label": ch.label.value, "direction": ch.direction.value,
             "frequency_rad_s": ch.frequency, "amplitude": ch.amplitude,
             "velocity_order": ch.velocity_order, "rate_per_s": rate}
            for ch, rate in res.channels
        ],
        "flags": [f.value for f in res.diagnostics],
        "lorentz_gamma": res.gamma_lorentz,
        "omega_lab_rad_s": res.omega_lab,
    }
    if verify and env == "cavity":
        worst = 0.0
        for ch, _ in res.channels:
            # the oracle is meant for the resonant region only
            if abs(ch.frequency - environment.omega_c) > 100 * environment.linewidth:
                continue
            exact = response(environment, ch.frequency)
            worst = max(worst, abs(response_oracle(environment, ch.frequency,
                                                   QuadratureParams()) / exact - 1))
        out["oracle_max_rel_diff"] = worst
    _emit(out)


@main.command()
@_physics_options
@_cavity_options
def peaks(omega0, omega_rot, radius, d_rho, d_phi, d_z, cyclic, omega_c, q_factor, volume):
    """Analytic peak locations and heights for the given atom and motion."""
    if q_factor is None or volume is None:
        raise click.UsageError("--q and --volume are required")
    atom, motion, omega_c = _inputs(omega0, omega_rot, radius, d_rho, d_phi, d_z,
                                    cyclic, omega_c)
    w0, rot = atom.omega0, motion.omega_rot
    out = {"emission_peaks_omega_c": [w0, w0 + rot] + ([w0 - rot] if rot < w0 else [])}
    resonant = CavitySpec(w0, q_factor, volume)
    out["inertial_resonant_peak_per_s"] = cf.inertial_resonant_peak(atom, resonant)
    out["rotating_emission_at_resonance_per_s"] = cf.rotating_emission_at_resonance(
        atom, motion, resonant)
    if rot > w0:
        pk = cf.excitation_peak_high_rotation(atom, motion, q_factor, volume)
        out["excitation_peak"] = {"kind": pk.peak_kind.value, "omega_c": pk.omega_c_star,
                                  "rate_per_s": pk.rate_at_peak}
        try:
            out["emission_at_excitation_peak_per_s"] = cf.emission_at_excitation_peak_high(
                atom, motion, q_factor, volume)
        except RotcavError as exc:
            out["emission_at_excitation_peak_per_s"] = f"n/a: {exc}"
    elif 2 * rot > w0:
        pk = cf.excitation_peak_low_rotation(atom, motion, q_factor, volume)
        out["excitation_peak"] = {"kind": pk.peak_kind.value, "omega_c": pk.omega_c_star,
                                  "rate_per_s": pk.rate_at_peak}
        try:
            out["emission_at_excitation_peak_per_s"] = cf.emission_at_excitation_peak_low(
                atom, motion, q_factor, volume)
        except RotcavError as exc:
            out["emission_at_excitation_peak_per_s"] = f"n/a: {exc}"
    else:
        out["excitation_peak"] = "below leading order"
    if omega_c is not None and abs(omega_c - w0) > 0:
        cav = CavitySpec(omega_c, q_factor, volume)
        pk = cf.off_resonant_emission_peak(atom, cav)
        out["off_resonant_emission_peak"] = {"omega_rot": pk.omega_rot_star,
                                             "rate_per_s": pk.rate_at_peak}
    out["coincidence"] = cf.classify_coincidence(atom, motion).variant.value
    _emit(out)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None,
              help="Output file (default: stdout).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
def scan(config_path, out_path, fmt, workers):
    """Sweep one parameter over a grid."""
    records = run_scan(load_config(config_path), workers=workers)
    text = records_to_csv(records) if fmt == "csv" else records_to_json(records)
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


@main.command()
@click.option("--gamma-up", type=float, required=True)
@click.option("--gamma-down", type=float, required=True)
@click.option("--duration", type=float, required=True, help="Seconds per trajectory.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--trajectories", type=int, default=1, show_default=True)
@click.option("--start-excited", is_flag=True)
@click.option("--workers", type=int, default=1, show_default=True)
def dynamics(gamma_up, gamma_down, duration, seed, trajectories, start_excited, workers):
    """Steady state and sampled quantum-jump statistics."""
    if trajectories < 1:
        raise click.UsageError("--trajectories must be >= 1")
    ss = steady_state(gamma_up, gamma_down)
    runs = simulate_ensemble(gamma_up, gamma_down, duration,
                             range(seed, seed + trajectories), start_excited, workers)
    fractions = [r.excited_fraction for r in runs]
    _emit({
        "p_excited_steady": ss.p_excited,
        "expected_jumps_per_s": expected_jump_rate(gamma_up, gamma_down),
        "mean_excited_fraction": sum(fractions) / len(fractions),
        "mean_jumps_per_s": sum(r.jumps for r in runs) / (len(runs) * duration),
        "trajectories": [
            {"seed": r.seed, "n_up": r.n_up, "n_down": r.n_down,
             "duration": r.duration, "excited_fraction": r.excited_fraction, "rng": r.rng}
            for r in runs
        ],
    })


@main.command()
@click.option("--name", type=click.Choice(["scenario1", "scenario2"]), required=True)
def scenario(name):
    """Reproduce one of the reference parameter sets."""
    _emit(run_scenario(name).to_dict())


if __name__ == "__main__":
    main()
