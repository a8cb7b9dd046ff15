"""
Parameter sweeps, numeric peak search and the two reference scenarios.

Sweep configurations are flat key/value documents (JSON or TOML) whose keys
are the ``rates`` CLI flag names plus the sweep keys ``sweep``, ``lo``,
``hi``, ``grid``, ``points`` and ``outputs``.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closed_forms as cf
from .core import AtomSpec, CavitySpec, FreeSpace, MotionSpec
from .dynamics import expected_jump_rate, relaxation_time, steady_state
from .engine import Direction, Label, transition_rates
from .errors import (
    InvalidConfigError,
    RotcavError,
    UnknownScenarioError,
    WindowExcludesPeakError,
)

__all__ = [
    "PARAMETERS",
    "OUTPUTS",
    "ScanConfig",
    "build_inputs",
    "evaluate",
    "run_scan",
    "records_to_csv",
    "records_to_json",
    "load_config",
    "PeakSearch",
    "find_peak_omega_c",
    "Quantity",
    "ScenarioReport",
    "SCENARIOS",
    "run_scenario",
]

# flag name -> (record column, default)
PARAMETERS = {
    "omega0": ("omega0_rad_s", None),
    "omega-rot": ("omega_rot_rad_s", 0.0),
    "radius": ("radius_m", 0.0),
    "d-rho": ("d_rho_C_m", 0.0),
    "d-phi": ("d_phi_C_m", 0.0),
    "d-z": ("d_z_C_m", 0.0),
    "env": ("env", "free"),
    "omega-c": ("omega_c_rad_s", None),
    "q": ("q", None),
    "volume": ("volume_m3", None),
}
FREQUENCY_KEYS = ("omega0", "omega-rot", "omega-c")
SWEEP_KEYS = ("sweep", "lo", "hi", "grid", "points", "outputs", "cyclic")
OUTPUTS = ("gamma_down", "gamma_up", "channels", "diagnostics", "p_excited_steady")
CAVITY_ONLY = ("omega-c", "q", "volume")


def _fmt(x) -> str:
    """17 significant digits: enough for an exact float round trip."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def build_inputs(params: dict):
    """Turn a flat parameter mapping (flag names, rad/s) into atom, motion and environment objects."""
    atom = AtomSpec(params["omega0"], params.get("d-rho", 0.0),
                    params.get("d-phi", 0.0), params.get("d-z", 0.0))
    motion = MotionSpec(params.get("radius", 0.0), params.get("omega-rot", 0.0))
    if params.get("env", "free") == "cavity":
        env = CavitySpec(params["omega-c"], params["q"], params["volume"])
    else:
        env = FreeSpace()
    return atom, motion, env


def evaluate(params: dict, outputs=OUTPUTS) -> dict:
    """One output record: echoed inputs followed by the requested outputs."""
    rec = {}
    for key, (col, default) in PARAMETERS.items():
        rec[col] = params.get(key, default)
    if rec["env"] != "cavity":
        for key in CAVITY_ONLY:
            rec[PARAMETERS[key][0]] = None

    atom, motion, env = build_inputs(params)
    res = transition_rates(atom, motion, env)
    if "gamma_down" in outputs:
        rec["gamma_down_per_s"] = res.gamma_down
    if "gamma_up" in outputs:
        rec["gamma_up_per_s"] = res.gamma_up
    if "channels" in outputs:
        for label in Label:
            rec[f"channel_{label.value}_per_s"] = res.contribution(label)
    if "p_excited_steady" in outputs:
        total = res.gamma_up + res.gamma_down
        rec["p_excited_steady"] = res.gamma_up / total if total > 0 else None
    rec["flags"] = [f.value for f in res.diagnostics]
    return rec


@dataclass(frozen=True)
class ScanConfig:
    fixed: dict
    sweep: str
    lo: float
    hi: float
    grid: str = "linear"
    points: int = 50
    outputs: tuple = ("gamma_down", "gamma_up")

    @classmethod
    def from_mapping(cls, doc: dict) -> "ScanConfig":
        problems = []
        unknown = sorted(set(doc) - set(PARAMETERS) - set(SWEEP_KEYS))
        for key in unknown:
            problems.append(f"{key}: unknown key")

        sweep = doc.get("sweep")
        if sweep is None:
            problems.append("sweep: required")
        elif sweep not in PARAMETERS or sweep == "env":
            problems.append(f"sweep: cannot sweep {sweep!r}")
        elif sweep in doc:
            problems.append(f"{sweep}: swept parameter must not also be fixed")

        def number(key, required=True):
            if key not in doc:
                if required:
                    problems.append(f"{key}: required")
                return None
            try:
                val = float(doc[key])
            except (TypeError, ValueError):
                problems.append(f"{key}: not a number: {doc[key]!r}")
                return None
            if not math.isfinite(val):
                problems.append(f"{key}: must be finite")
                return None
            return val

        lo, hi = number("lo"), number("hi")
        if lo is not None and hi is not None and not lo < hi:
            problems.append("lo: must be < hi")
        grid = doc.get("grid", "linear")
        if grid in ("log", "logarithmic"):
            grid = "log"
        if grid not in ("linear", "log"):
            problems.append(f"grid: must be linear or log, got {grid!r}")
        elif grid == "log" and lo is not None and lo <= 0:
            problems.append("lo: log grid needs lo > 0")
        points = doc.get("points", 50)
        if isinstance(points, bool) or not isinstance(points, int) or points < 2:
            problems.append(f"points: integer >= 2 required, got {points!r}")
        outputs = doc.get("outputs", ["gamma_down", "gamma_up"])
        if isinstance(outputs, str):
            outputs = [o.strip() for o in outputs.split(",") if o.strip()]
        for o in outputs:
            if o not in OUTPUTS:
                problems.append(f"outputs: unknown output {o!r}")
        cyclic = doc.get("cyclic", False)
        if not isinstance(cyclic, bool):
            problems.append("cyclic: must be true or false")

        fixed = {}
        for key in PARAMETERS:
            if key == "env" or key not in doc:
                continue
            val = number(key)
            if val is not None:
                fixed[key] = val
        env = doc.get("env", "free")
        if env not in ("free", "cavity"):
            problems.append(f"env: must be free or cavity, got {env!r}")
        fixed["env"] = env
        if "omega0" not in fixed and sweep != "omega0":
            problems.append("omega0: required")
        if env == "cavity":
            for key in CAVITY_ONLY:
                if key not in fixed and key != sweep:
                    problems.append(f"{key}: required for env=cavity")
        elif sweep in CAVITY_ONLY:
            problems.append(f"sweep: {sweep} needs env=cavity")

        if cyclic is True:
            for key in FREQUENCY_KEYS:
                if key in fixed:
                    fixed[key] *= 2 * math.pi
            if sweep in FREQUENCY_KEYS and lo is not None and hi is not None:
                lo, hi = lo * 2 * math.pi, hi * 2 * math.pi

        if not problems:
            # validate physical invariants at both ends of the sweep
            for end in (lo, hi):
                try:
                    transition_rates(*build_inputs({**fixed, sweep: end}))
                except RotcavError as exc:
                    problems.append(f"{sweep}={end:g}: {exc}")
        if problems:
            raise InvalidConfigError(problems)
        return cls(fixed, sweep, lo, hi, grid, points, tuple(outputs))

    def grid_values(self) -> np.ndarray:
        if self.grid == "log":
            return np.geomspace(self.lo, self.hi, self.points)
        return np.linspace(self.lo, self.hi, self.points)


def load_config(path) -> ScanConfig:
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix == ".toml":
            import tomllib  # Python >= 3.11

            doc = tomllib.loads(text)
        else:
            doc = json.loads(text)
    except ImportError:
        raise InvalidConfigError("config: TOML needs Python 3.11+; use JSON")
    except ValueError as exc:
        raise InvalidConfigError(f"config: cannot parse {path}: {exc}")
    if not isinstance(doc, dict):
        raise InvalidConfigError("config: top level must be a key/value mapping")
    return ScanConfig.from_mapping(doc)


def run_scan(config: ScanConfig, workers: int = 1) -> list[dict]:
    """Evaluate every grid point; records come back in grid order."""
    points = [{**config.fixed, config.sweep: float(v)} for v in config.grid_values()]

    def one(params):
        return evaluate(params, config.outputs)

    if workers <= 1:
        return [one(p) for p in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, points))


def records_to_csv(records: list[dict]) -> str:
    if not records:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(records[0])
    writer.writerow(header)
    for rec in records:
        row = []
        for key in header:
            val = rec[key]
            row.append(";".join(val) if key == "flags" else _fmt(val))
        writer.writerow(row)
    return buf.getvalue()


def records_to_json(records: list[dict]) -> str:
    # json writes floats with repr, which also round-trips exactly
    return json.dumps(records, indent=1) + "\n"


def params_from_record(rec: dict) -> dict:
    """Inverse of the echo in :func:`evaluate`."""
    params = {}
    for key, (col, _) in PARAMETERS.items():
        val = rec.get(col)
        if val is None or val == "":
            continue
        params[key] = val if key == "env" else float(val)
    return params


@dataclass(frozen=True)
class PeakSearch:
    omega_c: float
    rate: float
    step: float
    rounds: int


def find_peak_omega_c(
    atom: AtomSpec,
    motion: MotionSpec,
    q_factor: float,
    volume: float,
    direction: Direction | str,
    window: tuple[float, float],
    points: int = 200,
    rel_step: float = 1e-3,
    max_rounds: int = 60,
) -> PeakSearch:
    """Locate the cavity frequency maximizing the emission or excitation rate.

    A uniform grid over ``window`` is followed by repeated zooms onto the
    bracket around the best point until the grid step falls below
    ``rel_step`` cavity linewidths.  ``step`` in the result is that final
    grid step.
    """
    direction = Direction(direction)
    lo, hi = map(float, window)
    if not 0 < lo < hi:
        raise RotcavError(f"window must satisfy 0 < lo < hi, got {window}")
    if points < 100:
        raise RotcavError(f"points must be >= 100, got {points}")

    def rate(wc):
        res = transition_rates(atom, motion, CavitySpec(wc, q_factor, volume))
        return res.gamma_down if direction is Direction.EMISSION else res.gamma_up

    grid = np.linspace(lo, hi, points)
    vals = np.array([rate(w) for w in grid])
    i = int(np.argmax(vals))
    if i == 0 or i == points - 1:
        raise WindowExcludesPeakError(
            f"maximum on the window boundary at omega_c={grid[i]:g}"
        )
    rounds = 1
    step = grid[1] - grid[0]
    while step > rel_step * grid[i] / q_factor and rounds < max_rounds:
        grid = np.linspace(grid[i - 1], grid[i + 1], points)
        vals = np.array([rate(w) for w in grid])
        i = int(np.argmax(vals))
        step = grid[1] - grid[0]
        rounds += 1
    return PeakSearch(float(grid[i]), float(vals[i]), float(step), rounds)


@dataclass(frozen=True)
class Quantity:
    value: float
    source: str
    unit: str = ""


@dataclass
class ScenarioReport:
    name: str
    inputs: dict
    computed: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def add(self, key, value, source, unit=""):
        self.computed[key] = Quantity(float(value), source, unit)

    def value(self, key) -> float:
        return self.computed[key].value

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": dict(self.inputs),
            "computed": {k: {"value": q.value, "source": q.source, "unit": q.unit}
                         for k, q in self.computed.items()},
            "notes": list(self.notes),
        }


_BASE = {"d": 1e-29, "volume": 1e-14, "q": 1e7, "radius": 5e-8, "omega_rot": 5e9}
SCENARIOS = {
    "scenario1": {**_BASE, "omega0": 1e7, "omega_c": 5e9 - 1e7},
    "scenario2": {**_BASE, "omega0": 2.5e9, "omega_c": 2.5e9},
}
UNITS_NOTE = ("frequencies are angular (rad/s); '5 GHz' is read as 5e9 rad/s, "
              "which reproduces the ~1e-11 1/s free-space excitation rate")


def run_scenario(name: str) -> ScenarioReport:
    """Evaluate one of the two reference parameter sets end to end."""
    if name not in SCENARIOS:
        raise UnknownScenarioError(f"unknown scenario {name!r}; choose from {sorted(SCENARIOS)}")
    p = SCENARIOS[name]
    atom = AtomSpec.isotropic(p["omega0"], p["d"])
    motion = MotionSpec(p["radius"], p["omega_rot"])
    cavity = CavitySpec(p["omega_c"], p["q"], p["volume"])
    q, vol = p["q"], p["volume"]

    rep = ScenarioReport(name, dict(p), notes=[UNITS_NOTE])
    cav = transition_rates(atom, motion, cavity)
    free = transition_rates(atom, motion, FreeSpace())
    rep.add("gamma_up_cavity", cav.gamma_up, "engine.transition_rates[cavity]", "1/s")
    rep.add("gamma_down_cavity", cav.gamma_down, "engine.transition_rates[cavity]", "1/s")
    rep.add("gamma_up_free", free.gamma_up, "engine.transition_rates[free]", "1/s")
    rep.add("gamma_down_free", free.gamma_down, "engine.transition_rates[free]", "1/s")
    rep.add("gamma_up_free_closed_form", cf.free_space_rates(atom, motion).gamma_up,
            "closed_forms.free_space_rates", "1/s")
    rep.add("gamma_up_peak_closed_form",
            cf.excitation_peak_high_rotation(atom, motion, q, vol).rate_at_peak,
            "closed_forms.excitation_peak_high_rotation", "1/s")

    if name == "scenario1":
        rep.add("gamma_down_closed_form",
                cf.emission_at_excitation_peak_high(atom, motion, q, vol),
                "closed_forms.emission_at_excitation_peak_high", "1/s")
        enh = cf.enhancement_factor(atom, motion, q, vol, cf.EnhancementKind.EXCITATION_HIGH)
        rep.add("enhancement_nominal", enh.nominal, "closed_forms.enhancement_factor.nominal")
        rep.add("enhancement_exact", enh.exact, "closed_forms.enhancement_factor.exact")
        audit = cf.inversion_ratio_audit(atom.omega0, motion.omega_rot, q)
        rep.add("inversion_ratio_exact", audit.exact, "closed_forms.inversion_ratio_audit.exact")
        rep.add("inversion_ratio_approximate", audit.approximate,
                "closed_forms.inversion_ratio_audit.approximate")
        rep.add("inversion_ratio_factor", audit.factor, "closed_forms.inversion_ratio_audit.factor")
        rep.notes.append(audit.note)
    else:
        rep.add("gamma_down_closed_form",
                cf.rotating_emission_at_resonance(atom, motion, cavity),
                "closed_forms.rotating_emission_at_resonance", "1/s")
        rep.notes.append("coincidence: "
                         + cf.classify_coincidence(atom, motion).variant.value)

    rep.add("log10_gap_cavity_vs_free",
            math.log10(cav.gamma_up / free.gamma_up), "log10(gamma_up_cavity/gamma_up_free)")
    rep.add("log10_gap_up_vs_down",
            math.log10(cav.gamma_up / cav.gamma_down), "log10(gamma_up_cavity/gamma_down_cavity)")
    ss = steady_state(cav.gamma_up, cav.gamma_down)
    rep.add("p_excited_steady", ss.p_excited, "dynamics.steady_state")
    rep.add("p_ground_steady", ss.p_ground, "dynamics.steady_state")
    rep.add("relaxation_time", relaxation_time(cav.gamma_up, cav.gamma_down),
            "dynamics.relaxation_time", "s")
    rep.add("expected_jumps_per_s", expected_jump_rate(cav.gamma_up, cav.gamma_down),
            "dynamics.expected_jump_rate", "1/s")
    if cav.diagnostics:
        rep.notes.append("flags: " + ",".join(f.value for f in cav.diagnostics))
    return rep
