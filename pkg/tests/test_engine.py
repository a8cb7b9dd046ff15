import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from rotcav import closed_forms as cf
from rotcav.core import CODATA, AtomSpec, CavitySpec, FreeSpace, MotionSpec, response
from rotcav.engine import (
    Direction,
    Flag,
    Label,
    QuadratureParams,
    build_channels,
    response_oracle,
    transition_rates,
)
from rotcav.errors import QuadratureNotConvergedError, SuperluminalOrbitError

from .strategies import atoms, cavities, motions

D = 1e-29
LEADING = {Label.Z_RESONANT, Label.TRANSVERSE_PLUS, Label.TRANSVERSE_MINUS,
           Label.COUNTER_ROTATING}


def test_inertial_channels():
    chans = build_channels(AtomSpec.isotropic(1e7, D), MotionSpec(5e-8, 0.0))
    assert [c.label for c in chans] == [Label.Z_RESONANT, Label.TRANSVERSE_PLUS,
                                        Label.TRANSVERSE_MINUS]
    assert all(c.frequency == 1e7 and c.direction is Direction.EMISSION for c in chans)


def test_fast_rotation_channels():
    chans = {c.label: c for c in build_channels(AtomSpec.isotropic(1e7, D), MotionSpec(5e-8, 5e9))}
    assert set(chans) == {Label.Z_RESONANT, Label.TRANSVERSE_PLUS,
                          Label.COUNTER_ROTATING, Label.SECOND_HARMONIC}
    assert chans[Label.Z_RESONANT].frequency == 1e7
    assert chans[Label.TRANSVERSE_PLUS].frequency == 5.01e9
    assert chans[Label.COUNTER_ROTATING].frequency == 4.99e9
    assert chans[Label.SECOND_HARMONIC].frequency == 9.99e9
    assert chans[Label.SECOND_HARMONIC].velocity_order == 2
    assert chans[Label.COUNTER_ROTATING].velocity_order == 0


def test_counter_rotating_meets_resonance_at_twice_omega0():
    chans = {c.label: c for c in build_channels(AtomSpec.isotropic(2.5e9, D), MotionSpec(5e-8, 5e9))}
    assert chans[Label.COUNTER_ROTATING].frequency == chans[Label.Z_RESONANT].frequency == 2.5e9


def test_channel_amplitudes():
    atom = AtomSpec(1e9, 1e-29, 2e-29, 3e-29)
    motion = MotionSpec(1e-7, 0.8e9)
    eh = CODATA.eps0 * CODATA.hbar
    chans = {c.label: c for c in build_channels(atom, motion)}
    assert chans[Label.Z_RESONANT].amplitude == pytest.approx(1e9 * 9e-58 / (3 * eh), rel=1e-14)
    assert chans[Label.TRANSVERSE_MINUS].amplitude == pytest.approx(0.2e9 * 5e-58 / (6 * eh), rel=1e-12)
    sh = chans[Label.SECOND_HARMONIC]
    assert sh.frequency == pytest.approx(0.6e9)
    assert sh.amplitude == pytest.approx(1e-14 * 0.6e9**3 * 5e-58 / (40 * CODATA.c**2 * eh), rel=1e-12)
    assert Label.COUNTER_ROTATING not in chans


def test_scenario1_rates(scenario1):
    atom, motion, cav = scenario1
    res = transition_rates(atom, motion, cav)
    # 40-digit evaluation of the peak formula
    assert res.gamma_up == pytest.approx(3.5698819469242435e7, rel=1e-9)
    assert res.contribution(Label.COUNTER_ROTATING) / res.gamma_up > 1 - 1e-12
    free = transition_rates(atom, motion, FreeSpace())
    assert free.gamma_up == pytest.approx(5.240147479181497e-11, rel=1e-9)
    assert res.diagnostics == ()


def test_scenario2_rates(scenario2):
    atom, motion, cav = scenario2
    res = transition_rates(atom, motion, cav)
    assert res.gamma_down == pytest.approx(3.569881946924270e7, rel=1e-12)
    assert res.gamma_up == pytest.approx(3.5698819469242435e7, rel=1e-12)
    assert Flag.PEAK_OVERLAP in res.diagnostics


def test_inertial_free_space():
    atom = AtomSpec(1e7, 1e-29, 2e-29, 3e-29)
    res = transition_rates(atom, MotionSpec(0.0, 0.0), FreeSpace())
    expected = 1e21 * 14e-58 / (3 * math.pi * CODATA.eps0 * CODATA.hbar * CODATA.c**3)
    assert res.gamma_down == pytest.approx(expected, rel=1e-13)
    assert res.gamma_up == 0.0
    assert Flag.BELOW_LEADING_ORDER in res.diagnostics
    # isotropic 1e-29 C m at 1e7 rad/s (40-digit reference)
    iso = transition_rates(AtomSpec.isotropic(1e7, D), MotionSpec(), FreeSpace())
    assert iso.gamma_down == pytest.approx(1.265211491536572e-18, rel=1e-12)


def test_diagnostics():
    atom = AtomSpec.isotropic(1e9, D)
    fast = MotionSpec(0.2 * CODATA.c / 2e9, 2e9)
    assert Flag.NON_RELATIVISTIC_STRAINED in transition_rates(atom, fast, FreeSpace()).diagnostics
    lowq = CavitySpec(1e9, 50, 1e-14)
    assert Flag.LOW_Q in transition_rates(atom, MotionSpec(), lowq).diagnostics
    assert Flag.LOW_Q not in transition_rates(atom, MotionSpec(), FreeSpace()).diagnostics
    with pytest.raises(SuperluminalOrbitError):
        transition_rates(atom, MotionSpec(1.0, 3e8), FreeSpace())


def test_result_invariants(scenario1):
    res = transition_rates(*scenario1)
    down = sum(r for c, r in res.channels if c.direction is Direction.EMISSION)
    up = sum(r for c, r in res.channels if c.direction is Direction.EXCITATION)
    assert res.gamma_down == down and res.gamma_up == up
    assert res.gamma_lorentz > 1 and res.omega_lab < 1e7


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_cavity_equivalence(data):
    atom = data.draw(atoms())
    motion = data.draw(motions(atom.omega0))
    cav = data.draw(cavities(atom.omega0))
    res = transition_rates(atom, motion, cav)
    down, up = res.subset(LEADING)
    assert down == pytest.approx(cf.cavity_emission_rate(atom, motion, cav), rel=1e-12, abs=0)
    if motion.omega_rot > atom.omega0:
        assert up == pytest.approx(cf.cavity_excitation_rate(atom, motion, cav), rel=1e-12, abs=0)
    elif 2 * motion.omega_rot > atom.omega0:
        assert res.gamma_up == pytest.approx(cf.cavity_excitation_rate(atom, motion, cav),
                                             rel=1e-12, abs=0)
    else:
        assert res.gamma_up == 0 and cf.cavity_excitation_rate(atom, motion, cav) == 0


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_free_space_equivalence(data):
    atom = data.draw(atoms())
    motion = data.draw(motions(atom.omega0))
    res = transition_rates(atom, motion, FreeSpace())
    ref = cf.free_space_rates(atom, motion)
    down, up = res.subset(LEADING)
    assert res.gamma_down == pytest.approx(ref.gamma_down, rel=1e-12, abs=0)
    if motion.omega_rot > atom.omega0:
        assert up == pytest.approx(ref.gamma_up, rel=1e-12, abs=0)
    else:
        assert res.gamma_up == pytest.approx(ref.gamma_up, rel=1e-12, abs=0)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_contributions_non_negative(data):
    atom = data.draw(atoms())
    motion = data.draw(motions(atom.omega0))
    env = data.draw(st.one_of(st.just(FreeSpace()), cavities(atom.omega0)))
    res = transition_rates(atom, motion, env)
    assert all(r >= 0 for _, r in res.channels)
    assert all(c.frequency > 0 for c, _ in res.channels)


@settings(max_examples=100, deadline=None)
@given(st.data(), st.floats(1.5, 10))
def test_scaling(data, k):
    atom = data.draw(atoms())
    motion = data.draw(motions(atom.omega0, lo=1.1))
    # exact channel resonance: contribution linear in Q
    target = motion.omega_rot - atom.omega0
    for q in (1e4, 1e6):
        a = transition_rates(atom, motion, CavitySpec(target, q, 1e-14)).contribution(Label.COUNTER_ROTATING)
        b = transition_rates(atom, motion, CavitySpec(target, k * q, 1e-14)).contribution(Label.COUNTER_ROTATING)
        assert b == pytest.approx(k * a, rel=1e-12)
    cav = CavitySpec(target * 1.3, 1e5, 1e-14)
    big = CavitySpec(target * 1.3, 1e5, k * 1e-14)
    for (c1, r1), (c2, r2) in zip(transition_rates(atom, motion, cav).channels,
                                  transition_rates(atom, motion, big).channels):
        assert r2 == pytest.approx(r1 / k, rel=1e-12)
    scaled = AtomSpec(atom.omega0, atom.d_rho * math.sqrt(k), atom.d_phi * math.sqrt(k),
                      atom.d_z * math.sqrt(k))
    assert transition_rates(scaled, motion, cav).gamma_up == pytest.approx(
        k * transition_rates(atom, motion, cav).gamma_up, rel=1e-12)


def test_continuity_at_omega0():
    atom = AtomSpec.isotropic(1e9, D)
    env = CavitySpec(3e9, 1e3, 1e-14)
    rots = 1e9 + np.linspace(-1e6, 1e6, 1000) + 1e3  # omega0 falls between grid points
    up = np.array([transition_rates(atom, MotionSpec(1e-3, r), env).gamma_up for r in rots])
    steps = np.abs(np.diff(up))
    k = int(np.searchsorted(rots, 1e9)) - 1
    assert steps[k] <= max(steps[k - 1], steps[k + 1])


class TestOracle:
    @pytest.mark.parametrize("q", [1e3, 1e5, 1e7])
    def test_on_resonance(self, q):
        cav = CavitySpec(2.5e9, q, 1e-14)
        assert response_oracle(cav, 2.5e9) == pytest.approx(response(cav, 2.5e9), rel=1e-6)

    def test_reference_value(self):
        cav = CavitySpec(2.5e9, 1e7, 1e-14)
        assert response_oracle(cav, 2.5e9) == pytest.approx(4e11, rel=1e-6)

    def test_half_width(self):
        cav = CavitySpec(2.5e9, 1e7, 1e-14)
        on = response_oracle(cav, cav.omega_c)
        off = response_oracle(cav, cav.omega_c + cav.linewidth)
        assert off == pytest.approx(on / 2, rel=1e-6)

    def test_short_truncation_rejected(self):
        cav = CavitySpec(2.5e9, 1e7, 1e-14)
        with pytest.raises(QuadratureNotConvergedError):
            response_oracle(cav, cav.omega_c, QuadratureParams(truncation=0.5 / cav.linewidth))

    def test_node_budget(self):
        cav = CavitySpec(2.5e9, 1e7, 1e-14)
        with pytest.raises(QuadratureNotConvergedError):
            response_oracle(cav, cav.omega_c + 1e6 * cav.linewidth)
