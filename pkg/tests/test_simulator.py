"""Unit tests for the quasi-static slip and lowering simulator."""

import math

import pytest

from capstan.errors import DomainError
from capstan.mechanics import Wrap, serial_amplification
from capstan.simulator import (
    EventKind,
    LoadProfile,
    LoweringScenario,
    PayoutPolicy,
    SlipScenario,
    SnagSpec,
    Substrate,
    simulate_lowering,
    simulate_pull,
)

WRAPS = (Wrap(0.3, 2 * math.pi),)
AF = serial_amplification(WRAPS)
T0 = 2.0
THRESHOLD = AF * T0


def _ramp(peak, t_peak=5.0, hold_until=None):
    pts = [(0.0, 0.0), (t_peak, peak)]
    if hold_until is not None:
        pts.append((hold_until, peak))
    return LoadProfile(tuple(pts))


def _events(trace, kind):
    return [e for e in trace.events if e.kind is kind]


# ---------------------------------------------------------------------------
# simulate_pull
# ---------------------------------------------------------------------------

def test_below_threshold_never_slips():
    sc = SlipScenario(WRAPS, T0, _ramp(0.9 * THRESHOLD), dt=0.01, duration=5.0)
    trace = simulate_pull(sc)
    assert trace.events == ()
    assert trace.samples[-1].slip_distance == 0.0
    assert all(not s.slipping for s in trace.samples)


def test_slip_onset_within_one_dt_of_crossing():
    dt = 0.01
    sc = SlipScenario(WRAPS, T0, _ramp(2.0 * THRESHOLD, t_peak=4.0),
                      dt=dt, duration=4.0)
    trace = simulate_pull(sc)
    onsets = _events(trace, EventKind.SLIP_ONSET)
    assert len(onsets) == 1
    t_cross = 4.0 / 2.0   # applied crosses A_F*T0 exactly halfway up the ramp
    assert 0.0 <= onsets[0].time - t_cross <= dt + 1e-12


def test_hysteresis_free_without_feedbacks():
    sc = SlipScenario(WRAPS, T0, _ramp(1.5 * THRESHOLD, 2.0, hold_until=10.0),
                      dt=0.01, duration=10.0)
    trace = simulate_pull(sc)
    for s in trace.samples:
        assert s.slipping == (s.applied_tension > THRESHOLD)
        assert s.capacity == pytest.approx(THRESHOLD, rel=1e-12)


def test_runaway_when_slip_persists():
    sc = SlipScenario(WRAPS, T0, _ramp(1.5 * THRESHOLD, 2.0, hold_until=10.0),
                      dt=0.01, duration=10.0)
    trace = simulate_pull(sc)
    runaways = _events(trace, EventKind.RUNAWAY)
    assert len(runaways) == 1
    assert runaways[0].time == pytest.approx(10.0)


def test_mounding_arrests_and_saturates_at_33_percent():
    # overdrive past saturation, then ease off below the mounded capacity:
    # the slip arrests and the holding force settles at exactly 1.33 * T0
    prof = LoadProfile((
        (0.0, 0.0), (2.0, 1.5 * THRESHOLD), (6.0, 1.5 * THRESHOLD),
        (6.5, 1.2 * THRESHOLD), (20.0, 1.2 * THRESHOLD)))
    sc = SlipScenario(WRAPS, T0, prof,
                      substrate=Substrate(mounding_gain=0.33,
                                          mounding_saturation_distance=1.0),
                      dt=0.005, duration=20.0)
    trace = simulate_pull(sc)
    kinds = [e.kind for e in trace.events]
    assert kinds == [EventKind.SLIP_ONSET, EventKind.ARREST]
    assert trace.samples[-1].effective_t0 == pytest.approx(1.33 * T0, abs=1e-6)
    assert trace.samples[-1].capacity == pytest.approx(1.33 * THRESHOLD, abs=1e-5)
    assert not trace.samples[-1].slipping


def test_effective_t0_bounds():
    sub = Substrate(stick_slip_fraction=0.38, mounding_gain=0.33)
    sc = SlipScenario(WRAPS, T0, _ramp(2.0 * THRESHOLD, 2.0, hold_until=8.0),
                      substrate=sub, dt=0.01, duration=8.0)
    trace = simulate_pull(sc)
    lo = T0 * (1 - 0.38)
    hi = T0 * (1 + 0.33) * (1 + 0.38)
    for s in trace.samples:
        assert lo - 1e-12 <= s.effective_t0 <= hi + 1e-12
        assert s.capacity >= AF * T0 * (1 - 0.38) - 1e-12


def test_slip_distance_is_nondecreasing():
    sub = Substrate(stick_slip_fraction=0.7, mounding_gain=0.33)
    sc = SlipScenario(WRAPS, T0, _ramp(2.5 * THRESHOLD, 1.0, hold_until=6.0),
                      substrate=sub, snag=SnagSpec(0.4, 3.0),
                      dt=0.01, duration=6.0)
    trace = simulate_pull(sc)
    dists = [s.slip_distance for s in trace.samples]
    assert all(b >= a for a, b in zip(dists, dists[1:]))


def test_snag_multiplies_capacity_exactly():
    sc = SlipScenario(WRAPS, T0, _ramp(2.0 * THRESHOLD, 1.0, hold_until=10.0),
                      snag=SnagSpec(at_slip_distance=0.3, multiplier=3.0),
                      dt=0.01, duration=10.0)
    trace = simulate_pull(sc)
    snags = _events(trace, EventKind.SNAG)
    assert len(snags) == 1
    t_snag = snags[0].time
    for s in trace.samples:
        expected = AF * s.effective_t0 * (3.0 if s.t >= t_snag else 1.0)
        assert s.capacity == pytest.approx(expected, rel=1e-12)
    # a 3x snag beats a 2x overload: the slip must arrest
    assert _events(trace, EventKind.ARREST)
    assert not trace.samples[-1].slipping


def test_event_times_converge_first_order_in_dt():
    prof = LoadProfile((
        (0.0, 0.0), (2.0, 1.5 * THRESHOLD), (6.0, 1.5 * THRESHOLD),
        (6.5, 1.2 * THRESHOLD), (20.0, 1.2 * THRESHOLD)))

    def run(dt):
        sc = SlipScenario(WRAPS, T0, prof,
                          substrate=Substrate(mounding_gain=0.33),
                          snag=SnagSpec(0.5, 3.0), dt=dt, duration=20.0)
        return simulate_pull(sc)

    coarse, fine = run(0.02), run(0.01)
    kinds_coarse = [e.kind for e in coarse.events]
    kinds_fine = [e.kind for e in fine.events]
    assert kinds_coarse == kinds_fine
    for ec, ef in zip(coarse.events, fine.events):
        assert abs(ec.time - ef.time) <= 0.02 + 1e-12


def test_traces_are_bit_reproducible():
    sub = Substrate(stick_slip_fraction=0.7, mounding_gain=0.33)
    sc = SlipScenario(WRAPS, T0, _ramp(2.0 * THRESHOLD, 1.5, hold_until=7.0),
                      substrate=sub, snag=SnagSpec(0.2), dt=0.01, duration=7.0)
    t1, t2 = simulate_pull(sc), simulate_pull(sc)
    assert t1 == t2


def test_invalid_scenarios_rejected():
    with pytest.raises(DomainError):
        SlipScenario(WRAPS, 0.0, _ramp(1.0))
    with pytest.raises(DomainError):
        SlipScenario(WRAPS, 1.0, _ramp(1.0), dt=0.0)
    with pytest.raises(DomainError):
        Substrate(stick_slip_fraction=1.0)
    with pytest.raises(DomainError):
        LoadProfile(((0.0, 1.0), (0.0, 2.0)))
    with pytest.raises(DomainError):
        SnagSpec(0.5, multiplier=0.5)


# ---------------------------------------------------------------------------
# simulate_lowering
# ---------------------------------------------------------------------------

def test_lowering_arrest_when_wrapped():
    # 20 N payload through A_F = 10 needs 2 N <= 3 N available: holds
    wraps = (Wrap(math.log(10.0) / (2 * math.pi), 2 * math.pi),)
    sc = LoweringScenario(20.0, wraps, 3.0, PayoutPolicy(((0.0, 0.0),)),
                          dt=0.1, duration=3.0)
    trace = simulate_lowering(sc)
    assert [e.kind for e in trace.events] == [EventKind.ARREST]
    assert trace.samples[-1].slip_distance == 0.0
    assert trace.samples[0].effective_t0 == pytest.approx(2.0, rel=1e-12)


def test_lowering_runaway_without_wraps():
    sc = LoweringScenario(20.0, (), 3.0, PayoutPolicy(((0.0, 0.0),)),
                          dt=0.1, duration=3.0)
    trace = simulate_lowering(sc)
    assert [e.kind for e in trace.events] == [EventKind.RUNAWAY]
    assert trace.events[0].time == 0.0
    assert len(trace.samples) == 1


def test_lowering_descent_kinematics():
    wraps = (Wrap(0.38, 4 * math.pi),)
    sc = LoweringScenario(20.0, wraps, 3.0, PayoutPolicy(((0.0, 0.1),)),
                          dt=0.1, duration=5.0)
    trace = simulate_lowering(sc)
    assert trace.samples[-1].slip_distance == pytest.approx(0.5, abs=1e-9)
    assert trace.events == ()


def test_lowering_then_arrest_on_payout_stop():
    wraps = (Wrap(0.38, 4 * math.pi),)
    policy = PayoutPolicy(((0.0, 0.2), (2.0, 0.0)))
    sc = LoweringScenario(20.0, wraps, 3.0, policy, dt=0.1, duration=5.0)
    trace = simulate_lowering(sc)
    arrests = _events(trace, EventKind.ARREST)
    assert len(arrests) == 1
    assert arrests[0].time == pytest.approx(2.0)
    assert trace.samples[-1].slip_distance == pytest.approx(0.2 * 2.0, abs=1e-9)


def test_lowering_trace_reproducible():
    wraps = (Wrap(0.38, 4 * math.pi),)
    sc = LoweringScenario(20.0, wraps, 3.0,
                          PayoutPolicy(((0.0, 0.1), (1.0, 0.0), (2.0, 0.3))),
                          dt=0.05, duration=4.0)
    assert simulate_lowering(sc) == simulate_lowering(sc)
