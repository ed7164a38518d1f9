"""Quasi-static slip and lowering simulation.

The model is massless and inertia-free: at every step the applied tension is
compared against the capstan-amplified holding capacity. While the applied
tension exceeds capacity, the tether slips; slip distance feeds back into
the effective holding force through substrate mounding (monotone gain that
saturates) and stick-slip (a deterministic triangle-wave modulation), and
may trigger a geometric snag that multiplies capacity outright. There is no
hidden randomness: identical scenarios produce bit-identical traces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .mechanics import Wrap, serial_amplification

#: Slip rate per newton of capacity excess (m per N*s). A normalization
#: constant: event ordering and asymptotics carry the physics, not the rate.
SLIP_COMPLIANCE = 1.0


class EventKind(enum.Enum):
    SLIP_ONSET = "SLIP_ONSET"
    ARREST = "ARREST"
    SNAG = "SNAG"
    RUNAWAY = "RUNAWAY"


@dataclass(frozen=True)
class Event:
    time: float
    kind: EventKind


@dataclass(frozen=True)
class Sample:
    t: float
    applied_tension: float
    effective_t0: float
    capacity: float
    slipping: bool
    slip_distance: float


@dataclass(frozen=True)
class SlipTrace:
    samples: tuple[Sample, ...]
    events: tuple[Event, ...]


@dataclass(frozen=True)
class LoadProfile:
    """Piecewise-linear applied tension vs time; clamped outside the table."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise DomainError("load profile needs at least one point")
        times = [t for t, _ in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("load profile times must be strictly increasing")
        if any(v < 0.0 for _, v in pts):
            raise DomainError("load profile tensions must be >= 0")

    def __call__(self, t: float) -> float:
        times = [p[0] for p in self.points]
        vals = [p[1] for p in self.points]
        return float(np.interp(t, times, vals))


@dataclass(frozen=True)
class Substrate:
    """Holding-force feedback of the ground under the dragged agent.

    mounding_gain is the fractional holding-force increase at full mounding;
    the increase ramps linearly with slip distance and saturates at
    mounding_saturation_distance. stick_slip_fraction modulates the holding
    force by a triangle wave of the given wavelength in slip distance.
    """

    stick_slip_fraction: float = 0.0
    mounding_gain: float = 0.0
    mounding_saturation_distance: float = 1.0
    stick_slip_wavelength: float = 0.05

    def __post_init__(self):
        if not (0.0 <= self.stick_slip_fraction < 1.0):
            raise DomainError("stick_slip_fraction must be in [0, 1)")
        if self.mounding_gain < 0.0:
            raise DomainError("mounding_gain must be >= 0")
        if self.mounding_saturation_distance <= 0.0:
            raise DomainError("mounding_saturation_distance must be > 0")
        if self.stick_slip_wavelength <= 0.0:
            raise DomainError("stick_slip_wavelength must be > 0")

    def effective_t0(self, t0_base: float, slip_distance: float) -> float:
        mound = 1.0 + self.mounding_gain * min(
            slip_distance / self.mounding_saturation_distance, 1.0)
        wobble = 1.0 + self.stick_slip_fraction * _triangle_wave(
            slip_distance / self.stick_slip_wavelength)
        return t0_base * mound * wobble


#: Substrate presets matching the two characterized drag surfaces.
MULCH = Substrate(stick_slip_fraction=0.70)
PLYWOOD = Substrate(stick_slip_fraction=0.38)


def _triangle_wave(x: float) -> float:
    """Unit-period triangle wave in [-1, 1] with f(0) = 0, rising first."""
    phase = x % 1.0
    if phase < 0.25:
        return 4.0 * phase
    if phase < 0.75:
        return 2.0 - 4.0 * phase
    return 4.0 * phase - 4.0


@dataclass(frozen=True)
class SnagSpec:
    """Geometric pinning: once slip reaches the trigger distance, capacity
    is multiplied by ``multiplier`` for the rest of the run."""

    at_slip_distance: float
    multiplier: float = 3.0

    def __post_init__(self):
        if self.at_slip_distance < 0.0:
            raise DomainError("snag trigger distance must be >= 0")
        if self.multiplier < 1.0:
            raise DomainError("snag multiplier must be >= 1")


@dataclass(frozen=True)
class SlipScenario:
    wraps: tuple[Wrap, ...]
    t0_base: float
    load_profile: LoadProfile
    substrate: Substrate = Substrate()
    snag: Optional[SnagSpec] = None
    dt: float = 0.01
    duration: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "wraps", tuple(self.wraps))
        if self.t0_base <= 0.0:
            raise DomainError("t0_base must be > 0")
        if self.dt <= 0.0:
            raise DomainError("dt must be > 0")
        if self.duration <= 0.0:
            raise DomainError("duration must be > 0")


@dataclass(frozen=True)
class PayoutPolicy:
    """Commanded payout rate (m/s) vs time, zero-order hold between rows."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        pts = tuple((float(t), float(v)) for t, v in self.points)
        object.__setattr__(self, "points", pts)
        if not pts:
            raise DomainError("payout policy needs at least one point")
        times = [t for t, _ in pts]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("payout times must be strictly increasing")
        if any(v < 0.0 for _, v in pts):
            raise DomainError("payout rates must be >= 0")

    def __call__(self, t: float) -> float:
        rate = self.points[0][1] if t >= self.points[0][0] else 0.0
        for pt, pv in self.points:
            if pt <= t:
                rate = pv
            else:
                break
        return rate


@dataclass(frozen=True)
class LoweringScenario:
    payload_weight: float
    wraps: tuple[Wrap, ...]
    agent_t0_max: float
    payout_policy: PayoutPolicy
    dt: float = 0.01
    duration: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "wraps", tuple(self.wraps))
        if self.payload_weight <= 0.0:
            raise DomainError("payload_weight must be > 0")
        if self.agent_t0_max <= 0.0:
            raise DomainError("agent_t0_max must be > 0")
        if self.dt <= 0.0 or self.duration <= 0.0:
            raise DomainError("dt and duration must be > 0")


def _time_grid(dt: float, duration: float) -> list[float]:
    n = int(round(duration / dt))
    n = max(n, 1)
    return [i * dt for i in range(n + 1)]


def simulate_pull(scenario: SlipScenario) -> SlipTrace:
    """Pull on the tether per the load profile and track slip behavior.

    Per step: capacity = A_F * effective_T0 (* snag multiplier once the slip
    distance has reached the trigger); the tether slips iff the applied
    tension exceeds capacity, advancing slip distance at SLIP_COMPLIANCE
    times the excess. Events mark threshold crossings; RUNAWAY is recorded
    if the tether is still slipping when the run ends.
    """
    af = serial_amplification(scenario.wraps)
    sub = scenario.substrate
    snag = scenario.snag

    samples: list[Sample] = []
    events: list[Event] = []
    s = 0.0
    was_slipping = False
    snag_seen = False

    for t in _time_grid(scenario.dt, scenario.duration):
        applied = scenario.load_profile(t)
        snag_active = snag is not None and s >= snag.at_slip_distance
        if snag_active and not snag_seen:
            snag_seen = True
            events.append(Event(t, EventKind.SNAG))
        eff_t0 = sub.effective_t0(scenario.t0_base, s)
        capacity = af * eff_t0 * (snag.multiplier if snag_active else 1.0)
        slipping = applied > capacity
        if slipping and not was_slipping:
            events.append(Event(t, EventKind.SLIP_ONSET))
        elif was_slipping and not slipping:
            events.append(Event(t, EventKind.ARREST))
        samples.append(Sample(t, applied, eff_t0, capacity, slipping, s))
        if slipping:
            s += scenario.dt * SLIP_COMPLIANCE * (applied - capacity)
        was_slipping = slipping

    if was_slipping:
        events.append(Event(samples[-1].t, EventKind.RUNAWAY))
    return SlipTrace(tuple(samples), tuple(events))


def simulate_lowering(scenario: LoweringScenario) -> SlipTrace:
    """Lower a payload by paying out tether through the wraps.

    The holding-side requirement is payload_weight / A_F. If it exceeds the
    agent's holding capacity the payload runs away immediately (uncontrolled;
    the trace ends at the RUNAWAY event). Otherwise the payload descends at
    the commanded payout rate, and an ARREST event is recorded whenever the
    rate transitions to zero (including an initial standstill).

    In the trace, applied_tension is the payload weight, effective_t0 the
    holding-side requirement, capacity the largest supportable load
    (A_F * agent_t0_max), and slip_distance the descent.
    """
    af = serial_amplification(scenario.wraps)
    requirement = scenario.payload_weight / af
    capacity = af * scenario.agent_t0_max

    samples: list[Sample] = []
    events: list[Event] = []
    descent = 0.0
    was_moving: Optional[bool] = None

    for t in _time_grid(scenario.dt, scenario.duration):
        if requirement > scenario.agent_t0_max:
            samples.append(Sample(t, scenario.payload_weight, requirement,
                                  capacity, True, descent))
            events.append(Event(t, EventKind.RUNAWAY))
            break
        rate = scenario.payout_policy(t)
        moving = rate > 0.0
        if not moving and was_moving is not False:
            events.append(Event(t, EventKind.ARREST))
        samples.append(Sample(t, scenario.payload_weight, requirement,
                              capacity, moving, descent))
        descent += rate * scenario.dt
        was_moving = moving

    return SlipTrace(tuple(samples), tuple(events))
