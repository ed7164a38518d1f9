"""Closed-form capstan mechanics.

A tether wrapped around a fixed object by an angle theta with tether-object
friction mu sustains a load-to-holding tension ratio of exp(mu * theta).
Wraps in series add their exponents; tethers in parallel add their amplified
tension vectors. All angles are radians, all forces newtons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DomainError

UNIT_NORM_TOL = 1e-9


def _check_unit(v: Sequence[float], name: str) -> tuple[float, float]:
    x, y = float(v[0]), float(v[1])
    if abs(math.hypot(x, y) - 1.0) > UNIT_NORM_TOL:
        raise DomainError(f"{name} must be a unit vector, got ({x}, {y})")
    return (x, y)


@dataclass(frozen=True)
class Wrap:
    """One tether-object contact: friction coefficient and wrap angle (rad).

    theta may exceed 2*pi for multiple turns.
    """

    mu: float
    theta: float

    def __post_init__(self):
        if self.mu < 0.0:
            raise DomainError(f"mu must be >= 0, got {self.mu}")
        if self.theta < 0.0:
            raise DomainError(f"theta must be >= 0, got {self.theta}")


@dataclass(frozen=True)
class TensionBranch:
    """One agent's tether: holding force, its wrap, and the unit pull direction."""

    holding_force: float
    wrap: Wrap
    direction: tuple[float, float]

    def __post_init__(self):
        if self.holding_force < 0.0:
            raise DomainError(f"holding_force must be >= 0, got {self.holding_force}")
        object.__setattr__(self, "direction", _check_unit(self.direction, "direction"))

    @property
    def capacity(self) -> float:
        """Maximum load-side tension this branch can sustain."""
        return self.holding_force * amplification_factor(self.wrap)


@dataclass(frozen=True)
class ReactionInput:
    """End tensions and outward tether directions at one contact region.

    Both direction vectors point along the tether away from the contact
    region (toward the holding agent and toward the load, respectively).
    """

    tension_hold: float
    tension_load: float
    dir_hold: tuple[float, float]
    dir_load: tuple[float, float]

    def __post_init__(self):
        if self.tension_hold < 0.0 or self.tension_load < 0.0:
            raise DomainError("tensions must be >= 0")
        object.__setattr__(self, "dir_hold", _check_unit(self.dir_hold, "dir_hold"))
        object.__setattr__(self, "dir_load", _check_unit(self.dir_load, "dir_load"))


def amplification_factor(wrap: Wrap) -> float:
    """Tension amplification exp(mu * theta) of a single wrap; always >= 1."""
    return math.exp(wrap.mu * wrap.theta)


def serial_amplification(wraps: Iterable[Wrap]) -> float:
    """Amplification of wraps in series: exp(sum of mu_i * theta_i).

    The exponent is accumulated with an exactly-rounded sum, so the result
    is identical under any permutation of the wrap list. An empty list
    gives 1.0.
    """
    return math.exp(math.fsum(w.mu * w.theta for w in wraps))


def holding_requirement(load_tension: float, wraps: Iterable[Wrap]) -> float:
    """Holding force needed to sustain ``load_tension`` through serial wraps."""
    if load_tension < 0.0:
        raise DomainError(f"load_tension must be >= 0, got {load_tension}")
    return load_tension / serial_amplification(wraps)


def parallel_net_tension(branches: Iterable[TensionBranch]) -> tuple[float, float]:
    """Net load-point tension vector of parallel branches at slip onset.

    Each branch contributes holding_force * exp(mu * theta) along its unit
    direction; contributions sum componentwise.
    """
    xs, ys = [], []
    for b in branches:
        t = b.capacity
        xs.append(t * b.direction[0])
        ys.append(t * b.direction[1])
    return (math.fsum(xs), math.fsum(ys))


def sensitivity(wrap: Wrap) -> tuple[float, float]:
    """Partial derivatives (dA/dmu, dA/dtheta) of the amplification factor.

    dA/dmu = theta * exp(mu*theta), dA/dtheta = mu * exp(mu*theta).
    """
    a = amplification_factor(wrap)
    return (wrap.theta * a, wrap.mu * a)


def capstan_reaction(inp: ReactionInput) -> tuple[float, float]:
    """Net force the tether exerts on the capstan object.

    Quasi-static free body of the massless contact segment: the object
    reacts the vector sum of the two end tensions, so the force on the
    object is T_hold*dir_hold + T_load*dir_load. Its magnitude never
    exceeds T_hold + T_load.
    """
    fx = inp.tension_hold * inp.dir_hold[0] + inp.tension_load * inp.dir_load[0]
    fy = inp.tension_hold * inp.dir_hold[1] + inp.tension_load * inp.dir_load[1]
    return (fx, fy)
