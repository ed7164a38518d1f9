"""Friction estimation from slip tests and surface-class statistics.

The capstan model ln(T/T0) = mu * theta is linear through the origin in the
log domain, so the friction coefficient is fit by through-origin least
squares on log tension ratios. Per-object fits aggregate into surface-class
statistics used for planning.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as _scipy_stats

from .errors import DegenerateDataError, DomainError, UnknownSurfaceClassError


@dataclass(frozen=True)
class SlipMeasurement:
    """One slip-onset observation: wrap angle (rad) and tension at first slip (N)."""

    object_id: str
    wrap_angle: float
    slip_tension: float

    def __post_init__(self):
        if self.wrap_angle < 0.0:
            raise DomainError(f"wrap_angle must be >= 0, got {self.wrap_angle}")
        if self.slip_tension <= 0.0:
            raise DomainError(f"slip_tension must be > 0, got {self.slip_tension}")


@dataclass(frozen=True)
class BaselineSet:
    """Unwrapped first-slip peak forces for one object's test session."""

    object_id: str
    peak_forces: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "peak_forces", tuple(float(f) for f in self.peak_forces))
        if not self.peak_forces:
            raise DomainError("peak_forces must be nonempty")
        if any(f <= 0.0 for f in self.peak_forces):
            raise DomainError("all peak forces must be > 0")


@dataclass(frozen=True)
class FrictionFit:
    """Estimated friction coefficient for one object with a 95% CI.

    residual_rms is the root-mean-square residual in the log domain.
    """

    object_id: str
    mu_hat: float
    ci95: tuple[float, float]
    residual_rms: float
    n_points: int


@dataclass(frozen=True)
class SurfaceClassStats:
    """Friction statistics for one surface class, over its fitted objects."""

    mu_mean: float
    mu_std: float
    mu_min: float
    mu_max: float
    n_objects: int
    note: str = ""

    def __post_init__(self):
        if not (self.mu_min <= self.mu_mean <= self.mu_max):
            raise DomainError("require mu_min <= mu_mean <= mu_max")
        if self.mu_std < 0.0:
            raise DomainError("mu_std must be >= 0")
        if self.n_objects < 1:
            raise DomainError("n_objects must be >= 1")


class MuPolicy(enum.Enum):
    """How to pick a design friction value from class statistics.

    MEAN for nominal planning, MIN for safety-critical bounds, LOWER95 for
    the lower 95% confidence bound on the class mean.
    """

    MEAN = "mean"
    MIN = "min"
    LOWER95 = "lower95"


def design_mu(stats: SurfaceClassStats, policy: MuPolicy) -> float:
    if policy is MuPolicy.MEAN:
        return stats.mu_mean
    if policy is MuPolicy.MIN:
        return stats.mu_min
    if policy is MuPolicy.LOWER95:
        return stats.mu_mean - 1.96 * stats.mu_std / math.sqrt(stats.n_objects)
    raise DomainError(f"unknown mu policy {policy!r}")


class FrictionLibrary:
    """Map of surface class name -> SurfaceClassStats."""

    def __init__(self, classes: Mapping[str, SurfaceClassStats]):
        self._classes = dict(classes)

    def get(self, surface_class: str) -> SurfaceClassStats:
        try:
            return self._classes[surface_class]
        except KeyError:
            raise UnknownSurfaceClassError(surface_class) from None

    def __contains__(self, surface_class: str) -> bool:
        return surface_class in self._classes

    def __iter__(self):
        return iter(self._classes)

    def items(self):
        return self._classes.items()

    def with_entry(self, name: str, stats: SurfaceClassStats) -> "FrictionLibrary":
        merged = dict(self._classes)
        merged[name] = stats
        return FrictionLibrary(merged)

    def __eq__(self, other) -> bool:
        return isinstance(other, FrictionLibrary) and self._classes == other._classes


def default_library() -> FrictionLibrary:
    """Shipped field/lab friction library.

    Redwood statistics come from a ten-tree field population; the remaining
    classes are single-object point estimates or small lab samples. The
    sandpaper class is known only by mean and spread, so its min/max are
    taken as mean +/- one std. Wet-condition observations are retained as
    notes only; dry values are the operative statistics.
    """
    return FrictionLibrary(
        {
            "redwood": SurfaceClassStats(
                0.38, 0.04, 0.336, 0.466, 10,
                note="field population of 10 coast redwoods, rugose bark",
            ),
            "smooth_bark": SurfaceClassStats(
                0.26, 0.0, 0.26, 0.26, 1,
                note="point estimate, smooth-barked tree",
            ),
            "fire_hydrant": SurfaceClassStats(
                0.5, 0.0, 0.5, 0.5, 1,
                note="point estimate, painted cast metal",
            ),
            "lab_sandpaper": SurfaceClassStats(
                0.6, 0.1, 0.5, 0.7, 4,
                note="180-grit sandpaper rods; min/max taken as mean +/- std",
            ),
            "lab_tape": SurfaceClassStats(
                0.24, 0.0, 0.24, 0.24, 1,
                note="gaffer tape rod; dry-to-damp shift +13.0% (Dyneema), data note only",
            ),
        }
    )


def baseline_holding(baselines: BaselineSet) -> tuple[float, float]:
    """Mean and sample standard deviation of unwrapped peak holding forces.

    A single trial has zero sample deviation by convention.
    """
    forces = np.asarray(baselines.peak_forces, dtype=float)
    mean = float(forces.mean())
    std = float(forces.std(ddof=1)) if forces.size > 1 else 0.0
    return (mean, std)


def fit_friction(measurements: Sequence[SlipMeasurement], t0: float) -> FrictionFit:
    """Fit mu by through-origin least squares on y = ln(T/T0) vs wrap angle.

    mu_hat = sum(theta*y) / sum(theta^2); the 95% CI uses the t distribution
    with n-1 degrees of freedom on the slope. A negative raw slope clamps to
    zero (friction cannot be negative); the clamp is applied to the CI ends
    as well so the interval still brackets mu_hat.
    """
    if t0 <= 0.0:
        raise DomainError(f"t0 must be > 0, got {t0}")
    if len(measurements) < 2:
        raise DegenerateDataError("need at least 2 measurements")
    ids = {m.object_id for m in measurements}
    if len(ids) != 1:
        raise DomainError(f"measurements mix object ids: {sorted(ids)}")

    theta = np.array([m.wrap_angle for m in measurements], dtype=float)
    tension = np.array([m.slip_tension for m in measurements], dtype=float)
    s_tt = float(np.dot(theta, theta))
    if s_tt == 0.0:
        raise DegenerateDataError("all wrap angles are zero; slope is unidentifiable")

    y = np.log(tension / t0)
    slope = float(np.dot(theta, y) / s_tt)
    resid = y - slope * theta
    rss = float(np.dot(resid, resid))
    n = len(measurements)
    dof = n - 1
    se = math.sqrt((rss / dof) / s_tt)
    t_crit = float(_scipy_stats.t.ppf(0.975, dof))
    lo, hi = slope - t_crit * se, slope + t_crit * se

    if slope < 0.0:
        slope, lo, hi = 0.0, min(lo, 0.0), max(hi, 0.0)
    return FrictionFit(
        object_id=measurements[0].object_id,
        mu_hat=slope,
        ci95=(lo, hi),
        residual_rms=math.sqrt(rss / n),
        n_points=n,
    )


def aggregate_class(fits: Sequence[FrictionFit], class_name: str,
                    note: str = "") -> SurfaceClassStats:
    """Combine per-object fits into one surface-class entry."""
    if not fits:
        raise DegenerateDataError(f"no fits to aggregate for class {class_name!r}")
    mus = np.array([f.mu_hat for f in fits], dtype=float)
    std = float(mus.std(ddof=1)) if mus.size > 1 else 0.0
    return SurfaceClassStats(
        mu_mean=float(mus.mean()),
        mu_std=std,
        mu_min=float(mus.min()),
        mu_max=float(mus.max()),
        n_objects=len(fits),
        note=note,
    )


def diameter_correlation(points: Iterable[tuple[float, float]]) -> float:
    """Pearson correlation between fitted mu and object circumference.

    ``points`` is (mu_hat, circumference) pairs; at least three points with
    nonzero variance in both coordinates are required.
    """
    pts = list(points)
    if len(pts) < 3:
        raise DegenerateDataError("need at least 3 points for a correlation")
    mu = np.array([p[0] for p in pts], dtype=float)
    circ = np.array([p[1] for p in pts], dtype=float)
    if float(mu.var()) == 0.0 or float(circ.var()) == 0.0:
        raise DegenerateDataError("degenerate variance; correlation undefined")
    r = float(np.corrcoef(mu, circ)[0, 1])
    return max(-1.0, min(1.0, r))
