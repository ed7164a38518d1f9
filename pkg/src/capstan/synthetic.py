"""Seeded synthetic slip-test data.

Generates slip measurements from the exponential amplification model with
multiplicative lognormal noise. Used for fit-recovery testing and to
produce the shipped example datasets: raw per-trial field data is not
available, so the files under ``capstan/data`` are synthetic draws from the
library's population statistics.
"""

from __future__ import annotations

import math

import numpy as np

from .estimation import BaselineSet, SlipMeasurement

#: Wrap angles (rad) used by the field protocol: 90..450 degrees.
FIELD_ANGLES = tuple(math.radians(d) for d in (90.0, 180.0, 270.0, 360.0, 450.0))


def synthesize_measurements(object_id: str, mu: float, t0: float,
                            angles=FIELD_ANGLES, reps: int = 5,
                            noise_sigma: float = 0.05,
                            rng: np.random.Generator | None = None,
                            ) -> list[SlipMeasurement]:
    """Slip tensions T = t0 * exp(mu*theta) * exp(N(0, noise_sigma^2))."""
    rng = rng if rng is not None else np.random.default_rng(0)
    out = []
    for theta in angles:
        noise = rng.normal(0.0, noise_sigma, size=reps)
        for eps in noise:
            out.append(SlipMeasurement(
                object_id, theta, t0 * math.exp(mu * theta) * math.exp(eps)))
    return out


def synthesize_baselines(object_id: str, t0: float, reps: int = 5,
                         noise_sigma: float = 0.05,
                         rng: np.random.Generator | None = None) -> BaselineSet:
    rng = rng if rng is not None else np.random.default_rng(0)
    forces = t0 * np.exp(rng.normal(0.0, noise_sigma, size=reps))
    return BaselineSet(object_id, tuple(float(f) for f in forces))


def synthesize_population(class_prefix: str = "redwood", n_objects: int = 10,
                          mu_mean: float = 0.38, mu_std: float = 0.04,
                          t0: float = 2.0, seed: int = 20230415,
                          ) -> tuple[list[SlipMeasurement], list[BaselineSet]]:
    """A population of objects whose true friction coefficients have sample
    mean and sample std matched exactly to the requested statistics."""
    rng = np.random.default_rng(seed)
    z = rng.normal(0.0, 1.0, size=n_objects)
    z = (z - z.mean()) / z.std(ddof=1)
    mus = mu_mean + mu_std * z

    measurements: list[SlipMeasurement] = []
    baselines: list[BaselineSet] = []
    for i, mu in enumerate(mus, start=1):
        oid = f"{class_prefix}_{i:02d}"
        baselines.append(synthesize_baselines(oid, t0, rng=rng))
        measurements.extend(synthesize_measurements(oid, float(mu), t0, rng=rng))
    return measurements, baselines


def write_default_datasets(data_dir) -> None:
    """Regenerate the shipped synthetic redwood-like CSVs (fixed seed)."""
    from . import io as capstan_io

    measurements, baselines = synthesize_population()
    capstan_io.save_measurements(
        measurements, f"{data_dir}/redwood_synthetic_measurements.csv")
    capstan_io.save_baselines(
        baselines, f"{data_dir}/redwood_synthetic_baselines.csv")
