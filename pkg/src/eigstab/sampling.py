"""Seeded random test functions for the inequality fuzzers.

Samples are moving averages of standard normals: smooth enough to avoid
trivial sparse corners, rough enough to explore the inequalities, and
fully reproducible from the seed.
"""

from __future__ import annotations

import numpy as np

from .measure import MeasFunction, WeightedMeasure, lp_norm


def smoothed_noise(
    rng: np.random.Generator, n: int, window: int = 5, complex_values: bool = False
) -> np.ndarray:
    """Moving-average of standard normals, length n."""
    kernel = np.ones(window) / window

    def draw():
        raw = rng.standard_normal(n + window - 1)
        return np.convolve(raw, kernel, mode="valid")

    if complex_values:
        return draw() + 1j * draw()
    return draw()


def random_unit_function(
    rng: np.random.Generator,
    measure: WeightedMeasure,
    p: float,
    complex_values: bool = False,
) -> MeasFunction:
    """Smooth random function normalized to unit L^p(measure) norm."""
    while True:
        vals = smoothed_noise(rng, measure.weights.size, complex_values=complex_values)
        f = MeasFunction(measure, vals)
        nrm = lp_norm(f, p)
        if nrm > 1e-12:
            return MeasFunction(measure, vals / nrm)


def random_nonnegative_unit(
    rng: np.random.Generator, measure: WeightedMeasure, p: float
) -> MeasFunction:
    """Nonnegative smooth random function with unit L^p(measure) norm."""
    while True:
        vals = np.abs(smoothed_noise(rng, measure.weights.size))
        f = MeasFunction(measure, vals)
        nrm = lp_norm(f, p)
        if nrm > 1e-12:
            return MeasFunction(measure, vals / nrm)
