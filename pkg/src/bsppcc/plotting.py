"""Linearized Birnbaum-Saunders probability plot and its correlation statistic.

Under the null hypothesis the points ``(t_(i), sqrt(t_(i)) * Phi^-1(p_i))``
fall on a straight line, so the Pearson correlation of the plot is close to 1.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import std_normal_quantile
from .errors import DegenerateDataError, SampleSizeError
from .sample import Sample

__all__ = [
    "MIN_N",
    "PlotPoints",
    "CorrelationStat",
    "plotting_positions",
    "linearize",
    "correlation",
    "bs_plot_statistic",
]

MIN_N = 3
# Blom's rule up to this size, (i - 1/2)/n above it.
BLOM_MAX_N = 10


@dataclass(frozen=True)
class PlotPoints:
    """Plotting positions ``p`` and plot coordinates ``u``, ``v`` by rank."""

    p: np.ndarray
    u: np.ndarray
    v: np.ndarray

    @property
    def n(self) -> int:
        return self.u.size

    @property
    def entries(self) -> list[tuple[float, float, float]]:
        return list(zip(self.p.tolist(), self.u.tolist(), self.v.tolist()))


@dataclass(frozen=True)
class CorrelationStat:
    r: float
    n: int

    def __float__(self):
        return self.r


def plotting_positions(n: int) -> np.ndarray:
    """Empirical CDF estimates assigned to the order statistics.

    ``(i - 3/8) / (n + 1/4)`` for ``n <= 10`` and ``(i - 1/2) / n`` otherwise.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    n = int(n)
    i = np.arange(1, n + 1, dtype=float)
    if n <= BLOM_MAX_N:
        return (i - 0.375) / (n + 0.25)
    return (i - 0.5) / n


def _as_sample(sample) -> Sample:
    return sample if isinstance(sample, Sample) else Sample(sample)


def linearize(sample) -> PlotPoints:
    """Probability-plot coordinates of a sample.

    Tied observations keep distinct, consecutive plotting positions.
    """
    sample = _as_sample(sample)
    if sample.n < MIN_N:
        raise SampleSizeError(f"need at least {MIN_N} observations, got {sample.n}")
    t = sample.sorted
    p = plotting_positions(sample.n)
    return PlotPoints(p=p, u=t, v=np.sqrt(t) * std_normal_quantile(p))


def correlation(points: PlotPoints) -> CorrelationStat:
    """Pearson correlation of the plot points (two-pass, mean-centred)."""
    u = np.asarray(points.u, dtype=float)
    v = np.asarray(points.v, dtype=float)
    if u.size < MIN_N:
        raise SampleSizeError(f"need at least {MIN_N} points, got {u.size}")
    if np.ptp(u) == 0.0 or np.ptp(v) == 0.0:
        raise DegenerateDataError("probability plot has zero variance on one axis")
    du = u - u.mean()
    dv = v - v.mean()
    sxx = float(np.dot(du, du))
    syy = float(np.dot(dv, dv))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateDataError("probability plot has zero variance on one axis")
    r = float(np.dot(du, dv)) / np.sqrt(sxx * syy)
    return CorrelationStat(r=float(min(1.0, max(-1.0, r))), n=int(u.size))


def bs_plot_statistic(sample) -> CorrelationStat:
    """Test statistic: correlation of the linearized probability plot."""
    return correlation(linearize(sample))
