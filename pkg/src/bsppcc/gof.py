"""Goodness-of-fit test against tabulated critical values.

The null hypothesis (Birnbaum-Saunders data) is rejected at level ``gamma``
when the plot correlation ``r`` is strictly below the critical value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, LevelError, OutOfRangeError
from .montecarlo import CriticalValueTable, paper_table
from .plotting import MIN_N, bs_plot_statistic

__all__ = [
    "PValue",
    "Decision",
    "GofReport",
    "critical_row",
    "lookup_critical",
    "p_value",
    "run_test",
]


@dataclass(frozen=True)
class PValue:
    """A p-value point estimate, or a bound when ``r`` is off the tabulated range.

    ``relation`` is ``"="`` for a point estimate, ``"<"`` or ``">"`` for a bound
    at ``value``.
    """

    value: float
    relation: str = "="

    @property
    def is_bound(self) -> bool:
        return self.relation != "="

    def __str__(self):
        if self.is_bound:
            return f"{self.relation}{self.value:g}"
        return f"{self.value:.4f}"


@dataclass(frozen=True)
class Decision:
    level: float
    critical: float
    reject: bool


@dataclass(frozen=True)
class GofReport:
    r: float
    n: int
    p_value: PValue
    decisions: tuple[Decision, ...]
    table_meta: dict = field(default_factory=dict)

    def rejected_at(self, level: float) -> bool:
        for d in self.decisions:
            if math.isclose(d.level, level, rel_tol=0, abs_tol=1e-12):
                return d.reject
        raise LevelError(f"level {level} was not evaluated")

    def to_dict(self) -> dict:
        pv = self.p_value
        return {
            "r": round(self.r, 6),
            "n": self.n,
            "p_value": str(pv) if pv.is_bound else round(pv.value, 4),
            "p_value_bound": pv.value if pv.is_bound else None,
            "decisions": [
                {"level": d.level, "critical_value": round(d.critical, 6), "reject": d.reject}
                for d in self.decisions
            ],
            "table_meta": dict(self.table_meta),
        }


def _check_n(table: CriticalValueTable, n: int) -> int:
    if int(n) != n or n < MIN_N:
        raise DomainError(f"sample size must be an integer >= {MIN_N}, got {n!r}")
    n = int(n)
    lo, hi = table.ns[0], table.ns[-1]
    if n < lo or n > hi:
        raise OutOfRangeError(
            f"n={n} is outside the table rows {lo}..{hi}; build a table covering it with gen-table")
    return n


def critical_row(table: CriticalValueTable, n: int) -> np.ndarray:
    """Critical values at every table level for size ``n``.

    Untabulated ``n`` is linearly interpolated between the bracketing rows.
    """
    n = _check_n(table, n)
    if n in table.rows:
        return np.array(table.rows[n])
    ns = table._ns
    j = int(np.searchsorted(ns, n))
    n0, n1 = int(ns[j - 1]), int(ns[j])
    w = (n - n0) / (n1 - n0)
    return (1.0 - w) * table._values[j - 1] + w * table._values[j]


def _level_index(table: CriticalValueTable, gamma: float) -> int:
    for j, g in enumerate(table.levels):
        if math.isclose(g, gamma, rel_tol=1e-12, abs_tol=0.0):
            return j
    raise LevelError(f"level {gamma} is not tabulated; available: {table.levels}")


def lookup_critical(table: CriticalValueTable, n: int, gamma: float) -> float:
    """Critical value ``r_gamma`` for sample size ``n``."""
    j = _level_index(table, gamma)
    return float(critical_row(table, n)[j])


def p_value(table: CriticalValueTable, n: int, r: float) -> PValue:
    """Interpolate the p-value of statistic ``r`` from the row for ``n``.

    The level is taken as piecewise linear in the critical value between
    adjacent tabulated levels. Outside the tabulated critical values a bound
    is returned instead of an extrapolation.
    """
    row = critical_row(table, n)
    levels = table.levels
    if r < row[0]:
        return PValue(levels[0], "<")
    if r > row[-1]:
        return PValue(levels[-1], ">")
    # last knot with row[j] <= r; keeps p < gamma  <=>  r < r_gamma on ties
    j = int(np.searchsorted(row, r, side="right")) - 1
    if j == len(row) - 1:
        return PValue(levels[-1])
    r0, r1 = row[j], row[j + 1]
    frac = (r - r0) / (r1 - r0)
    return PValue(levels[j] + frac * (levels[j + 1] - levels[j]))


def run_test(sample, levels: Sequence[float] | None = None,
             table: CriticalValueTable | None = None) -> GofReport:
    """Test ``sample`` for Birnbaum-Saunders fit at each level.

    Defaults to the published table and all of its levels.
    """
    table = paper_table() if table is None else table
    stat = bs_plot_statistic(sample)
    row = critical_row(table, stat.n)
    levels = table.levels if levels is None else tuple(float(g) for g in levels)
    decisions = []
    for g in levels:
        crit = float(row[_level_index(table, g)])
        decisions.append(Decision(level=g, critical=crit, reject=stat.r < crit))
    return GofReport(
        r=stat.r,
        n=stat.n,
        p_value=p_value(table, stat.n, stat.r),
        decisions=tuple(decisions),
        table_meta=table.meta,
    )
