"""Monte Carlo null distribution of the statistic and critical-value tables.

Replicates are produced in fixed-size chunks. Chunk ``k`` for sample size
``n`` draws from its own Philox stream keyed by ``(seed, n, k)``, so the
collection of simulated statistics depends only on ``(seed, I, n, alpha_gen)``
and never on how many workers ran the chunks.
"""
from __future__ import annotations

import hashlib
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache, partial
from importlib import resources
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import kernels
from .distribution import make_rng, std_normal_quantile
from .errors import (
    CapacityError,
    DegenerateDataError,
    IntegrityError,
    TableFormatError,
)
from .plotting import MIN_N, plotting_positions

__all__ = [
    "PAPER_LEVELS",
    "CHUNK_SIZE",
    "MAX_IN_MEMORY",
    "SimConfig",
    "CriticalValueTable",
    "AlphaSensitivity",
    "simulate_null_r",
    "empirical_quantile",
    "critical_values",
    "build_table",
    "accuracy_bound",
    "paper_table",
    "alpha_sensitivity",
]

PAPER_LEVELS = (0.005, 0.01, 0.02, 0.025, 0.05, 0.075, 0.1, 0.125, 0.15, 0.2, 0.25, 0.5)

CHUNK_SIZE = 1 << 16
MAX_IN_MEMORY = 10**7
MIN_TABLE_ITERATIONS = 1000
GENERATOR_VERSION = f"bsppcc-mc/1 philox chunk={CHUNK_SIZE}"

# normals per kernel call; bounds working memory at 8 MiB per worker
_BLOCK_ELEMS = 1 << 20

PAPER_TABLE_RESOURCE = "data/paper_table.txt"
PAPER_TABLE_SHA256 = "7c637e4225ea39d035243048e611220a28019fc38d2df684ffbaa27b5dd74006"


def _check_levels(levels: Sequence[float]) -> tuple[float, ...]:
    levels = tuple(float(g) for g in levels)
    if not levels:
        raise ValueError("at least one significance level is required")
    if any(not (0.0 < g < 1.0) for g in levels):
        raise ValueError(f"levels must lie in (0, 1): {levels}")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError(f"levels must be strictly increasing: {levels}")
    return levels


@dataclass(frozen=True)
class SimConfig:
    """One Monte Carlo run: ``iterations`` statistics for samples of size ``n``.

    Samples are drawn from a Birnbaum-Saunders law with shape ``alpha_gen``
    and unit scale; the statistic is exactly scale invariant.
    """

    n: int
    iterations: int
    seed: int
    alpha_gen: float = 1.0
    levels: tuple[float, ...] = PAPER_LEVELS

    def __post_init__(self):
        if int(self.n) != self.n or self.n < MIN_N:
            raise ValueError(f"n must be an integer >= {MIN_N}, got {self.n!r}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations!r}")
        if not (math.isfinite(self.alpha_gen) and self.alpha_gen > 0):
            raise ValueError(f"alpha_gen must be positive, got {self.alpha_gen!r}")
        object.__setattr__(self, "levels", _check_levels(self.levels))

    @property
    def n_chunks(self) -> int:
        return -(-self.iterations // CHUNK_SIZE)


@lru_cache(maxsize=64)
def _plot_quantiles(n: int) -> np.ndarray:
    q = np.ascontiguousarray(std_normal_quantile(plotting_positions(n)))
    q.setflags(write=False)
    return q


def _resolve_kernel(backend):
    if backend is None:
        return kernels.null_statistics
    try:
        return kernels.BACKENDS[backend]
    except KeyError:
        raise ValueError(f"unknown backend {backend!r}; available: {sorted(kernels.BACKENDS)}")


def _simulate_chunk(config: SimConfig, kernel, index: int) -> np.ndarray:
    n = config.n
    size = min(CHUNK_SIZE, config.iterations - index * CHUNK_SIZE)
    rng = make_rng(config.seed, n, index)
    q = _plot_quantiles(n)
    rows = max(1, min(size, _BLOCK_ELEMS // n))
    out = np.empty(size)
    for start in range(0, size, rows):
        m = min(rows, size - start)
        z = rng.standard_normal((m, n))
        out[start:start + m] = kernel(z, config.alpha_gen, q)
    if np.isnan(out).any():
        raise DegenerateDataError(f"degenerate simulated sample in chunk {index} (n={n})")
    return out


def _iter_chunks(config: SimConfig, workers: int, backend) -> Iterable[np.ndarray]:
    """Chunk results in chunk-index order."""
    fn = partial(_simulate_chunk, config, _resolve_kernel(backend))
    indices = range(config.n_chunks)
    if workers <= 1:
        yield from map(fn, indices)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # bounded look-ahead keeps memory flat for very long runs
        window = 4 * workers
        pending = []
        for idx in indices:
            pending.append(pool.submit(fn, idx))
            if len(pending) >= window:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


def simulate_null_r(config: SimConfig, workers: int = 1, backend: str | None = None,
                    max_in_memory: int = MAX_IN_MEMORY) -> np.ndarray:
    """Simulate ``config.iterations`` null statistics, returned sorted ascending.

    Raises
    ------
    CapacityError
        If the run exceeds ``max_in_memory`` values or cannot be allocated.
        :func:`critical_values` handles such runs in chunked mode.
    """
    if config.iterations > max_in_memory:
        raise CapacityError(
            f"I={config.iterations} exceeds the in-memory limit {max_in_memory}; "
            "use critical_values/build_table, which select order statistics chunk by chunk"
        )
    try:
        out = np.empty(config.iterations)
    except MemoryError as exc:
        raise CapacityError(f"cannot allocate {config.iterations} values; use chunked mode") from exc
    pos = 0
    for chunk in _iter_chunks(config, workers, backend):
        out[pos:pos + chunk.size] = chunk
        pos += chunk.size
    out.sort()
    return out


def _rank(gamma: float, size: int) -> int:
    # exact ceil(gamma * I) for decimal levels such as 0.07
    k = math.ceil(Fraction(repr(float(gamma))) * size)
    return min(max(k, 1), size)


def empirical_quantile(sorted_values, gamma: float) -> float:
    """Left-continuous inverse of the empirical CDF.

    Returns the ``k``-th smallest value with ``k = ceil(gamma * I)``.
    """
    values = np.asarray(sorted_values, dtype=float)
    if values.size == 0:
        raise ValueError("empirical_quantile needs at least one value")
    if not (0.0 < gamma < 1.0):
        raise ValueError(f"gamma must lie in (0, 1), got {gamma!r}")
    return float(values[_rank(gamma, values.size) - 1])


# Histogram on s = -log2(1 - r), monotone in r, for the two-pass selection.
_S_LO, _S_HI, _S_BINS = -1.0, 64.0, 1 << 18


def _bin_index(r: np.ndarray) -> np.ndarray:
    s = -np.log2(np.maximum(1.0 - r, 2.0 ** -64))
    idx = np.floor((s - _S_LO) * (_S_BINS / (_S_HI - _S_LO))).astype(np.int64)
    return np.clip(idx, 0, _S_BINS - 1)


def _chunked_order_statistics(config, ranks, workers, backend):
    counts = np.zeros(_S_BINS, dtype=np.int64)
    for chunk in _iter_chunks(config, workers, backend):
        counts += np.bincount(_bin_index(chunk), minlength=_S_BINS)
    cum = np.cumsum(counts)
    bins = np.searchsorted(cum, ranks)
    offsets = [int(k - (cum[b - 1] if b > 0 else 0)) for k, b in zip(ranks, bins)]
    targets = np.unique(bins)
    collected = {int(b): [] for b in targets}
    # second pass regenerates the identical streams
    for chunk in _iter_chunks(config, workers, backend):
        idx = _bin_index(chunk)
        hit = np.isin(idx, targets)
        for b in np.unique(idx[hit]):
            collected[int(b)].append(chunk[idx == b])
    out = []
    for b, off in zip(bins, offsets):
        vals = np.sort(np.concatenate(collected[int(b)]))
        out.append(float(vals[off - 1]))
    return out


def critical_values(config: SimConfig, workers: int = 1, backend: str | None = None,
                    max_in_memory: int = MAX_IN_MEMORY) -> tuple[float, ...]:
    """Empirical critical value for every level in ``config.levels``.

    Runs above ``max_in_memory`` replicates use a two-pass chunked selection
    that returns the same order statistics as the in-memory path.
    """
    if config.iterations <= max_in_memory:
        values = simulate_null_r(config, workers, backend, max_in_memory)
        return tuple(empirical_quantile(values, g) for g in config.levels)
    ranks = [_rank(g, config.iterations) for g in config.levels]
    return tuple(_chunked_order_statistics(config, ranks, workers, backend))


def accuracy_bound(iterations: int) -> float:
    """Worst-case standard-deviation proxy ``0.5 / sqrt(I)`` of a simulated quantile.

    The proxy is ``sqrt(p(1-p)/I)`` at ``p = 0.5``; it leaves out the
    ``1/f(F^-1(p))`` density factor of the asymptotic quantile variance, so
    actual errors are larger where the null density of the statistic is low.
    """
    if int(iterations) != iterations or iterations < 1:
        raise ValueError(f"iterations must be a positive integer, got {iterations!r}")
    return 0.5 / math.sqrt(iterations)


_HEADER_RE = re.compile(
    r"bsppcc-table v1 I=(-?\d+) seed=(-?\d+) alpha_gen=(\S+) levels=(\S+)"
)


@dataclass(frozen=True)
class CriticalValueTable:
    """Critical values ``r_gamma`` by sample size, with provenance.

    ``rows[n][j]`` is the critical value at ``levels[j]``. ``seed`` and
    ``alpha_gen`` are ``None`` when unknown (the published table).
    """

    levels: tuple[float, ...]
    rows: Mapping[int, tuple[float, ...]]
    iterations: int
    seed: int | None = None
    alpha_gen: float | None = None
    source: str = "generated"
    generator: str | None = GENERATOR_VERSION
    partial: bool = False
    _ns: np.ndarray = field(init=False, repr=False, compare=False)
    _values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        levels = _check_levels(self.levels)
        rows = {}
        for n in sorted(self.rows):
            row = tuple(float(v) for v in self.rows[n])
            if len(row) != len(levels):
                raise ValueError(f"row n={n} has {len(row)} values for {len(levels)} levels")
            if any(not (-1.0 < v < 1.0) for v in row):
                raise ValueError(f"row n={n} has values outside (-1, 1)")
            if any(b < a for a, b in zip(row, row[1:])):
                raise ValueError(f"row n={n} is not non-decreasing in the level")
            rows[int(n)] = row
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "rows", MappingProxyType(rows))
        object.__setattr__(self, "_ns", np.array(list(rows), dtype=np.int64))
        values = np.array(list(rows.values()), dtype=float).reshape(len(rows), len(levels))
        object.__setattr__(self, "_values", values)

    @property
    def ns(self) -> tuple[int, ...]:
        return tuple(self.rows)

    @property
    def meta(self) -> dict:
        return {
            "source": self.source,
            "I": self.iterations,
            "seed": self.seed,
            "alpha_gen": self.alpha_gen,
            "generator": self.generator,
            "partial": self.partial,
        }

    def value(self, n: int, gamma: float) -> float:
        return self.rows[n][self.levels.index(gamma)]

    def to_text(self) -> str:
        seed = -1 if self.seed is None else self.seed
        alpha = math.nan if self.alpha_gen is None else self.alpha_gen
        levels = ",".join(repr(g) for g in self.levels)
        lines = [f"bsppcc-table v1 I={self.iterations} seed={seed} "
                 f"alpha_gen={alpha!r} levels={levels}"]
        lines.append(f"# source: {self.source}")
        if self.generator:
            lines.append(f"# generator: {self.generator}")
        for n, row in self.rows.items():
            lines.append(f"{n} " + " ".join(f"{v:.6f}" for v in row))
        if self.partial:
            lines.append("# partial")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "CriticalValueTable":
        """Parse the line-oriented table format; any violation raises TableFormatError."""
        lines = text.splitlines()
        if not lines:
            raise TableFormatError("empty table file")
        m = _HEADER_RE.fullmatch(lines[0].strip())
        if m is None:
            raise TableFormatError(f"line 1: malformed header {lines[0]!r}")
        try:
            iterations = int(m.group(1))
            seed = int(m.group(2))
            alpha = float(m.group(3))
            levels = tuple(float(g) for g in m.group(4).split(","))
            levels = _check_levels(levels)
        except ValueError as exc:
            raise TableFormatError(f"line 1: {exc}") from exc
        meta = {"source": "file", "generator": None, "partial": False}
        rows: dict[int, tuple[float, ...]] = {}
        for lineno, raw in enumerate(lines[1:], start=2):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body == "partial":
                    meta["partial"] = True
                elif body.startswith("source:"):
                    meta["source"] = body[len("source:"):].strip()
                elif body.startswith("generator:"):
                    meta["generator"] = body[len("generator:"):].strip()
                continue
            parts = line.split()
            if len(parts) != len(levels) + 1:
                raise TableFormatError(
                    f"line {lineno}: expected {len(levels) + 1} columns, got {len(parts)}")
            try:
                n = int(parts[0])
                row = tuple(float(v) for v in parts[1:])
            except ValueError as exc:
                raise TableFormatError(f"line {lineno}: {exc}") from exc
            if n in rows:
                raise TableFormatError(f"line {lineno}: duplicate row n={n}")
            rows[n] = row
        try:
            return cls(
                levels=levels, rows=rows, iterations=iterations,
                seed=None if seed < 0 else seed,
                alpha_gen=None if math.isnan(alpha) else alpha,
                source=meta["source"], generator=meta["generator"], partial=meta["partial"],
            )
        except ValueError as exc:
            raise TableFormatError(str(exc)) from exc

    @classmethod
    def read(cls, path) -> "CriticalValueTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())


@lru_cache(maxsize=1)
def paper_table() -> CriticalValueTable:
    """The published critical values (I = 1e8), checksum-verified on load."""
    raw = resources.files("bsppcc").joinpath(PAPER_TABLE_RESOURCE).read_bytes()
    digest = hashlib.sha256(raw).hexdigest()
    if digest != PAPER_TABLE_SHA256:
        raise IntegrityError(f"embedded table checksum mismatch: {digest}")
    return CriticalValueTable.from_text(raw.decode("utf-8"))


def build_table(n_set: Iterable[int], template: SimConfig, workers: int = 1,
                backend: str | None = None, partial_path=None,
                progress: Callable[[int, tuple[float, ...]], None] | None = None,
                max_in_memory: int = MAX_IN_MEMORY) -> CriticalValueTable:
    """Simulate one row of critical values per sample size.

    If a row fails (or the run is interrupted) and ``partial_path`` is given,
    the completed rows are written there with a ``# partial`` trailer before
    the exception propagates.
    """
    n_set = [int(n) for n in n_set]
    if not n_set:
        raise ValueError("n_set must not be empty")
    if min(n_set) < MIN_N:
        raise ValueError(f"every n must be >= {MIN_N}")
    if template.iterations < MIN_TABLE_ITERATIONS:
        raise ValueError(f"tables need at least {MIN_TABLE_ITERATIONS} iterations")

    def make(rows, partial_flag):
        return CriticalValueTable(
            levels=template.levels, rows=rows, iterations=template.iterations,
            seed=template.seed, alpha_gen=template.alpha_gen, partial=partial_flag,
        )

    rows: dict[int, tuple[float, ...]] = {}
    try:
        for n in n_set:
            row = critical_values(replace(template, n=n), workers, backend, max_in_memory)
            rows[n] = row
            if progress is not None:
                progress(n, row)
    except BaseException:
        if partial_path is not None:
            make(rows, True).write(partial_path)
        raise
    return make(rows, False)


@dataclass(frozen=True)
class AlphaSensitivity:
    """Critical values simulated under several generator shapes."""

    n: int
    iterations: int
    alphas: tuple[float, ...]
    levels: tuple[float, ...]
    values: tuple[tuple[float, ...], ...]  # one row per alpha
    max_deviation: tuple[float, ...]  # per level, max minus min across alphas

    def to_text(self) -> str:
        head = "alpha   " + " ".join(f"{g:>9g}" for g in self.levels)
        lines = [f"# n={self.n} I={self.iterations}", head]
        for a, row in zip(self.alphas, self.values):
            lines.append(f"{a:<7g} " + " ".join(f"{v:9.6f}" for v in row))
        lines.append("maxdev  " + " ".join(f"{d:9.6f}" for d in self.max_deviation))
        return "\n".join(lines) + "\n"


def alpha_sensitivity(n: int, iterations: int, alphas: Sequence[float],
                      levels: Sequence[float] = PAPER_LEVELS, seed: int = 0,
                      workers: int = 1, backend: str | None = None) -> AlphaSensitivity:
    """Empirical critical values per generator shape, for probing shape invariance.

    All shapes share the same normal draws (same seed), which isolates the
    effect of the shape from Monte Carlo noise.
    """
    alphas = tuple(float(a) for a in alphas)
    if not alphas or any(not a > 0 for a in alphas):
        raise ValueError("alphas must be a non-empty list of positive numbers")
    values = tuple(
        critical_values(SimConfig(n, iterations, seed, a, tuple(levels)), workers, backend)
        for a in alphas
    )
    arr = np.array(values)
    dev = tuple(float(d) for d in arr.max(axis=0) - arr.min(axis=0))
    return AlphaSensitivity(n, iterations, alphas, _check_levels(levels), values, dev)
