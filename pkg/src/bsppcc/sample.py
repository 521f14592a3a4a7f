"""Validated container for positive observations."""
from __future__ import annotations

from functools import cached_property

import numpy as np

from .errors import DataError


class Sample:
    """Positive, finite observations kept in input order.

    Parameters
    ----------
    values : array_like
        One-dimensional observations. Every entry must be finite and > 0.
    """

    def __init__(self, values):
        arr = np.array(values, dtype=float).ravel()
        bad = np.flatnonzero(~(np.isfinite(arr) & (arr > 0.0)))
        if bad.size:
            i = int(bad[0])
            raise DataError(
                f"observation at index {i} is {arr[i]!r}; observations must be finite and > 0",
                index=i,
            )
        arr.setflags(write=False)
        self.values = arr

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    @cached_property
    def sorted(self) -> np.ndarray:
        """Order statistics, ascending."""
        out = np.sort(self.values)
        out.setflags(write=False)
        return out

    def scaled(self, c: float) -> "Sample":
        return Sample(self.values * c)

    def __repr__(self):
        return f"Sample(n={self.n})"
