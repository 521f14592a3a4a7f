"""Pure numpy fallback for :mod:`bsppcc._kernel`."""
import numpy as np


def null_statistics(z, alpha, q):
    """Correlation statistic for each row of standard normal draws.

    Rows of ``z`` are sorted and overwritten in place.
    """
    z.sort(axis=1)
    w = 0.5 * alpha * z
    h = np.sqrt(w * w + 1.0)
    with np.errstate(divide="ignore"):
        root = np.where(w >= 0.0, w + h, 1.0 / (h - w))
    u = root * root
    v = root * q
    u -= u.mean(axis=1, keepdims=True)
    v -= v.mean(axis=1, keepdims=True)
    sxx = np.einsum("ij,ij->i", u, u)
    syy = np.einsum("ij,ij->i", v, v)
    sxy = np.einsum("ij,ij->i", u, v)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = sxy / np.sqrt(sxx * syy)
    r[(sxx == 0.0) | (syy == 0.0)] = np.nan
    return r
