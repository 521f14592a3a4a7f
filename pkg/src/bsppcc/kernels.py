"""Backend selection for the Monte Carlo hot loop.

The compiled extension is used when it imports; setting ``BSPPCC_PURE_PYTHON=1``
forces the numpy fallback.
"""
import os

from . import _kernel_py

if os.environ.get("BSPPCC_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"python": _kernel_py.null_statistics}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled.null_statistics

BACKEND = "compiled" if _compiled is not None else "python"
null_statistics = BACKENDS[BACKEND]
