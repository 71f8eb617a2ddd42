"""Time-stepping kernel selection: compiled extension with numpy fallback.

Set QUADNLS_PURE_PYTHON=1 to force the fallback (used by the benchmark to
compare both lanes).
"""

import os

if os.environ.get("QUADNLS_PURE_PYTHON"):
    from .fallback import BACKEND, midpoint_step
else:
    try:
        from ._midpoint import BACKEND, midpoint_step  # type: ignore[attr-defined]
    except ImportError:
        from .fallback import BACKEND, midpoint_step

__all__ = ["BACKEND", "midpoint_step"]
