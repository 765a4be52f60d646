"""Select the determinant kernel: compiled when available, else pure Python.

Set ``AMPLIKIT_PURE_PYTHON=1`` to force the fallback.
"""
import os

if os.environ.get("AMPLIKIT_PURE_PYTHON", "") not in ("", "0"):
    from ._pykernels import det_int, minors_int
    BACKEND = "python"
else:
    try:
        from ._ckernels import det_int, minors_int
        BACKEND = "compiled"
    except ImportError:  # extension not built
        from ._pykernels import det_int, minors_int
        BACKEND = "python"

__all__ = ["det_int", "minors_int", "BACKEND"]
