"""Hot-kernel backend selection.

Prefers the compiled Cython extension; falls back to the NumPy
implementation when the extension is absent or XSB_LAB_FORCE_PYTHON is set.
`BACKEND` records which one is active.  `build_points` (mesh construction
for outer integrals) always comes from the Python module: it is not hot.
"""

import os

from ._pybackend import build_points  # noqa: F401
from . import _pybackend

if os.environ.get("XSB_LAB_FORCE_PYTHON"):
    inner_sweep = _pybackend.inner_sweep
    conv_counts = _pybackend.conv_counts
    BACKEND = "python"
else:
    try:
        from ._cykernels import conv_counts, inner_sweep

        BACKEND = "cython"
    except ImportError:
        inner_sweep = _pybackend.inner_sweep
        conv_counts = _pybackend.conv_counts
        BACKEND = "python"

__all__ = ["inner_sweep", "conv_counts", "build_points", "BACKEND"]
