"""Kernel backend selection.

The compiled extension is used when it imported successfully; otherwise the
numpy kernels take over with identical semantics. Set ``WC4DVAR_PURE_PYTHON=1``
to force the numpy kernels regardless of what is installed.
"""

from __future__ import annotations

import os

from . import _l96_numpy

if os.environ.get("WC4DVAR_PURE_PYTHON"):
    _kernels = _l96_numpy
else:
    try:
        from . import _l96_kernels as _kernels  # type: ignore[no-redef]
    except ImportError:
        _kernels = _l96_numpy

tendency = _kernels.tendency
rk4_step = _kernels.rk4_step
rk4_tlm = _kernels.rk4_tlm
rk4_adj = _kernels.rk4_adj
BACKEND: str = _kernels.BACKEND
