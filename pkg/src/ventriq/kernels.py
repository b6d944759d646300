"""Kernel backend selection.

The compiled extension is preferred; the pure-Python implementation is the
fallback when the extension is missing or VENTRIQ_PURE_PYTHON is set.
Both expose the same `label_components` contract and produce identical
output (see tests and benchmarks/bench_kernels.py).
"""

import os

if os.environ.get("VENTRIQ_PURE_PYTHON"):
    from . import _kernels_py as _impl

    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl

        BACKEND = "python"

label_components = _impl.label_components
