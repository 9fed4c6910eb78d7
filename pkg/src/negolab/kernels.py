"""Backend selection for the numeric kernels.

The compiled extension is used when it imports; setting the environment
variable ``NEGOLAB_PURE_PYTHON=1`` forces the NumPy fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("NEGOLAB_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _pykernels


def _c(a):
    return np.ascontiguousarray(a, dtype=float)


def halfspace_mask(points, A, b, lo, hi, slack):
    points = _c(points).reshape(len(points), -1)
    return _impl.halfspace_mask(points, _c(A).reshape(len(b), points.shape[1]), _c(b), _c(lo), _c(hi), float(slack))


def argmax_lex(values, points, tie_tol=0.0):
    return int(_impl.argmax_lex(_c(values), _c(points), float(tie_tol)))


def hausdorff(a, b):
    return float(_impl.hausdorff(_c(a), _c(b)))


def count_dominating(values, thresholds, mask):
    # NumPy's vectorized comparisons beat the compiled loop here (see benchmarks/)
    return int(_pykernels.count_dominating(_c(values), _c(thresholds), np.asarray(mask, dtype=bool)))
