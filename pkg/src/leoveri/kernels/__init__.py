"""Graph kernel lane selection.

The compiled extension is preferred when importable; the pure-Python
lane is a drop-in replacement with identical results. Set LEOVERI_PURE=1
to force the pure lane (used by the lane-equivalence tests and the
benchmark).
"""

import os

import numpy as np

from . import pygraph

if os.environ.get("LEOVERI_PURE") == "1":
    _impl = pygraph
    ACTIVE_LANE = "python"
else:
    try:
        from . import _ck as _impl  # type: ignore[attr-defined]
        ACTIVE_LANE = "compiled"
    except ImportError:
        _impl = pygraph
        ACTIVE_LANE = "python"


def as_csr_arrays(indptr, indices, weights):
    """Coerce CSR components to the dtypes both lanes accept."""
    return (
        np.ascontiguousarray(indptr, dtype=np.int64),
        np.ascontiguousarray(indices, dtype=np.int64),
        np.ascontiguousarray(weights, dtype=np.float64),
    )


def dijkstra_csr(indptr, indices, weights, n, source):
    return _impl.dijkstra_csr(indptr, indices, weights, n, source)


def multi_source_csr(indptr, indices, weights, n, sources):
    return _impl.multi_source_csr(indptr, indices, weights, n, sources)
