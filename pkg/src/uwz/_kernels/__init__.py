"""Hot kernels: the compiled extension when it is importable, numpy otherwise.

Set ``UWZ_PURE_PYTHON=1`` to force the numpy implementations.
"""
import os

from . import _pykernels as python

if os.environ.get("UWZ_PURE_PYTHON"):
    compiled = None
else:
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

backend = compiled if compiled is not None else python
BACKEND_NAME = "cython" if compiled is not None else "python"

hash_bins = backend.hash_bins
ba_wz_iterate = backend.ba_wz_iterate
enumerate_support = backend.enumerate_support
decode_scan = backend.decode_scan

__all__ = [
    "BACKEND_NAME",
    "ba_wz_iterate",
    "compiled",
    "decode_scan",
    "enumerate_support",
    "hash_bins",
    "python",
]
