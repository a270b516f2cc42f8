"""Bitset kernel backend selection.

The compiled backend (cybits, Cython) is preferred; the pure-numpy backend
(pybits) is the fallback. GINIRANK_BACKEND=python or =cython forces one and
makes a missing compiled extension an error instead of a silent fallback.
BACKEND names the one in use.
"""

import os

_forced = os.environ.get("GINIRANK_BACKEND", "").strip().lower()
if _forced and _forced not in ("python", "cython"):
    raise ImportError(f"GINIRANK_BACKEND must be 'python' or 'cython', not {_forced!r}")

if _forced == "python":
    from . import pybits as _impl
else:
    try:
        from . import cybits as _impl
    except ImportError:
        if _forced == "cython":
            raise
        from . import pybits as _impl

BACKEND = _impl.NAME

popcount_rows = _impl.popcount_rows
popcount_vec = _impl.popcount_vec
marginal_gain = _impl.marginal_gain
marginal_gains = _impl.marginal_gains
or_into = _impl.or_into


def get_backend(name=None):
    """Return a kernel module by name ('python' or 'cython'); default: the active one."""
    if name is None or name == BACKEND:
        return _impl
    if name == "python":
        from . import pybits
        return pybits
    if name == "cython":
        from . import cybits
        return cybits
    raise ValueError(f"unknown backend {name!r}")
