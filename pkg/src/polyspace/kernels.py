"""Backend selection for the hot kernels.

The compiled extension is used when importable; ``POLYSPACE_PURE=1`` forces
the numpy fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

if os.environ.get("POLYSPACE_PURE", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "compiled" if _impl is not _pykernels else "python"

profile_exact = _impl.profile_exact
profile_float = _impl.profile_float
tau_rows = _impl.tau_rows
tau_perm = _impl.tau_perm


def backends():
    """Map of available backend name -> kernel module."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        pass
    else:
        found["compiled"] = _ckernels
    return found
