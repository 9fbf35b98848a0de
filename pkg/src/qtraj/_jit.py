"""Optional numba acceleration.

Kernels are written once in scalar, nopython-compatible style and decorated
with :func:`njit`. Setting ``QTRAJ_DISABLE_JIT=1`` (or running without numba
installed) leaves them as plain Python functions operating on numpy arrays,
which is the reference fallback path.
"""

import os

_FLAG = os.environ.get("QTRAJ_DISABLE_JIT", "").strip().lower()
_DISABLED = _FLAG not in ("", "0", "false", "no")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

JIT_ENABLED = HAVE_NUMBA and not _DISABLED


def _identity(*args, **kwargs):
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrapper(f):
        return f

    return wrapper


if JIT_ENABLED:

    def njit(*args, **kwargs):
        kwargs.setdefault("cache", True)
        return numba.njit(*args, **kwargs)

else:
    njit = _identity


def backend():
    """Name of the active kernel backend (``"numba"`` or ``"python"``)."""
    return "numba" if JIT_ENABLED else "python"
