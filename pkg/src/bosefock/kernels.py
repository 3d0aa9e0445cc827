"""Backend selection for the hot kernels.

The compiled extension ``bosefock._core`` is used when it imports; otherwise,
or when ``BOSEFOCK_PURE_PYTHON=1`` is set, the numpy versions in
``bosefock._pure`` are used. ``BACKEND`` records which one is active.
"""

import os

from . import _pure

if os.environ.get("BOSEFOCK_PURE_PYTHON") == "1":
    _impl = _pure
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pure
        BACKEND = "python"

BACKENDS = {"python": _pure}
if BACKEND == "cython":
    BACKENDS["cython"] = _impl

permanent = _impl.permanent
jacobi_eigh = _impl.jacobi_eigh
substitution_blocks = _impl.substitution_blocks


def get_backend(name):
    """Return the kernel module for ``name`` ("python" or "cython")."""
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} is not available; have {sorted(BACKENDS)}") from None
