"""Backend selection for the element kernels.

The compiled extension is used when it imported successfully; set
``HARTREEFEM_PURE_PYTHON=1`` to force the numpy fallback (used by the
benchmark and the backend-parity tests).
"""

import os

from . import _pykernels

try:
    from . import _core
except ImportError:
    _core = None

_FORCE_PY = os.environ.get("HARTREEFEM_PURE_PYTHON", "") not in ("", "0")

HAVE_COMPILED = _core is not None

if HAVE_COMPILED and not _FORCE_PY:
    _backend = _core
    BACKEND = "compiled"
else:
    _backend = _pykernels
    BACKEND = "python"


def apply_nodal_potential(u, z, Q):
    return _backend.apply_nodal_potential(u, z, Q)


def weighted_density(z, Q):
    return _backend.weighted_density(z, Q)
