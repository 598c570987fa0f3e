"""Hot image kernels with a compiled core and a numpy fallback.

The compiled Cython extension is preferred when it imported cleanly;
otherwise the numpy implementation takes over. Set the environment
variable ``SPATTERKIT_PURE_PYTHON=1`` to force the fallback (useful for
benchmarks and equivalence tests).
"""

from __future__ import annotations

import os

from . import _pykernels

if os.environ.get("SPATTERKIT_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND_NAME
label_image = _impl.label_image


def available_backends() -> dict:
    """Map of backend name -> module, for side-by-side comparisons."""
    backends = {"python": _pykernels}
    try:
        from . import _ckernels

        backends["compiled"] = _ckernels
    except ImportError:
        pass
    return backends
