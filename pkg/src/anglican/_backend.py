"""Select the compiled kernels when available, else the pure-Python ones.

Set ``ANGLICAN_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("ANGLICAN_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels as kernels
else:
    try:
        from . import _ckernels as kernels
    except ImportError:
        from . import _kernels as kernels

BACKEND = kernels.NAME
