"""Select the compiled MLE kernel when available.

Set ``OAMTRANSFER_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _mle_py

if os.environ.get("OAMTRANSFER_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _mle_core as _compiled
    except ImportError:
        _compiled = None

BACKENDS = {"python": _mle_py.rrho_mle}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.rrho_mle

BACKEND = "cython" if _compiled is not None else "python"
rrho_mle = BACKENDS[BACKEND]
