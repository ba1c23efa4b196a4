"""Hot kernels with a compiled core and a pure-Python fallback.

The Cython extension ``_ckernels`` is preferred when it imports; set
``NSARK_PURE_PYTHON=1`` to force the fallback. ``BACKEND`` names the active
implementation and both are importable as ``pure`` / ``compiled`` (the latter
is ``None`` when the extension is not built).
"""

import os

from . import _pure as pure

try:
    from . import _ckernels as compiled
except ImportError:  # extension not built
    compiled = None

if compiled is not None and os.environ.get("NSARK_PURE_PYTHON", "") in ("", "0"):
    _impl = compiled
    BACKEND = "cython"
else:
    _impl = pure
    BACKEND = "python"

solve_dense = _impl.solve_dense
solve_patankar = _impl.solve_patankar
patankar_matrix = _impl.patankar_matrix
label_sum = _impl.label_sum

# both backends raise this class
SingularSystemError = pure.SingularSystemError

__all__ = ["BACKEND", "solve_dense", "solve_patankar", "patankar_matrix", "label_sum",
           "SingularSystemError", "pure", "compiled"]
