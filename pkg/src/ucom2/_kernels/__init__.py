"""Hot-loop kernels with a compiled backend and a numpy fallback.

The Cython extension ``_ckernels`` is used when it was built; otherwise, or
when ``UCOM2_PURE_PYTHON`` is set to a non-empty value, the numpy versions in
``_pykernels`` are used. ``BACKEND`` names the active choice.
"""
import os

from . import _pykernels

_compiled = None
if not os.environ.get("UCOM2_PURE_PYTHON"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

_impl = _compiled if _compiled is not None else _pykernels
BACKEND = "cython" if _compiled is not None else "python"

ms_value = _impl.ms_value
ms_grad = _impl.ms_grad
card_remove_sums = _impl.card_remove_sums
pmf_dft = _impl.pmf_dft
pmf_dp = _impl.pmf_dp


def backends():
    """Return ``{name: module}`` for every importable backend.

    The compiled module is listed whenever it was built, even if the
    environment switch keeps it from being the active backend.
    """
    out = {"python": _pykernels}
    try:
        from . import _ckernels as ext
    except ImportError:
        return out
    out["cython"] = ext
    return out
