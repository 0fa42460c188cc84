"""Backend selection for the polynomial kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``RESOLVEKIT_PURE`` is set, the pure-Python module is
used.  ``BACKEND`` names the active one.
"""
import os

if os.environ.get("RESOLVEKIT_PURE"):
    from . import _pykernel as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernel as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernel as _impl
        BACKEND = "python"

add_terms = _impl.add_terms
mul_terms = _impl.mul_terms
divides = _impl.divides
lcm_exp = _impl.lcm_exp
reduce_int = _impl.reduce_int
buchberger_int = _impl.buchberger_int
primitive = _impl.primitive
content = _impl.content
_Counter = _impl._Counter
