"""Hot-loop kernels, compiled when available.

The Cython extension ``paracontrol._kernels`` is used if it was built;
otherwise the numpy fallback is imported. Set ``PARACONTROL_PURE_PYTHON=1``
to force the fallback.
"""
import os

if os.environ.get("PARACONTROL_PURE_PYTHON", "") not in ("", "0"):
    from paracontrol import _kernels_py as _impl
else:
    try:
        from paracontrol import _kernels as _impl
    except ImportError:  # extension not built
        from paracontrol import _kernels_py as _impl

BACKEND = _impl.BACKEND
softmax_forward = _impl.softmax_forward
softmax_backward = _impl.softmax_backward
layernorm_forward = _impl.layernorm_forward
layernorm_backward = _impl.layernorm_backward
cross_entropy_fwd_bwd = _impl.cross_entropy_fwd_bwd
gelu_forward = _impl.gelu_forward
kmeans1d = _impl.kmeans1d

__all__ = [
    "BACKEND",
    "softmax_forward",
    "softmax_backward",
    "layernorm_forward",
    "layernorm_backward",
    "cross_entropy_fwd_bwd",
    "gelu_forward",
    "kmeans1d",
]
