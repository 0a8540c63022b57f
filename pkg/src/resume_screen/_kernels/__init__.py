"""Kernel selection: compiled extension when available, pure Python otherwise.

Set ``RESUME_SCREEN_PURE_KERNELS=1`` to force the fallback (used by the
benchmark and the twin-equivalence tests). ``IMPLEMENTATION`` names the
active backend.
"""

from __future__ import annotations

import os

if os.environ.get("RESUME_SCREEN_PURE_KERNELS"):
    from . import _pykernels as _impl
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as _impl

IMPLEMENTATION: str = _impl.IMPLEMENTATION
dot = _impl.dot
norm = _impl.norm
cosine = _impl.cosine
row_norms = _impl.row_norms
scan_scores = _impl.scan_scores
pearson = _impl.pearson
mae = _impl.mae

__all__ = [
    "IMPLEMENTATION",
    "dot",
    "norm",
    "cosine",
    "row_norms",
    "scan_scores",
    "pearson",
    "mae",
]
