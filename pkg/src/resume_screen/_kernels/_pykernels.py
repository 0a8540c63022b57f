"""Pure-Python similarity/correlation kernels.

Fallback twin of the compiled ``_ckernels`` extension. Both implementations
use the same fixed algorithms (plain left-to-right accumulation in double
precision, two-pass moments for Pearson) so that, absent fused-multiply-add
contraction, they produce bit-identical results and either one can back the
package.

Inputs are flat buffers: ``array('d')`` for queries/series and ``array('f')``
for the row-major chunk-embedding matrix (the store's on-disk precision).
"""

from __future__ import annotations

import math
from array import array
from typing import Sequence

IMPLEMENTATION = "python"

_NAN = float("nan")


def dot(a: Sequence[float], b: Sequence[float]) -> float:
    acc = 0.0
    for i in range(len(a)):
        acc += a[i] * b[i]
    return acc


def norm(a: Sequence[float]) -> float:
    acc = 0.0
    for i in range(len(a)):
        acc += a[i] * a[i]
    return math.sqrt(acc)


def cosine(a: Sequence[float], b: Sequence[float]) -> float:
    """Cosine of two equal-length vectors; NaN when either norm is zero."""
    num = 0.0
    na = 0.0
    nb = 0.0
    for i in range(len(a)):
        x = a[i]
        y = b[i]
        num += x * y
        na += x * x
        nb += y * y
    if na == 0.0 or nb == 0.0:
        return _NAN
    return num / (math.sqrt(na) * math.sqrt(nb))


def row_norms(matrix: array, dim: int) -> array:
    """Euclidean norm of every ``dim``-wide row of a flat matrix."""
    n_rows = len(matrix) // dim
    out = array("d", bytes(8 * n_rows))
    for row in range(n_rows):
        base = row * dim
        acc = 0.0
        for i in range(dim):
            v = matrix[base + i]
            acc += v * v
        out[row] = math.sqrt(acc)
    return out


def scan_scores(query: array, matrix: array, norms: array, dim: int) -> array:
    """Cosine similarity of ``query`` against every matrix row.

    ``norms`` is the cached per-row norm from :func:`row_norms`. Rows with a
    zero norm get NaN (cosine undefined); a zero-norm query is the caller's
    error to reject.
    """
    n_rows = len(matrix) // dim
    qn = norm(query)
    out = array("d", bytes(8 * n_rows))
    for row in range(n_rows):
        rn = norms[row]
        if rn == 0.0:
            out[row] = _NAN
            continue
        base = row * dim
        acc = 0.0
        for i in range(dim):
            acc += query[i] * matrix[base + i]
        out[row] = acc / (qn * rn)
    return out


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation; NaN when either series is constant.

    Two-pass: means first, then centered second moments, all left-to-right.
    """
    n = len(x)
    sx = 0.0
    sy = 0.0
    for i in range(n):
        sx += x[i]
        sy += y[i]
    mx = sx / n
    my = sy / n
    sxx = 0.0
    syy = 0.0
    sxy = 0.0
    for i in range(n):
        dx = x[i] - mx
        dy = y[i] - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx == 0.0 or syy == 0.0:
        return _NAN
    return sxy / (math.sqrt(sxx) * math.sqrt(syy))


def mae(x: Sequence[float], y: Sequence[float]) -> float:
    n = len(x)
    acc = 0.0
    for i in range(n):
        acc += abs(x[i] - y[i])
    return acc / n
