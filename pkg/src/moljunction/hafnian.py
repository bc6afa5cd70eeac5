r"""Loop hafnians of symmetric matrices.

The loop hafnian sums, over every way of covering the vertices of a graph
with edges and self-loops, the product of the covering weights:

.. math::
    \text{lhaf}(A) = \sum_{\mu \in \text{SPM}(n)} \prod_{(i,j)\in\mu} A_{ij}.

Two independent evaluations are provided.  :func:`loop_hafnian_enumerate`
walks every matching explicitly and is the reference;
:func:`loop_hafnian_trace` uses an inclusion-exclusion sum over vertex pairs
with a power-trace generating function and runs in :math:`O(n^4 2^{n/2})`.
"""

import numpy as np

from .errors import InputError


def _as_symmetric(matrix):
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InputError("loop hafnian needs a square matrix")
    if a.size and np.max(np.abs(a - a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise InputError("loop hafnian needs a symmetric matrix")
    return a


def loop_hafnian_enumerate(matrix):
    """Loop hafnian by explicit recursion over single-pair and self-loop choices.

    The lowest remaining vertex is either closed with its loop or paired with
    every other remaining vertex in turn, so each matching is visited exactly once.
    """
    a = _as_symmetric(matrix)
    n = a.shape[0]
    if n == 0:
        return a.dtype.type(1) if a.dtype.kind == "c" else 1.0

    def rec(vertices):
        if not vertices:
            return 1.0
        first, rest = vertices[0], vertices[1:]
        total = a[first, first] * rec(rest)
        for pos, other in enumerate(rest):
            if a[first, other] != 0:
                total = total + a[first, other] * rec(rest[:pos] + rest[pos + 1:])
        return total

    return rec(tuple(range(n)))


def _exp_series_coefficient(poly, order):
    """Coefficient of ``eta**order`` in ``exp(sum_j poly[j] eta**j)``, ``poly[0]`` ignored."""
    coeffs = [poly.dtype.type(1)] + [poly.dtype.type(0)] * order
    for k in range(1, order + 1):
        acc = 0
        for j in range(1, k + 1):
            acc = acc + j * poly[j] * coeffs[k - j]
        coeffs[k] = acc / k
    return coeffs[order]


def loop_hafnian_trace(matrix):
    r"""Loop hafnian via inclusion-exclusion over vertex pairs.

    Vertices ``k`` and ``k + m`` form pair ``k``.  For every subset ``Z`` of pairs
    the restricted matrix generates cycles (``tr((XA)^j)/2j``) and loop-terminated
    paths (``d^T (XA)^{j-1} X d / 2``), and the coefficient of :math:`\eta^m`
    of their exponential is summed with sign :math:`(-1)^{m-|Z|}`.
    Odd sizes are padded with a vertex that carries a unit self-loop.
    """
    a = _as_symmetric(matrix)
    n = a.shape[0]
    dtype = np.result_type(a.dtype, float)
    if n == 0:
        return dtype.type(1)
    a = a.astype(dtype)
    if n % 2:
        padded = np.zeros((n + 1, n + 1), dtype=dtype)
        padded[:n, :n] = a
        padded[n, n] = 1.0
        a = padded
        n += 1
    m = n // 2

    diag = np.diag(a).copy()
    offdiag = a - np.diag(diag)
    total = dtype.type(0)
    for mask in range(1 << m):
        pairs = [k for k in range(m) if mask >> k & 1]
        size = len(pairs)
        if size == 0:
            continue
        idx = np.array(pairs + [k + m for k in pairs])
        sub = offdiag[np.ix_(idx, idx)]
        d = diag[idx]
        # X swaps the two members of each pair
        xd = np.concatenate([d[size:], d[:size]])
        b = np.concatenate([sub[size:], sub[:size]], axis=0)
        poly = np.zeros(m + 1, dtype=dtype)
        power = np.eye(2 * size, dtype=dtype)
        for j in range(1, m + 1):
            # power holds B^(j-1) on entry
            poly[j] = 0.5 * (d @ power @ xd)
            power = power @ b
            poly[j] += np.trace(power) / (2 * j)
        term = _exp_series_coefficient(poly, m)
        total += term if (m - size) % 2 == 0 else -term
    return total


def loop_hafnian(matrix, method="trace"):
    """Dispatch to one of the two loop-hafnian routes (``"trace"`` or ``"enumerate"``)."""
    if method == "trace":
        return loop_hafnian_trace(matrix)
    if method == "enumerate":
        return loop_hafnian_enumerate(matrix)
    raise InputError(f"unknown loop hafnian method {method!r}")
