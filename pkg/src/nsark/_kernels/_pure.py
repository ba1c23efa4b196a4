"""Pure-Python/numpy versions of the hot kernels.

These mirror ``_ckernels.pyx`` signature for signature and are used whenever
the compiled extension is unavailable (or ``NSARK_PURE_PYTHON=1``).
"""

import itertools
import math

import numpy as np

PIVOT_TOL = 1e-300


class SingularSystemError(ArithmeticError):
    pass


def solve_dense(A, b):
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    ``A`` and ``b`` are not modified. Raises :class:`SingularSystemError`
    when the largest available pivot is below ``PIVOT_TOL``.
    """
    M = np.array(A, dtype=float)
    x = np.array(b, dtype=float)
    n = M.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(M[k:, k])))
        if abs(M[p, k]) < PIVOT_TOL:
            raise SingularSystemError(f"pivot {M[p, k]!r} in column {k}")
        if p != k:
            M[[k, p]] = M[[p, k]]
            x[[k, p]] = x[[p, k]]
        f = M[k + 1:, k] / M[k, k]
        M[k + 1:, k:] -= np.outer(f, M[k, k:])
        x[k + 1:] -= f * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - M[k, k + 1:] @ x[k + 1:]) / M[k, k]
    return x


def solve_patankar(M, b):
    """Solve ``M x = b`` for a matrix with unit column sums and non-positive
    off-diagonal entries (the output of :func:`patankar_matrix`).

    The diagonal of ``M`` is not read: each pivot is rebuilt from the
    tracked column sums of the remaining block, so every update adds terms
    of one sign (the Grassmann-Taksar-Heyman variant of elimination). Pivots
    stay >= 1 and ``x`` is positive for positive ``b`` at any ``h``.
    """
    M = np.array(M, dtype=float)
    x = np.array(b, dtype=float)
    n = M.shape[0]
    colsum = np.ones(n)
    piv = np.empty(n)
    for k in range(n):
        piv[k] = colsum[k] - M[k + 1:, k].sum()
        if piv[k] < PIVOT_TOL:
            raise SingularSystemError(f"pivot {piv[k]!r} in column {k}")
        f = M[k + 1:, k] / piv[k]
        colsum[k + 1:] -= M[k, k + 1:] * (colsum[k] / piv[k])
        M[k + 1:, k + 1:] -= np.outer(f, M[k, k + 1:])
        x[k + 1:] -= f * x[k]
    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - M[k, k + 1:] @ x[k + 1:]) / piv[k]
    return x


def patankar_matrix(P, weights, h):
    """System matrix of one Patankar-weighted stage.

    ``P[m, v]`` is the (tableau-weighted) production of species ``m`` from
    ``v``; destruction is its transpose. Returns ``M`` with
    ``M[m, m] = 1 + h * sum_v P[v, m] / w[m]`` and
    ``M[m, v] = -h * P[m, v] / w[v]`` off the diagonal.
    """
    P = np.asarray(P, dtype=float)
    w = np.asarray(weights, dtype=float)
    M = -h * P / w[None, :]
    np.fill_diagonal(M, 0.0)
    diag = 1.0 + h * (P.sum(axis=0) - np.diag(P)) / w
    M[np.diag_indices_from(M)] = diag
    return M


_SPLIT = 134217729.0  # 2**27 + 1


def _two_prod(a, b):
    """Dekker's error-free product: ``a * b == p + e`` exactly."""
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def label_sum(parents, colors, A, b):
    """Brute-force sum over all stage labelings of a flattened tree.

    ``parents``/``colors`` are the pre-order arrays from
    :meth:`ColoredTree.flatten` with 0-based colors; ``A`` has shape
    ``(N, s, s)`` and ``b`` shape ``(N, s)``.

    Bushy trees expand into many terms that cancel heavily (condition
    numbers near 1e6 are common for random coefficients), so products are
    carried in double-double and the sum is exactly rounded.
    """
    A = np.asarray(A, dtype=float).tolist()
    b = np.asarray(b, dtype=float).tolist()
    s = len(b[0])
    n = len(parents)
    parts = []
    for lab in itertools.product(range(s), repeat=n):
        hi, lo = b[colors[0]][lab[0]], 0.0
        for k in range(1, n):
            a = A[colors[k]][lab[parents[k]]][lab[k]]
            p, e = _two_prod(hi, a)
            e += lo * a
            hi = p + e
            lo = e - (hi - p)
            if hi == 0.0:
                break
        parts.append(hi)
        parts.append(lo)
    return math.fsum(parts)
