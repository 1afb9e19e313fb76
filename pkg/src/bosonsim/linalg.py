"""Exact permanent kernels and the block expansion used by the truncated evaluator.

All kernels are exact, double-precision, and deterministic: Ryser and Glynn
iterate in Gray-code order with running sums, the naive kernel sums the full
symmetric group.  The block expansion splits the permanent of a Hadamard
product into small complex permanents times larger non-negative ones.
"""
from __future__ import annotations

import itertools

import numpy as np

__all__ = [
    "permanent",
    "hadamard_permanent",
    "laplace_split_permanent",
    "submatrix",
]

_NAIVE_LIMIT = 10


def permanent(matrix, method: str = "ryser") -> complex:
    """Permanent of a square matrix.

    Parameters
    ----------
    matrix : array_like
        Square complex matrix.  The empty 0x0 matrix has permanent 1
        (empty-product convention).
    method : {"ryser", "glynn", "naive"}
        "ryser" and "glynn" run in O(2^n * n) using Gray-code updates of
        running row/column sums; "naive" sums all n! permutations and is
        restricted to n <= 10.

    Returns
    -------
    complex
        The permanent.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    n = a.shape[0]
    if n == 0:
        return complex(1.0)
    if method == "ryser":
        return _permanent_ryser(a)
    if method == "glynn":
        return _permanent_glynn(a)
    if method == "naive":
        if n > _NAIVE_LIMIT:
            raise ValueError(f"naive method restricted to n <= {_NAIVE_LIMIT}")
        return _permanent_naive(a)
    raise ValueError(f"unknown method {method!r}")


def _permanent_naive(a: np.ndarray) -> complex:
    n = a.shape[0]
    rows = np.arange(n)
    total = 0.0 + 0.0j
    for perm in itertools.permutations(range(n)):
        total += np.prod(a[rows, perm])
    return complex(total)


def _permanent_ryser(a: np.ndarray) -> complex:
    # Inclusion-exclusion over column subsets; the Gray code flips one column
    # per step so the running row sums are updated in O(n).
    n = a.shape[0]
    row_sums = np.zeros(n, dtype=complex)
    total = 0.0 + 0.0j
    popcount = 0
    for s in range(1, 1 << n):
        col = (s & -s).bit_length() - 1
        gray = s ^ (s >> 1)
        if (gray >> col) & 1:
            row_sums += a[:, col]
            popcount += 1
        else:
            row_sums -= a[:, col]
            popcount -= 1
        term = np.prod(row_sums)
        if (n - popcount) % 2:
            total -= term
        else:
            total += term
    return complex(total)


def _permanent_glynn(a: np.ndarray) -> complex:
    # Average over +-1 row signings, first sign pinned to +1; Gray code flips
    # one signing per step so the running column sums are updated in O(n).
    n = a.shape[0]
    if n == 1:
        return complex(a[0, 0])
    col_sums = a.sum(axis=0).astype(complex)
    delta = np.ones(n)
    total = np.prod(col_sums)
    sign = 1
    for s in range(1, 1 << (n - 1)):
        row = (s & -s).bit_length()  # rows 1..n-1 flip; row 0 stays +1
        delta[row] = -delta[row]
        col_sums += 2.0 * delta[row] * a[row, :]
        sign = -sign
        term = np.prod(col_sums)
        total += sign * term
    return complex(total / 2 ** (n - 1))


def hadamard_permanent(matrix, perm, method: str = "ryser") -> complex:
    """Permanent of ``matrix * conj(matrix[perm, :])`` (entrywise product).

    With the identity permutation this is the permanent of the squared
    moduli, a non-negative real; permuting by the inverse conjugates the
    result.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    word = np.asarray(perm, dtype=int)
    if word.shape != (a.shape[0],):
        raise ValueError("permutation length must match the matrix size")
    return permanent(a * np.conj(a[word, :]), method=method)


def laplace_split_permanent(matrix, perm, method: str = "ryser") -> complex:
    """Evaluate ``hadamard_permanent`` by expanding about the moved rows.

    The rows moved by ``perm`` (say j of them) are expanded over all C(n, j)
    column subsets; each term is the product of a j x j complex permanent and
    an (n-j) x (n-j) permanent of squared moduli, which is non-negative.
    Cost is C(n, j) * (2^j * j + 2^(n-j) * (n-j)) kernel operations per call,
    so a truncation capping j keeps the complex blocks small.  Subsets are
    visited in lexicographic order for a reproducible summation order.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    word = np.asarray(perm, dtype=int)
    n = a.shape[0]
    if word.shape != (n,):
        raise ValueError("permutation length must match the matrix size")
    moved = [i for i in range(n) if word[i] != i]
    fixed = [i for i in range(n) if word[i] == i]
    j = len(moved)
    product = a * np.conj(a[word, :])
    nonneg = np.abs(a[fixed, :]) ** 2
    moved_rows = product[moved, :]
    total = 0.0 + 0.0j
    all_cols = frozenset(range(n))
    for cols in itertools.combinations(range(n), j):
        rest = sorted(all_cols.difference(cols))
        small = permanent(moved_rows[:, cols], method=method)
        large = permanent(nonneg[:, rest], method=method)
        total += small * large
    return complex(total)


def submatrix(matrix, input_modes, output_modes) -> np.ndarray:
    """Select rows ``input_modes`` and columns ``output_modes``.

    Repeated indices are allowed; occupied modes duplicate rows/columns
    according to the mode-assignment lists of the input and output states.
    """
    a = np.asarray(matrix)
    rows = np.asarray(input_modes, dtype=int)
    cols = np.asarray(output_modes, dtype=int)
    for name, idx, limit in (("input", rows, a.shape[0]), ("output", cols, a.shape[1])):
        if idx.size and (idx.min() < 0 or idx.max() >= limit):
            raise ValueError(f"{name} mode index out of range [0, {limit})")
    return a[np.ix_(rows, cols)]
