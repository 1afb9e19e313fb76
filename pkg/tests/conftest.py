"""Shared independent oracles for the test suite.

These helpers deliberately avoid the library's own kernels: the permanent
oracle sums the full symmetric group with numpy products, class sums are
built by filtering itertools.permutations, and distances are computed
directly from definitions.
"""
from __future__ import annotations

import itertools

import numpy as np


def brute_permanent(matrix) -> complex:
    """Permanent by explicit sum over all permutations."""
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return complex(1.0)
    rows = np.arange(n)
    return complex(sum(np.prod(a[rows, perm]) for perm in itertools.permutations(range(n))))


def perms_with_moved_count(n: int, moved: int) -> list[tuple[int, ...]]:
    """All permutations moving exactly ``moved`` points, by filtering S_n."""
    out = []
    for perm in itertools.permutations(range(n)):
        if sum(1 for i in range(n) if perm[i] != i) == moved:
            out.append(perm)
    return out


def partitions(n: int, largest: int | None = None):
    """Integer partitions of n, as non-increasing tuples (cycle types)."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for head in range(min(n, largest), 0, -1):
        for rest in partitions(n - head, head):
            yield (head,) + rest


def perm_from_cycle_lengths(rng: np.random.Generator, n: int, lengths) -> tuple[int, ...]:
    """Random permutation of n points with the given cycle-length multiset."""
    assert sum(lengths) == n
    points = list(rng.permutation(n))
    word = list(range(n))
    start = 0
    for length in lengths:
        cycle = points[start : start + length]
        for pos, point in enumerate(cycle):
            word[point] = cycle[(pos + 1) % length]
        start += length
    return tuple(word)


def tv_distance(p, q) -> float:
    """Total-variation distance between two distributions on the same support."""
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())
