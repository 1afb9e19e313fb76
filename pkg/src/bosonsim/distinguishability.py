"""Partial-distinguishability models and the pairwise overlap matrix.

Three model variants are supported:

* homogeneous: every photon pair has the same overlap x, so
  S_ij = x + (1 - x) * delta_ij;
* generalized orthogonal-bad-bit (OBB): photon i is split between a common
  target mode (weight sqrt(x_i)) and its own orthogonal mode, giving
  S_ii = 1 and S_ij = sqrt(x_i * x_j) for i != j;
* explicit: an arbitrary Gram matrix of unit internal states.

Visibilities x_i are restricted to real values in [0, 1]; complex phases on
sqrt(x_i) cancel from every quantity computed here.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .combinat import symmetric_means

__all__ = [
    "HomogeneousModel",
    "GeneralizedOBBModel",
    "ExplicitModel",
    "overlap_matrix",
    "overlap_product",
    "quadratic_mean_visibility",
    "model_from_dict",
]

_EIGENVALUE_FLOOR = -1e-10
_MATRIX_ATOL = 1e-10


@dataclass(frozen=True)
class HomogeneousModel:
    """All photon pairs share the same overlap ``x`` in [0, 1]."""

    x: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ValueError("x must lie in [0, 1]")

    def overlap_matrix(self, n: int) -> np.ndarray:
        s = np.full((n, n), complex(self.x))
        np.fill_diagonal(s, 1.0)
        return s

    def squared_visibilities(self, n: int) -> np.ndarray:
        return np.full(n, self.x * self.x)

    def to_dict(self) -> dict:
        return {"type": "homogeneous", "x": self.x}


@dataclass(frozen=True)
class GeneralizedOBBModel:
    """Per-photon visibilities ``x``; pair (i, j) has overlap sqrt(x_i * x_j)."""

    x: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if len(self.x) == 0:
            raise ValueError("x must be non-empty")
        if any(v < 0.0 or v > 1.0 for v in self.x):
            raise ValueError("all visibilities must lie in [0, 1]")

    @property
    def n(self) -> int:
        return len(self.x)

    def overlap_matrix(self, n: int) -> np.ndarray:
        if n != self.n:
            raise ValueError(f"model carries {self.n} visibilities, instance has n={n}")
        root = np.sqrt(np.asarray(self.x))
        s = np.outer(root, root).astype(complex)
        np.fill_diagonal(s, 1.0)
        return s

    def squared_visibilities(self, n: int | None = None) -> np.ndarray:
        if n is not None and n != self.n:
            raise ValueError(f"model carries {self.n} visibilities, instance has n={n}")
        v = np.asarray(self.x)
        return v * v

    def to_dict(self) -> dict:
        return {"type": "obb", "x": list(self.x)}


class ExplicitModel:
    """Arbitrary overlap matrix, validated as a Gram matrix of unit vectors.

    The matrix must be Hermitian with unit diagonal, entries of modulus at
    most 1, and positive semidefinite up to an eigenvalue tolerance of
    -1e-10 (numerical Gram matrices routinely carry tiny negative
    eigenvalues).
    """

    def __init__(self, s):
        s = np.asarray(s, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("overlap matrix must be square")
        if not np.allclose(s, s.conj().T, atol=_MATRIX_ATOL):
            raise ValueError("overlap matrix must be Hermitian")
        if not np.allclose(np.diagonal(s), 1.0, atol=_MATRIX_ATOL):
            raise ValueError("overlap matrix must have unit diagonal")
        if np.any(np.abs(s) > 1.0 + _MATRIX_ATOL):
            raise ValueError("overlap magnitudes cannot exceed 1")
        if np.linalg.eigvalsh(s).min() < _EIGENVALUE_FLOOR:
            raise ValueError("overlap matrix is not positive semidefinite")
        self.s = s

    @property
    def n(self) -> int:
        return self.s.shape[0]

    def overlap_matrix(self, n: int) -> np.ndarray:
        if n != self.n:
            raise ValueError(f"model carries a {self.n}x{self.n} matrix, instance has n={n}")
        return self.s

    def to_dict(self) -> dict:
        return {
            "type": "explicit",
            "s_real": self.s.real.tolist(),
            "s_imag": self.s.imag.tolist(),
        }


def overlap_matrix(model, n: int) -> np.ndarray:
    """The n x n pairwise overlap matrix of ``model``."""
    return model.overlap_matrix(n)


def overlap_product(s, perm) -> complex:
    """Product of overlaps S[i, perm[i]] over all rows.

    For the homogeneous model this is x raised to the number of moved
    points; for the OBB model a cycle over a subset contributes the product
    of that subset's visibilities.
    """
    s = np.asarray(s)
    word = np.asarray(perm, dtype=int)
    return complex(np.prod(s[np.arange(word.size), word]))


def quadratic_mean_visibility(model) -> float:
    """Quadratic mean of the pairwise two-photon interference visibilities.

    Pair (i, j) has visibility x_i * x_j; the quadratic mean is the square
    root of the order-2 symmetric mean of the squared per-photon
    visibilities.  For the homogeneous model it reduces to x**2.  Explicit
    overlap matrices are rejected: no comparable mean is defined for them.
    """
    if isinstance(model, HomogeneousModel):
        return model.x * model.x
    if isinstance(model, GeneralizedOBBModel):
        if model.n < 2:
            raise ValueError("need at least two photons for a pairwise mean")
        means = symmetric_means(model.squared_visibilities()).means
        return float(np.sqrt(means[2]))
    raise ValueError("quadratic mean is only defined for homogeneous and OBB models")


def model_from_dict(data: dict):
    """Build a model from its JSON descriptor."""
    if "type" not in data:
        raise ValueError("model descriptor needs a 'type' field")
    kind = data["type"]
    if kind == "homogeneous":
        _reject_unknown(data, {"type", "x"})
        return HomogeneousModel(x=float(data["x"]))
    if kind == "obb":
        _reject_unknown(data, {"type", "x"})
        return GeneralizedOBBModel(x=tuple(data["x"]))
    if kind == "explicit":
        _reject_unknown(data, {"type", "s_real", "s_imag"})
        real = np.asarray(data["s_real"], dtype=float)
        imag = np.asarray(data.get("s_imag", np.zeros_like(real)), dtype=float)
        return ExplicitModel(real + 1j * imag)
    raise ValueError(f"unknown model type {kind!r}")


def _reject_unknown(data: dict, allowed: set):
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(f"unknown model fields: {sorted(unknown)}")
