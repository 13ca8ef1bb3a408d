"""Functions on the random domain, sampled at quadrature nodes, and orthogonal bases of them."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .probability import moments
from .quadrature import QuadratureGrid

DROP_TOL = 1e-10


class DegenerateBasisError(ValueError):
    """Raised when orthogonalisation leaves no non-constant basis function."""


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: QuadratureGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.Q,):
            raise ValueError(f"expected {self.grid.Q} node values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid function has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, grid: QuadratureGrid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.Q, float(c)))

    @classmethod
    def of(cls, grid: QuadratureGrid, fn) -> "GridFunction":
        """Sample ``fn(nodes)`` where ``nodes`` has shape ``(Q, d)``."""
        return cls(grid, np.broadcast_to(fn(grid.nodes), (grid.Q,)))


@dataclass(frozen=True, eq=False)
class Basis:
    """Orthogonal functions ``Psi_0 = 1, Psi_1, ..., Psi_P`` stored row-wise in ``values``.

    ``kept`` lists, for each member, its position in the candidate list it was
    orthogonalised from.
    """

    grid: QuadratureGrid
    values: np.ndarray
    squared_norms: np.ndarray
    kept: tuple[int, ...] = field(default=())

    @property
    def P(self) -> int:
        return len(self.squared_norms) - 1

    @property
    def size(self) -> int:
        return len(self.squared_norms)

    @property
    def functions(self) -> list[GridFunction]:
        return [GridFunction(self.grid, row) for row in self.values]

    def __iter__(self) -> Iterator[GridFunction]:
        return iter(self.functions)

    @cached_property
    def projector(self) -> np.ndarray:
        """Row ``j`` maps node values f to the coefficient <Psi_j, f>/<Psi_j, Psi_j>."""
        return self.values * self.grid.weights / self.squared_norms[:, None]

    def gram(self, other: "Basis | None" = None, weight=None) -> np.ndarray:
        """Matrix ``<Psi_i, weight * Phi_j>`` against ``other`` (default: self)."""
        rhs = self.values if other is None else other.values
        lhs = self.values * self.grid.weights
        if weight is not None:
            lhs = lhs * weight
        return lhs @ rhs.T

    def reconstruct(self, coefficients) -> np.ndarray:
        """Node values of sum_j c_j Psi_j; leading axes of ``coefficients`` are kept."""
        return np.asarray(coefficients) @ self.values


def orthogonalize(grid: QuadratureGrid, candidates: np.ndarray, drop_tol: float = DROP_TOL) -> Basis:
    """Array form of :func:`gram_schmidt`; ``candidates`` has shape ``(n, Q)``."""
    candidates = np.asarray(candidates, dtype=float)
    if candidates.ndim != 2 or len(candidates) == 0:
        raise DegenerateBasisError("no candidate functions")
    if not np.array_equal(candidates[0], np.ones(grid.Q)):
        raise ValueError("the first candidate must be the constant function 1")
    w = grid.weights
    kept_rows = [candidates[0]]
    kept_norms = [float(np.dot(w, candidates[0]))]
    kept_idx = [0]
    for idx in range(1, len(candidates)):
        c = candidates[idx]
        n0 = np.sqrt(np.dot(w, c * c))
        if not (np.isfinite(n0) and n0 > 0.0):
            continue
        x = c / n0
        # modified Gram-Schmidt, run twice
        for _ in range(2):
            for q, nq in zip(kept_rows, kept_norms):
                x = x - (np.dot(w, x * q) / nq) * q
        r = np.sqrt(np.dot(w, x * x))
        if r < drop_tol:
            continue
        x = x * n0
        kept_rows.append(x)
        kept_norms.append(float(np.dot(w, x * x)))
        kept_idx.append(idx)
    if len(kept_rows) == 1:
        raise DegenerateBasisError(
            "all non-constant candidates are linearly dependent on the constant; "
            "deterministic states need a gPC warm-up"
        )
    values = np.array(kept_rows)
    values.setflags(write=False)
    return Basis(grid, values, np.array(kept_norms), tuple(kept_idx))


def gram_schmidt(candidates: Sequence[GridFunction], drop_tol: float = DROP_TOL) -> Basis:
    """Orthogonalise ``candidates`` (first one must be constant 1) against the grid measure.

    Each candidate is scaled to unit norm, orthogonalised twice by modified
    Gram-Schmidt and scaled back, so survivors come out exactly as the
    textbook recurrence defines them.  A candidate whose residual norm falls
    below ``drop_tol`` times its own norm is dropped as linearly dependent.

    Raises
    ------
    DegenerateBasisError
        If the list is empty or every non-constant candidate is dropped.
    """
    if not candidates:
        raise DegenerateBasisError("no candidate functions")
    grid = candidates[0].grid
    if any(c.grid is not grid for c in candidates):
        raise ValueError("candidates live on different grids")
    return orthogonalize(grid, np.array([c.values for c in candidates]), drop_tol)


def graded_lex_indices(d: int, count: int) -> list[tuple[int, ...]]:
    """First ``count`` multi-indices of length ``d`` by total degree, then
    lexicographically with the leading variable's exponent largest first."""

    def of_degree(deg, nvar):
        if nvar == 1:
            yield (deg,)
            return
        for first in range(deg, -1, -1):
            for rest in of_degree(deg - first, nvar - 1):
                yield (first,) + rest

    out: list[tuple[int, ...]] = []
    deg = 0
    while len(out) < count:
        for alpha in of_degree(deg, d):
            out.append(alpha)
            if len(out) == count:
                break
        deg += 1
    return out


def gpc_basis(grid: QuadratureGrid, index_bound: int, drop_tol: float = DROP_TOL) -> Basis:
    """Orthogonal polynomial basis of ``index_bound + 1`` members built from monomials.

    Monomials are taken in graded-lexicographic order in the standardised
    variables (x - mean)/std of each axis and orthogonalised numerically.
    """
    if index_bound < 0:
        raise ValueError("index_bound must be >= 0")
    z = np.empty_like(grid.nodes)
    for i, dist in enumerate(grid.domain.axes):
        mean, var = moments(dist)
        z[:, i] = (grid.nodes[:, i] - mean) / np.sqrt(var)
    rows = []
    for alpha in graded_lex_indices(grid.d, index_bound + 1):
        rows.append(np.prod(z ** np.array(alpha), axis=1))
    rows[0] = np.ones(grid.Q)
    if index_bound == 0:
        values = np.ones((1, grid.Q))
        values.setflags(write=False)
        return Basis(grid, values, np.array([1.0]), (0,))
    return orthogonalize(grid, np.array(rows), drop_tol)


def project(basis: Basis, f: GridFunction) -> np.ndarray:
    """Coefficients <Psi_j, f>/<Psi_j, Psi_j>, j = 0..P."""
    if f.grid is not basis.grid:
        raise ValueError("function and basis live on different grids")
    return basis.projector @ f.values


def mean_var(basis: Basis, coefficients) -> tuple:
    """Mean and variance of the expansion sum_j c_j Psi_j.

    ``coefficients`` may carry leading axes (e.g. one row per degree of
    freedom); the statistics are returned with the same leading shape.
    """
    c = np.asarray(coefficients, dtype=float)
    if c.shape[-1] != basis.size:
        raise ValueError(f"expected {basis.size} coefficients, got {c.shape[-1]}")
    var = (c[..., 1:] ** 2) @ basis.squared_norms[1:]
    mean = c[..., 0]
    if c.ndim == 1:
        return float(mean), float(var)
    return mean, var
