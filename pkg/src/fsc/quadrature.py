"""Gaussian rules matched to each axis measure, tensor grids, and the discrete inner product.

Nodes and weights come from the Golub-Welsch eigenvalue problem on the
three-term recurrence of the classical family matching each axis
(Legendre, Jacobi, generalised Laguerre).  Weights are normalised to sum to
one so that a rule integrates directly against the probability measure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .probability import BETA, GAMMA, UNIFORM, Distribution, RandomDomain


def jacobi_recurrence(n: int, aj: float, bj: float) -> tuple[np.ndarray, np.ndarray]:
    """Monic recurrence coefficients for the weight (1-x)**aj (1+x)**bj on [-1, 1].

    Returns ``(alpha, beta)`` with ``alpha[0..n-1]`` the diagonal and
    ``beta[1..n-1]`` the squared off-diagonal of the Jacobi matrix
    (``beta[0]`` is unused and left at zero).
    """
    k = np.arange(n, dtype=float)
    s = aj + bj
    alpha = np.empty(n)
    beta = np.zeros(n)
    alpha[0] = (bj - aj) / (s + 2.0)
    if n > 1:
        kk = k[1:]
        alpha[1:] = (bj * bj - aj * aj) / ((2 * kk + s) * (2 * kk + s + 2))
        beta[1] = 4.0 * (1 + aj) * (1 + bj) / ((2 + s) ** 2 * (3 + s))
    if n > 2:
        kk = k[2:]
        beta[2:] = (
            4.0 * kk * (kk + aj) * (kk + bj) * (kk + s)
            / ((2 * kk + s) ** 2 * (2 * kk + s + 1) * (2 * kk + s - 1))
        )
    return alpha, beta


def laguerre_recurrence(n: int, al: float) -> tuple[np.ndarray, np.ndarray]:
    """Monic recurrence coefficients for the weight x**al exp(-x) on [0, inf)."""
    k = np.arange(n, dtype=float)
    return 2 * k + al + 1, k * (k + al)


def golub_welsch(alpha: np.ndarray, beta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and probability-normalised weights from a Jacobi matrix.

    Nodes are the eigenvalues.  Weights come from the Christoffel function
    ``1 / sum_k p_k(x)**2`` of the orthonormal polynomials rather than from
    eigenvector components, which lose all relative accuracy once a weight
    drops below machine epsilon (the far tail of long Laguerre rules).
    """
    n = len(alpha)
    if n == 1:
        return alpha.copy(), np.ones(1)
    x = eigh_tridiagonal(alpha, np.sqrt(beta[1:]), eigvals_only=True)
    sb = np.sqrt(beta)
    p_prev = np.zeros(n)
    p = np.ones(n)
    total = np.ones(n)
    log_scale = np.zeros(n)  # total and p**2 are stored divided by exp(log_scale)
    for k in range(n - 1):
        p_prev, p = p, ((x - alpha[k]) * p - (sb[k] * p_prev if k else 0.0)) / sb[k + 1]
        total += p * p
        big = total > 1e200
        if np.any(big):
            p[big] *= 1e-100
            p_prev[big] *= 1e-100
            total[big] *= 1e-200
            log_scale[big] += 200 * np.log(10.0)
    logw = -(np.log(total) + log_scale)
    w = np.exp(logw - logw.max())
    return x, w / w.sum()


def gauss_rule(dist: Distribution, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``n``-point Gaussian rule for ``dist``, exact to polynomial degree 2n-1.

    Weights sum to one.
    """
    if n < 1:
        raise ValueError("a quadrature rule needs n >= 1 points")
    if dist.kind in (UNIFORM, BETA):
        x, w = golub_welsch(*jacobi_recurrence(n, *dist.jacobi_exponents))
        nodes = dist.a + 0.5 * (dist.b - dist.a) * (x + 1.0)
    elif dist.kind == GAMMA:
        x, w = golub_welsch(*laguerre_recurrence(n, dist.laguerre_exponent))
        nodes = dist.a + x / dist.beta
    else:  # pragma: no cover - guarded by Distribution
        raise ValueError(dist.kind)
    return nodes, w


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Tensor-product rule over the random domain.

    ``nodes`` has shape ``(Q, d)``; node ``i`` carries weight ``weights[i]``.
    Grids compare by identity so that functions sampled on different grids
    never mix silently.
    """

    domain: RandomDomain
    nodes: np.ndarray
    weights: np.ndarray
    counts: tuple[int, ...]
    axis_rules: tuple[tuple[np.ndarray, np.ndarray], ...] = field(repr=False)

    @property
    def Q(self) -> int:
        return len(self.weights)

    @property
    def d(self) -> int:
        return self.nodes.shape[1]

    def axis(self, i: int) -> np.ndarray:
        """Coordinate ``i`` of every node."""
        return self.nodes[:, i]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def tensor_grid(domain: RandomDomain, per_axis: Sequence[int]) -> QuadratureGrid:
    """Full tensor product of per-axis Gaussian rules.

    Nodes are ordered lexicographically with axis 0 varying slowest.
    """
    per_axis = tuple(int(n) for n in per_axis)
    if len(per_axis) != domain.d:
        raise ValueError(f"expected {domain.d} per-axis counts, got {len(per_axis)}")
    rules = tuple(gauss_rule(dist, n) for dist, n in zip(domain.axes, per_axis))
    mesh = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    wmesh = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    weights = np.prod(np.stack([m.ravel() for m in wmesh], axis=1), axis=1)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureGrid(domain, nodes, weights, per_axis, rules)


def inner(grid: QuadratureGrid, f, g) -> float:
    """Discrete inner product sum_i f(xi_i) g(xi_i) w_i of two grid functions."""
    if f.grid is not grid or g.grid is not grid:
        raise ValueError("grid functions are not defined on this quadrature grid")
    return float(np.dot(f.values * g.values, grid.weights))
