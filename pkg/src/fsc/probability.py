"""Random inputs: the axis distributions of the random domain and their sampling.

Every distribution is one of the three families used for stochastic model
parameters (uniform, beta and gamma), possibly shifted and scaled onto an
interval ``[a, b]`` (or ``[a, inf)`` for gamma).  The joint measure over the
random domain is the product of the axis measures.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import special

UNIFORM = "uniform"
BETA = "beta"
GAMMA = "gamma"
KINDS = (UNIFORM, BETA, GAMMA)


@dataclass(frozen=True)
class Distribution:
    """One random axis.

    ``alpha`` and ``beta`` are the shape parameters of the beta family, or the
    shape and *rate* of the gamma family (density proportional to
    ``(x-a)**(alpha-1) * exp(-beta*(x-a))``).  They are ignored for uniform.
    """

    kind: str
    a: float
    b: float = math.inf
    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if not math.isfinite(self.a):
            raise ValueError("lower support bound must be finite")
        if self.kind in (UNIFORM, BETA):
            if not (math.isfinite(self.b) and self.b > self.a):
                raise ValueError(f"{self.kind} requires finite b > a, got [{self.a}, {self.b}]")
        if self.kind in (BETA, GAMMA):
            if not (self.alpha > 0 and self.beta > 0):
                raise ValueError(f"{self.kind} requires alpha > 0 and beta > 0")
        if self.kind == GAMMA and self.b != math.inf:
            raise ValueError("gamma support is [a, inf)")

    @classmethod
    def uniform(cls, a: float, b: float) -> "Distribution":
        return cls(UNIFORM, float(a), float(b))

    @classmethod
    def beta_on(cls, alpha: float, beta: float, a: float = 0.0, b: float = 1.0) -> "Distribution":
        return cls(BETA, float(a), float(b), float(alpha), float(beta))

    @classmethod
    def gamma(cls, alpha: float, beta: float, a: float = 0.0) -> "Distribution":
        return cls(GAMMA, float(a), math.inf, float(alpha), float(beta))

    @property
    def jacobi_exponents(self) -> tuple[float, float]:
        """Exponents of the Jacobi weight (1-x)**aJ (1+x)**bJ on [-1, 1].

        The beta density in (x - a) and (b - x) maps onto the Jacobi weight
        with the parameters swapped: aJ = beta - 1, bJ = alpha - 1.
        """
        if self.kind == UNIFORM:
            return 0.0, 0.0
        if self.kind == BETA:
            return self.beta - 1.0, self.alpha - 1.0
        raise ValueError("Jacobi exponents are only defined on bounded axes")

    @property
    def laguerre_exponent(self) -> float:
        if self.kind != GAMMA:
            raise ValueError("Laguerre exponent is only defined for gamma axes")
        return self.alpha - 1.0

    def in_support(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x >= self.a) & (x <= self.b)


@dataclass(frozen=True)
class RandomDomain:
    """Product of independent axes; ``axes[i]`` is the law of the i-th variable."""

    axes: tuple[Distribution, ...]

    def __init__(self, axes: Sequence[Distribution]):
        axes = tuple(axes)
        if not axes:
            raise ValueError("a random domain needs at least one axis")
        object.__setattr__(self, "axes", axes)

    @property
    def d(self) -> int:
        return len(self.axes)


def density(dist: Distribution, x):
    """Probability density of ``dist`` at ``x`` (scalar or array)."""
    x = np.asarray(x, dtype=float)
    if not np.all(dist.in_support(x)):
        raise ValueError(f"x outside the support [{dist.a}, {dist.b}] of the {dist.kind} axis")
    if dist.kind == UNIFORM:
        out = np.full_like(x, 1.0 / (dist.b - dist.a))
    elif dist.kind == BETA:
        al, be, a, b = dist.alpha, dist.beta, dist.a, dist.b
        with np.errstate(divide="ignore"):
            out = (x - a) ** (al - 1) * (b - x) ** (be - 1) / ((b - a) ** (al + be - 1) * special.beta(al, be))
    else:
        al, be, y = dist.alpha, dist.beta, x - dist.a
        with np.errstate(divide="ignore"):
            logf = al * math.log(be) - special.gammaln(al) + special.xlogy(al - 1, y) - be * y
        out = np.exp(logf)
    return out if out.ndim else float(out)


def moments(dist: Distribution) -> tuple[float, float]:
    """Closed-form (mean, variance)."""
    if dist.kind == UNIFORM:
        return 0.5 * (dist.a + dist.b), (dist.b - dist.a) ** 2 / 12.0
    if dist.kind == BETA:
        al, be, w = dist.alpha, dist.beta, dist.b - dist.a
        s = al + be
        return dist.a + w * al / s, w * w * al * be / (s * s * (s + 1))
    return dist.a + dist.alpha / dist.beta, dist.alpha / dist.beta**2


def raw_moment(dist: Distribution, k: int) -> float:
    """E[Y**k] of the standardised variable Y: (x-a)/(b-a) if bounded, beta*(x-a) for gamma."""
    if dist.kind == UNIFORM:
        return 1.0 / (k + 1)
    if dist.kind == BETA:
        return math.exp(special.betaln(dist.alpha + k, dist.beta) - special.betaln(dist.alpha, dist.beta))
    return math.exp(special.gammaln(dist.alpha + k) - special.gammaln(dist.alpha))


def sample(domain: RandomDomain, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. points of the product measure, shape ``(n, d)``.

    Axes are drawn one after another from a single seeded generator, so the
    result is a pure function of ``(domain, n, seed)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    out = np.empty((n, domain.d))
    for i, dist in enumerate(domain.axes):
        if dist.kind == UNIFORM:
            out[:, i] = rng.uniform(dist.a, dist.b, size=n)
        elif dist.kind == BETA:
            out[:, i] = dist.a + (dist.b - dist.a) * rng.beta(dist.alpha, dist.beta, size=n)
        else:
            out[:, i] = dist.a + rng.gamma(dist.alpha, 1.0 / dist.beta, size=n)
    return out
