"""Stochastic second-order models m u'' + F[u, u'] = p.

Each model evaluates, at an arbitrary set of points of the random domain,

* the acceleration ``u'' = (p - F) / m`` (:meth:`Model.rhs`);
* the enriched flow: the state ``(u, u')`` followed by the successive time
  derivatives ``u'', u''', ...`` obtained by differentiating the equation of
  motion along the trajectory (:meth:`Model.enriched_flow`);
* the decomposition of mass, damping, stiffness and forcing into
  ``constant matrix * random field`` terms that the Galerkin projection
  consumes (:meth:`Model.terms`).

Arrays of state have shape ``(n_dof, n_points)``; ``xi`` has shape
``(n_points, d)``.  Model parameters are either plain numbers or
:class:`Axis` references to a coordinate of the random domain.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np


class CapabilityError(ValueError):
    """Requested flow order exceeds what the model's derivative chain provides."""


class ForcingRangeError(LookupError):
    """Forcing record evaluated outside its time span."""


@dataclass(frozen=True)
class Axis:
    """Parameter equal to coordinate ``index`` of the random variable."""

    index: int

    def at(self, xi: np.ndarray) -> np.ndarray:
        return xi[:, self.index]


Param = Union[float, Axis]


def evaluate(p: Param, xi: np.ndarray):
    return p.at(xi) if isinstance(p, Axis) else float(p)


@dataclass(frozen=True, eq=False)
class GroundMotion:
    """Sampled ground acceleration (m/s^2) with linear interpolation between samples."""

    dt: float
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if not self.dt > 0:
            raise ValueError("ground-motion dt must be positive")
        if samples.ndim != 1 or len(samples) < 2:
            raise ValueError("ground-motion record needs at least 2 samples")
        if not np.all(np.isfinite(samples)):
            raise ValueError("ground-motion record has non-finite samples")
        object.__setattr__(self, "samples", samples)

    @property
    def duration(self) -> float:
        return self.dt * (len(self.samples) - 1)

    def __call__(self, t: float) -> float:
        tol = 1e-9 * self.dt
        if t < -tol or t > self.duration + tol:
            raise ForcingRangeError(
                f"ground motion requested at t={t:.6g} s, record covers [0, {self.duration:.6g}] s"
            )
        s = t / self.dt
        i = min(int(math.floor(s)), len(self.samples) - 2)
        i = max(i, 0)
        frac = s - i
        return float(self.samples[i] + frac * (self.samples[i + 1] - self.samples[i]))


@dataclass
class LinearTerms:
    """Mass, damping, stiffness and forcing as sums of ``matrix * field(xi)``.

    ``forcing`` entries ``(vector, field, signal)`` contribute
    ``vector * field(xi) * signal(t)`` to p.  ``cubic`` is a field ``c(xi)``
    adding ``c * u**3`` to the restoring force of a single-dof model.
    """

    n_dof: int
    mass: list = field(default_factory=list)
    stiffness: list = field(default_factory=list)
    damping: list = field(default_factory=list)
    forcing: list = field(default_factory=list)
    cubic: object = None


@dataclass(frozen=True)
class EnrichedState:
    """Enriched configuration state at time ``t``.

    ``levels[j]`` is the j-th time derivative of u, shape ``(n_dof, n_points)``.
    """

    t: float
    levels: tuple[np.ndarray, ...]

    def candidates(self) -> list[np.ndarray]:
        """Flow-map components in basis order: every dof of u, then of u', then u'', ..."""
        return [row for level in self.levels for row in level]


class Model:
    name = "model"
    n_dof = 1
    #: deepest flow order M the derivative chain supports (None = unbounded)
    max_flow_order: int | None = None

    def initial_state(self, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n = len(xi)
        u = np.empty((self.n_dof, n))
        v = np.empty((self.n_dof, n))
        for d in range(self.n_dof):
            u[d] = evaluate(self.u0[d], xi)
            v[d] = evaluate(self.v0[d], xi)
        return u, v

    def rhs(self, t: float, u: np.ndarray, v: np.ndarray, xi: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def derivative_levels(self, t, u, v, xi, order) -> list[np.ndarray]:
        raise NotImplementedError

    def enriched_flow(self, t: float, u, v, xi, order: int) -> EnrichedState:
        """Levels u, u', ..., d^(order+1)u / dt^(order+1) at time ``t``."""
        if order < 0:
            raise ValueError("flow order must be >= 0")
        if self.max_flow_order is not None and order > self.max_flow_order:
            raise CapabilityError(
                f"{self.name} provides flow order up to {self.max_flow_order}, requested {order}"
            )
        return EnrichedState(t, tuple(self.derivative_levels(t, u, v, xi, order)))

    def terms(self, xi: np.ndarray) -> LinearTerms:
        raise NotImplementedError

    def parameters(self) -> dict:
        raise NotImplementedError

    def axes_used(self) -> set[int]:
        return {p.index for p in self.parameters().values() if isinstance(p, Axis)}


def _scalar_ic(x) -> tuple:
    return x if isinstance(x, tuple) else (x,)


@dataclass(frozen=True)
class FreeSDOF(Model):
    """Undamped free vibration m u'' + k u = 0."""

    m: Param
    k: Param
    u0: Param = 0.0
    v0: Param = 0.0
    name = "free_sdof"

    def __post_init__(self):
        object.__setattr__(self, "u0", _scalar_ic(self.u0))
        object.__setattr__(self, "v0", _scalar_ic(self.v0))

    def rhs(self, t, u, v, xi):
        return -(evaluate(self.k, xi) / evaluate(self.m, xi)) * u

    def derivative_levels(self, t, u, v, xi, order):
        r = -evaluate(self.k, xi) / evaluate(self.m, xi)
        levels = [u, v]
        for j in range(order):
            levels.append(r * levels[j])
        return levels

    def terms(self, xi):
        return LinearTerms(1, mass=[(np.eye(1), evaluate(self.m, xi))],
                           stiffness=[(np.eye(1), evaluate(self.k, xi))])

    def parameters(self):
        return {"m": self.m, "k": self.k, "u0": self.u0[0], "v0": self.v0[0]}


@dataclass(frozen=True)
class ForcedSDOF(Model):
    """Undamped vibration under harmonic load: m u'' + k u = q sin(t)."""

    m: Param
    k: Param
    q: Param
    u0: Param = 0.0
    v0: Param = 0.0
    name = "forced_sdof"

    def __post_init__(self):
        object.__setattr__(self, "u0", _scalar_ic(self.u0))
        object.__setattr__(self, "v0", _scalar_ic(self.v0))

    def rhs(self, t, u, v, xi):
        return (evaluate(self.q, xi) * math.sin(t) - evaluate(self.k, xi) * u) / evaluate(self.m, xi)

    def derivative_levels(self, t, u, v, xi, order):
        m, k, q = evaluate(self.m, xi), evaluate(self.k, xi), evaluate(self.q, xi)
        levels = [u, v]
        for j in range(order):
            dsin = math.sin(t + 0.5 * j * math.pi)
            levels.append((q * dsin - k * levels[j]) / m)
        return levels

    def terms(self, xi):
        return LinearTerms(1, mass=[(np.eye(1), evaluate(self.m, xi))],
                           stiffness=[(np.eye(1), evaluate(self.k, xi))],
                           forcing=[(np.ones(1), evaluate(self.q, xi), math.sin)])

    def parameters(self):
        return {"m": self.m, "k": self.k, "q": self.q, "u0": self.u0[0], "v0": self.v0[0]}


@dataclass(frozen=True)
class NonlinearSDOF(Model):
    """Softening/hardening free vibration m u'' + (1 + rho u^2) k u = 0."""

    m: Param
    k: Param
    rho: Param
    u0: Param = 0.0
    v0: Param = 0.0
    name = "nonlinear_sdof"

    def __post_init__(self):
        object.__setattr__(self, "u0", _scalar_ic(self.u0))
        object.__setattr__(self, "v0", _scalar_ic(self.v0))

    def rhs(self, t, u, v, xi):
        k, m, rho = evaluate(self.k, xi), evaluate(self.m, xi), evaluate(self.rho, xi)
        return -(k / m) * (1.0 + rho * u * u) * u

    def derivative_levels(self, t, u, v, xi, order):
        # d^j/dt^j of u^2 and u^3 by the Leibniz rule over the levels known so far
        k, m, rho = evaluate(self.k, xi), evaluate(self.m, xi), evaluate(self.rho, xi)
        r = -k / m
        levels = [u, v]
        sq = []
        for j in range(order):
            sq.append(sum(math.comb(j, i) * levels[i] * levels[j - i] for i in range(j + 1)))
            cube = sum(math.comb(j, i) * sq[i] * levels[j - i] for i in range(j + 1))
            levels.append(r * (levels[j] + rho * cube))
        return levels

    def terms(self, xi):
        k, rho = evaluate(self.k, xi), evaluate(self.rho, xi)
        return LinearTerms(1, mass=[(np.eye(1), evaluate(self.m, xi))],
                           stiffness=[(np.eye(1), k)], cubic=rho * k)

    def parameters(self):
        return {"m": self.m, "k": self.k, "rho": self.rho, "u0": self.u0[0], "v0": self.v0[0]}


def story_blocks(n: int) -> list[np.ndarray]:
    """Stiffness pattern of each story spring of an n-story shear building."""
    blocks = []
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        if j > 0:
            e[j - 1] = -1.0
        blocks.append(np.outer(e, e))
    return blocks


@dataclass(frozen=True)
class ShearBuilding(Model):
    """Shear building under base excitation: M u'' + C u' + K u = -M iota ug''(t).

    ``M = m I``, story stiffnesses ``k[j]`` couple floors j-1 and j (floor -1 is
    the ground) and Rayleigh damping is ``C = alpha M + beta K``.  Only the
    levels (u, u', u'') are available since the record has no derivatives.
    """

    m: Param
    k: tuple
    alpha: Param
    beta: Param
    ground_motion: GroundMotion | Callable[[float], float]
    iota: tuple = ()
    u0: tuple = ()
    v0: tuple = ()
    name = "shear_building"
    max_flow_order = 1

    def __post_init__(self):
        n = len(self.k)
        object.__setattr__(self, "k", tuple(self.k))
        for attr in ("iota", "u0", "v0"):
            val = getattr(self, attr)
            default = 1.0 if attr == "iota" else 0.0
            val = tuple(val) if val != () else (default,) * n
            if len(val) != n:
                raise ValueError(f"{attr} needs {n} entries")
            object.__setattr__(self, attr, val)

    @property
    def n_dof(self) -> int:
        return len(self.k)

    def _story_force(self, x: np.ndarray, ks: Sequence) -> np.ndarray:
        drift = x.copy()
        drift[1:] -= x[:-1]
        f = np.empty_like(x)
        for j, kj in enumerate(ks):
            f[j] = kj * drift[j]
        out = f.copy()
        out[:-1] -= f[1:]
        return out

    def rhs(self, t, u, v, xi):
        m, al, be = evaluate(self.m, xi), evaluate(self.alpha, xi), evaluate(self.beta, xi)
        ks = [evaluate(kj, xi) for kj in self.k]
        ug = self.ground_motion(t)
        iota = np.asarray(self.iota)[:, None]
        restoring = self._story_force(u + be * v, ks)
        return -iota * ug - al * v - restoring / m

    def derivative_levels(self, t, u, v, xi, order):
        levels = [u, v]
        if order >= 1:
            levels.append(self.rhs(t, u, v, xi))
        return levels

    def stiffness_matrix(self, xi: np.ndarray | None = None) -> np.ndarray:
        """Deterministic K for one parameter point (e.g. the mean stiffnesses)."""
        ks = [evaluate(kj, xi) if xi is not None else float(kj) for kj in self.k]
        ks = [float(np.ravel(kj)[0]) for kj in ks]
        return sum(kj * B for kj, B in zip(ks, story_blocks(self.n_dof)))

    def terms(self, xi):
        n = self.n_dof
        m, al, be = evaluate(self.m, xi), evaluate(self.alpha, xi), evaluate(self.beta, xi)
        ks = [evaluate(kj, xi) for kj in self.k]
        blocks = story_blocks(n)
        eye = np.eye(n)
        return LinearTerms(
            n,
            mass=[(eye, m)],
            stiffness=list(zip(blocks, ks)),
            damping=[(eye, al * m)] + [(B, be * kj) for B, kj in zip(blocks, ks)],
            forcing=[(-np.asarray(self.iota, dtype=float), m, self.ground_motion)],
        )

    def parameters(self):
        out = {"m": self.m, "alpha": self.alpha, "beta": self.beta}
        out.update({f"k{j + 1}": kj for j, kj in enumerate(self.k)})
        return out


def rhs(model: Model, t: float, u, v, xi) -> np.ndarray:
    return model.rhs(t, u, v, xi)


def enriched_flow(model: Model, t: float, u, v, xi, order: int) -> EnrichedState:
    return model.enriched_flow(t, u, v, xi, order)
