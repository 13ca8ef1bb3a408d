"""Reference solutions and error measures.

* closed-form moments of the free undamped oscillator with a uniformly
  distributed stiffness;
* a high-resolution quadrature reference for the harmonically forced
  oscillator with random stiffness and load amplitude;
* a plain Monte Carlo engine integrating sampled deterministic trajectories
  with the same RK4 step as the spectral solver;
* time-averaged error of a moment history.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import sici

from .integrate import TimeGrid, rk4_step
from .models import Axis, ForcedSDOF, FreeSDOF, Model
from .probability import UNIFORM, RandomDomain, moments, sample
from .quadrature import gauss_rule
from .series import MomentSeries, quantity_names

log = logging.getLogger(__name__)

#: below this time the closed-form variances lose digits to cancellation
#: (relative error grows like eps / t^4); quadrature takes over there
SMALL_T = 0.5


def cosine_integral(x):
    """``Ci(x) = -int_x^inf cos(s)/s ds`` for x > 0."""
    return sici(x)[1]


@dataclass(frozen=True)
class ExactSDOFReference:
    """Free undamped oscillator m u'' + k u = 0 with k ~ Uniform[ka, kb]."""

    m: float
    ka: float
    kb: float
    u0: float
    v0: float

    def __post_init__(self):
        if not (self.kb > self.ka > 0):
            raise ValueError("need kb > ka > 0")
        if not self.m > 0:
            raise ValueError("mass must be positive")

    @classmethod
    def from_model(cls, model: FreeSDOF, domain: RandomDomain) -> "ExactSDOFReference":
        """Reference for a free model whose stiffness is a uniform axis and the rest constant."""
        if not isinstance(model, FreeSDOF) or not isinstance(model.k, Axis):
            raise ValueError("exact reference needs a free SDOF model with random stiffness")
        dist = domain.axes[model.k.index]
        if dist.kind != UNIFORM:
            raise ValueError("exact reference needs a uniformly distributed stiffness")
        params = [model.m, model.u0[0], model.v0[0]]
        if any(isinstance(p, Axis) for p in params):
            raise ValueError("exact reference needs deterministic mass and initial conditions")
        return cls(float(model.m), dist.a, dist.b, float(model.u0[0]), float(model.v0[0]))

    def limits(self) -> dict[str, float]:
        """Long-time limits of the variances."""
        m, ka, kb, u, v = self.m, self.ka, self.kb, self.u0, self.v0
        return {
            "u": 0.5 * u**2 + 0.5 * np.log(kb / ka) * (m / (kb - ka)) * v**2,
            "v": 0.25 * (ka + kb) / m * u**2 + 0.5 * v**2,
            "a": (ka**2 + ka * kb + kb**2) / (6 * m**2) * u**2 + 0.25 * (ka + kb) / m * v**2,
        }

    # antiderivatives in k of the first and second moments, scaled by t^2
    def _omega(self, k):
        return np.sqrt(k / self.m)

    def _tau(self, t, k):
        u, v = self.u0, self.v0
        wt = self._omega(k) * t
        s, c = np.sin(wt), np.cos(wt)
        tu = (wt * s + c) * u - c * v * t
        tv = -(2 * wt * s + (2 - wt**2) * c) * u / t + (wt * s + c) * v
        ta = (-((wt**3 - 6 * wt) * s + 3 * (wt**2 - 2) * c) * u / t**2
              - (2 * wt * s + (2 - wt**2) * c) * v / t)
        return tu, tv, ta

    def _rho(self, t, k):
        u, v = self.u0, self.v0
        wt = self._omega(k) * t
        s2, c2 = np.sin(2 * wt), np.cos(2 * wt)
        sq = np.sin(wt) ** 2
        ru = (-0.25 * (sq - wt * s2 - wt**2) * u**2 - 0.5 * c2 * u * v * t
              + 0.25 * (np.log(k) - 2 * cosine_integral(2 * wt)) * v**2 * t**2)
        rv = ((2 * (3 * wt - 2 * wt**3) * s2 + 3 * (1 - 2 * wt**2) * c2 + 2 * wt**4) * u**2 / (16 * t**2)
              - 0.25 * (2 * wt * s2 + (1 - 2 * wt**2) * c2) * u * v / t
              - 0.25 * (sq - wt * s2 - wt**2) * v**2)
        p5 = 2 * wt**5 - 10 * wt**3 + 15 * wt
        p4 = 2 * wt**4 - 6 * wt**2 + 3
        p3 = 2 * wt**3 - 3 * wt
        ra = ((6 * p5 * s2 + 15 * p4 * c2 + 4 * wt**6) * u**2 / (48 * t**4)
              + (4 * p3 * s2 - 2 * p4 * c2) * u * v / (8 * t**3)
              - (2 * p3 * s2 + 3 * (2 * wt**2 - 1) * c2 - 2 * wt**4) * v**2 / (16 * t**2))
        return ru, rv, ra


def _small_time_moments(ref: ExactSDOFReference, t: np.ndarray):
    """Moments by Gauss-Legendre quadrature of the pointwise solution; exact to rounding for small t."""
    x, w = np.polynomial.legendre.leggauss(64)
    k = 0.5 * (ref.ka + ref.kb) + 0.5 * (ref.kb - ref.ka) * x
    w = 0.5 * w
    om = np.sqrt(k / ref.m)[None, :]
    wt = om * t[:, None]
    u = ref.u0 * np.cos(wt) + ref.v0 / om * np.sin(wt)
    v = -ref.u0 * om * np.sin(wt) + ref.v0 * np.cos(wt)
    a = -(k / ref.m)[None, :] * u
    out = []
    for z in (u, v, a):
        mean = z @ w
        out.append((mean, ((z - mean[:, None]) ** 2) @ w))
    return out


def exact_moments(ref: ExactSDOFReference, t) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Mean and variance of u, u', u'' at times ``t``.

    Returns ``{"u": (E, Var), "v": (E, Var), "a": (E, Var)}``.  For
    ``t < SMALL_T``, where the closed forms cancel catastrophically, the
    pointwise solution is integrated over k by Gauss quadrature instead.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("times must be non-negative")
    small = t < SMALL_T
    ts = np.where(small, 1.0, t)
    kappa = 2 * ref.m / ((ref.kb - ref.ka) * ts**2)
    tau_b, tau_a = ref._tau(ts, ref.kb), ref._tau(ts, ref.ka)
    rho_b, rho_a = ref._rho(ts, ref.kb), ref._rho(ts, ref.ka)
    near = _small_time_moments(ref, t[small])

    out = {}
    for j, name in enumerate(("u", "v", "a")):
        mean = kappa * (tau_b[j] - tau_a[j])
        var = kappa * (rho_b[j] - rho_a[j]) - mean**2
        mean[small], var[small] = near[j]
        out[name] = (mean, var)
    return out


def exact_series(ref: ExactSDOFReference, times) -> MomentSeries:
    series = MomentSeries.empty(times, quantity_names(1))
    mom = exact_moments(ref, times)
    for q, name in enumerate(("u", "v")):
        series.mean[q], series.var[q] = mom[name]
    return series


def forced_sdof_reference(model: ForcedSDOF, domain: RandomDomain, times,
                          n_points: int = 400) -> MomentSeries:
    """Moments of u and u' for ``m u'' + k u = q sin t`` with random k and q.

    The response is affine in q, so the q-moments enter exactly; the
    expectation over k uses an ``n_points`` Gauss rule of the k measure.
    Mass and initial conditions must be deterministic, and q independent of k.
    """
    if not isinstance(model.k, Axis):
        raise ValueError("reference needs a random stiffness")
    for p in (model.m, model.u0[0], model.v0[0]):
        if isinstance(p, Axis):
            raise ValueError("reference needs deterministic mass and initial conditions")
    m, u0, v0 = float(model.m), float(model.u0[0]), float(model.v0[0])
    if isinstance(model.q, Axis):
        if model.q.index == model.k.index:
            raise ValueError("load amplitude and stiffness must be independent axes")
        mq, vq = moments(domain.axes[model.q.index])
    else:
        mq, vq = float(model.q), 0.0

    kdist = domain.axes[model.k.index]
    k, w = gauss_rule(kdist, n_points)
    if np.any(np.abs(k - m) < 1e-8 * m) or (kdist.a < m < kdist.b):
        raise ValueError("stiffness range contains the resonance k = m")

    t = np.asarray(times, dtype=float)[:, None]
    om = np.sqrt(k / m)[None, :]
    c, s = np.cos(om * t), np.sin(om * t)
    denom = (k - m)[None, :]
    a_u = u0 * c + v0 / om * s
    g_u = (np.sin(t) - s / om) / denom
    a_v = -u0 * om * s + v0 * c
    g_v = (np.cos(t) - c) / denom

    series = MomentSeries.empty(times, quantity_names(1))
    for q, (a, g) in enumerate(((a_u, g_u), (a_v, g_v))):
        cond = a + mq * g
        mean = cond @ w
        series.mean[q] = mean
        series.var[q] = ((cond - mean[:, None]) ** 2) @ w + vq * ((g * g) @ w)
    return series


@dataclass
class MCResult:
    moments: MomentSeries
    n: int
    n_excluded: int
    seed: int


def _trajectory_moments(model: Model, xi: np.ndarray, tg: TimeGrid, nq: int):
    """Per-step mean and sum of squared deviations over the realizations ``xi``.

    Also returns the mask of realizations that stayed finite.
    """
    u, v = model.initial_state(xi)
    mean = np.empty((nq, tg.N + 1))
    m2 = np.empty((nq, tg.N + 1))
    finite = np.ones(len(xi), dtype=bool)

    def accel(t, U, V):
        return model.rhs(t, U, V, xi)

    def record(i, U, V):
        state = np.concatenate([U, V])
        mu = state.mean(axis=1)
        mean[:, i] = mu
        m2[:, i] = ((state - mu[:, None]) ** 2).sum(axis=1)

    record(0, u, v)
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(tg.N):
            u, v = rk4_step(accel, i * tg.dt, u, v, tg.dt, step=i, check=False)
            finite &= np.isfinite(u).all(axis=0) & np.isfinite(v).all(axis=0)
            record(i + 1, u, v)
    return mean, m2, finite


def monte_carlo(model: Model, domain: RandomDomain, n: int, seed: int, time_grid: TimeGrid,
                chunk: int = 100_000) -> MCResult:
    """Sample mean and unbiased variance of u and u' over ``n`` realizations.

    Realizations are integrated in chunks of ``chunk`` and merged in a fixed
    order, so results depend only on ``(n, seed, chunk)``.  Realizations that
    blow up are dropped and the survivors re-integrated.
    """
    if n < 2:
        raise ValueError("Monte Carlo needs at least 2 realizations")
    xi_all = sample(domain, n, seed)
    nq = 2 * model.n_dof

    def run(xi):
        count = 0
        mean = m2 = None
        keep = []
        for start in range(0, len(xi), chunk):
            block = xi[start:start + chunk]
            mu_b, m2_b, ok = _trajectory_moments(model, block, time_grid, nq)
            keep.append(ok)
            nb = len(block)
            if mean is None:
                mean, m2, count = mu_b, m2_b, nb
                continue
            # pairwise merge of mean and squared deviations
            tot = count + nb
            delta = mu_b - mean
            mean = mean + delta * (nb / tot)
            m2 = m2 + m2_b + delta**2 * (count * nb / tot)
            count = tot
        return mean, m2, np.concatenate(keep)

    mean, m2, ok = run(xi_all)
    excluded = int((~ok).sum())
    if excluded:
        log.warning("%d of %d Monte Carlo realizations diverged and were excluded", excluded, n)
        xi_ok = xi_all[ok]
        if len(xi_ok) < 2:
            raise FloatingPointError("fewer than 2 Monte Carlo realizations stayed finite")
        mean, m2, _ = run(xi_ok)
    used = n - excluded
    series = MomentSeries(time_grid.times, quantity_names(model.n_dof), mean, m2 / (used - 1))
    return MCResult(series, used, excluded, seed)


@dataclass(frozen=True)
class ErrorReport:
    local: np.ndarray
    global_: float


def errors(f, f_exact, time_grid: TimeGrid) -> ErrorReport:
    """Pointwise absolute error and its time average ``dt/T * sum_i |f_i - g_i|``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(f_exact, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise ValueError(f"series shapes differ: {f.shape} vs {g.shape}")
    if len(f) != time_grid.N + 1:
        raise ValueError(f"series length {len(f)} does not match the time grid ({time_grid.N + 1})")
    local = np.abs(f - g)
    return ErrorReport(local, float(time_grid.dt / time_grid.T * local.sum()))
