"""Classical fourth-order Runge-Kutta for second-order systems u'' = a(t, u, u')."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np


class DivergenceError(FloatingPointError):
    def __init__(self, message: str, step: int | None = None, t: float | None = None):
        super().__init__(message)
        self.step = step
        self.t = t


@dataclass(frozen=True)
class TimeGrid:
    """Uniform instants ``t_i = i * dt``, i = 0..N, with ``N * dt = T``."""

    dt: float
    T: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("time step must be positive")
        if not self.T > 0:
            raise ValueError("duration must be positive")
        n = round(self.T / self.dt)
        if n < 1 or abs(n * self.dt - self.T) > 1e-12 * self.T:
            raise ValueError(f"duration {self.T} is not a whole number of steps of {self.dt}")

    @property
    def N(self) -> int:
        return round(self.T / self.dt)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.N + 1)

    def steps(self, duration: float) -> int:
        """Number of steps covering ``duration`` (rounded to the nearest step)."""
        return round(duration / self.dt)


Accel = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


def rk4_step(accel: Accel, t: float, U: np.ndarray, V: np.ndarray, h: float,
             step: int | None = None, check: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Advance ``(U, V)`` by one RK4 step of the system U' = V, V' = accel(t, U, V).

    ``accel`` may be a :class:`~fsc.galerkin.ProjectedSystem` or any callable
    with the same signature.  Unless ``check`` is false, a non-finite result
    raises :class:`DivergenceError` tagged with ``step`` and ``t``.
    """
    half = 0.5 * h
    k1u, k1v = V, accel(t, U, V)
    U2, V2 = U + half * k1u, V + half * k1v
    k2u, k2v = V2, accel(t + half, U2, V2)
    U3, V3 = U + half * k2u, V + half * k2v
    k3u, k3v = V3, accel(t + half, U3, V3)
    U4, V4 = U + h * k3u, V + h * k3v
    k4u, k4v = V4, accel(t + h, U4, V4)
    sixth = h / 6.0
    U_new = U + sixth * (k1u + 2.0 * (k2u + k3u) + k4u)
    V_new = V + sixth * (k1v + 2.0 * (k2v + k3v) + k4v)
    if check and not (np.all(np.isfinite(U_new)) and np.all(np.isfinite(V_new))):
        where = "" if step is None else f" at step {step}"
        raise DivergenceError(f"non-finite state after RK4 step{where} (t={t + h:.6g})", step, t + h)
    return U_new, V_new
