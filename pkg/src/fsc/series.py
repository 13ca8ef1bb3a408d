"""Time histories of means and variances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def quantity_names(n_dof: int) -> list[str]:
    return [f"u{d + 1}" for d in range(n_dof)] + [f"v{d + 1}" for d in range(n_dof)]


@dataclass
class MomentSeries:
    """``mean[q, i]`` and ``var[q, i]`` of quantity ``names[q]`` at ``times[i]``."""

    times: np.ndarray
    names: list[str]
    mean: np.ndarray
    var: np.ndarray

    @classmethod
    def empty(cls, times: np.ndarray, names: list[str]) -> "MomentSeries":
        shape = (len(names), len(times))
        return cls(np.asarray(times, dtype=float), list(names), np.full(shape, np.nan), np.full(shape, np.nan))

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no quantity {name!r}; have {self.names}") from None

    def mean_of(self, name: str) -> np.ndarray:
        return self.mean[self.index(name)]

    def var_of(self, name: str) -> np.ndarray:
        return self.var[self.index(name)]

    def columns(self) -> tuple[list[str], np.ndarray]:
        """Header and table ``t, mean_<q>, var_<q>, ...`` (one row per instant)."""
        header = ["t"]
        cols = [self.times]
        for q, name in enumerate(self.names):
            header += [f"mean_{name}", f"var_{name}"]
            cols += [self.mean[q], self.var[q]]
        return header, np.column_stack(cols)
