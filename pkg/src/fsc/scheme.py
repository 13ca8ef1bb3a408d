"""Flow-driven spectral chaos: time stepping on a basis rebuilt from the enriched flow.

At every basis update the current displacement and velocity are
reconstructed at the quadrature nodes, the enriched flow map supplies the
candidates ``1, u, u', u'', ...``, and their orthogonalisation becomes the
new basis.  Modal coefficients are carried over by mean-square projection,
the model is re-projected onto the new basis, and RK4 advances the modal
system.  Deterministic initial states are handled by a gPC warm-up on a
fixed polynomial basis.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .galerkin import ProjectedSystem, project_system
from .integrate import TimeGrid, rk4_step
from .models import CapabilityError, Model
from .quadrature import QuadratureGrid
from .rfs import DROP_TOL, Basis, DegenerateBasisError, gpc_basis, mean_var, orthogonalize
from .series import MomentSeries, quantity_names

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModalState:
    t: float
    basis: Basis
    U: np.ndarray
    V: np.ndarray

    def __post_init__(self):
        for arr in (self.U, self.V):
            if arr.ndim != 2 or arr.shape[1] != self.basis.size:
                raise ValueError(f"modal array shape {arr.shape} does not match basis size {self.basis.size}")

    def nodal(self) -> tuple[np.ndarray, np.ndarray]:
        return self.basis.reconstruct(self.U), self.basis.reconstruct(self.V)


@dataclass(frozen=True)
class FscConfig:
    """Run parameters.

    ``basis_size`` is P (the basis has P+1 members including the constant).
    ``flow_order`` defaults to the smallest M whose enriched flow supplies P
    candidates.  ``cadence`` is the number of RK4 steps between basis updates.
    """

    basis_size: int
    dt: float
    duration: float
    flow_order: int | None = None
    warmup: float = 0.0
    warmup_index_bound: int = 6
    drop_tol: float = DROP_TOL
    cadence: int = 1

    def __post_init__(self):
        if self.basis_size < 2:
            raise ValueError("basis_size must be >= 2")
        if self.flow_order is not None and self.flow_order < 1:
            raise ValueError("flow_order must be >= 1")
        if self.warmup < 0 or self.warmup > self.duration:
            raise ValueError("warmup must lie in [0, duration]")
        if self.warmup_index_bound < 1:
            raise ValueError("warmup_index_bound must be >= 1")
        if self.cadence < 1:
            raise ValueError("cadence must be >= 1")
        TimeGrid(self.dt, self.duration)

    @property
    def time_grid(self) -> TimeGrid:
        return TimeGrid(self.dt, self.duration)

    def order_for(self, n_dof: int) -> int:
        """Flow order M used for a model with ``n_dof`` degrees of freedom."""
        levels_needed = math.ceil(self.basis_size / n_dof)
        M = self.flow_order if self.flow_order is not None else max(1, levels_needed - 2)
        if self.basis_size > n_dof * (M + 2):
            raise ValueError(
                f"basis_size {self.basis_size} exceeds the {n_dof * (M + 2)} flow-map "
                f"components available at flow order {M}"
            )
        return M


@dataclass
class FscResult:
    moments: MomentSeries
    final: ModalState
    #: successive distinct basis sizes (P+1) used during the run
    basis_sizes: list[int] = field(default_factory=list)
    degenerate_updates: int = 0


def flow_basis(model: Model, grid: QuadratureGrid, t: float, u: np.ndarray, v: np.ndarray,
               P: int, order: int, drop_tol: float = DROP_TOL) -> Basis:
    """Orthogonalised ``{1}`` plus the first P enriched-flow components at ``t``."""
    state = model.enriched_flow(t, u, v, grid.nodes, order)
    cands = state.candidates()[:P]
    rows = np.empty((len(cands) + 1, grid.Q))
    rows[0] = 1.0
    rows[1:] = cands
    return orthogonalize(grid, rows, drop_tol)


def build_basis(model: Model, state: ModalState, cfg: FscConfig) -> Basis:
    """New basis from the enriched flow at ``state``.

    Raises
    ------
    DegenerateBasisError
        If the state is deterministic, so no candidate survives orthogonalisation.
    """
    u, v = state.nodal()
    M = cfg.order_for(model.n_dof)
    return flow_basis(model, state.basis.grid, state.t, u, v, cfg.basis_size, M, cfg.drop_tol)


def transfer_matrix(old: Basis, new: Basis) -> np.ndarray:
    """``G[j, k] = <Psi_j^new, Psi_k^old> / <Psi_j^new, Psi_j^new>``."""
    if old.grid is not new.grid:
        raise ValueError("bases live on different grids")
    G = new.projector @ old.values.T
    # both bases start with Psi_0 = 1 and are orthogonal, so row 0 is e_0
    G[0, :] = 0.0
    G[0, 0] = 1.0
    return G


def transfer_modes(old: ModalState, new_basis: Basis) -> ModalState:
    """Mean-square transfer of the modal coefficients onto ``new_basis``."""
    G = transfer_matrix(old.basis, new_basis)
    return ModalState(old.t, new_basis, old.U @ G.T, old.V @ G.T)


def initial_state(model: Model, basis: Basis) -> ModalState:
    """Project the initial conditions onto ``basis``."""
    u0, v0 = model.initial_state(basis.grid.nodes)
    return ModalState(0.0, basis, u0 @ basis.projector.T, v0 @ basis.projector.T)


def _record(series: MomentSeries, i: int, state: ModalState):
    nd = state.U.shape[0]
    mu, vu = mean_var(state.basis, state.U)
    mv, vv = mean_var(state.basis, state.V)
    series.mean[:nd, i] = mu
    series.var[:nd, i] = vu
    series.mean[nd:, i] = mv
    series.var[nd:, i] = vv


def run_fsc(model: Model, grid: QuadratureGrid, cfg: FscConfig) -> FscResult:
    """Integrate ``model`` over ``cfg.duration`` and record moment histories.

    When the flow candidates are degenerate at an update (deterministic
    state), the current basis is kept; with no warm-up and deterministic
    initial conditions the run starts on the gPC basis instead.
    """
    tg = cfg.time_grid
    times = tg.times
    M = cfg.order_for(model.n_dof)
    if model.max_flow_order is not None and M > model.max_flow_order:
        raise CapabilityError(f"{model.name} supports flow order <= {model.max_flow_order}, config needs {M}")
    n_warm = tg.steps(cfg.warmup)
    xi = grid.nodes

    degenerate = 0
    if n_warm > 0:
        basis = gpc_basis(grid, cfg.warmup_index_bound)
    else:
        u0, v0 = model.initial_state(xi)
        try:
            basis = flow_basis(model, grid, 0.0, u0, v0, cfg.basis_size, M, cfg.drop_tol)
        except DegenerateBasisError:
            log.info("deterministic initial state; starting on the gPC basis")
            degenerate += 1
            basis = gpc_basis(grid, cfg.warmup_index_bound)
    state = initial_state(model, basis)
    system: ProjectedSystem = project_system(model, basis)

    series = MomentSeries.empty(times, quantity_names(model.n_dof))
    sizes = [basis.size]
    _record(series, 0, state)
    U, V = state.U, state.V
    # a blowing-up state overflows in the candidate products first; those
    # candidates are dropped and rk4_step raises DivergenceError on non-finite values
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(tg.N):
            t = i * cfg.dt
            if i >= n_warm and i > 0 and (i - n_warm) % cfg.cadence == 0:
                state = ModalState(t, basis, U, V)
                try:
                    new_basis = build_basis(model, state, cfg)
                except DegenerateBasisError:
                    degenerate += 1
                else:
                    state = transfer_modes(state, new_basis)
                    basis, U, V = new_basis, state.U, state.V
                    system = project_system(model, basis)
                    if basis.size != sizes[-1]:
                        sizes.append(basis.size)
            U, V = rk4_step(system, t, U, V, cfg.dt, step=i)
            state = ModalState((i + 1) * cfg.dt, basis, U, V)
            _record(series, i + 1, state)
    return FscResult(series, state, sizes, degenerate)
