"""Galerkin projection of a stochastic model onto a basis.

The projected system is the deterministic ODE in modal coefficients

    M^i_j u''^j + C^i_j u'^j + K^i_j u^j + N^i[u] = p^i(t)

with ``X^i_j = <Psi_i, X Psi_j> / <Psi_i, Psi_i>``.  Modal arrays have shape
``(n_dof, P+1)`` and operators act on them flattened dof-major (index
``d*(P+1) + i``).  The cubic term ``N`` is evaluated node-wise: u is
reconstructed at the quadrature nodes, cubed, and projected back.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .models import Model
from .rfs import Basis


def _is_field(f) -> bool:
    return np.ndim(f) > 0


def modal_matrix(basis: Basis, f) -> np.ndarray:
    """``<Psi_i, f Psi_j> / <Psi_i, Psi_i>`` for a field or a constant ``f``."""
    if not _is_field(f):
        return float(f) * np.eye(basis.size)
    return basis.projector @ (basis.values * f).T


@dataclass(frozen=True, eq=False)
class ProjectedSystem:
    basis: Basis
    n_dof: int
    mass: np.ndarray
    stiffness: np.ndarray
    damping: np.ndarray | None
    forcing: tuple  # ((vector, signal), ...): p(t) = sum(signal(t) * vector)
    # solved-for-acceleration operators
    _a_stiff: np.ndarray
    _a_damp: np.ndarray | None
    _a_force: tuple
    _a_cubic: np.ndarray | None
    cubic_field: np.ndarray | float | None = None

    @property
    def size(self) -> int:
        return self.basis.size

    def block(self, which: str, d: int = 0, e: int = 0) -> np.ndarray:
        """Modal block (d, e) of ``mass``, ``stiffness`` or ``damping``."""
        full = getattr(self, which)
        n = self.size
        return full[d * n:(d + 1) * n, e * n:(e + 1) * n]

    def __call__(self, t: float, U: np.ndarray, V: np.ndarray) -> np.ndarray:
        return modal_rhs(self, t, U, V)


def project_system(model: Model, basis: Basis) -> ProjectedSystem:
    grid = basis.grid
    terms = model.terms(grid.nodes)
    nd, n = terms.n_dof, basis.size

    def assemble(entries):
        out = np.zeros((nd * n, nd * n))
        for B, f in entries:
            out += np.kron(B, modal_matrix(basis, f))
        return out

    mass = assemble(terms.mass)
    stiffness = assemble(terms.stiffness)
    damping = assemble(terms.damping) if terms.damping else None
    forcing = []
    for vec, f, signal in terms.forcing:
        coeff = basis.projector @ np.broadcast_to(f, (grid.Q,))
        forcing.append((np.kron(vec, coeff), signal))

    if all(not _is_field(f) and np.allclose(B, np.diag(np.diag(B))) for B, f in terms.mass):
        inv_mass = np.diag(1.0 / np.diag(mass))
    else:
        inv_mass = np.linalg.inv(mass)

    a_cubic = None
    if terms.cubic is not None:
        if nd != 1:
            raise ValueError("cubic restoring force is only supported for one degree of freedom")
        a_cubic = inv_mass @ (basis.projector * terms.cubic)

    return ProjectedSystem(
        basis=basis,
        n_dof=nd,
        mass=mass,
        stiffness=stiffness,
        damping=damping,
        forcing=tuple(forcing),
        _a_stiff=inv_mass @ stiffness,
        _a_damp=None if damping is None else inv_mass @ damping,
        _a_force=tuple((inv_mass @ vec, signal) for vec, signal in forcing),
        _a_cubic=a_cubic,
        cubic_field=terms.cubic,
    )


def modal_rhs(sys: ProjectedSystem, t: float, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Modal accelerations ``u''^i`` for modal displacements U and velocities V."""
    shape = U.shape
    u = U.reshape(-1)
    acc = -(sys._a_stiff @ u)
    if sys._a_damp is not None:
        acc -= sys._a_damp @ V.reshape(-1)
    for vec, signal in sys._a_force:
        acc += signal(t) * vec
    if sys._a_cubic is not None:
        un = u @ sys.basis.values
        acc -= sys._a_cubic @ (un * un * un)
    return acc.reshape(shape)


def cubic_tensor(sys: ProjectedSystem) -> np.ndarray:
    """Dense ``T^i_{jkl} = <Psi_i, c Psi_j Psi_k Psi_l> / <Psi_i, Psi_i>``.

    Built once per sorted index triple and copied to all permutations, so the
    symmetry in (j, k, l) holds exactly.  Only meant for checking the
    node-wise evaluation on small bases.
    """
    if sys.cubic_field is None:
        raise ValueError("system has no cubic term")
    basis = sys.basis
    n = basis.size
    c = np.broadcast_to(sys.cubic_field, (basis.grid.Q,))
    T = np.empty((n, n, n, n))
    psi = basis.values
    for j, k, l in itertools.combinations_with_replacement(range(n), 3):
        col = basis.projector @ (c * psi[j] * psi[k] * psi[l])
        for p in set(itertools.permutations((j, k, l))):
            T[:, p[0], p[1], p[2]] = col
    return T
