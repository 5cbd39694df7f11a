"""Shared fixtures and dense-matrix oracles.

The dense L matrices here exist only as test oracles: the solvers never form
them.  They are assembled straight from the semi-discrete equations in the
same state layout the models use, so `expm(L t) @ y` is directly comparable
with `model.exp_L`.
"""
import numpy as np
import pytest
import scipy.linalg as sla

from expdg.dg_core import DGSpace, FluxKind, assemble_advection_matrix
from expdg.exp_ops import build_projector, kernel_basis


def central_projector(space: DGSpace) -> tuple[np.ndarray, np.ndarray]:
    a = assemble_advection_matrix(space, FluxKind.CENTRAL)
    basis = kernel_basis(a, space.degree, space.n_cells)
    return a, build_projector(basis).pi


def dense_va_generator(space: DGSpace, grid) -> np.ndarray:
    """Full Vlasov-Ampere linear operator in the (f_1..f_Nv, E) layout."""
    a, pi = central_projector(space)
    n = space.n_dof
    nv = grid.n_points
    one_minus_pi = np.eye(n) - pi
    big = np.zeros(((nv + 1) * n, (nv + 1) * n))
    for j, vj in enumerate(grid.nodes):
        big[j * n:(j + 1) * n, j * n:(j + 1) * n] = vj * a
        big[nv * n:, j * n:(j + 1) * n] = -grid.dv * vj * one_minus_pi
    return big


def dense_vm_generator(space: DGSpace, grid1, grid2) -> np.ndarray:
    """Full Vlasov-Maxwell linear operator in the (f_{j1 j2}, B, E2, E1) layout."""
    a, pi = central_projector(space)
    n = space.n_dof
    n1, n2 = grid1.n_points, grid2.n_points
    dvv = grid1.dv * grid2.dv
    one_minus_pi = np.eye(n) - pi
    nf = n1 * n2 * n
    dim = nf + 3 * n
    big = np.zeros((dim, dim))
    for j1 in range(n1):
        for j2 in range(n2):
            r = (j1 * n2 + j2) * n
            big[r:r + n, r:r + n] = grid1.nodes[j1] * a
            big[nf + n:nf + 2 * n, r:r + n] = -dvv * grid2.nodes[j2] * one_minus_pi
            big[nf + 2 * n:, r:r + n] = -dvv * grid1.nodes[j1] * one_minus_pi
    big[nf:nf + n, nf + n:nf + 2 * n] = a          # dB/dt = A E2
    big[nf + n:nf + 2 * n, nf:nf + n] = a          # dE2/dt = A B - current
    return big


def dense_fourier_mode_generator(kappa: float, grid1, grid2) -> np.ndarray:
    """Per-mode complex linear operator in the (f_{j1 j2}, B, E2, E1) layout."""
    n1, n2 = grid1.n_points, grid2.n_points
    dvv = grid1.dv * grid2.dv
    nf = n1 * n2
    dim = nf + 3
    big = np.zeros((dim, dim), dtype=complex)
    for j1 in range(n1):
        for j2 in range(n2):
            r = j1 * n2 + j2
            big[r, r] = -1j * kappa * grid1.nodes[j1]
            big[nf + 1, r] = -dvv * grid2.nodes[j2]
            big[nf + 2, r] = -dvv * grid1.nodes[j1]
    big[nf, nf + 1] = -1j * kappa
    big[nf + 1, nf] = -1j * kappa
    return big


def expm_oracle(mat: np.ndarray, t: float) -> np.ndarray:
    return sla.expm(mat * t)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
