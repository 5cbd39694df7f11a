"""Modal DG discretization of 1D constant-coefficient advection on a periodic mesh.

The basis on cell j is xi^m(x) = ((x - x_j)/dx)^m, m = 0..k, so the local
coordinate s = (x - x_j)/dx lives in [-1/2, 1/2].  Degrees of freedom are
stored cell-major, degree-minor.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class FluxKind(enum.Enum):
    CENTRAL = "central"
    UPWIND = "upwind"


@dataclass(frozen=True)
class DGSpace:
    """Uniform periodic mesh with a modal P^k space on each cell."""

    n_cells: int
    degree: int
    x_lo: float = 0.0
    x_hi: float = 2.0 * np.pi

    def __post_init__(self):
        if self.n_cells < 2:
            raise ValueError("need at least 2 cells")
        if self.degree < 0:
            raise ValueError("polynomial degree must be >= 0")
        if not self.x_hi > self.x_lo:
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x_hi - self.x_lo) / self.n_cells

    @property
    def length(self) -> float:
        return self.x_hi - self.x_lo

    @property
    def n_local(self) -> int:
        return self.degree + 1

    @property
    def n_dof(self) -> int:
        return (self.degree + 1) * self.n_cells

    def cell_centers(self) -> np.ndarray:
        return self.x_lo + (np.arange(self.n_cells) + 0.5) * self.dx


@dataclass(frozen=True)
class DGField:
    """Coefficient vector of a scalar field in a DG space."""

    space: DGSpace
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.shape != (self.space.n_dof,):
            raise ValueError(
                f"coefficient vector has length {self.coeffs.shape}, "
                f"expected {self.space.n_dof}"
            )

    def cellwise(self) -> np.ndarray:
        """View of the coefficients as (n_cells, k+1)."""
        return self.coeffs.reshape(self.space.n_cells, self.space.n_local)


@dataclass(frozen=True)
class LocalMatrices:
    m: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    d3: np.ndarray


def monomial_moment(p: int) -> float:
    """Integral of s^p over [-1/2, 1/2]; vanishes for odd p."""
    return 0.0 if p % 2 else 0.5**p / (p + 1)


def build_local_matrices(k: int) -> LocalMatrices:
    """Per-cell mass and flux/stiffness blocks of the central-flux DG operator.

    Indices below are 0-based degrees; M is the unit-cell mass matrix
    (the physical one is dx*M), and the advection blocks satisfy
    A = (1/dx) * circblock(M^-1 d1, M^-1 d2, 0, ..., M^-1 d3).
    """
    n = k + 1
    m = np.empty((n, n))
    d1 = np.empty((n, n))
    d2 = np.empty((n, n))
    d3 = np.empty((n, n))
    for l in range(n):
        for mm in range(n):
            p = l + mm
            m[l, mm] = monomial_moment(p)
            stiff = l * monomial_moment(p - 1) if p >= 1 else 0.0
            d1[l, mm] = stiff - 0.5 ** (p + 1) * (1 - (-1) ** p)
            d2[l, mm] = -((-1.0) ** mm) * 0.5 ** (p + 1)
            d3[l, mm] = (-1.0) ** l * 0.5 ** (p + 1)
    d1[0, 0] = 0.0  # convention: the (0,0) entry has an indeterminate 0/0 limit
    return LocalMatrices(m=m, d1=d1, d2=d2, d3=d3)


def build_local_matrices_upwind(k: int) -> LocalMatrices:
    """Per-cell blocks for the upwind flux (advection speed +1, trace from the left)."""
    n = k + 1
    m = build_local_matrices(k).m
    d1 = np.empty((n, n))
    d3 = np.empty((n, n))
    for l in range(n):
        for mm in range(n):
            p = l + mm
            stiff = l * monomial_moment(p - 1) if p >= 1 else 0.0
            d1[l, mm] = stiff - 0.5**p
            d3[l, mm] = (-1.0) ** l * 0.5**p
    return LocalMatrices(m=m, d1=d1, d2=np.zeros((n, n)), d3=d3)


def circulant_blocks(n_cells: int, diag: np.ndarray, sup: np.ndarray, sub: np.ndarray) -> np.ndarray:
    """Dense block-circulant matrix with the given diagonal/super/sub blocks."""
    n = diag.shape[0]
    out = np.zeros((n * n_cells, n * n_cells))
    for j in range(n_cells):
        out[j * n:(j + 1) * n, j * n:(j + 1) * n] = diag
        jp = (j + 1) % n_cells
        jm = (j - 1) % n_cells
        out[j * n:(j + 1) * n, jp * n:(jp + 1) * n] = sup
        out[j * n:(j + 1) * n, jm * n:(jm + 1) * n] = sub
    return out


def assemble_advection_matrix(space: DGSpace, flux: FluxKind = FluxKind.CENTRAL) -> np.ndarray:
    """Global DG matrix A approximating -d/dx for unit advection speed."""
    if flux is FluxKind.CENTRAL:
        loc = build_local_matrices(space.degree)
    else:
        loc = build_local_matrices_upwind(space.degree)
    minv = np.linalg.inv(loc.m)
    return circulant_blocks(space.n_cells, minv @ loc.d1, minv @ loc.d2, minv @ loc.d3) / space.dx


def assemble_stiffness_core(space: DGSpace) -> np.ndarray:
    """Block-circulant S = (I kron M) * (dx * A) for the central flux.

    S collects the D blocks directly, so it is independent of the cell width
    and exactly antisymmetric; the half-difference only strips float noise.
    """
    loc = build_local_matrices(space.degree)
    s = circulant_blocks(space.n_cells, loc.d1, loc.d2, loc.d3)
    return 0.5 * (s - s.T)


def mass_block_matrix(space: DGSpace) -> np.ndarray:
    """Unit-cell block mass matrix I_N (x) M; physical mass is dx times this."""
    return np.kron(np.eye(space.n_cells), build_local_matrices(space.degree).m)


def gauss_points(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [-1/2, 1/2]."""
    q, w = np.polynomial.legendre.leggauss(n)
    return q / 2.0, w / 2.0


def project_initial(space: DGSpace, u0) -> DGField:
    """L2 projection of a callable onto the DG space, Gauss-Legendre k+3 points per cell."""
    k = space.degree
    s, w = gauss_points(k + 3)
    vand = np.array([s**m for m in range(k + 1)])
    xq = space.cell_centers()[:, None] + space.dx * s[None, :]
    rhs = np.einsum("mq,q,cq->cm", vand, w, np.asarray(u0(xq), dtype=float))
    m = build_local_matrices(k).m
    coeffs = np.linalg.solve(m, rhs.T).T
    return DGField(space=space, coeffs=coeffs.reshape(-1))


def evaluate_cellwise(space: DGSpace, coeffs: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Evaluate DG coefficients at local coordinates s in [-1/2, 1/2] for every cell.

    coeffs may have leading batch axes; the last axis must be the flat dof axis.
    Returns (..., n_cells, len(s)).
    """
    k = space.degree
    vand = np.array([np.asarray(s, dtype=float) ** m for m in range(k + 1)])
    cw = coeffs.reshape(coeffs.shape[:-1] + (space.n_cells, k + 1))
    return cw @ vand


def reconstruct(field: DGField, x) -> np.ndarray | float:
    """Point evaluation of the piecewise polynomial, periodic wrap, left limit at interfaces."""
    space = field.space
    xr = (np.asarray(x, dtype=float) - space.x_lo) % space.length
    # ceil-based index makes interface points evaluate in the cell to their left;
    # xr = 0 wraps to the right edge of the last cell
    idx_raw = np.ceil(xr / space.dx).astype(int) - 1
    s = xr / space.dx - (idx_raw + 0.5)
    idx = idx_raw % space.n_cells
    cw = field.cellwise()
    k = space.degree
    powers = np.stack([s**m for m in range(k + 1)], axis=-1)
    vals = (cw[idx] * powers).sum(axis=-1)
    return vals if np.ndim(x) else float(vals)


def l2_norm(field: DGField) -> float:
    """Broken L2 norm sqrt(sum_j dx u_j^T M u_j)."""
    cw = field.cellwise()
    m = build_local_matrices(field.space.degree).m
    return float(np.sqrt(field.space.dx * np.einsum("cm,mn,cn->", cw, m, cw)))


def l2_norm_coeffs(space: DGSpace, coeffs: np.ndarray, mass: np.ndarray | None = None) -> float:
    """Broken L2 norm straight from a coefficient vector/batch (summed over batch axes)."""
    m = build_local_matrices(space.degree).m if mass is None else mass
    cw = coeffs.reshape(coeffs.shape[:-1] + (space.n_cells, space.n_local))
    return float(np.sqrt(space.dx * np.einsum("...cm,mn,...cn->", cw, m, cw)))
