"""Velocity-space discretization: grids, conservative derivative stencils,
and DG assembly of the force terms E*df/dv and F.grad_v f.

All non-periodic stencils are applied in flux form with zero ghost values and
zero flux through the outermost interfaces, so the column sums of the operator
vanish identically: sum_j (Df)_j = 0 for every input.  That discrete
conservation is what propagates the Poisson equation through the field updates.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .dg_core import DGSpace, DGField, build_local_matrices, monomial_moment


class DerivativeScheme(enum.Enum):
    CD2 = "cd2"
    CD4 = "cd4"
    UP3 = "up3"


@dataclass(frozen=True)
class VelocityGrid:
    """Uniform nodes on (-v_max, v_max]: v_j = -v_max + (j+1) dv, j = 0..n-1."""

    v_max: float
    n_points: int

    def __post_init__(self):
        if self.v_max <= 0 or self.n_points < 2:
            raise ValueError("need v_max > 0 and at least 2 velocity nodes")

    @property
    def dv(self) -> float:
        return 2.0 * self.v_max / self.n_points

    @property
    def nodes(self) -> np.ndarray:
        return -self.v_max + (np.arange(self.n_points) + 1) * self.dv

    def min_gap_to_unit_speed(self) -> float:
        """Distance of the closest node to +-1 (the alpha/beta singular speeds)."""
        return float(min(np.abs(self.nodes - 1.0).min(), np.abs(self.nodes + 1.0).min()))


def _interface_flux(fg: np.ndarray, scheme: DerivativeScheme, n: int, bias) -> np.ndarray:
    """Numerical flux at interfaces j+1/2 for j = -1..n-1; fg carries 2 ghost rows."""
    fm1, f0, f1, f2 = fg[0:n + 1], fg[1:n + 2], fg[2:n + 3], fg[3:n + 4]
    if scheme is DerivativeScheme.CD2:
        return 0.5 * (f0 + f1)
    if scheme is DerivativeScheme.CD4:
        return (7.0 * (f0 + f1) - (fm1 + f2)) / 12.0
    up = (2.0 * f1 + 5.0 * f0 - fm1) / 6.0    # bias for positive transport speed
    dn = (2.0 * f0 + 5.0 * f1 - f2) / 6.0     # mirrored bias
    if bias is None or np.isscalar(bias):
        return up if (bias is None or bias >= 0) else dn
    return np.where(np.asarray(bias) >= 0, up, dn)


def apply_derivative(grid: VelocityGrid, scheme: DerivativeScheme, samples: np.ndarray,
                     axis: int = 0, bias=None) -> np.ndarray:
    """Conservative derivative along `axis` of node samples.

    `bias` selects the UP3 stencil side (sign of the transport speed); it may
    be a scalar or an array broadcastable against the flux arrays.  Central
    schemes ignore it.
    """
    f = np.moveaxis(np.asarray(samples), axis, 0)
    n = grid.n_points
    if f.shape[0] != n:
        raise ValueError("sample count does not match the velocity grid")
    z = np.zeros((2,) + f.shape[1:], dtype=f.dtype)
    fg = np.concatenate([z, f, z], axis=0)
    flx = _interface_flux(fg, scheme, n, bias)
    flx[0] = 0.0
    flx[-1] = 0.0
    out = (flx[1:] - flx[:-1]) / grid.dv
    return np.moveaxis(out, 0, axis)


def apply_derivative_periodic(n_points: int, dv: float, scheme: DerivativeScheme,
                              samples: np.ndarray, axis: int = 0) -> np.ndarray:
    """Periodic central stencils (used when the transported coordinate is periodic)."""
    f = np.asarray(samples)
    if scheme is DerivativeScheme.CD2:
        return (np.roll(f, -1, axis) - np.roll(f, 1, axis)) / (2.0 * dv)
    if scheme is DerivativeScheme.CD4:
        return (-np.roll(f, -2, axis) + 8.0 * np.roll(f, -1, axis)
                - 8.0 * np.roll(f, 1, axis) + np.roll(f, 2, axis)) / (12.0 * dv)
    raise ValueError("periodic variant supports central schemes only")


@dataclass(frozen=True)
class FieldMultiplier:
    """Block-diagonal DG multiplication operator: one (k+1)x(k+1) block per cell."""

    blocks: np.ndarray  # (n_cells, k+1, k+1)

    def apply(self, coeffs: np.ndarray) -> np.ndarray:
        """Apply to coefficients with trailing flat dof axis (any batch shape)."""
        nc, nl, _ = self.blocks.shape
        cw = coeffs.reshape(coeffs.shape[:-1] + (nc, nl))
        out = np.einsum("cmn,...cn->...cm", self.blocks, cw)
        return out.reshape(coeffs.shape)


def _triple_product_tensor(k: int) -> np.ndarray:
    """G[n, m, l] = (1/dx) (xi^n xi^m, xi^l) on a cell = moment of s^(n+m+l)."""
    n = k + 1
    g = np.empty((n, n, n))
    for a in range(n):
        for b in range(n):
            for c in range(n):
                g[a, b, c] = monomial_moment(a + b + c)
    return g


def build_field_multiplier(space: DGSpace, field: DGField) -> FieldMultiplier:
    """Weak-form multiplication by a DG field: blocks (dx M)^-1 B_i with
    (B_i)_{ l,m } = (sum_n E_i^n xi^n xi^m, xi^l); the cell width cancels."""
    if field.space != space:
        raise ValueError("field lives in a different DG space")
    k = space.degree
    gt = _triple_product_tensor(k)
    minv = np.linalg.inv(build_local_matrices(k).m)
    b = np.einsum("cn,nml->clm", field.cellwise(), gt)
    return FieldMultiplier(blocks=np.einsum("ml,cln->cmn", minv, b))


def multiplier_from_coeffs(space: DGSpace, coeffs: np.ndarray) -> FieldMultiplier:
    return build_field_multiplier(space, DGField(space=space, coeffs=coeffs))


def vlasov_ampere_nonlinear(f: np.ndarray, multiplier: FieldMultiplier,
                            grid: VelocityGrid, scheme: DerivativeScheme) -> np.ndarray:
    """-E~ (Df)_j for every velocity node; f has shape (n_v, n_dof)."""
    df = apply_derivative(grid, scheme, f, axis=0)
    return -multiplier.apply(df)


def vlasov_maxwell_nonlinear(f: np.ndarray, mult_e1: FieldMultiplier,
                             mult_e2: FieldMultiplier, mult_b: FieldMultiplier,
                             grid1: VelocityGrid, grid2: VelocityGrid,
                             scheme: DerivativeScheme) -> np.ndarray:
    """-(F~ . Df) with F = (E1 + v2 B, E2 - v1 B); f has shape (n_v1, n_v2, n_dof)."""
    v1 = grid1.nodes
    v2 = grid2.nodes
    d1 = apply_derivative(grid1, scheme, f, axis=0)
    d2 = apply_derivative(grid2, scheme, f, axis=1)
    term1 = mult_e1.apply(d1) + v2[None, :, None] * mult_b.apply(d1)
    term2 = mult_e2.apply(d2) - v1[:, None, None] * mult_b.apply(d2)
    return -(term1 + term2)
