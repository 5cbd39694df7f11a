"""Concrete systems driven by the Lawson stepper.

Every model owns a flat state vector `y` and exposes

    exp_L(frac, y)   exact action of exp(frac * dt * L)
    nonlinear(y)     the explicitly treated term N(y)
    observables(y)   diagnostic channels
    energy_split(y)  (linear, quadratic) parts of the total energy in y

The per-velocity exponential blocks come from an ExpCache built once in
`prepare`; no exponential is formed inside the time loop.
"""
from __future__ import annotations

import numpy as np

from . import dg_core, exp_ops, phase_space
from .dg_core import DGSpace, FluxKind
from .phase_space import DerivativeScheme, VelocityGrid


def _integration_weights(space: DGSpace) -> np.ndarray:
    """Row vector w with w @ coeffs = integral of the DG function over the domain."""
    k = space.degree
    g = np.array([dg_core.monomial_moment(m) for m in range(k + 1)])
    return space.dx * np.tile(g, space.n_cells)


class _CentralCore:
    """Shared central-flux machinery: A, kernel projector, regularized inverse."""

    def __init__(self, space: DGSpace):
        self.space = space
        self.a = dg_core.assemble_advection_matrix(space, FluxKind.CENTRAL)
        self.basis = exp_ops.kernel_basis(self.a, space.degree, space.n_cells)
        self.pi = exp_ops.build_projector(self.basis).pi
        pa = np.linalg.norm(self.a @ self.pi) / np.linalg.norm(self.a)
        ap = np.linalg.norm(self.pi @ self.a) / np.linalg.norm(self.a)
        ident = np.linalg.norm(self.a @ (np.eye(space.n_dof) - self.pi)
                               - (self.a + self.pi) @ (np.eye(space.n_dof) - self.pi))
        self.commutation_residuals = {"A_Pi": float(pa), "Pi_A": float(ap),
                                      "ampere_identity": float(ident)}
        if max(pa, ap) > 1e-10 or ident > 1e-10 * np.linalg.norm(self.a):
            raise exp_ops.UnsupportedConfigError(
                f"kernel projector does not annihilate A: |A Pi|={pa:.2e}, "
                f"|Pi A|={ap:.2e}, Ampere identity residual={ident:.2e}"
            )
        self.mass_weights = _integration_weights(space)
        self.local_mass = dg_core.build_local_matrices(space.degree).m

    def l2(self, coeffs: np.ndarray) -> float:
        return dg_core.l2_norm_coeffs(self.space, coeffs, self.local_mass)


def _project_phase_space(space: DGSpace, grids, f0) -> np.ndarray:
    """Project f0(x, v...) per velocity node; returns (*n_v, n_dof)."""
    k = space.degree
    s, w = dg_core.gauss_points(k + 3)
    vand = np.array([s**m for m in range(k + 1)])
    xq = space.cell_centers()[:, None] + space.dx * s[None, :]
    m = dg_core.build_local_matrices(k).m
    if len(grids) == 1:
        vals = f0(xq[None, :, :], grids[0].nodes[:, None, None])
        rhs = np.einsum("mq,q,jcq->jcm", vand, w, vals)
        coef = np.linalg.solve(m, rhs.reshape(-1, k + 1).T).T
        return coef.reshape(grids[0].n_points, space.n_dof)
    v1 = grids[0].nodes[:, None, None, None]
    v2 = grids[1].nodes[None, :, None, None]
    vals = f0(xq[None, None, :, :], v1, v2)
    rhs = np.einsum("mq,q,ijcq->ijcm", vand, w, vals)
    coef = np.linalg.solve(m, rhs.reshape(-1, k + 1).T).T
    return coef.reshape(grids[0].n_points, grids[1].n_points, space.n_dof)


# ---------------------------------------------------------------------------
# 2D linear transport (convergence benchmark)
# ---------------------------------------------------------------------------


class TransportModel2D:
    """u_t + u_x + u_v = 0 on [0, 2pi]^2: DG in x (exact exponential), periodic
    finite differences in v treated explicitly so the time error is visible."""

    def __init__(self, space: DGSpace, n_v: int, flux: FluxKind = FluxKind.CENTRAL,
                 scheme: DerivativeScheme = DerivativeScheme.CD4):
        self.space = space
        self.flux = flux
        self.scheme = scheme
        self.n_v = n_v
        self.dv = space.length / n_v
        self.v_nodes = space.x_lo + np.arange(n_v) * self.dv
        if flux is FluxKind.CENTRAL:
            self.fact = exp_ops.eigen_factorize_central(space)
        else:
            a = dg_core.assemble_advection_matrix(space, FluxKind.UPWIND)
            self.fact = exp_ops.eigen_factorize(a)
        self.local_mass = dg_core.build_local_matrices(space.degree).m
        self.dt = None
        self._exp: dict[float, np.ndarray] = {}

    def prepare(self, dt: float, fractions) -> "TransportModel2D":
        self.dt = float(dt)
        self._exp = {float(f): exp_ops.exp_matrix(self.fact, f * dt)
                     for f in set(fractions) if f != 0.0}
        return self

    def initial_state(self, u0) -> np.ndarray:
        s, w = dg_core.gauss_points(self.space.degree + 3)
        vand = np.array([s**m for m in range(self.space.degree + 1)])
        xq = self.space.cell_centers()[:, None] + self.space.dx * s[None, :]
        vals = u0(xq[None, :, :], self.v_nodes[:, None, None])
        rhs = np.einsum("mq,q,jcq->jcm", vand, w, vals)
        m = self.local_mass
        coef = np.linalg.solve(m, rhs.reshape(-1, self.space.degree + 1).T).T
        return coef.reshape(-1)

    def _grid(self, y: np.ndarray) -> np.ndarray:
        return y.reshape(self.n_v, self.space.n_dof)

    def exp_L(self, frac: float, y: np.ndarray) -> np.ndarray:
        if frac == 0.0:
            return y.copy()
        u = self._grid(y)
        return (u @ self._exp[float(frac)].T).reshape(-1)

    def nonlinear(self, y: np.ndarray) -> np.ndarray:
        u = self._grid(y)
        du = phase_space.apply_derivative_periodic(self.n_v, self.dv, self.scheme, u, axis=0)
        return (-du).reshape(-1)

    def l2_norm_state(self, y: np.ndarray) -> float:
        """sqrt(dv * sum_j ||u_j||^2) over the phase-space state."""
        u = self._grid(y).reshape(self.n_v, self.space.n_cells, -1)
        return float(np.sqrt(self.dv * self.space.dx
                             * np.einsum("jcm,mn,jcn->", u, self.local_mass, u)))

    def error_norms(self, y: np.ndarray, exact, n_samples: int = 21) -> tuple[float, float]:
        """(Linf, L2) error against exact(x, v) on closed per-cell samples.

        Samples include both one-sided interface limits (where central-flux DG
        errors peak); L2 uses trapezoid weights in x and node sums in v.
        """
        s = np.linspace(-0.5, 0.5, n_samples)
        u = self._grid(y)
        vals = dg_core.evaluate_cellwise(self.space, u, s)
        xq = self.space.cell_centers()[None, :, None] + self.space.dx * s[None, None, :]
        err = vals - exact(xq, self.v_nodes[:, None, None])
        w = np.ones(n_samples)
        w[0] = w[-1] = 0.5
        w /= (n_samples - 1)
        l2 = float(np.sqrt(self.dv * self.space.dx * np.einsum("jcq,q->", err**2, w)))
        return float(np.abs(err).max()), l2

    def observables(self, y: np.ndarray) -> dict[str, float]:
        return {
            "electric_energy": 0.0,
            "magnetic_energy": 0.0,
            "total_energy": self.l2_norm_state(y) ** 2,
            "mass": float(self.dv * (self._grid(y) @ _integration_weights(self.space)).sum()),
            "poisson_residual": 0.0,
        }

    def energy_split(self, y: np.ndarray) -> tuple[float, float]:
        return 0.0, self.l2_norm_state(y) ** 2

    def poisson_residual(self, y: np.ndarray) -> float:
        return 0.0


# ---------------------------------------------------------------------------
# Vlasov-Ampere 1dx-1dv
# ---------------------------------------------------------------------------


class VlasovAmpereModel:
    """State y = (f_1..f_Nv, E); exp_L advances transport exactly and
    integrates the Ampere source in closed form through (A+Pi)^-1."""

    def __init__(self, space: DGSpace, grid: VelocityGrid,
                 scheme: DerivativeScheme = DerivativeScheme.CD4):
        self.core = _CentralCore(space)
        self.space = space
        self.grid = grid
        self.scheme = scheme
        self.n = space.n_dof
        self.dt = None
        self.cache = None

    def prepare(self, dt: float, fractions) -> "VlasovAmpereModel":
        self.dt = float(dt)
        self.cache = exp_ops.ExpCache(exp_ops.eigen_factorize_central(self.space),
                                      self.core.pi, self.core.a,
                                      self.grid.nodes, dt, fractions)
        return self

    # state layout -----------------------------------------------------
    def pack(self, f: np.ndarray, e: np.ndarray) -> np.ndarray:
        return np.concatenate([f.reshape(-1), e])

    def unpack(self, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        nf = self.grid.n_points * self.n
        return y[:nf].reshape(self.grid.n_points, self.n), y[nf:]

    def initial_state(self, f0) -> np.ndarray:
        f = _project_phase_space(self.space, (self.grid,), f0)
        e = self.solve_poisson(f)
        return self.pack(f, e)

    def solve_poisson(self, f: np.ndarray) -> np.ndarray:
        rho = self.grid.dv * f.sum(axis=0)
        apinv = (self.cache.a_plus_pi_inv if self.cache is not None
                 else exp_ops.regularized_inverse(self.core.a, self.core.pi))
        return -apinv @ (rho - self.core.pi @ rho)

    # dynamics ----------------------------------------------------------
    def exp_L(self, frac: float, y: np.ndarray) -> np.ndarray:
        if frac == 0.0:
            return y.copy()
        f, e = self.unpack(y)
        g = self.cache.apply_f(frac, f)
        e2 = e + self.grid.dv * (self.cache.a_plus_pi_inv @ (f.sum(0) - g.sum(0)))
        return self.pack(g, e2)

    def nonlinear(self, y: np.ndarray) -> np.ndarray:
        f, e = self.unpack(y)
        mult = phase_space.multiplier_from_coeffs(self.space, e)
        nf = phase_space.vlasov_ampere_nonlinear(f, mult, self.grid, self.scheme)
        return self.pack(nf, np.zeros_like(e))

    # diagnostics ---------------------------------------------------------
    def poisson_residual(self, y: np.ndarray) -> float:
        f, e = self.unpack(y)
        rho = self.grid.dv * f.sum(0)
        r = (self.core.a + self.core.pi) @ e + rho - self.core.pi @ rho
        return float(np.linalg.norm(r) / max(np.linalg.norm(rho), 1e-300))

    def energy_split(self, y: np.ndarray) -> tuple[float, float]:
        f, e = self.unpack(y)
        kinetic = self.grid.dv * float(
            (self.grid.nodes**2) @ (f @ self.core.mass_weights))
        return kinetic, self.core.l2(e) ** 2

    def observables(self, y: np.ndarray) -> dict[str, float]:
        f, e = self.unpack(y)
        kinetic, field_sq = self.energy_split(y)
        return {
            "electric_energy": self.core.l2(e),
            "magnetic_energy": 0.0,
            "total_energy": kinetic + field_sq,
            "mass": float(self.grid.dv * (f @ self.core.mass_weights).sum()),
            "poisson_residual": self.poisson_residual(y),
        }


# ---------------------------------------------------------------------------
# Vlasov-Maxwell 1dx-2dv, DG backend
# ---------------------------------------------------------------------------


class VlasovMaxwellDGModel:
    """State y = (f_{j1 j2}, B, E2, E1).  Only the x transport of f and the
    homogeneous Maxwell block live in L; the magnetic rotation of f is in N."""

    def __init__(self, space: DGSpace, grid1: VelocityGrid, grid2: VelocityGrid,
                 scheme: DerivativeScheme = DerivativeScheme.CD4):
        self.core = _CentralCore(space)
        self.space = space
        self.grid1 = grid1
        self.grid2 = grid2
        self.scheme = scheme
        self.n = space.n_dof
        self.dt = None
        self.cache = None

    def prepare(self, dt: float, fractions) -> "VlasovMaxwellDGModel":
        self.dt = float(dt)
        self.cache = exp_ops.ExpCache(exp_ops.eigen_factorize_central(self.space),
                                      self.core.pi, self.core.a,
                                      self.grid1.nodes, dt, fractions)
        return self

    def pack(self, f, b, e2, e1) -> np.ndarray:
        return np.concatenate([f.reshape(-1), b, e2, e1])

    def unpack(self, y: np.ndarray):
        n1, n2, n = self.grid1.n_points, self.grid2.n_points, self.n
        nf = n1 * n2 * n
        f = y[:nf].reshape(n1, n2, n)
        b = y[nf:nf + n]
        e2 = y[nf + n:nf + 2 * n]
        e1 = y[nf + 2 * n:]
        return f, b, e2, e1

    def initial_state(self, f0, b0, e20) -> np.ndarray:
        f = _project_phase_space(self.space, (self.grid1, self.grid2), f0)
        b = dg_core.project_initial(self.space, b0).coeffs
        e2 = dg_core.project_initial(self.space, e20).coeffs
        e1 = self.solve_poisson(f)
        return self.pack(f, b, e2, e1)

    def solve_poisson(self, f: np.ndarray) -> np.ndarray:
        rho = self.grid1.dv * self.grid2.dv * f.sum(axis=(0, 1))
        apinv = (self.cache.a_plus_pi_inv if self.cache is not None
                 else exp_ops.regularized_inverse(self.core.a, self.core.pi))
        return -apinv @ (rho - self.core.pi @ rho)

    def exp_L(self, frac: float, y: np.ndarray) -> np.ndarray:
        if frac == 0.0:
            return y.copy()
        f, b, e2, e1 = self.unpack(y)
        dvv = self.grid1.dv * self.grid2.dv
        g = self.cache.apply_f(frac, f)
        cosh_m, sinh_m = self.cache.maxwell_blocks(frac)
        al, be = self.cache.alpha_beta(frac)
        w = np.einsum("k,jkn->jn", self.grid2.nodes, f)   # sum_j2 v2_j2 f_j1,j2
        s_al = np.einsum("jab,jb->a", al, w)
        s_be = np.einsum("jab,jb->a", be, w)
        apinv = self.cache.a_plus_pi_inv
        b_new = cosh_m @ b + sinh_m @ e2 + dvv * (apinv @ s_al)
        e2_new = sinh_m @ b + cosh_m @ e2 + dvv * (apinv @ s_be)
        e1_new = e1 + dvv * (apinv @ (f.sum(axis=(0, 1)) - g.sum(axis=(0, 1))))
        return self.pack(g, b_new, e2_new, e1_new)

    def nonlinear(self, y: np.ndarray) -> np.ndarray:
        f, b, e2, e1 = self.unpack(y)
        m_e1 = phase_space.multiplier_from_coeffs(self.space, e1)
        m_e2 = phase_space.multiplier_from_coeffs(self.space, e2)
        m_b = phase_space.multiplier_from_coeffs(self.space, b)
        nf = phase_space.vlasov_maxwell_nonlinear(f, m_e1, m_e2, m_b,
                                                  self.grid1, self.grid2, self.scheme)
        z = np.zeros(self.n)
        return self.pack(nf, z, z, z)

    def poisson_residual(self, y: np.ndarray) -> float:
        f, _, _, e1 = self.unpack(y)
        rho = self.grid1.dv * self.grid2.dv * f.sum(axis=(0, 1))
        r = (self.core.a + self.core.pi) @ e1 + rho - self.core.pi @ rho
        return float(np.linalg.norm(r) / max(np.linalg.norm(rho), 1e-300))

    def energy_split(self, y: np.ndarray) -> tuple[float, float]:
        f, b, e2, e1 = self.unpack(y)
        v1sq = self.grid1.nodes**2
        v2sq = self.grid2.nodes**2
        fint = f @ self.core.mass_weights                  # (n1, n2) cell integrals
        kinetic = self.grid1.dv * self.grid2.dv * float(
            (v1sq[:, None] + v2sq[None, :]).ravel() @ fint.ravel())
        fields = self.core.l2(e1) ** 2 + self.core.l2(e2) ** 2 + self.core.l2(b) ** 2
        return kinetic, fields

    def observables(self, y: np.ndarray) -> dict[str, float]:
        f, b, e2, e1 = self.unpack(y)
        kinetic, fields = self.energy_split(y)
        e1n, e2n = self.core.l2(e1), self.core.l2(e2)
        return {
            "electric_energy": float(np.hypot(e1n, e2n)),
            "magnetic_energy": self.core.l2(b),
            "total_energy": kinetic + fields,
            "mass": float(self.grid1.dv * self.grid2.dv
                          * (f @ self.core.mass_weights).sum()),
            "poisson_residual": self.poisson_residual(y),
            # per-field norms (not part of the CSV contract)
            "e1_energy": e1n,
            "e2_energy": e2n,
        }


# ---------------------------------------------------------------------------
# Vlasov-Maxwell 1dx-2dv, Fourier backend
# ---------------------------------------------------------------------------


def _alpha_beta_grid(z: np.ndarray, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """alpha/beta on a (mode, velocity) grid with the +-1 guard per velocity."""
    al = np.empty((len(z), len(v)), dtype=complex)
    be = np.empty_like(al)
    for j, vj in enumerate(v):
        al[:, j] = exp_ops.alpha_scalar(z, float(vj))
        be[:, j] = exp_ops.beta_scalar(z, float(vj))
    return al, be


class FourierVMModel:
    """Spectral-in-x Vlasov-Maxwell: state of normalized rfft coefficients
    (f_hat, B_hat, E2_hat, E1_hat); the k = 0 mode of the fields is pinned to
    zero (mean-current subtraction)."""

    def __init__(self, n_x: int, length: float, grid1: VelocityGrid, grid2: VelocityGrid,
                 scheme: DerivativeScheme = DerivativeScheme.UP3):
        self.n_x = n_x
        self.length = length
        self.grid1 = grid1
        self.grid2 = grid2
        self.scheme = scheme
        self.x_nodes = np.arange(n_x) * (length / n_x)
        self.n_modes = n_x // 2 + 1
        # the unpaired Nyquist mode cannot represent a real advected field in a
        # one-sided spectrum; it is truncated throughout
        self._nyquist = self.n_modes - 1 if n_x % 2 == 0 else None
        self.kappa = 2.0 * np.pi * np.arange(self.n_modes) / length
        # Parseval weights for one-sided spectra
        self.spec_w = np.full(self.n_modes, 2.0)
        self.spec_w[0] = 1.0
        if n_x % 2 == 0:
            self.spec_w[-1] = 1.0
        self.dt = None
        self._phase: dict[float, np.ndarray] = {}
        self._mx: dict[float, tuple] = {}

    # state layout ------------------------------------------------------
    def pack(self, f, b, e2, e1) -> np.ndarray:
        return np.concatenate([f.reshape(-1), b, e2, e1])

    def unpack(self, y: np.ndarray):
        nm, n1, n2 = self.n_modes, self.grid1.n_points, self.grid2.n_points
        nf = nm * n1 * n2
        f = y[:nf].reshape(nm, n1, n2)
        b = y[nf:nf + nm]
        e2 = y[nf + nm:nf + 2 * nm]
        e1 = y[nf + 2 * nm:]
        return f, b, e2, e1

    def prepare(self, dt: float, fractions) -> "FourierVMModel":
        self.dt = float(dt)
        v1 = self.grid1.nodes
        for fr in set(float(f) for f in fractions):
            if fr == 0.0:
                continue
            t = fr * dt
            self._phase[fr] = np.exp(-1j * t * np.outer(self.kappa, v1))
            kk = self.kappa[1:]
            cos_t, sin_t = np.cos(kk * t), np.sin(kk * t)
            al, be = _alpha_beta_grid(-1j * kk * t, v1)
            self._mx[fr] = (cos_t, sin_t, al, be)
        return self

    def initial_state(self, f0, b0, e20) -> np.ndarray:
        x = self.x_nodes
        v1 = self.grid1.nodes[:, None]
        v2 = self.grid2.nodes[None, :]
        fx = np.array([f0(xi, v1, v2) for xi in x])
        fhat = np.fft.rfft(fx, axis=0) / self.n_x
        b = np.fft.rfft(b0(x) + 0.0 * x) / self.n_x
        e2 = np.fft.rfft(e20(x) + 0.0 * x) / self.n_x
        b[0] = 0.0
        e2[0] = 0.0
        if self._nyquist is not None:
            fhat[self._nyquist] = 0.0
            b[self._nyquist] = 0.0
            e2[self._nyquist] = 0.0
        e1 = self.solve_poisson(fhat)
        return self.pack(fhat, b, e2, e1)

    def solve_poisson(self, fhat: np.ndarray) -> np.ndarray:
        rho = self.grid1.dv * self.grid2.dv * fhat.sum(axis=(1, 2))
        e1 = np.zeros(self.n_modes, dtype=complex)
        e1[1:] = rho[1:] / (1j * self.kappa[1:])
        return e1

    def exp_L(self, frac: float, y: np.ndarray) -> np.ndarray:
        if frac == 0.0:
            return y.copy()
        f, b, e2, e1 = self.unpack(y)
        dvv = self.grid1.dv * self.grid2.dv
        g = self._phase[float(frac)][:, :, None] * f
        cos_t, sin_t, al, be = self._mx[float(frac)]
        w = f[1:] @ self.grid2.nodes                      # (nm-1, n1): sum_j2 v2 f
        ik = 1j * dvv / self.kappa[1:]
        s_al = ik * np.einsum("mj,mj->m", al, w)
        s_be = ik * np.einsum("mj,mj->m", be, w)
        b_new = b.copy()
        e2_new = e2.copy()
        e1_new = e1.copy()
        b_new[1:] = cos_t * b[1:] - 1j * sin_t * e2[1:] + s_al
        e2_new[1:] = -1j * sin_t * b[1:] + cos_t * e2[1:] + s_be
        e1_new[1:] = e1[1:] + ik * ((f[1:] - g[1:]).sum(axis=(1, 2)))
        return self.pack(g, b_new, e2_new, e1_new)

    def _to_physical(self, fhat: np.ndarray, axis: int = 0) -> np.ndarray:
        return np.fft.irfft(fhat * self.n_x, n=self.n_x, axis=axis)

    def nonlinear(self, y: np.ndarray) -> np.ndarray:
        f, b, e2, e1 = self.unpack(y)
        fx = self._to_physical(f)                          # (n_x, n1, n2)
        bx = self._to_physical(b)
        e1x = self._to_physical(e1)
        e2x = self._to_physical(e2)
        v1 = self.grid1.nodes
        v2 = self.grid2.nodes
        f1 = e1x[:, None] + np.outer(bx, v2)               # (n_x, n2)
        f2 = e2x[:, None] - np.outer(bx, v1)               # (n_x, n1)
        d1 = phase_space.apply_derivative(self.grid1, self.scheme, fx, axis=1, bias=f1)
        d2 = phase_space.apply_derivative(self.grid2, self.scheme, fx, axis=2, bias=f2)
        term = f1[:, None, :] * d1 + f2[:, :, None] * d2
        nhat = -np.fft.rfft(term, axis=0) / self.n_x
        if self._nyquist is not None:
            nhat[self._nyquist] = 0.0
        zb = np.zeros(self.n_modes, dtype=complex)
        return self.pack(nhat, zb, zb, zb)

    # diagnostics ---------------------------------------------------------
    def _spec_norm_sq(self, coeffs: np.ndarray) -> float:
        return float(self.length * (self.spec_w * np.abs(coeffs) ** 2).sum())

    def poisson_residual(self, y: np.ndarray) -> float:
        f, _, _, e1 = self.unpack(y)
        rho = self.grid1.dv * self.grid2.dv * f.sum(axis=(1, 2))
        r = 1j * self.kappa[1:] * e1[1:] - rho[1:]
        return float(np.linalg.norm(r) / max(np.linalg.norm(rho), 1e-300))

    def energy_split(self, y: np.ndarray) -> tuple[float, float]:
        f, b, e2, e1 = self.unpack(y)
        v1sq = self.grid1.nodes**2
        v2sq = self.grid2.nodes**2
        dvv = self.grid1.dv * self.grid2.dv
        kin = self.length * dvv * float(
            ((v1sq[:, None] + v2sq[None, :]) * f[0].real).sum())
        fields = self._spec_norm_sq(e1) + self._spec_norm_sq(e2) + self._spec_norm_sq(b)
        return kin, fields

    def observables(self, y: np.ndarray) -> dict[str, float]:
        f, b, e2, e1 = self.unpack(y)
        kin, fields = self.energy_split(y)
        e1n = np.sqrt(self._spec_norm_sq(e1))
        e2n = np.sqrt(self._spec_norm_sq(e2))
        return {
            "electric_energy": float(np.hypot(e1n, e2n)),
            "magnetic_energy": float(np.sqrt(self._spec_norm_sq(b))),
            "total_energy": kin + fields,
            "mass": float(self.length * self.grid1.dv * self.grid2.dv
                          * f[0].sum().real),
            "poisson_residual": self.poisson_residual(y),
            "e1_energy": e1n,
            "e2_energy": e2n,
        }


def solve_initial_poisson(model, y: np.ndarray) -> np.ndarray:
    """Replace the longitudinal field so the discrete Poisson equation holds."""
    if isinstance(model, VlasovAmpereModel):
        f, _ = model.unpack(y)
        return model.pack(f, model.solve_poisson(f))
    if isinstance(model, VlasovMaxwellDGModel):
        f, b, e2, _ = model.unpack(y)
        return model.pack(f, b, e2, model.solve_poisson(f))
    if isinstance(model, FourierVMModel):
        f, b, e2, _ = model.unpack(y)
        return model.pack(f, b, e2, model.solve_poisson(f))
    raise TypeError(f"model {type(model).__name__} has no Poisson solve")
