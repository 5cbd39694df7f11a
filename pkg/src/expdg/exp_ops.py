"""Structured linear algebra for the exponential DG solvers.

Central-flux DG matrices satisfy M~ A = S with S exactly antisymmetric
(M~ = dx * blockdiag(M)), so A is diagonalized through the generalized
Hermitian eigenproblem (iS) x = mu M~ x.  That route yields an exactly
imaginary spectrum and an M-unitary eigenbasis, which keeps repeated
exponential applications norm-preserving to machine precision.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .dg_core import (
    DGSpace,
    assemble_advection_matrix,
    assemble_stiffness_core,
    build_local_matrices,
    mass_block_matrix,
    FluxKind,
)


class UnsupportedConfigError(ValueError):
    """Raised for configurations the solver deliberately refuses."""


# Second zero-eigenvector of the central-flux DG matrix when (k+1)N is even.
# One repeating pattern per degree; for even k the pattern spans two cells.
SECOND_KERNEL_PATTERNS = {
    0: (0.0, 1.0),
    1: (0.0, 1.0),
    2: (-1.0 / 6.0, 0.0, 1.0, 0.0, 0.0, -1.0),
    3: (0.0, -3.0 / 20.0, 0.0, 1.0),
    4: (-3.0 / 280.0, 0.0, 3.0 / 14.0, 0.0, -1.0, 0.0, 0.0, -3.0 / 14.0, 0.0, 1.0),
    5: (0.0, 5.0 / 336.0, 0.0, -5.0 / 18.0, 0.0, 1.0),
}

KERNEL_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class KernelBasis:
    """Orthonormal basis of Ker(A), columns of `vectors`."""

    vectors: np.ndarray  # (n_dof, 1 or 2)
    degree: int
    n_cells: int

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class Projector:
    """Projector onto Ker(A) along Range(A); L2(mass)-orthogonal, so A Pi = Pi A = 0."""

    pi: np.ndarray


@dataclass(frozen=True)
class EigenFactorization:
    p: np.ndarray       # complex eigenvectors, columns
    lam: np.ndarray     # complex eigenvalues
    pinv: np.ndarray
    cond_p: float


def kernel_basis(a: np.ndarray, k: int, n_cells: int) -> KernelBasis:
    """Kernel basis of the central-flux matrix: constants, plus the tabulated
    second vector (Gram-Schmidt orthonormalized) when (k+1)*n_cells is even."""
    n = (k + 1) * n_cells
    if a.shape != (n, n):
        raise ValueError("matrix size does not match (k, n_cells)")
    u1 = np.zeros(n)
    u1[:: k + 1] = 1.0
    u1 /= np.linalg.norm(u1)
    cols = [u1]
    if n % 2 == 0:
        if k not in SECOND_KERNEL_PATTERNS:
            raise UnsupportedConfigError(
                f"no tabulated second kernel vector for degree {k}; "
                "even (k+1)*N needs one"
            )
        pat = np.array(SECOND_KERNEL_PATTERNS[k])
        if n % len(pat):
            raise UnsupportedConfigError(
                f"kernel pattern of length {len(pat)} does not tile {n} dofs"
            )
        u2 = np.tile(pat, n // len(pat))
        u2 -= (u2 @ u1) * u1
        u2 /= np.linalg.norm(u2)
        cols.append(u2)
    vecs = np.stack(cols, axis=1)
    a_scale = np.linalg.norm(a, 2)
    for i in range(vecs.shape[1]):
        resid = np.linalg.norm(a @ vecs[:, i]) / a_scale
        if resid > KERNEL_RESIDUAL_TOL:
            raise UnsupportedConfigError(
                f"tabulated kernel vector {i} has residual {resid:.2e}"
            )
    return KernelBasis(vectors=vecs, degree=k, n_cells=n_cells)


def build_projector(basis: KernelBasis) -> Projector:
    """Projector onto Ker(A), orthogonal in the broken-L2 (mass) inner product.

    Pi = U (U^T Mb U)^-1 U^T Mb with Mb = blockdiag(M).  The coefficient-space
    euclidean projector annihilates A only from the right for k >= 2; this one
    satisfies both A Pi = 0 and Pi A = 0, which the field updates rely on.
    The cell width drops out of Pi, so the unit-cell mass block suffices.
    """
    u = basis.vectors
    mb = np.kron(np.eye(basis.n_cells), build_local_matrices(basis.degree).m)
    mu = mb @ u
    gram = u.T @ mu
    return Projector(pi=u @ np.linalg.solve(gram, mu.T))


def eigen_factorize_central(space: DGSpace) -> EigenFactorization:
    """Diagonalize the central-flux matrix via the generalized Hermitian problem.

    Returns A = P diag(lam) P^-1 with lam exactly imaginary and
    P^-1 = P^H M~ (no matrix inversion involved).
    """
    s = assemble_stiffness_core(space)
    mb = mass_block_matrix(space)
    mu, x = sla.eigh(1j * s, mb)
    lam = -1j * mu / space.dx
    # eigh returns mb-orthonormal vectors, so the inverse needs no solve
    pinv = x.conj().T @ mb
    cond_p = float(np.linalg.cond(x))
    return EigenFactorization(p=x, lam=lam, pinv=pinv, cond_p=cond_p)


def eigen_factorize(a: np.ndarray, resid_tol: float = 1e-9, cond_max: float = 1e12) -> EigenFactorization:
    """General complex eigendecomposition with residual and conditioning checks."""
    lam, p = np.linalg.eig(a)
    cond_p = float(np.linalg.cond(p))
    if not np.isfinite(cond_p) or cond_p > cond_max:
        raise ValueError(f"eigenvector matrix ill-conditioned: cond = {cond_p:.2e}")
    pinv = np.linalg.inv(p)
    scale = np.linalg.norm(a)
    resid = np.linalg.norm(p @ (lam[:, None] * pinv) - a) / scale
    if resid > resid_tol:
        raise ValueError(f"eigendecomposition residual {resid:.2e} exceeds {resid_tol:.0e}")
    return EigenFactorization(p=p, lam=lam, pinv=pinv, cond_p=cond_p)


def exp_matrix(fact: EigenFactorization, scale: float) -> np.ndarray:
    """Real matrix exp(scale * A) from the cached factorization."""
    out = fact.p @ (np.exp(scale * fact.lam)[:, None] * fact.pinv)
    imag = np.abs(out.imag).max()
    real = np.abs(out.real).max()
    if imag > 1e-10 * max(real, 1.0):
        raise ValueError(f"imaginary residual {imag:.2e} in matrix exponential")
    return np.ascontiguousarray(out.real)


def exp_apply(fact: EigenFactorization, scale: float, vec: np.ndarray) -> np.ndarray:
    """Real action exp(scale*A) @ vec through the eigenbasis."""
    out = fact.p @ (np.exp(scale * fact.lam) * (fact.pinv @ vec))
    nrm = np.linalg.norm(out)
    if np.linalg.norm(out.imag) > 1e-10 * max(nrm, 1e-300):
        raise ValueError("imaginary residual in exponential action")
    return out.real


def scalar_phi(fact: EigenFactorization, f) -> np.ndarray:
    """Real matrix f(A) for a scalar function evaluated on the eigenvalues."""
    out = fact.p @ (np.asarray(f(fact.lam))[:, None] * fact.pinv)
    imag = np.abs(out.imag).max()
    if imag > 1e-9 * max(np.abs(out.real).max(), 1.0):
        raise ValueError(f"imaginary residual {imag:.2e} in phi evaluation")
    return np.ascontiguousarray(out.real)


# -- alpha/beta scalar functions (Duhamel integrals of the Maxwell coupling) --

SINGULAR_GUARD = 1e-6


def _alpha_naive(z, v):
    # (1-v)*(1+v) instead of 1-v*v: the factors stay exact near v = +-1
    return (-np.exp(z) / (2.0 * (1.0 - v))
            - np.exp(-z) / (2.0 * (1.0 + v))
            + np.exp(v * z) / ((1.0 - v) * (1.0 + v)))


def _beta_naive(z, v):
    return (-np.exp(z) / (2.0 * (1.0 - v))
            + np.exp(-z) / (2.0 * (1.0 + v))
            + v * np.exp(v * z) / ((1.0 - v) * (1.0 + v)))


def _alpha_taylor_near_one(z, eps):
    """4-term expansion of alpha(z, 1-eps) in eps; removable singularity at v=1."""
    ez, em = np.exp(z), np.exp(-z)
    c0 = ez * (0.25 - z / 2.0) - em / 4.0
    c1 = ez * (1.0 / 8.0 - z / 4.0 + z * z / 4.0) - em / 8.0
    c2 = ez * (1.0 / 16.0 - z / 8.0 + z * z / 8.0 - z**3 / 12.0) - em / 16.0
    c3 = ez * (1.0 / 32.0 - z / 16.0 + z * z / 16.0 - z**3 / 24.0 + z**4 / 48.0) - em / 32.0
    return c0 + eps * (c1 + eps * (c2 + eps * c3))


def _beta_taylor_near_one(z, eps):
    ez, em = np.exp(z), np.exp(-z)
    c0 = -ez * (0.25 + z / 2.0) + em / 4.0
    c1 = ez * (-1.0 / 8.0 + z / 4.0 + z * z / 4.0) + em / 8.0
    c2 = ez * (-1.0 / 16.0 + z / 8.0 - z * z / 8.0 - z**3 / 12.0) + em / 16.0
    c3 = ez * (-1.0 / 32.0 + z / 16.0 - z * z / 16.0 + z**3 / 24.0 + z**4 / 48.0) + em / 32.0
    return c0 + eps * (c1 + eps * (c2 + eps * c3))


def alpha_scalar(z, v: float):
    """alpha(z, v) = -e^z/(2(1-v)) - e^-z/(2(1+v)) + e^(vz)/(1-v^2), guarded at v = +-1."""
    if abs(1.0 - v) < SINGULAR_GUARD:
        return _alpha_taylor_near_one(z, 1.0 - v)
    if abs(1.0 + v) < SINGULAR_GUARD:
        # alpha(z, -v) = alpha(-z, v)
        return _alpha_taylor_near_one(-np.asarray(z), 1.0 + v)
    return _alpha_naive(z, v)


def beta_scalar(z, v: float):
    """beta(z, v) = -e^z/(2(1-v)) + e^-z/(2(1+v)) + v e^(vz)/(1-v^2), guarded at v = +-1."""
    if abs(1.0 - v) < SINGULAR_GUARD:
        return _beta_taylor_near_one(z, 1.0 - v)
    if abs(1.0 + v) < SINGULAR_GUARD:
        # beta(z, -v) = -beta(-z, v)
        return -_beta_taylor_near_one(-np.asarray(z), 1.0 + v)
    return _beta_naive(z, v)


def phi_alpha_beta(fact: EigenFactorization, v1: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Matrices alpha(A; t, v1), beta(A; t, v1) of the Maxwell source coupling."""
    alpha = scalar_phi(fact, lambda lam: alpha_scalar(lam * t, v1))
    beta = scalar_phi(fact, lambda lam: beta_scalar(lam * t, v1))
    return alpha, beta


# -- regularized inverse -----------------------------------------------------


def regularized_inverse(a: np.ndarray, pi: np.ndarray, resid_tol: float = 1e-10) -> np.ndarray:
    """(A + Pi)^-1 by LU with one step of iterative refinement."""
    apip = a + pi
    lu = sla.lu_factor(apip)
    n = a.shape[0]
    inv = sla.lu_solve(lu, np.eye(n))
    inv += sla.lu_solve(lu, np.eye(n) - apip @ inv)
    resid = np.linalg.norm(apip @ inv - np.eye(n))
    if resid > resid_tol:
        raise ValueError(f"(A+Pi) inverse residual {resid:.2e}; wrong kernel basis?")
    return inv


# -- exponential cache -------------------------------------------------------


class ExpCache:
    """Precomputed exponentials exp(v_j * A * tau * dt) for the Lawson stepper.

    `matrices[tau]` stacks one real matrix per velocity node.  Maxwell-block
    exponentials (cosh/sinh of A*tau*dt) and the alpha/beta stacks are built
    on demand per fraction and memoized.
    """

    def __init__(self, fact: EigenFactorization, pi: np.ndarray, a: np.ndarray,
                 velocities: np.ndarray, dt: float, fractions):
        self.fact = fact
        self.velocities = np.asarray(velocities, dtype=float)
        self.dt = float(dt)
        self.a_plus_pi_inv = regularized_inverse(a, pi)
        self.matrices: dict[float, np.ndarray] = {}
        n = a.shape[0]
        for frac in sorted(set(float(f) for f in fractions)):
            if frac == 0.0:
                continue
            stack = np.empty((len(self.velocities), n, n))
            for j, vj in enumerate(self.velocities):
                stack[j] = exp_matrix(fact, vj * frac * self.dt)
            self.matrices[frac] = stack
        self._maxwell: dict[float, tuple[np.ndarray, np.ndarray]] = {}
        self._alpha_beta: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def fractions(self):
        return sorted(self.matrices)

    def apply_f(self, frac: float, f: np.ndarray) -> np.ndarray:
        """Batched exp(v_j A frac dt) f_j; f has shape (n_v, ..., n_dof)."""
        if frac == 0.0:
            return f.copy()
        c = self.matrices[frac]
        return np.einsum("jab,j...b->j...a", c, f, optimize=True)

    def maxwell_blocks(self, frac: float) -> tuple[np.ndarray, np.ndarray]:
        """(e^{At} + e^{-At})/2 and (e^{At} - e^{-At})/2 at t = frac*dt."""
        if frac not in self._maxwell:
            t = frac * self.dt
            ep = exp_matrix(self.fact, t)
            em = exp_matrix(self.fact, -t)
            self._maxwell[frac] = (0.5 * (ep + em), 0.5 * (ep - em))
        return self._maxwell[frac]

    def alpha_beta(self, frac: float) -> tuple[np.ndarray, np.ndarray]:
        """Stacks alpha_j, beta_j over the velocity nodes at t = frac*dt."""
        if frac not in self._alpha_beta:
            t = frac * self.dt
            n = self.a_plus_pi_inv.shape[0]
            al = np.empty((len(self.velocities), n, n))
            be = np.empty((len(self.velocities), n, n))
            for j, vj in enumerate(self.velocities):
                al[j], be[j] = phi_alpha_beta(self.fact, vj, t)
            self._alpha_beta[frac] = (al, be)
        return self._alpha_beta[frac]


def build_exp_cache(space: DGSpace, pi: np.ndarray, velocities: np.ndarray,
                    dt: float, fractions) -> ExpCache:
    """Cache for the central-flux advection matrix of `space`."""
    a = assemble_advection_matrix(space, FluxKind.CENTRAL)
    fact = eigen_factorize_central(space)
    return ExpCache(fact, pi, a, velocities, dt, fractions)


# -- Kronecker-sum exponential action ----------------------------------------


def kron_exp_apply(ax: np.ndarray, ay: np.ndarray, tx: float, ty: float,
                   f: np.ndarray) -> np.ndarray:
    """exp(ty*Ay (+) tx*Ax) applied to vec(F) without forming the Kronecker sum.

    F has shape (nx, ny) with the x dofs down the columns; vec stacks columns
    (x index fastest), matching A (+) B = A kron I + I kron B.  The action
    factors as exp(tx*Ax) @ F @ exp(ty*Ay)^T.
    """
    nx, ny = ax.shape[0], ay.shape[0]
    if f.shape != (nx, ny):
        raise ValueError(f"operand shape {f.shape} does not match ({nx}, {ny})")
    ex = sla.expm(tx * ax)
    ey = sla.expm(ty * ay)
    return ex @ f @ ey.T
