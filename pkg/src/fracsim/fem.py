"""Linear finite elements in space, first-order convolution quadrature in time.

The memory integral int_0^t b(t-s) A u(s) ds with the Riesz kernel
b(t) = t^(alpha-1)/Gamma(alpha) is discretized by Lubich quadrature whose
weights are the power-series coefficients of bhat((1-z)/dt) = (dt/(1-z))^alpha.
Each time step solves one symmetric positive definite tridiagonal system

    (Mass + dt*w_0*Stiff) U_n
        = Mass U_{n-1} - dt * sum_{i<n} w_{n-i} Stiff U_i + J dbeta_n,

with the rank-1 noise load J_k = (1_{[0,1/2]}, phi_k).  The system matrix is
factored once and reused; the history sum is evaluated densely.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded
from scipy.special import gamma

from .exceptions import FracsimError, ValidationError
from .grids import Mesh1D, TimeGrid


@dataclass(frozen=True)
class SymTridiag:
    """Symmetric tridiagonal matrix stored as its diagonal and off-diagonal."""

    diag: np.ndarray
    off: np.ndarray

    @property
    def n(self):
        return self.diag.size

    def matvec(self, x):
        """Apply to a vector (n,) or a stack of columns (n, ...)."""
        y = self.diag.reshape((-1,) + (1,) * (x.ndim - 1)) * x
        o = self.off.reshape((-1,) + (1,) * (x.ndim - 1))
        y[:-1] += o * x[1:]
        y[1:] += o * x[:-1]
        return y

    def todense(self):
        A = np.diag(self.diag)
        A += np.diag(self.off, 1) + np.diag(self.off, -1)
        return A

    def banded(self):
        """scipy upper-banded storage (2, n)."""
        ab = np.zeros((2, self.n))
        ab[0, 1:] = self.off
        ab[1, :] = self.diag
        return ab


@dataclass(frozen=True)
class FemMatrices:
    mass: SymTridiag
    stiffness: SymTridiag
    load: np.ndarray


@dataclass(frozen=True)
class LcqWeights:
    """Convolution quadrature weights w_k = dt^alpha * binom coefficients."""

    alpha: float
    dt: float
    omega: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class FemSolution:
    mesh: Mesh1D
    grid: TimeGrid
    nodal: np.ndarray = field(repr=False)

    def __post_init__(self):
        nodal = np.asarray(self.nodal, dtype=float)
        if nodal.shape != (self.grid.M + 1, self.mesh.N - 1):
            raise ValidationError("nodal must be (M+1) x (N-1)")
        if not np.all(np.isfinite(nodal)):
            raise ValidationError("nodal values contain non-finite entries")
        object.__setattr__(self, "nodal", nodal)


def _hat_integral_below(mesh, k, c):
    """Exact integral of the hat at interior node k over [0, c]."""
    h = mesh.h
    xl, xm, xr = mesh.nodes[k - 1], mesh.nodes[k], mesh.nodes[k + 1]
    # rising piece on [xl, xm]
    if c <= xl:
        rise = 0.0
    elif c >= xm:
        rise = 0.5 * h
    else:
        rise = (c - xl) ** 2 / (2.0 * h)
    # falling piece on [xm, xr]
    if c <= xm:
        fall = 0.0
    elif c >= xr:
        fall = 0.5 * h
    else:
        fall = (h**2 - (xr - c) ** 2) / (2.0 * h)
    return rise + fall


def assemble(mesh):
    """Mass/stiffness matrices and the 1_{[0,1/2]} load vector on a mesh.

    Uniform linear elements give the closed forms mass = trid(h/6, 2h/3),
    stiffness = trid(-1/h, 2/h); the load is the clipped hat area.
    """
    h = mesh.h
    n = mesh.N - 1
    mass = SymTridiag(diag=np.full(n, 2.0 * h / 3.0), off=np.full(n - 1, h / 6.0))
    stiffness = SymTridiag(diag=np.full(n, 2.0 / h), off=np.full(n - 1, -1.0 / h))
    load = np.array([_hat_integral_below(mesh, k, 0.5) for k in range(1, mesh.N)])
    return FemMatrices(mass=mass, stiffness=stiffness, load=load)


def lcq_weights(alpha, dt, M):
    """First M+1 convolution quadrature weights for the Riesz kernel.

    Generating function (dt/(1-z))^alpha: w_k = dt^alpha * c_k with c_0 = 1
    and c_k = c_{k-1} (k-1+alpha)/k.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValidationError(f"alpha must be in (0,1], got {alpha}")
    if not (dt > 0):
        raise ValidationError(f"dt must be > 0, got {dt}")
    if M < 0:
        raise ValidationError(f"M must be >= 0, got {M}")
    c = np.ones(M + 1)
    for k in range(1, M + 1):
        c[k] = c[k - 1] * (k - 1 + alpha) / k
    return LcqWeights(alpha=alpha, dt=dt, omega=dt**alpha * c)


def lcq_convolve_check(weights, grid):
    """Quadrature error of LCQ applied to g = 1; expected O(dt).

    Returns max_m |sum_{k<m} w_k - t_m^alpha / Gamma(alpha+1)| over the nodes
    with t_m >= T/2.  The first few nodes sit inside the kernel's singular
    layer where any such rule is only O(dt^alpha); away from it the scheme
    is first order, which is the behavior this check certifies.
    """
    if abs(weights.dt - grid.dt) > 1e-12 * grid.T:
        raise ValidationError("weights step does not match the grid")
    partial = np.cumsum(weights.omega[: grid.M])
    exact = grid.nodes[1:] ** weights.alpha / gamma(weights.alpha + 1.0)
    window = grid.nodes[1:] >= 0.5 * grid.T
    return float(np.max(np.abs(partial - exact)[window]))


def sine_projection_rhs(mesh):
    """Exact right-hand side (sin(pi x), phi_k) for the L2 projection."""
    h = mesh.h
    x = mesh.interior
    return np.sin(np.pi * x) * (4.0 * np.sin(np.pi * h / 2.0) ** 2) / (np.pi**2 * h)


def initial_projection(mesh, matrices=None):
    """Nodal values of the L2 projection of sin(pi x) onto the FE space."""
    mats = matrices if matrices is not None else assemble(mesh)
    cb = cholesky_banded(mats.mass.banded())
    return cho_solve_banded((cb, False), sine_projection_rhs(mesh))


def _simulate_paths(mesh, grid, alpha, increments, u0_nodal):
    """Time recursion for a batch of driving paths.

    increments: (M, S) Brownian increments shared coupling-wise by callers.
    Returns (M+1, N-1, S).
    """
    mats = assemble(mesh)
    w = lcq_weights(alpha, grid.dt, grid.M).omega
    n = mesh.N - 1
    M = grid.M
    S = increments.shape[1]
    system = SymTridiag(
        diag=mats.mass.diag + grid.dt * w[0] * mats.stiffness.diag,
        off=mats.mass.off + grid.dt * w[0] * mats.stiffness.off,
    )
    try:
        cb = cholesky_banded(system.banded())
    except np.linalg.LinAlgError as exc:  # unreachable for h, dt > 0
        raise FracsimError(f"system matrix is not positive definite: {exc}")

    U = np.empty((M + 1, n, S))
    U[0] = u0_nodal[:, None]
    V = np.empty((M, n * S))  # V[i] = Stiff @ U_i, flattened over samples
    u = U[0]
    for step in range(1, M + 1):
        rhs = mats.mass.matvec(u) + mats.load[:, None] * increments[step - 1][None, :]
        if step > 1:
            hist = w[step - 1 : 0 : -1] @ V[1:step]
            rhs -= grid.dt * hist.reshape(n, S)
        u = cho_solve_banded((cb, False), rhs)
        U[step] = u
        if step < M:
            V[step] = mats.stiffness.matvec(u).reshape(-1)
    return U


def simulate_fem(mesh, grid, alpha, increments=None, u0_nodal=None):
    """Simulate one path of the FEM/LCQ scheme.

    ``increments`` may be an (M,) array of Brownian increments (N(0, dt)),
    a numpy Generator (increments are drawn from it), or None for the
    deterministic zero-noise evolution.  ``u0_nodal`` defaults to the L2
    projection of sin(pi x).
    """
    if u0_nodal is None:
        u0_nodal = initial_projection(mesh)
    else:
        u0_nodal = np.asarray(u0_nodal, dtype=float)
        if u0_nodal.shape != (mesh.N - 1,):
            raise ValidationError("u0_nodal must have N-1 entries")
    if increments is None:
        inc = np.zeros((grid.M, 1))
    elif isinstance(increments, np.random.Generator):
        inc = increments.standard_normal((grid.M, 1)) * np.sqrt(grid.dt)
    else:
        inc = np.asarray(increments, dtype=float).reshape(grid.M, 1)
    U = _simulate_paths(mesh, grid, alpha, inc, u0_nodal)
    return FemSolution(mesh=mesh, grid=grid, nodal=U[:, :, 0])


def prolong(coarse_mesh, fine_mesh, nodal):
    """Piecewise-linear prolongation of interior nodal values onto a nested
    finer mesh; rows of ``nodal`` are time slices."""
    if fine_mesh.N % coarse_mesh.N != 0:
        raise ValidationError("meshes are not nested")
    nodal = np.atleast_2d(nodal)
    full = np.zeros((nodal.shape[0], coarse_mesh.N + 1))
    full[:, 1:-1] = nodal
    out = np.empty((nodal.shape[0], fine_mesh.N - 1))
    for i, row in enumerate(full):
        out[i] = np.interp(fine_mesh.interior, coarse_mesh.nodes, row)
    return out


def l2_norm(mesh, nodal):
    """Exact L2(0,1) norm of the FE function(s) with given interior values."""
    nodal = np.atleast_2d(nodal)
    mass = assemble(mesh).mass
    return np.sqrt(np.einsum("ti,it->t", nodal, mass.matvec(nodal.T)))


def fem_error_path(coarse, fine):
    """L2 distance between a coarse solution and a finer one at every node.

    Both must share the time grid and (by the caller's coupling) the driving
    Brownian path; the coarse solution is prolonged onto the fine mesh.
    """
    if coarse.grid.M != fine.grid.M or abs(coarse.grid.T - fine.grid.T) > 0:
        raise ValidationError("solutions live on different time grids")
    if fine.mesh.N % coarse.mesh.N != 0:
        raise ValidationError("meshes are not nested")
    diff = fine.nodal - prolong(coarse.mesh, fine.mesh, coarse.nodal)
    return l2_norm(fine.mesh, diff)
