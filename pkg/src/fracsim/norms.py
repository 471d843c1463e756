"""Pathwise Holder/sup norms, Monte Carlo L^p(Omega) estimates, and rates.

A discrete error path carries the norms ||e(t_m)|| at the measurement nodes.
The Holder seminorm additionally needs the pairwise difference norms
||e(t_i) - e(t_j)||, which the node values alone do not determine; callers
supply them either as a dense matrix or as a callback (i, j) -> norm.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ValidationError
from .grids import TimeGrid


@dataclass(frozen=True)
class NormedPath:
    """Norms of an error path at the nodes of a measurement grid."""

    grid: TimeGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.M + 1,):
            raise ValidationError("values must have one entry per grid node")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValidationError("values must be finite and nonnegative")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class RateStudy:
    """Results of one convergence study: errors over (gamma, dimension)."""

    alpha: float
    gammas: tuple
    p: float
    dims: tuple
    errors: np.ndarray = field(repr=False)
    empirical_rates: tuple
    theoretical_rates: tuple
    samples: int
    seed: int

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 2 or any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValidationError("dims must be strictly increasing, length >= 2")
        errors = np.asarray(self.errors, dtype=float)
        if errors.shape != (len(self.gammas), len(dims)):
            raise ValidationError("errors must be (len(gammas), len(dims))")
        if not np.all(errors > 0):
            raise ValidationError("errors must be strictly positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "errors", errors)
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))


def sup_norm(path):
    """Max of the node norms, the discrete C([0,T]; H) norm."""
    if path.values.size == 0:
        raise ValidationError("empty path")
    return float(np.max(path.values))


def holder_seminorm(path, gamma, diff_norm):
    """Discrete Holder seminorm max_{i<j} ||e(t_i)-e(t_j)|| / (t_j-t_i)^gamma.

    ``diff_norm`` is either an (M+1, M+1) matrix of pairwise difference
    norms or a callable (i, j) -> norm.  gamma = 0 falls back to the sup
    norm of the path itself.
    """
    if not (0.0 <= gamma < 1.0):
        raise ValidationError(f"gamma must be in [0,1), got {gamma}")
    if gamma == 0.0:
        return sup_norm(path)
    t = path.grid.nodes
    m = t.size
    if callable(diff_norm):
        D = np.empty((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                D[i, j] = diff_norm(i, j)
    else:
        D = np.asarray(diff_norm, dtype=float)
        if D.shape != (m, m):
            raise ValidationError("diff_norm matrix must be (M+1) x (M+1)")
    iu, ju = np.triu_indices(m, k=1)
    gaps = t[ju] - t[iu]
    # scalar libm pow on the distinct gaps; numpy's vectorized pow can differ
    # from it in the last ulp, which would break exact oracle comparisons
    uniq, inverse = np.unique(gaps, return_inverse=True)
    denoms = np.array([math.pow(g, gamma) for g in uniq])
    return float(np.max(D[iu, ju] / denoms[inverse]))


def scalar_diff_matrix(values):
    """Pairwise |v_i - v_j| matrix for a scalar-valued path."""
    v = np.asarray(values, dtype=float)
    return np.abs(v[:, None] - v[None, :])


def gram_diff_matrix(gram):
    """Pairwise difference norms from a Gram matrix g_ij = <e_i, e_j>.

    D_ij = sqrt(g_ii + g_jj - 2 g_ij); tiny negative radicands from rounding
    are clipped to zero.
    """
    g = np.asarray(gram, dtype=float)
    d = np.diag(g)
    sq = d[:, None] + d[None, :] - 2.0 * g
    return np.sqrt(np.clip(sq, 0.0, None))


def lp_omega_estimate(sample_norms, p):
    """Monte Carlo estimate ((1/S) sum x_s^p)^(1/p) of the L^p(Omega) norm."""
    x = np.asarray(sample_norms, dtype=float)
    if x.size == 0:
        raise ValidationError("empty sample set")
    if not (p > 0):
        raise ValidationError(f"p must be > 0, got {p}")
    return float(np.mean(x**p) ** (1.0 / p))


def empirical_rate(errors, dims):
    """Observed order: min over consecutive pairs of the log error ratio
    divided by the log dimension ratio."""
    e = np.asarray(errors, dtype=float)
    d = np.asarray(dims, dtype=float)
    if e.shape != d.shape or e.size < 2:
        raise ValidationError("errors and dims must have equal length >= 2")
    if np.any(e <= 0):
        raise ValidationError("errors must be strictly positive")
    if np.any(np.diff(d) <= 0):
        raise ValidationError("dims must be strictly increasing")
    rates = -np.log(e[:-1] / e[1:]) / np.log(d[:-1] / d[1:])
    return float(np.min(rates))


def theoretical_rate(method, alpha, gamma):
    """Expected convergence order in the discretization dimension.

    spectral: (1-2*gamma)/(1+alpha) - 1/2 (rate in the number of modes N);
    fem: (1-2*gamma)/(1+alpha) (rate in 1/h).
    """
    if not (0.0 < alpha < 1.0):
        raise ValidationError(f"alpha must be in (0,1), got {alpha}")
    if not (0.0 <= gamma < 0.5):
        raise ValidationError(f"gamma must be in [0,1/2), got {gamma}")
    base = (1.0 - 2.0 * gamma) / (1.0 + alpha)
    if method == "spectral":
        return base - 0.5
    if method == "fem":
        return base
    raise ValidationError(f"method must be 'spectral' or 'fem', got {method!r}")
