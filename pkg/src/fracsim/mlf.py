"""Two-parameter Mittag-Leffler function E_{rho,mu} for real arguments.

E_{rho,mu}(z) = sum_{k>=0} z^k / Gamma(rho*k + mu).

The evaluator is a hybrid:

* truncated power series in float64 while the alternating-sum cancellation
  stays below the accuracy target,
* the same power series summed in extended precision (mpmath) in the
  intermediate band where float64 cancellation would swamp the result,
* the asymptotic expansion  E_{rho,mu}(z) ~ -sum_{k>=1} z^{-k}/Gamma(mu-rho*k)
  for large negative z and rho in (0, 2).

The regime switch is controlled by u = |z|^(1/rho): the float64 series is
used for u below a tolerance-dependent bound, the asymptotic expansion for
u >= U_ASYMPTOTIC, and extended precision in between.  Both sides of the
series/asymptotic switch are cross-checked by the test suite.
"""

import math
from dataclasses import dataclass

import mpmath
import numpy as np
from scipy.special import gammaln, rgamma

from .exceptions import AccuracyError, ValidationError

DEFAULT_TOL = 1e-12

# Asymptotic expansion takes over at |z| = U_ASYMPTOTIC**rho.  At that point
# its optimal-truncation error is O(exp(-U_ASYMPTOTIC)) ~ 2e-16, so both
# regimes overlap at full accuracy.
U_ASYMPTOTIC = 36.0

# Largest exponent u = |z|^(1/rho) we allow for positive arguments before
# exp(u) (the size of the value itself) endangers float64 range.
_U_OVERFLOW = 600.0

_EPS = np.finfo(float).eps
_SERIES_BUDGET = 200_000


def default_z_max(rho):
    """Default positive-argument overflow guard for a given first parameter."""
    return min(100.0, _U_OVERFLOW**rho)


def switch_radius(rho):
    """|z| at which evaluation switches from series to asymptotic expansion."""
    return U_ASYMPTOTIC**rho


@dataclass(frozen=True)
class MlfRequest:
    """A single Mittag-Leffler evaluation request.

    ``rho`` and ``mu`` are the two function parameters (mu=1 gives the
    one-parameter function), ``z`` the real argument and ``tol`` the absolute
    accuracy target.  Arguments above ``z_max`` are rejected as an overflow
    guard; ``z_max=None`` uses a rho-dependent default.
    """

    rho: float
    mu: float = 1.0
    z: float = 0.0
    tol: float = DEFAULT_TOL
    z_max: float | None = None

    def __post_init__(self):
        if not (self.rho > 0):
            raise ValidationError(f"rho must be > 0, got {self.rho}")
        if not (self.mu > 0):
            raise ValidationError(f"mu must be > 0, got {self.mu}")
        if not (self.tol > 0):
            raise ValidationError(f"tol must be > 0, got {self.tol}")
        if not math.isfinite(self.z):
            raise ValidationError(f"z must be finite, got {self.z}")
        guard = self.z_max if self.z_max is not None else default_z_max(self.rho)
        if self.z > guard:
            raise ValidationError(
                f"z={self.z} exceeds overflow guard z_max={guard}"
            )


def _u_series_f64(tol):
    """Largest u for which float64 series cancellation stays below tol.

    The largest partial sum of the alternating series is ~exp(u), so the
    rounding error is ~eps*exp(u); a factor 10 margin is kept.
    """
    return math.log(max(tol, 1e-15) / (10.0 * _EPS))


# ---------------------------------------------------------------------------
# float64 series, vectorized with per-element stopping


def _series_f64(rho, mu, z, tol):
    """Power series in float64.  ``z`` is a 1-D array.

    Each element stops at its own term-size criterion, so the result for any
    element is bit-identical to a scalar (length-1) call.
    """
    z = np.asarray(z, dtype=float)
    n = z.size
    total = np.full(n, rgamma(mu))  # k = 0 term
    active = z != 0.0
    if not active.any():
        return total
    log_abs_z = np.where(active, np.log(np.abs(np.where(active, z, 1.0))), 0.0)
    sign_z = np.sign(z)
    thresh = 0.01 * tol
    prev_abs = np.abs(total)
    sign_k = np.ones(n)
    for k in range(1, _SERIES_BUDGET):
        sign_k = sign_k * sign_z
        log_term = k * log_abs_z - gammaln(rho * k + mu)
        abs_term = np.exp(log_term)
        term = sign_k * abs_term
        total = np.where(active, total + term, total)
        # stop once past the hump and below threshold
        done = active & (abs_term < thresh) & (abs_term <= prev_abs)
        active = active & ~done
        if not active.any():
            return total
        prev_abs = abs_term
    raise AccuracyError(
        "power series did not converge within the step budget",
        residual=float(np.max(abs_term[active])),
    )


# ---------------------------------------------------------------------------
# asymptotic expansion for large negative z, rho in (0, 2)


def _asymptotic_f64(rho, mu, z, tol):
    """Asymptotic expansion, vectorized.  Returns (values, achieved).

    ``achieved`` is the per-element error estimate (term envelope at the
    truncation point); callers escalate elements where it exceeds ``tol``.
    Truncation is controlled by the smooth envelope
    |z|^{-k} * Gamma(rho*k+1-mu) / pi rather than the raw term sizes, whose
    reflection sine factor makes them non-monotone for small rho.
    """
    z = np.asarray(z, dtype=float)
    n = z.size
    total = np.zeros(n)
    if 1.0 < rho < 2.0:
        # for rho in (1, 2) the negative axis lies inside the sector where a
        # conjugate pair of exponential branches contributes; it decays only
        # like exp(|z|^(1/rho) * cos(pi/rho)) and must be kept explicitly
        w = np.abs(z) ** (1.0 / rho) * np.exp(1j * math.pi / rho)
        total += (2.0 / rho) * (w ** (1.0 - mu) * np.exp(w)).real
    inv_z = 1.0 / z
    log_abs_z = np.log(np.abs(z))
    power = np.ones(n)
    prev_env = np.full(n, np.inf)
    achieved = np.full(n, np.inf)
    active = np.ones(n, dtype=bool)
    for k in range(1, 100_000):
        power = power * inv_z
        term = -power * rgamma(mu - rho * k)
        env = np.exp(gammaln(rho * k + 1.0 - mu) - k * log_abs_z - math.log(math.pi))
        growing = active & (env > prev_env)
        # freeze growing elements before adding the diverging term
        achieved = np.where(growing, prev_env, achieved)
        active = active & ~growing
        total = np.where(active, total + term, total)
        small = active & (env < 0.02 * tol)
        achieved = np.where(small, env, achieved)
        active = active & ~small
        if not active.any():
            break
        prev_env = np.where(active, env, prev_env)
    achieved = np.where(active, prev_env, achieved)
    return total, achieved


# ---------------------------------------------------------------------------
# extended-precision series for the intermediate band

_MP_TABLE_CACHE = {}


def _mp_rgamma_table(rho, mu, prec, n):
    """Cached table of 1/Gamma(rho*k + mu), k = 0..n-1, at binary prec."""
    key = (float(rho), float(mu), int(prec))
    table = _MP_TABLE_CACHE.setdefault(key, [])
    if len(table) < n:
        with mpmath.workprec(prec):
            rho_mp = mpmath.mpf(rho)
            mu_mp = mpmath.mpf(mu)
            for k in range(len(table), n):
                # the Gamma argument must be formed at working precision:
                # a double-rounded rho*k+mu perturbs huge terms by far more
                # than the final cancelled sum
                table.append(mpmath.rgamma(rho_mp * k + mu_mp))
    return table


def _series_mp(rho, mu, z, tol):
    """Power series summed in extended precision; scalar ``z``."""
    u = abs(z) ** (1.0 / rho)
    # digits lost to cancellation ~ u/ln(10); round up for cache reuse
    dps = 20 + 10 * (int(u / math.log(10.0)) // 10 + 1)
    prec = int(dps * 3.34) + 8
    thresh = 0.001 * tol
    chunk = max(64, int(3.0 * u / rho) + 32)
    with mpmath.workprec(prec):
        z_mp = mpmath.mpf(z)
        total = mpmath.mpf(0)
        zk = mpmath.mpf(1)
        prev_abs = mpmath.inf
        k = 0
        while k < _SERIES_BUDGET:
            table = _mp_rgamma_table(rho, mu, prec, min(k + chunk, _SERIES_BUDGET))
            stop = len(table)
            while k < stop:
                term = zk * table[k]
                total += term
                abs_term = abs(term)
                if abs_term < thresh and abs_term <= prev_abs:
                    return float(total)
                prev_abs = abs_term
                zk *= z_mp
                k += 1
    raise AccuracyError(
        "extended-precision series did not converge within the step budget",
        residual=float(prev_abs),
    )


# ---------------------------------------------------------------------------
# regime dispatch


def series_eval(rho, mu, z, tol=DEFAULT_TOL):
    """Evaluate by power series only, choosing float64 or extended precision."""
    if z <= 0 and (-z) ** (1.0 / rho) > _u_series_f64(tol):
        return _series_mp(rho, mu, z, tol)
    return float(_series_f64(rho, mu, np.array([z]), tol)[0])


def asymptotic_eval(rho, mu, z, tol=DEFAULT_TOL):
    """Evaluate by the asymptotic expansion only; z < 0, rho in (0, 2)."""
    if z >= 0:
        raise ValidationError("asymptotic expansion requires z < 0")
    if not (0 < rho < 2):
        raise ValidationError("asymptotic expansion requires rho in (0, 2)")
    value, achieved = _asymptotic_f64(rho, mu, np.array([z]), tol)
    if achieved[0] > tol:
        raise AccuracyError(
            "asymptotic expansion cannot reach the requested tolerance",
            residual=float(achieved[0]),
        )
    return float(value[0])


def _eval_array(rho, mu, z, tol):
    """Vectorized regime dispatch; returns float64 array of values.

    Per-element results are identical to scalar calls because every branch
    applies per-element stopping rules.
    """
    z = np.asarray(z, dtype=float)
    flat = z.ravel()
    out = np.empty(flat.shape)
    u = np.where(flat < 0, np.abs(flat) ** (1.0 / rho), 0.0)
    u_f64 = _u_series_f64(tol)

    is_series = (flat >= 0) | (u <= u_f64)
    is_asym = (~is_series) & (u >= U_ASYMPTOTIC) & (rho < 2)
    is_mp = ~is_series & ~is_asym

    if is_series.any():
        out[is_series] = _series_f64(rho, mu, flat[is_series], tol)
    if is_asym.any():
        vals, achieved = _asymptotic_f64(rho, mu, flat[is_asym], tol)
        bad = achieved > tol
        if bad.any():
            idx = np.flatnonzero(is_asym)[bad]
            vals[bad] = [_series_mp(rho, mu, flat[i], tol) for i in idx]
        out[is_asym] = vals
    if is_mp.any():
        out[is_mp] = [_series_mp(rho, mu, zi, tol) for zi in flat[is_mp]]
    return out.reshape(z.shape)


def mlf(req):
    """Evaluate E_{rho,mu}(z) to the request's absolute tolerance.

    For values with |E| >> 1 (large positive arguments) the achievable
    accuracy degrades to a few ulps relative, i.e. max(tol, ~10*eps*|E|).
    """
    if not isinstance(req, MlfRequest):
        raise ValidationError("mlf expects an MlfRequest")
    return float(_eval_array(req.rho, req.mu, np.array([req.z]), req.tol)[0])


def mlf_grid(rho, mu, args, tol=DEFAULT_TOL):
    """Evaluate E_{rho,mu} on an ordered list of arguments.

    Element i equals ``mlf`` applied to ``args[i]`` bit for bit.  Scalar
    errors are re-raised with the offending index attached.
    """
    args = np.asarray(args, dtype=float)
    if args.size == 0:
        return np.empty(0)
    if not np.all(np.isfinite(args)):
        bad = int(np.flatnonzero(~np.isfinite(args))[0])
        raise ValidationError(f"args[{bad}] is not finite")
    guard = default_z_max(rho)
    if np.any(args > guard):
        bad = int(np.flatnonzero(args > guard)[0])
        raise ValidationError(
            f"args[{bad}]={args[bad]} exceeds overflow guard z_max={guard}"
        )
    # validate parameters once through the request type
    MlfRequest(rho=rho, mu=mu, z=float(args[0]), tol=tol)
    try:
        return _eval_array(rho, mu, args, tol)
    except AccuracyError as exc:
        raise AccuracyError(
            f"mlf_grid failed within the grid: {exc}", residual=exc.residual
        ) from exc
