"""Convergence-study orchestration: config parsing, Monte Carlo runs, CSV.

A study couples every truncation dimension to a common reference through
shared noise streams, measures pathwise Holder/sup norms of the error on a
(possibly strided) measurement grid, aggregates them into L^p(Omega)
estimates, and writes one CSV row per (gamma, dimension) plus a JSON rate
summary.  All randomness is counter-based, keyed by (seed, sample, stream),
so outputs are byte-identical for a given (config, seed) regardless of the
worker-thread count.
"""

import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import fem, norms, rng, spectral
from .exceptions import AccuracyError, ValidationError
from .grids import Mesh1D, TimeGrid

SCHEMA_VERSION = 1

CSV_COLUMNS = (
    "schema,method,alpha,gamma,p,dim,samples,seed,"
    "error,empirical_rate,theoretical_rate,wall_ms"
)

# FEM samples are simulated in fixed-size batches so that the per-sample
# floating-point work is independent of the worker-thread count.
_FEM_BATCH = 32

_DESK_DEFAULTS = {
    "spectral": {
        "alpha": 0.35,
        "gammas": (0.0, 0.1),
        "p": 2.0,
        "T": 1.0,
        "dt": 0.002,
        "dims": (2, 4, 8, 16, 32, 64),
        "ref_dim": 1024,
        "samples": 64,
        "seed": 12345,
        "measurement_stride": 5,
        "output_path": "results/spectral_study.csv",
    },
    "fem": {
        "alpha": 0.2,
        "gammas": (0.0, 0.1),
        "p": 2.0,
        "T": 1.0,
        "dt": 0.001,
        "dims": (2, 4, 8, 16, 32, 64),
        "ref_dim": 512,
        "samples": 128,
        "seed": 12345,
        "measurement_stride": 5,
        "output_path": "results/fem_study.csv",
    },
}


@dataclass(frozen=True)
class StudyConfig:
    method: str
    alpha: float
    gammas: tuple
    p: float
    T: float
    dt: float
    dims: tuple
    ref_dim: int
    samples: int
    seed: int
    measurement_stride: int
    output_path: str

    def __post_init__(self):
        if self.method not in ("spectral", "fem"):
            raise ValidationError(f"method: must be 'spectral' or 'fem', got {self.method!r}")
        if not (0.0 < self.alpha < 1.0):
            raise ValidationError(f"alpha: must be in (0,1), got {self.alpha}")
        gammas = tuple(float(g) for g in self.gammas)
        if not gammas or any(not (0.0 <= g < 0.5) for g in gammas):
            raise ValidationError("gammas: each must lie in [0, 1/2)")
        object.__setattr__(self, "gammas", gammas)
        if not (self.p > 0):
            raise ValidationError(f"p: must be > 0, got {self.p}")
        if not (self.T > 0 and self.dt > 0):
            raise ValidationError("T, dt: must be > 0")
        M = round(self.T / self.dt)
        if M < 1 or abs(M * self.dt - self.T) > 1e-12 * self.T:
            raise ValidationError("dt: must divide T within 1e-12")
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1 or any(b <= a for a, b in zip(dims, dims[1:])):
            raise ValidationError("dims: must be strictly increasing")
        min_dim = 1 if self.method == "spectral" else 2
        if dims[0] < min_dim:
            raise ValidationError(f"dims: must be >= {min_dim} for {self.method}")
        object.__setattr__(self, "dims", dims)
        if int(self.ref_dim) <= dims[-1]:
            raise ValidationError("ref_dim: must exceed max(dims)")
        if self.samples < 1:
            raise ValidationError(f"samples: must be >= 1, got {self.samples}")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed: must fit in 64 bits")
        if self.measurement_stride < 1:
            raise ValidationError("measurement_stride: must be >= 1")
        if M % self.measurement_stride != 0:
            raise ValidationError("measurement_stride: must divide the step count M")

    @property
    def M(self):
        return round(self.T / self.dt)


def parse_config(text):
    """Parse a JSON study configuration, applying desk-preset defaults.

    The method selects which default set fills in missing keys; unknown
    keys are rejected with their names.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ValidationError("config: top level must be a JSON object")
    known = {f.name for f in fields(StudyConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(f"unknown config keys: {', '.join(unknown)}")
    method = raw.get("method")
    if method not in _DESK_DEFAULTS:
        raise ValidationError(f"method: must be 'spectral' or 'fem', got {method!r}")
    merged = {"method": method, **_DESK_DEFAULTS[method]}
    merged.update(raw)
    merged["gammas"] = tuple(merged["gammas"])
    merged["dims"] = tuple(merged["dims"])
    try:
        return StudyConfig(**merged)
    except TypeError as exc:
        raise ValidationError(f"config: {exc}")


def _measurement_grid(config):
    grid = TimeGrid.uniform(config.T, config.M)
    s = config.measurement_stride
    meas_idx = np.arange(0, config.M + 1, s)
    meas = TimeGrid(
        T=config.T,
        M=config.M // s,
        dt=config.dt * s,
        nodes=grid.nodes[meas_idx],
    )
    return grid, meas, meas_idx


def _norms_from_gram(gram, meas, gammas):
    """Per-gamma pathwise norms of one sample's error from its Gram matrix
    g_ij = <e(t_i), e(t_j)> at the measurement nodes."""
    values = np.sqrt(np.clip(np.diag(gram), 0.0, None))
    path = norms.NormedPath(grid=meas, values=values)
    D = None
    out = np.empty(len(gammas))
    for gi, gamma in enumerate(gammas):
        if gamma == 0.0:
            out[gi] = norms.sup_norm(path)
        else:
            if D is None:
                D = norms.gram_diff_matrix(gram)
            out[gi] = norms.holder_seminorm(path, gamma, D)
    return out


def _spectral_sample_norms(config, threads):
    """Pathwise error norms, (n_gammas, n_dims, samples).

    Mode-by-mode tail accumulation: with per-mode shared streams the error
    of the N-term truncation against the reference is carried entirely by
    modes N+1..ref_dim, so one descending sweep over modes yields, at each
    dimension boundary, the Gram matrices of every sample's error path.
    """
    grid, meas, meas_idx = _measurement_grid(config)
    u0 = np.zeros(config.ref_dim)
    u0[0] = math.sqrt(0.5)  # (sin(pi x), sqrt(2) sin(pi x)) on (0,1)
    params = spectral.SpectralParams(
        alpha=config.alpha, N=config.ref_dim, grid=grid, u0_coeffs=u0
    )
    sample_ids = list(range(config.samples))
    S = config.samples
    Tm = meas.M + 1
    G = np.zeros((S, Tm, Tm))
    out = np.empty((len(config.gammas), len(config.dims), S))
    dim_index = {d: i for i, d in enumerate(config.dims)}

    def snapshot(di):
        def one(s):
            return _norms_from_gram(G[s], meas, config.gammas)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(one, range(S)))
        else:
            results = [one(s) for s in range(S)]
        for s, res in enumerate(results):
            out[:, di, s] = res

    for k in range(config.ref_dim, config.dims[0], -1):
        try:
            cf = spectral.factor_covariance(spectral.mode_covariance(k, params))
            paths = spectral.mode_path_matrix(cf, params, config.seed, sample_ids)
        except (AccuracyError, ValidationError) as exc:
            raise type(exc)(f"mode {k}: {exc}") from exc
        pm = paths[:, meas_idx]
        G += pm[:, :, None] * pm[:, None, :]
        if k - 1 in dim_index:
            snapshot(dim_index[k - 1])
    return out


def _fem_batch(config, grid, meas_idx, meas, sample_ids, out):
    """Simulate one fixed-size batch of samples and fill its norm slices."""
    ref_mesh = Mesh1D.uniform(config.ref_dim)
    mass_ref = fem.assemble(ref_mesh).mass
    inc = rng.normal_matrix(config.seed, sample_ids, 0, grid.M) * math.sqrt(grid.dt)
    try:
        Uref = fem._simulate_paths(
            ref_mesh, grid, config.alpha, inc, fem.initial_projection(ref_mesh)
        )
    except Exception as exc:
        raise AccuracyError(f"samples {sample_ids[0]}..{sample_ids[-1]}, "
                            f"reference dim {config.ref_dim}: {exc}") from exc
    ref_meas = Uref[meas_idx]  # (Tm, n_ref, S)
    del Uref
    for di, dim in enumerate(config.dims):
        mesh = Mesh1D.uniform(dim)
        try:
            U = fem._simulate_paths(
                mesh, grid, config.alpha, inc, fem.initial_projection(mesh)
            )
        except Exception as exc:
            raise AccuracyError(f"samples {sample_ids[0]}..{sample_ids[-1]}, "
                                f"dim {dim}: {exc}") from exc
        P = fem.prolong(mesh, ref_mesh, np.eye(dim - 1))  # (n_dim, n_ref)
        coarse = np.tensordot(U[meas_idx], P, axes=([1], [0]))  # (Tm, S, n_ref)
        E = ref_meas - np.moveaxis(coarse, 1, 2)
        ME = np.moveaxis(mass_ref.matvec(np.moveaxis(E, 1, 0)), 0, 1)
        for j, s in enumerate(sample_ids):
            gram = E[:, :, j] @ ME[:, :, j].T
            out[:, di, s] = _norms_from_gram(gram, meas, config.gammas)


def _fem_sample_norms(config, threads):
    """Pathwise error norms, (n_gammas, n_dims, samples).

    One Brownian path per sample drives every mesh and the reference; the
    coarse solutions are prolonged onto the reference mesh and the L2 error
    Gram matrices are built with the reference mass matrix.
    """
    grid, meas, meas_idx = _measurement_grid(config)
    out = np.empty((len(config.gammas), len(config.dims), config.samples))
    batches = [
        list(range(lo, min(lo + _FEM_BATCH, config.samples)))
        for lo in range(0, config.samples, _FEM_BATCH)
    ]

    def run(batch):
        _fem_batch(config, grid, meas_idx, meas, batch, out)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, batches))
    else:
        for batch in batches:
            run(batch)
    return out


def run_study(config, threads=1):
    """Run one convergence study and persist its CSV and JSON summary.

    Returns the RateStudy.  Outputs are fully determined by (config, seed);
    the thread count only changes scheduling, never results.
    """
    if threads < 1:
        raise ValidationError(f"threads: must be >= 1, got {threads}")
    # header-only placeholder: if the run aborts, the file on disk lacks the
    # end-of-data footer and readers treat it as invalid
    out = Path(config.output_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(f"# fracsim-results schema={SCHEMA_VERSION}\n{CSV_COLUMNS}\n")
    if config.method == "spectral":
        sample_norms = _spectral_sample_norms(config, threads)
    else:
        sample_norms = _fem_sample_norms(config, threads)

    n_g, n_d = len(config.gammas), len(config.dims)
    errors = np.empty((n_g, n_d))
    for gi in range(n_g):
        for di in range(n_d):
            # ordered reduction over sample ids: summation order is fixed
            errors[gi, di] = norms.lp_omega_estimate(sample_norms[gi, di], config.p)
    empirical = tuple(
        norms.empirical_rate(errors[gi], config.dims) for gi in range(n_g)
    )
    theoretical = tuple(
        norms.theoretical_rate(config.method, config.alpha, g) for g in config.gammas
    )
    if any(b > a + 1e-9 for a, b in zip(empirical, empirical[1:])):
        warnings.warn(
            "empirical rates are not nonincreasing in gamma: "
            f"{[round(r, 4) for r in empirical]}",
            stacklevel=2,
        )
    study = norms.RateStudy(
        alpha=config.alpha,
        gammas=config.gammas,
        p=config.p,
        dims=config.dims,
        errors=errors,
        empirical_rates=empirical,
        theoretical_rates=theoretical,
        samples=config.samples,
        seed=config.seed,
    )
    write_csv(config.output_path, config, study)
    write_summary(summary_path(config.output_path), config, study)
    return study


def _fmt(x):
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def write_csv(path, config, study):
    """Write the result rows; the trailing footer line marks completeness."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"# fracsim-results schema={SCHEMA_VERSION}", CSV_COLUMNS]
    count = 0
    for gi, gamma in enumerate(study.gammas):
        for di, dim in enumerate(study.dims):
            lines.append(
                ",".join(
                    [
                        str(SCHEMA_VERSION),
                        config.method,
                        _fmt(study.alpha),
                        _fmt(gamma),
                        _fmt(study.p),
                        str(dim),
                        str(study.samples),
                        str(study.seed),
                        _fmt(study.errors[gi, di]),
                        _fmt(study.empirical_rates[gi]),
                        _fmt(study.theoretical_rates[gi]),
                        "0",
                    ]
                )
            )
            count += 1
    lines.append(f"# end-of-data rows={count}")
    out.write_text("\n".join(lines) + "\n")


def summary_path(csv_path):
    return str(Path(csv_path).with_suffix(".json"))


def write_summary(path, config, study):
    """JSON rate summary consumed by the plotting front end."""
    doc = {
        "schema": SCHEMA_VERSION,
        "method": config.method,
        "alpha": study.alpha,
        "p": study.p,
        "gammas": list(study.gammas),
        "dims": list(study.dims),
        "errors": [list(map(float, row)) for row in study.errors],
        "empirical_rates": list(study.empirical_rates),
        "theoretical_rates": list(study.theoretical_rates),
        "samples": study.samples,
        "seed": study.seed,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
