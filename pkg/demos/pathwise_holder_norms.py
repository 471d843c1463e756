"""Pathwise Holder norms of a single truncation error path.

Simulates one spectral reference sample, truncates it at several dimensions,
and prints how the sup and Holder-gamma norms of the error path shrink.

Run:  python3 demos/pathwise_holder_norms.py
"""

import numpy as np

from fracsim import (
    NormedPath,
    SpectralParams,
    TimeGrid,
    holder_seminorm,
    simulate_spectral,
    spectral_error_path,
    sup_norm,
)
from fracsim.norms import scalar_diff_matrix

if __name__ == "__main__":
    grid = TimeGrid.uniform(1.0, 200)
    u0 = np.zeros(256)
    u0[0] = np.sqrt(0.5)
    params = SpectralParams(alpha=0.35, N=256, grid=grid, u0_coeffs=u0)
    ref = simulate_spectral(params, seed=7, sample_id=0)
    print("dim   sup norm      Holder 0.1")
    for dim in (4, 16, 64):
        e = spectral_error_path(ref, dim)
        path = NormedPath(grid=grid, values=e)
        # scalar surrogate: pairwise norm differences bound the true pairwise
        # difference norms from below, enough for a qualitative picture
        h = holder_seminorm(path, 0.1, scalar_diff_matrix(e))
        print(f"{dim:3d}   {sup_norm(path):.4e}    {h:.4e}")
