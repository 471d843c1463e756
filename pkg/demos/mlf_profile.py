"""Plot-free tour of the Mittag-Leffler evaluator.

Prints E_{rho}( -lambda t^rho ) profiles for a few orders, illustrating the
slow algebraic decay that replaces the exponential as rho drops below 1.

Run:  python3 demos/mlf_profile.py
"""

import numpy as np

from fracsim import mlf_grid

LAMBDA = float(np.pi**2)

if __name__ == "__main__":
    t = np.array([0.0, 0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0])
    header = "t".rjust(8) + "".join(f"  {f'rho={r:.2f}':>12}" for r in (0.3, 0.6, 1.0))
    print(header)
    cols = [mlf_grid(rho, 1.0, -LAMBDA * t**rho) for rho in (0.3, 0.6, 1.0)]
    for i, ti in enumerate(t):
        row = f"{ti:8.2f}" + "".join(f"  {c[i]:>12.6e}" for c in cols)
        print(row)
    print()
    print("rho=1.0 reproduces exp(-lambda t); smaller rho decays like t^-rho.")
