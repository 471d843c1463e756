"""Run both bundled desk-scale convergence studies and print their rates.

Equivalent to:

    fracsim spectral-study --out results
    fracsim fem-study --out results

but invoked through the library API. Expect roughly half a minute for the
spectral study and a few minutes for the FEM study on one core.

Run:  python3 demos/run_desk_studies.py
"""

import json

from fracsim import parse_config, run_study

if __name__ == "__main__":
    for method in ("spectral", "fem"):
        config = parse_config(json.dumps({"method": method}))
        print(f"[{method}] {config.samples} samples, dims {config.dims}, "
              f"ref {config.ref_dim}, dt {config.dt}")
        study = run_study(config)
        for gamma, emp, theo in zip(
            study.gammas, study.empirical_rates, study.theoretical_rates
        ):
            print(f"  gamma={gamma:g}: empirical {emp:.4f}  theoretical {theo:.4f}")
        print(f"  wrote {config.output_path}")
