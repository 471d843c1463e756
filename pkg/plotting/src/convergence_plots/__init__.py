"""Log-log convergence figures rendered from fracsim study CSV files.

The CSV schema is the only coupling to the simulation package: a comment
header ``# fracsim-results schema=1``, a fixed column line, data rows, and a
``# end-of-data rows=N`` footer whose count must match. Files missing the
footer are treated as interrupted runs and rejected.
"""

from .figure import PlotSpec, render
from .reader import SchemaError, read_results

__version__ = "1.0.0"

__all__ = ["PlotSpec", "render", "SchemaError", "read_results", "__version__"]
