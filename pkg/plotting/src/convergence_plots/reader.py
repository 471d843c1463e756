"""Schema-validated reading of fracsim study result CSV files."""

import csv
import io
from dataclasses import dataclass
from pathlib import Path

SCHEMA_VERSION = 1

HEADER_COMMENT = f"# fracsim-results schema={SCHEMA_VERSION}"

COLUMNS = (
    "schema",
    "method",
    "alpha",
    "gamma",
    "p",
    "dim",
    "samples",
    "seed",
    "error",
    "empirical_rate",
    "theoretical_rate",
    "wall_ms",
)


class SchemaError(Exception):
    """Input file does not conform to the result-CSV schema."""


@dataclass(frozen=True)
class ResultRow:
    method: str
    alpha: float
    gamma: float
    p: float
    dim: int
    samples: int
    seed: int
    error: float
    empirical_rate: float
    theoretical_rate: float


def read_results(path):
    """Parse and validate a result CSV; returns a list of ResultRow.

    Raises SchemaError on any deviation: wrong header comment, wrong column
    line, wrong schema version in a row, non-numeric fields, a missing
    end-of-data footer, or a footer row count that disagrees with the data.
    """
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or lines[0] != HEADER_COMMENT:
        raise SchemaError(f"{path}: missing or wrong header comment; "
                          f"expected {HEADER_COMMENT!r}")
    if len(lines) < 2 or lines[1] != ",".join(COLUMNS):
        raise SchemaError(f"{path}: column line does not match the schema")
    if not lines[-1].startswith("# end-of-data rows="):
        raise SchemaError(f"{path}: missing end-of-data footer "
                          "(interrupted or truncated run)")
    try:
        declared = int(lines[-1].split("=", 1)[1])
    except ValueError:
        raise SchemaError(f"{path}: unreadable end-of-data footer")
    body = lines[2:-1]
    if len(body) != declared:
        raise SchemaError(f"{path}: footer declares {declared} rows, "
                          f"found {len(body)}")
    if not body:
        raise SchemaError(f"{path}: no data rows")
    rows = []
    for rec in csv.reader(io.StringIO("\n".join(body))):
        if len(rec) != len(COLUMNS):
            raise SchemaError(f"{path}: row has {len(rec)} fields, "
                              f"expected {len(COLUMNS)}")
        try:
            if int(rec[0]) != SCHEMA_VERSION:
                raise SchemaError(f"{path}: row schema version {rec[0]} "
                                  f"!= {SCHEMA_VERSION}")
            rows.append(
                ResultRow(
                    method=rec[1],
                    alpha=float(rec[2]),
                    gamma=float(rec[3]),
                    p=float(rec[4]),
                    dim=int(rec[5]),
                    samples=int(rec[6]),
                    seed=int(rec[7]),
                    error=float(rec[8]),
                    empirical_rate=float(rec[9]),
                    theoretical_rate=float(rec[10]),
                )
            )
        except ValueError as exc:
            raise SchemaError(f"{path}: unparseable row {rec!r}: {exc}")
        if rows[-1].error <= 0 or rows[-1].dim < 1:
            raise SchemaError(f"{path}: nonpositive error or dim in {rec!r}")
    return rows
