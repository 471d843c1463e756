import subprocess
import sys

import numpy as np
import pytest

from convergence_plots import PlotSpec, SchemaError, read_results, render

HEADER = "# fracsim-results schema=1"
COLS = (
    "schema,method,alpha,gamma,p,dim,samples,seed,"
    "error,empirical_rate,theoretical_rate,wall_ms"
)


def write_csv(path, rows):
    lines = [HEADER, COLS, *rows, f"# end-of-data rows={len(rows)}"]
    path.write_text("\n".join(lines) + "\n")


def power_law_rows(dims, rate, gamma=0.0, c=3.0):
    return [
        f"1,spectral,0.35,{gamma},2.0,{d},64,12345,"
        f"{c * d ** -rate!r},{rate},{rate},0"
        for d in dims
    ]


def test_reader_round_trip(tmp_path):
    f = tmp_path / "r.csv"
    write_csv(f, power_law_rows([2, 4, 8], 0.25))
    rows = read_results(f)
    assert len(rows) == 3
    assert rows[0].dim == 2 and rows[0].method == "spectral"
    assert rows[2].error == pytest.approx(3.0 * 8**-0.25, rel=1e-15)


def test_reader_rejections(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("nonsense\n")
    with pytest.raises(SchemaError, match="header"):
        read_results(f)
    # interrupted run: header but no footer
    f.write_text(f"{HEADER}\n{COLS}\n")
    with pytest.raises(SchemaError, match="footer"):
        read_results(f)
    # footer present but no data rows
    write_csv(f, [])
    with pytest.raises(SchemaError, match="no data rows"):
        read_results(f)
    # row count mismatch
    f.write_text(f"{HEADER}\n{COLS}\n# end-of-data rows=2\n")
    with pytest.raises(SchemaError, match="declares 2"):
        read_results(f)
    # wrong schema version inside a row
    write_csv(f, ["9,spectral,0.35,0.0,2.0,2,64,1,0.5,1.0,1.0,0"])
    with pytest.raises(SchemaError, match="version"):
        read_results(f)


def test_synthetic_power_law_slope(tmp_path):
    # plotted series for errors c*N^-r must be a straight log-log line of
    # slope -r; checked on the data the figure draws
    dims = [2, 4, 8, 16, 32]
    rate = 0.25
    f = tmp_path / "p.csv"
    write_csv(f, power_law_rows(dims, rate))
    spec = PlotSpec(input_csv=str(f), output_image=str(tmp_path / "p.png"))
    fig = render(spec)
    line = fig.axes[0].get_lines()[0]
    x, y = np.log(line.get_xdata()), np.log(line.get_ydata())
    slope = np.polyfit(x, y, 1)[0]
    assert slope == pytest.approx(-rate, abs=0.01)
    assert (tmp_path / "p.png").exists()
    # rendering leaves the input untouched
    assert read_results(f)[0].error == pytest.approx(3.0 * 2**-0.25, rel=1e-15)


def test_legend_shows_rates_to_three_decimals(tmp_path):
    f = tmp_path / "l.csv"
    write_csv(
        f,
        power_law_rows([2, 4, 8], 0.25, gamma=0.0)
        + power_law_rows([2, 4, 8], 0.125, gamma=0.1),
    )
    fig = render(PlotSpec(input_csv=str(f), output_image=str(tmp_path / "l.png")))
    labels = [t.get_text() for t in fig.axes[0].get_legend().get_texts()]
    assert any("0.250" in s for s in labels)
    assert any("0.125" in s for s in labels)


def test_cli_error_exit_on_empty(tmp_path):
    f = tmp_path / "empty.csv"
    write_csv(f, [])
    proc = subprocess.run(
        [sys.executable, "-m", "convergence_plots.cli", "--csv", str(f),
         "--out", str(tmp_path / "x.png")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 2
    assert "no data rows" in proc.stderr


def test_desk_output_renders_without_warnings(tmp_path, recwarn):
    # shape-compatible stand-in for a desk study output: two gammas over the
    # desk dimension ladder
    f = tmp_path / "desk.csv"
    write_csv(
        f,
        power_law_rows([2, 4, 8, 16, 32, 64], 0.33, gamma=0.0)
        + power_law_rows([2, 4, 8, 16, 32, 64], 0.24, gamma=0.1),
    )
    render(PlotSpec(input_csv=str(f), output_image=str(tmp_path / "d.png"),
                    title="desk study"))
    assert not [w for w in recwarn if issubclass(w.category, UserWarning)]
    assert (tmp_path / "d.png").stat().st_size > 0
