"""figgen rendering: schema handling, determinism, CLI exit codes."""

import numpy as np
import pytest

from figgen import FigureSpec, SchemaMismatch, read_table, render
from figgen.cli import main


def fmt_rows(rows):
    return "\n".join(",".join(format(v, ".17g") for v in row) for row in rows)


def populations_csv(tmp_path, n=50, m=5, name="pops.csv"):
    cols = (["t_fs", "pop_1"] + [f"pop_2_{q}" for q in range(1, m + 1)]
            + ["pop_3", "abs_rho13", "sum_abs_rho12", "sum_abs_rho23"])
    t = np.linspace(0.0, 6.1e8, n)
    x = t / t[-1]
    pops = np.column_stack([
        t, 1.0 - x,
        *[0.01 * np.sin(np.pi * x + q) ** 2 for q in range(m)],
        x, 0.5 * x, 0.1 * x, 0.1 * (1 - x)])
    path = tmp_path / name
    path.write_text(",".join(cols) + "\n" + fmt_rows(pops) + "\n")
    return path


def dressed_csv(tmp_path, n=40):
    cols = (["t_fs", "e1", "e2", "e3"]
            + [f"ov_{b}{j}" for b in (1, 2, 3) for j in (1, 2, 3)])
    t = np.linspace(-80, 80, n)
    s = np.exp(-(t / 40.0) ** 2)
    ov = np.tile([0.5, 0.25, 0.25, 0.0, 0.5, 0.5, 0.5, 0.25, 0.25], (n, 1))
    rows = np.column_stack([t, 0 * s, -s, s, ov])
    path = tmp_path / "dressed.csv"
    path.write_text(",".join(cols) + "\n" + fmt_rows(rows) + "\n")
    return path


def spectrum_csv(tmp_path, n=64):
    w = np.linspace(-5, 5, n)
    g = np.exp(-((np.abs(w) - 2.5) ** 2))
    rows = np.column_stack([w, g * np.cos(3 * w), g * np.sin(3 * w),
                            g * np.cos(3 * np.abs(w)), g * 0.5])
    path = tmp_path / "spec.csv"
    path.write_text("omega_radfs,re_sine,im_sine,re_cosine,im_cosine\n"
                    + fmt_rows(rows) + "\n")
    return path


def test_populations_render(tmp_path):
    csv_path = populations_csv(tmp_path)
    out = tmp_path / "pops.png"
    render(FigureSpec("populations", str(csv_path), str(out)))
    assert out.exists() and out.stat().st_size > 2000


def test_render_is_deterministic(tmp_path):
    csv_path = populations_csv(tmp_path)
    a, b = tmp_path / "a.png", tmp_path / "b.png"
    render(FigureSpec("populations", str(csv_path), str(a)))
    render(FigureSpec("populations", str(csv_path), str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_input_never_modified(tmp_path):
    csv_path = populations_csv(tmp_path)
    before = csv_path.read_bytes()
    render(FigureSpec("populations", str(csv_path), str(tmp_path / "x.png")))
    assert csv_path.read_bytes() == before


def test_header_only_renders_empty_with_warning(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("t_fs,pop_1,pop_3\n")
    out = tmp_path / "empty.png"
    with pytest.warns(UserWarning, match="no data rows"):
        render(FigureSpec("populations", str(path), str(out)))
    assert out.exists()


def test_missing_column_schema_error(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t_fs,pop_1\n0.0,1.0\n")
    with pytest.raises(SchemaMismatch, match="pop_3"):
        render(FigureSpec("populations", str(path), str(tmp_path / "x.png")))


def test_dressed_render_with_overlaps(tmp_path):
    csv_path = dressed_csv(tmp_path)
    out = tmp_path / "dressed.png"
    render(FigureSpec("dressed", str(csv_path), str(out), show_overlaps=True))
    assert out.exists()


def test_spectrum_four_panels(tmp_path):
    csv_path = spectrum_csv(tmp_path)
    out = tmp_path / "spec.png"
    render(FigureSpec("spectrum", str(csv_path), str(out)))
    assert out.exists()


def test_read_table_errors(tmp_path):
    missing = tmp_path / "nope.csv"
    from figgen import FileError
    with pytest.raises(FileError):
        read_table(str(missing))
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("a,b\n1.0\n")
    with pytest.raises(SchemaMismatch):
        read_table(str(ragged))
    words = tmp_path / "words.csv"
    words.write_text("a,b\n1.0,zebra\n")
    with pytest.raises(SchemaMismatch):
        read_table(str(words))


def test_cli_exit_codes(tmp_path):
    csv_path = populations_csv(tmp_path)
    out = tmp_path / "cli.png"
    assert main(["populations", str(csv_path), "-o", str(out)]) == 0
    assert out.exists()
    bad = tmp_path / "bad.csv"
    bad.write_text("t_fs,pop_1\n0.0,1.0\n")
    assert main(["populations", str(bad), "-o", str(tmp_path / "y.png")]) == 2
    assert main(["populations", str(tmp_path / "ghost.csv"),
                 "-o", str(tmp_path / "z.png")]) == 1


def test_cli_custom_style(tmp_path):
    csv_path = populations_csv(tmp_path)
    style = tmp_path / "tiny.mplstyle"
    style.write_text("figure.figsize: 4.0, 3.0\nfigure.dpi: 72\nsavefig.dpi: 72\n")
    out_default = tmp_path / "d.png"
    out_styled = tmp_path / "s.png"
    assert main(["populations", str(csv_path), "-o", str(out_default)]) == 0
    assert main(["populations", str(csv_path), "-o", str(out_styled),
                 "--style", str(style)]) == 0
    assert out_styled.read_bytes() != out_default.read_bytes()
