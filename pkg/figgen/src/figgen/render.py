"""Figure rendering from the simulator's CSV outputs.

Consumes only the documented CSV schemas:

  populations  t_fs, pop_1, pop_2_1..pop_2_M, pop_3,
               abs_rho13, sum_abs_rho12, sum_abs_rho23
  dressed      t_fs, e1, e2, e3, ov_11..ov_33
  spectrum     omega_radfs, re_sine, im_sine, re_cosine, im_cosine

Rendering is deterministic given identical inputs and a pinned style file;
input CSVs are never written to.
"""

import csv
import warnings
from dataclasses import dataclass
from importlib import resources

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be pinned first)
import numpy as np  # noqa: E402

KINDS = ("populations", "dressed", "spectrum")

#: stripped from PNG metadata so renders are byte-stable
_METADATA = {"Software": "figgen"}


class SchemaMismatch(Exception):
    """CSV header lacks a required column."""


class FileError(Exception):
    """Input CSV missing or unreadable."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure request: input CSV, figure kind, output image path."""

    kind: str
    csv_path: str
    out_path: str
    style_path: str | None = None
    show_overlaps: bool = False
    title: str | None = None


@dataclass
class Table:
    columns: list[str]
    data: np.ndarray  # shape (rows, columns); may have zero rows

    def col(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


def read_table(path: str) -> Table:
    """Load a CSV into column-major float data; header row required."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaMismatch(f"{path}: no header row") from None
            rows = [row for row in reader if row]
    except OSError as exc:
        raise FileError(f"{path}: {exc}") from None
    columns = [c.strip() for c in header]
    if rows:
        try:
            data = np.array(rows, dtype=float)
        except ValueError as exc:
            raise SchemaMismatch(f"{path}: non-numeric cell ({exc})") from None
        if data.shape[1] != len(columns):
            raise SchemaMismatch(
                f"{path}: {data.shape[1]} cells per row vs "
                f"{len(columns)} header columns")
    else:
        data = np.empty((0, len(columns)))
    return Table(columns, data)


def _require(table: Table, names: list[str], path: str):
    missing = [n for n in names if n not in table.columns]
    if missing:
        raise SchemaMismatch(f"{path}: missing column(s) {', '.join(missing)}")


def default_style() -> str:
    return str(resources.files("figgen").joinpath("styles/default.mplstyle"))


def _finish(fig, spec: FigureSpec):
    fig.savefig(spec.out_path, metadata=_METADATA)
    plt.close(fig)


def render_populations(spec: FigureSpec, table: Table):
    _require(table, ["t_fs", "pop_1", "pop_3"], spec.csv_path)
    pop_cols = [c for c in table.columns if c.startswith("pop_")]
    fig, ax = plt.subplots()
    if table.data.shape[0] == 0:
        warnings.warn(f"{spec.csv_path}: no data rows, rendering empty axes",
                      stacklevel=2)
    else:
        t_ns = table.col("t_fs") * 1e-6
        for name in pop_cols:
            ax.plot(t_ns, table.col(name), label=name.replace("pop_", "|") + ">")
        ax.legend(loc="center right")
    ax.set_xlabel("time (ns)")
    ax.set_ylabel("population")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(spec.title or "state populations")
    _finish(fig, spec)


def render_dressed(spec: FigureSpec, table: Table):
    _require(table, ["t_fs", "e1", "e2", "e3"], spec.csv_path)
    ov_cols = [f"ov_{b}{j}" for b in (1, 2, 3) for j in (1, 2, 3)]
    has_overlaps = all(c in table.columns for c in ov_cols)
    if spec.show_overlaps and not has_overlaps:
        raise SchemaMismatch(f"{spec.csv_path}: overlap columns absent")

    if spec.show_overlaps:
        fig, (ax, ax_ov) = plt.subplots(
            2, 1, sharex=True, height_ratios=[2.0, 1.0])
    else:
        fig, ax = plt.subplots()
        ax_ov = None
    if table.data.shape[0] == 0:
        warnings.warn(f"{spec.csv_path}: no data rows, rendering empty axes",
                      stacklevel=2)
    else:
        t = table.col("t_fs")
        for name in ("e1", "e2", "e3"):
            ax.plot(t, table.col(name), label=name)
        ax.legend(loc="upper right")
        if ax_ov is not None:
            strip = np.vstack([table.col(c) for c in ov_cols])
            ax_ov.imshow(strip, aspect="auto", origin="lower",
                         extent=(t[0], t[-1], -0.5, 8.5),
                         vmin=0.0, vmax=1.0, cmap="viridis")
            ax_ov.set_yticks(range(9), ov_cols)
            ax_ov.set_xlabel("time (fs)")
    if ax_ov is None:
        ax.set_xlabel("time (fs)")
    ax.set_ylabel("dressed energy (rad/fs)")
    ax.set_title(spec.title or "dressed-state energies")
    _finish(fig, spec)


def render_spectrum(spec: FigureSpec, table: Table):
    cols = ["omega_radfs", "re_sine", "im_sine", "re_cosine", "im_cosine"]
    _require(table, cols, spec.csv_path)
    fig, axes = plt.subplots(2, 2, sharex=True)
    panels = [("re_sine", "Re, sine chirp"), ("im_sine", "Im, sine chirp"),
              ("re_cosine", "Re, cosine chirp"), ("im_cosine", "Im, cosine chirp")]
    if table.data.shape[0] == 0:
        warnings.warn(f"{spec.csv_path}: no data rows, rendering empty axes",
                      stacklevel=2)
    for ax, (name, label) in zip(axes.ravel(), panels):
        if table.data.shape[0]:
            ax.plot(table.col("omega_radfs"), table.col(name))
        ax.set_title(label)
    for ax in axes[1]:
        ax.set_xlabel("angular frequency (rad/fs)")
    for ax in axes[:, 0]:
        ax.set_ylabel("spectral amplitude")
    fig.suptitle(spec.title or "field spectrum")
    _finish(fig, spec)


_RENDERERS = {
    "populations": render_populations,
    "dressed": render_dressed,
    "spectrum": render_spectrum,
}


def render(spec: FigureSpec):
    """Render one figure; the style file pins every visual degree of freedom."""
    if spec.kind not in _RENDERERS:
        raise SchemaMismatch(f"unknown figure kind {spec.kind!r}; "
                             f"expected one of {KINDS}")
    table = read_table(spec.csv_path)
    style = spec.style_path or default_style()
    with plt.style.context(style):
        _RENDERERS[spec.kind](spec, table)
    return spec.out_path
