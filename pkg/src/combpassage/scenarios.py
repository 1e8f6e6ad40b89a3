"""Scenario execution, CSV/manifest serialization, and parameter sweeps.

CSV schemas (header row; floats printed with 17 significant digits so files
are lossless and diff-able):

  populations  t_fs, pop_1, pop_2_1..pop_2_M, pop_3,
               abs_rho13, sum_abs_rho12, sum_abs_rho23
  dressed      t_fs, e1, e2, e3, ov_11..ov_33   (ov_bj = |<bare_b|dressed_j>|^2)
  spectrum     omega_radfs, re_sine, im_sine, re_cosine, im_cosine
  sweep        swept params, final populations, max_excited_total, status, error

Every run writes exactly one JSON manifest: resolved internal-unit
parameters, tolerances, wall time, and invariant-check results.
"""

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from . import __version__
from .config import ScenarioConfig, SweepAxis, apply_sweep_point, write_config
from .dressed import DressedTrace, default_grid, eigen_traces
from .engine import Trajectory, basis_state, run_train
from .errors import ValidationError
from .field import field_spectrum

_FMT = "%.17g"


def _fmt_row(values) -> str:
    return ",".join(format(float(v), ".17g") for v in values)


# -- CSV writers -----------------------------------------------------------

def trajectory_csv(traj: Trajectory) -> str:
    dim = traj.populations.shape[1]
    m = dim - 2
    cols = (["t_fs", "pop_1"] + [f"pop_2_{q}" for q in range(1, m + 1)]
            + ["pop_3", "abs_rho13", "sum_abs_rho12", "sum_abs_rho23"])
    lines = [",".join(cols)]
    for i in range(traj.times.size):
        row = ([traj.times[i]] + list(traj.populations[i])
               + [traj.abs_rho13[i], traj.sum_abs_rho12[i], traj.sum_abs_rho23[i]])
        lines.append(_fmt_row(row))
    return "\n".join(lines) + "\n"


def dressed_csv(trace: DressedTrace) -> str:
    cols = (["t_fs", "e1", "e2", "e3"]
            + [f"ov_{b}{j}" for b in (1, 2, 3) for j in (1, 2, 3)])
    lines = [",".join(cols)]
    for i in range(trace.times.size):
        row = [trace.times[i]] + list(trace.energies[i]) + list(trace.overlaps[i].ravel())
        lines.append(_fmt_row(row))
    return "\n".join(lines) + "\n"


def spectrum_csv(cfg: ScenarioConfig) -> str:
    """Dual-parity spectral dump of the single k = 0 pulse.

    Columns hold the complex spectral amplitude at phi = 0 (sine) and
    phi = pi/2 (cosine) on a symmetric grid over +-(omega0 + 8/tau).
    """
    pulse = cfg.pulse_params().single_pulse()
    count = cfg.spectrum_grid_count
    if count % 2 == 0:
        count += 1  # symmetric grid including omega = 0
    w_max = pulse.omega0 + 8.0 / pulse.tau
    omega = np.linspace(-w_max, w_max, count)
    e_sin = field_spectrum(omega, replace(pulse, phi=0.0))
    e_cos = field_spectrum(omega, replace(pulse, phi=math.pi / 2.0))
    lines = ["omega_radfs,re_sine,im_sine,re_cosine,im_cosine"]
    for i in range(omega.size):
        lines.append(_fmt_row([omega[i], e_sin[i].real, e_sin[i].imag,
                               e_cos[i].real, e_cos[i].imag]))
    return "\n".join(lines) + "\n"


# -- manifest ----------------------------------------------------------------

@dataclass
class RunManifest:
    """Resolved parameters and health summary of one scenario run."""

    label: str
    kind: str
    payload: dict

    def to_json(self) -> str:
        return json.dumps({"label": self.label, "kind": self.kind, **self.payload},
                          indent=2, sort_keys=True) + "\n"


def _resolved_params(cfg: ScenarioConfig) -> dict:
    sysm = cfg.level_system()
    pulse = cfg.pulse_params()
    rates = cfg.decoherence_rates()
    return {
        "convention": "angular" if cfg.frequencies_are_angular else "ordinary",
        "preset": cfg.preset,
        "system_radfs": {
            "omega21": sysm.omega21, "omega32": sysm.omega32,
            "omega31": sysm.omega31, "delta_omega": sysm.delta_omega,
            "n_excited": sysm.n_excited,
        },
        "pulse": {
            "e0": pulse.e0, "tau_fs": pulse.tau, "period_fs": pulse.period,
            "n_pulses": pulse.n_pulses, "omega0_radfs": pulse.omega0,
            "mod_amplitude": pulse.mod_amplitude, "mod_time_fs": pulse.mod_time,
            "phi_rad": pulse.phi,
        },
        "peak_rabi_radfs": cfg.peak_rabi(),
        "rates_perfs": {
            "gamma1": rates.gamma1, "gamma2": rates.gamma2, "gamma3": rates.gamma3,
            "Gamma1": rates.Gamma1, "Gamma2": rates.Gamma2, "Gamma3": rates.Gamma3,
        },
        "tolerances": {
            "rel_tol": cfg.integrator.rel_tol, "abs_tol": cfg.integrator.abs_tol,
            "bessel_threshold": cfg.bessel_threshold,
        },
        "initial_state": cfg.initial_state,
    }


# -- scenario runs -----------------------------------------------------------

@dataclass
class ScenarioResult:
    config: ScenarioConfig
    manifest: RunManifest
    trajectory: Trajectory | None = None
    dressed: DressedTrace | None = None
    csv_text: str = ""
    ok: bool = True

    @property
    def failures(self) -> list[str]:
        return self.manifest.payload["invariant_checks"]["failures"]


def run_scenario(cfg: ScenarioConfig) -> ScenarioResult:
    """Execute one scenario (train | dressed | spectrum) in memory."""
    t_start = time.perf_counter()
    payload = {"version": __version__, "resolved": _resolved_params(cfg),
               "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
    traj = None
    trace = None

    if cfg.kind == "train":
        sysm = cfg.level_system()
        traj = run_train(basis_state(sysm.dim, cfg.initial_state_index()),
                         sysm, cfg.pulse_params(), cfg.peak_rabi(),
                         cfg.decoherence_rates(), cfg.integrator,
                         cfg.truncation())
        failures = traj.invariant_failures()
        payload["summary"] = {
            "final_populations": [float(v) for v in traj.populations[-1]],
            "final_rho33": float(traj.populations[-1, -1]),
            "max_excited_total": float(traj.excited_total.max()),
            "n_samples": int(traj.times.size),
            "n_windows": traj.step_stats.n_windows,
            "accepted_steps": traj.step_stats.n_accepted,
            "rejected_steps": traj.step_stats.n_rejected,
        }
        payload["invariant_checks"] = {
            "max_trace_dev": traj.step_stats.max_trace_dev,
            "max_herm_dev": traj.step_stats.max_herm_dev,
            "min_population": traj.step_stats.min_population,
            "max_population": traj.step_stats.max_population,
            "failures": failures,
        }
        csv_text = trajectory_csv(traj)
    elif cfg.kind == "dressed":
        sysm = cfg.level_system()
        if sysm.n_excited != 1:
            sysm = replace(sysm, n_excited=1)
        pulse = cfg.pulse_params()
        grid = default_grid(pulse, cfg.truncation(), cfg.dressed_grid_count)
        trace = eigen_traces(sysm, pulse, cfg.peak_rabi(), pulse.phi,
                             grid, cfg.truncation())
        spectrum_residual = _dressed_spectrum_residual(trace)
        col_sums = trace.overlaps.sum(axis=1)
        failures = []
        if spectrum_residual > 1.0e-10:
            failures.append(f"dressed spectrum residual {spectrum_residual:.3e}")
        if np.max(np.abs(col_sums - 1.0)) > 1.0e-10:
            failures.append("eigenvector normalization drift")
        payload["summary"] = {
            "max_coupling_scale": float(np.max(trace.energies[:, -1])),
            "passage_branch": trace.passage_branch(),
            "peak_excited_overlap": trace.branch_max_overlap(
                1, trace.passage_branch()),
            "n_samples": int(trace.times.size),
        }
        payload["invariant_checks"] = {
            "spectrum_residual": spectrum_residual,
            "failures": failures,
        }
        csv_text = dressed_csv(trace)
    elif cfg.kind == "spectrum":
        csv_text = spectrum_csv(cfg)
        failures = []
        payload["summary"] = {"n_samples": csv_text.count("\n") - 1}
        payload["invariant_checks"] = {"failures": failures}
    else:  # pragma: no cover - guarded by ScenarioConfig
        raise ValidationError("kind", f"unknown kind {cfg.kind!r}")

    payload["wall_time_s"] = time.perf_counter() - t_start
    manifest = RunManifest(cfg.label, cfg.kind, payload)
    return ScenarioResult(config=cfg, manifest=manifest, trajectory=traj,
                          dressed=trace, csv_text=csv_text,
                          ok=not payload["invariant_checks"]["failures"])


def _dressed_spectrum_residual(trace: DressedTrace) -> float:
    """Worst |eigenvalue - {0, +-s}| / max(s, 1) over the trace."""
    e = np.sort(trace.energies, axis=1)
    s = e[:, 2]
    scale = np.maximum(s, 1.0)
    res = np.max(np.abs(np.stack([e[:, 0] + s, e[:, 1], e[:, 2] - s], axis=1))
                 / scale[:, None], axis=1)
    return float(res.max()) if res.size else 0.0


def write_outputs(result: ScenarioResult, out_dir: str) -> dict[str, str]:
    """Write CSV + manifest (+ resolved config) for one run."""
    os.makedirs(out_dir, exist_ok=True)
    base = result.config.label.replace("/", "_")
    csv_path = os.path.join(out_dir, f"{base}.csv")
    man_path = os.path.join(out_dir, f"{base}.manifest.json")
    cfg_path = os.path.join(out_dir, f"{base}.config")
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(result.csv_text)
    result.manifest.payload["outputs"] = {"csv": csv_path}
    with open(man_path, "w", encoding="utf-8") as fh:
        fh.write(result.manifest.to_json())
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(write_config(result.config))
    return {"csv": csv_path, "manifest": man_path, "config": cfg_path}


# -- sweeps ------------------------------------------------------------------

def _sweep_assignments(axes: tuple[SweepAxis, ...]) -> list[dict[str, float]]:
    grids = [axis.values() for axis in axes]
    names = [axis.param for axis in axes]
    return [dict(zip(names, combo)) for combo in product(*grids)]


def _run_sweep_point(args):
    cfg, assignment = args
    point = apply_sweep_point(cfg, assignment)
    try:
        result = run_scenario(point)
        traj = result.trajectory
        return {
            "assignment": assignment,
            "status": "ok" if result.ok else "invariant-failure",
            "error": "",
            "final_populations": [float(v) for v in traj.populations[-1]],
            "max_excited_total": float(traj.excited_total.max()),
        }
    except Exception as exc:  # recorded per-point, sweep continues
        return {"assignment": assignment, "status": "error",
                "error": f"{type(exc).__name__}: {exc}",
                "final_populations": None, "max_excited_total": None}


def run_sweep(cfg: ScenarioConfig, threads: int = 1):
    """Run every sweep point; rows in deterministic grid order.

    Returns (rows, csv_text).  Points run independently; failures are
    recorded in their row and do not stop the sweep.
    """
    if not cfg.sweep:
        raise ValidationError("sweep", "config has no sweep block")
    if cfg.kind != "train":
        raise ValidationError("sweep", "sweeps run train scenarios only")
    assignments = _sweep_assignments(cfg.sweep)
    jobs = [(cfg, a) for a in assignments]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_run_sweep_point, jobs))
    else:
        rows = [_run_sweep_point(j) for j in jobs]

    dim = cfg.system.n_excited + 2
    m = dim - 2
    names = [axis.param for axis in cfg.sweep]
    cols = (names + ["pop_1"] + [f"pop_2_{q}" for q in range(1, m + 1)]
            + ["pop_3", "max_excited_total", "status", "error"])
    lines = [",".join(cols)]
    for row in rows:
        cells = [format(row["assignment"][n], ".17g") for n in names]
        if row["final_populations"] is None:
            cells += [""] * (dim + 1)
        else:
            cells += [format(v, ".17g") for v in row["final_populations"]]
            cells += [format(row["max_excited_total"], ".17g")]
        cells += [row["status"], row["error"].replace(",", ";")]
        lines.append(",".join(cells))
    return rows, "\n".join(lines) + "\n"
