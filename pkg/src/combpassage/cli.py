"""Command-line interface.

Subcommands: run, sweep, list-presets, check.  Exit codes: 0 success,
1 invariant failure, 2 config error, 3 runtime error.
"""

import os
import sys

import click
import numpy as np

from .config import ScenarioConfig, load_config, resolve_config
from .errors import CombPassageError, ConfigError
from .presets import DESCRIPTIONS, preset_names
from .scenarios import run_scenario, run_sweep, write_outputs

EXIT_OK = 0
EXIT_INVARIANT = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _parse_sets(pairs) -> dict[str, str]:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects key=value, got {pair!r}")
        key, value = pair.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _load(config, preset, sets) -> ScenarioConfig:
    overrides = _parse_sets(sets)
    if config is not None and preset is not None:
        raise ConfigError("give either --config or --preset, not both")
    if config is not None:
        return load_config(config, overrides)
    if preset is not None:
        overrides = {"preset": preset, **overrides}
        return resolve_config({"preset": preset}, overrides)
    raise ConfigError("one of --config or --preset is required")


def _fail(exc: BaseException) -> int:
    click.echo(f"error: {exc}", err=True)
    if isinstance(exc, ConfigError):
        return EXIT_CONFIG
    return EXIT_RUNTIME


@click.group()
def main():
    """Simulate Lambda-system population transfer driven by a modulated pulse train."""


@main.command("run")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Scenario config file.")
@click.option("--preset", default=None, help="Named scenario preset.")
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE",
              help="Dotted-path config override (repeatable).")
@click.option("--out", default=None, type=click.Path(file_okay=False),
              help="Output directory (default: config 'out' or current dir).")
def run_cmd(config, preset, sets, out):
    """Run one scenario and write CSV + manifest."""
    try:
        cfg = _load(config, preset, sets)
        result = run_scenario(cfg)
        out_dir = out or cfg.out_dir or "."
        paths = write_outputs(result, out_dir)
    except CombPassageError as exc:
        sys.exit(_fail(exc))
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"wrote {paths['csv']}")
    click.echo(f"wrote {paths['manifest']}")
    if not result.ok:
        for f in result.failures:
            click.echo(f"invariant failure: {f}", err=True)
        sys.exit(EXIT_INVARIANT)
    sys.exit(EXIT_OK)


@main.command("sweep")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--preset", default=None)
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE")
@click.option("--out", default=None, type=click.Path(file_okay=False))
@click.option("--threads", default=1, show_default=True,
              help="Parallel workers for independent sweep points.")
def sweep_cmd(config, preset, sets, out, threads):
    """Run a parameter sweep and write the sweep table."""
    try:
        cfg = _load(config, preset, sets)
        rows, csv_text = run_sweep(cfg, threads=threads)
        out_dir = out or cfg.out_dir or "."
        os.makedirs(out_dir, exist_ok=True)
        path = os.path.join(out_dir, f"{cfg.label}.sweep.csv")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
    except CombPassageError as exc:
        sys.exit(_fail(exc))
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_RUNTIME)
    click.echo(f"wrote {path}")
    bad = [r for r in rows if r["status"] != "ok"]
    if bad:
        click.echo(f"{len(bad)} of {len(rows)} points failed", err=True)
        sys.exit(EXIT_INVARIANT)
    sys.exit(EXIT_OK)


@main.command("list-presets")
def list_presets_cmd():
    """List available scenario presets."""
    for name in preset_names():
        click.echo(f"{name:24s} {DESCRIPTIONS.get(name, '')}")
    sys.exit(EXIT_OK)


@main.command("check")
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--preset", default=None)
@click.option("--set", "sets", multiple=True, metavar="KEY=VALUE")
def check_cmd(config, preset, sets):
    """Validate a config and run the fast invariant suite (no propagation)."""
    try:
        cfg = _load(config, preset, sets)
        problems = quick_check(cfg)
    except CombPassageError as exc:
        sys.exit(_fail(exc))
    for name, ok, detail in problems:
        click.echo(f"{'ok  ' if ok else 'FAIL'} {name}: {detail}")
    if any(not ok for _, ok, _ in problems):
        sys.exit(EXIT_INVARIANT)
    click.echo("all checks passed")
    sys.exit(EXIT_OK)


def quick_check(cfg: ScenarioConfig) -> list[tuple[str, bool, str]]:
    """Cheap structural checks on a resolved config.

    Covers Bessel closure at the configured modulation amplitude, the
    unimodularity of the spectral phase, Hamiltonian Hermiticity at random
    times, relaxation trace conservation, and window sparsity.
    """
    from .bessel import bessel_j_array, truncation_order
    from .engine import padded_windows
    from .field import spectral_modulation, window_sparsity
    from .system import build_hamiltonian, relaxation_rhs

    rng = np.random.default_rng(20260809)
    out = []

    pulse = cfg.pulse_params()
    sysm = cfg.level_system()
    n_max = truncation_order(pulse.mod_amplitude, cfg.bessel_threshold)
    j = bessel_j_array(n_max, pulse.mod_amplitude)
    closure = j[0] ** 2 + 2.0 * float(np.sum(j[1:] ** 2))
    ok = 1.0 - 1.0e-10 <= closure <= 1.0 + 1.0e-12
    out.append(("bessel-closure", ok, f"sum J_n^2 = {closure:.15f} (n_max={n_max})"))

    omega = rng.uniform(-2.0 * pulse.omega0, 2.0 * pulse.omega0, 256)
    mod = np.abs(spectral_modulation(omega, pulse))
    worst = float(np.max(np.abs(mod - 1.0)))
    out.append(("modulation-unimodular", worst <= 1.0e-14, f"max | |M|-1 | = {worst:.2e}"))

    ham = build_hamiltonian(sysm, pulse, cfg.peak_rabi(), cfg.truncation())
    herm = 0.0
    for t in rng.uniform(-50.0, 50.0, 64):
        h = ham(float(t))
        herm = max(herm, float(np.max(np.abs(h - h.conj().T))))
    out.append(("hamiltonian-hermitian", herm == 0.0, f"max |H-H^+| = {herm:.2e}"))

    rates = cfg.decoherence_rates()
    worst_tr = 0.0
    for _ in range(16):
        a = rng.normal(size=(sysm.dim, sysm.dim)) + 1j * rng.normal(size=(sysm.dim, sysm.dim))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        worst_tr = max(worst_tr, abs(float(np.trace(relaxation_rhs(rho, rates)).real)))
    out.append(("relaxation-traceless", worst_tr <= 1.0e-14,
                f"max |tr d rho| = {worst_tr:.2e}"))

    windows = padded_windows(pulse, cfg.integrator, cfg.truncation())
    sparsity = window_sparsity(windows)
    out.append(("window-sparsity", len(windows) >= 1,
                f"{len(windows)} windows, active fraction {sparsity:.3e}"))
    return out


if __name__ == "__main__":
    main()
