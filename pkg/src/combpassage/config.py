"""Scenario configuration: structured key-value text format.

Format: one ``key = value`` pair per line; ``#`` starts a comment; keys are
dotted lowercase paths.  Frequencies are quoted in THz (ordinary by default,
see ``frequencies_are_angular``), rates in 1/s, times in fs.  Example::

    kind = train
    label = my-run
    system.preset = krb-sh08
    pulse.e0 = 1.0
    pulse.tau_fs = 3.0
    pulse.period_fs = 1.92e7
    pulse.n_pulses = 32
    pulse.omega0_thz = 410.7
    pulse.mod_amplitude = 4.0
    pulse.mod_time_fs = 2.935133548576343
    pulse.phi_rad = 0.0
    peak_rabi_thz = 70.0
    rates.gamma1_per_s = 1e8
    integrator.rel_tol = 1e-9
    initial_state = 1

A config names either a scenario ``preset`` or explicit physics blocks,
never both.  Values are stored exactly as parsed (config units); the
``level_system()`` / ``pulse_params()`` / ``decoherence_rates()`` builders
convert to internal units (fs, rad/fs, 1/fs), so write_config/load_config
round-trips bit-exactly.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import units
from .engine import IntegratorConfig
from .errors import ParseError, UnknownPreset, ValidationError
from .field import BesselTruncation, PulseTrainParams
from .system import (MOLECULE_PRESETS_THZ, DecoherenceRates, LevelSystem,
                     level_system_from_thz)

SCENARIO_KINDS = ("train", "dressed", "spectrum")
SWEEPABLE = ("A", "phi", "T0", "omega0", "peak_rabi", "period")
INITIAL_STATES = ("1", "3") + tuple(f"2_{q}" for q in range(1, 33))


def parse_kv_text(text: str) -> dict[str, str]:
    """Parse the key-value format; raises ParseError with line/column."""
    out: dict[str, str] = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", ln, len(line.rstrip()) or 1)
        key, value = line.split("=", 1)
        key_s = key.strip()
        if not key_s:
            raise ParseError("empty key", ln, 1)
        bad = next((c for c in key_s if not (c.isalnum() or c in "._-")), None)
        if bad is not None:
            raise ParseError(f"invalid character {bad!r} in key", ln, raw.index(bad) + 1)
        value_s = value.strip()
        if not value_s:
            raise ParseError(f"empty value for key {key_s!r}", ln, raw.index("=") + 2)
        if key_s in out:
            raise ParseError(f"duplicate key {key_s!r}", ln, 1)
        out[key_s] = value_s
    if not out:
        raise ParseError("empty config", 1, 1)
    return out


@dataclass(frozen=True)
class RawSystem:
    """Level frequencies exactly as configured (THz-quoted values)."""

    omega21_thz: float
    omega32_thz: float
    omega31_thz: float
    delta_omega_thz: float
    n_excited: int = 5


@dataclass(frozen=True)
class RawPulse:
    """Pulse-train parameters exactly as configured."""

    e0: float
    tau_fs: float
    period_fs: float
    n_pulses: int
    omega0_thz: float
    mod_amplitude: float
    mod_time_fs: float
    phi_rad: float


@dataclass(frozen=True)
class RawRates:
    """Decay/dephasing rates exactly as configured (1/s)."""

    gamma1_per_s: float = 0.0
    gamma2_per_s: float = 0.0
    gamma3_per_s: float = 0.0
    Gamma1_per_s: float = 0.0
    Gamma2_per_s: float = 0.0
    Gamma3_per_s: float = 0.0


@dataclass(frozen=True)
class SweepAxis:
    param: str
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.param not in SWEEPABLE:
            raise ValidationError("sweep.param",
                                  f"{self.param!r} not in {SWEEPABLE}")
        if self.count < 1:
            raise ValidationError("sweep.count", f"must be >= 1, got {self.count}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValidationError("sweep.range", "bounds must be finite")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario description (values kept in config units)."""

    kind: str
    label: str
    system: RawSystem
    pulse: RawPulse
    rates: RawRates
    peak_rabi_thz: float
    initial_state: str = "1"
    frequencies_are_angular: bool = False
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    bessel_threshold: float = 1.0e-12
    dressed_grid_count: int = 4096
    spectrum_grid_count: int = 4097
    # provenance only; excluded from equality so write/load round-trips
    preset: str | None = field(default=None, compare=False)
    sweep: tuple[SweepAxis, ...] = ()
    out_dir: str | None = None

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValidationError("kind", f"{self.kind!r} not in {SCENARIO_KINDS}")
        if self.initial_state not in INITIAL_STATES:
            raise ValidationError("initial_state",
                                  f"{self.initial_state!r} not a state label")
        if len(self.sweep) > 2:
            raise ValidationError("sweep", "at most two swept parameters")

    # -- unit resolution ---------------------------------------------------
    def level_system(self) -> LevelSystem:
        return level_system_from_thz(
            self.system.omega21_thz, self.system.omega32_thz,
            self.system.omega31_thz, self.system.delta_omega_thz,
            n_excited=self.system.n_excited,
            angular=self.frequencies_are_angular)

    def pulse_params(self) -> PulseTrainParams:
        return PulseTrainParams(
            e0=self.pulse.e0,
            tau=self.pulse.tau_fs,
            period=self.pulse.period_fs,
            n_pulses=self.pulse.n_pulses,
            omega0=units.freq_to_radfs(self.pulse.omega0_thz,
                                       self.frequencies_are_angular),
            mod_amplitude=self.pulse.mod_amplitude,
            mod_time=self.pulse.mod_time_fs,
            phi=self.pulse.phi_rad)

    def decoherence_rates(self) -> DecoherenceRates:
        r = self.rates
        return DecoherenceRates.from_per_s(
            r.gamma1_per_s, r.gamma2_per_s, r.gamma3_per_s,
            r.Gamma1_per_s, r.Gamma2_per_s, r.Gamma3_per_s)

    def peak_rabi(self) -> float:
        return units.freq_to_radfs(self.peak_rabi_thz, self.frequencies_are_angular)

    def truncation(self) -> BesselTruncation:
        return BesselTruncation(threshold=self.bessel_threshold)

    def initial_state_index(self) -> int:
        if self.initial_state == "1":
            return 0
        if self.initial_state == "3":
            return self.system.n_excited + 1
        q = int(self.initial_state.split("_", 1)[1])
        if q > self.system.n_excited:
            raise ValidationError("initial_state",
                                  f"sublevel {q} > n_excited {self.system.n_excited}")
        return q


_PHYSICS_PREFIXES = ("system.", "pulse.", "rates.", "peak_rabi")


def _take(kv: dict[str, str], key: str, conv, default=None, required=False):
    if key in kv:
        raw = kv.pop(key)
        try:
            if conv is bool:
                low = raw.lower()
                if low in ("true", "1", "yes", "on"):
                    return True
                if low in ("false", "0", "no", "off"):
                    return False
                raise ValueError(f"not a boolean: {raw!r}")
            return conv(raw)
        except (TypeError, ValueError) as exc:
            raise ValidationError(key, str(exc)) from None
    if required:
        raise ValidationError(key, "required key missing")
    return default


def _resolve_sweep(kv: dict[str, str]) -> tuple[SweepAxis, ...]:
    axes = []
    for prefix in ("sweep", "sweep2"):
        if not any(k.startswith(prefix + ".") for k in list(kv)):
            continue
        axes.append(SweepAxis(
            param=_take(kv, f"{prefix}.param", str, required=True),
            start=_take(kv, f"{prefix}.start", float, required=True),
            stop=_take(kv, f"{prefix}.stop", float, required=True),
            count=_take(kv, f"{prefix}.count", int, required=True)))
    return tuple(axes)


def resolve_config(kv: dict[str, str],
                   overrides: dict[str, str] | None = None) -> ScenarioConfig:
    """Resolve a parsed key-value map (plus CLI overrides) to a config.

    The exactly-one-of rule (scenario preset XOR explicit physics blocks)
    applies to the file; CLI overrides may retouch anything afterwards.
    """
    from .presets import expand_preset  # cycle: presets build on this module

    file_kv = dict(kv)
    over = dict(overrides) if overrides else {}

    preset_over = over.pop("preset", None)
    preset_file = file_kv.pop("preset", None)
    preset = preset_over or preset_file
    if preset is not None:
        clash = [k for k in file_kv if k.startswith(_PHYSICS_PREFIXES)]
        if clash:
            raise ValidationError(
                clash[0], "explicit physics keys conflict with 'preset' "
                          "(use --set overrides instead)")
        # the convention flag shapes preset expansion (resonance relations)
        flag = over.get("frequencies_are_angular",
                        file_kv.get("frequencies_are_angular", "false"))
        angular_for_expand = flag.strip().lower() in ("true", "1", "yes", "on")
        merged = expand_preset(preset, angular_for_expand)
        merged.update(file_kv)
        merged.update(over)
    else:
        merged = file_kv
        merged.update(over)

    kv = merged
    angular = _take(kv, "frequencies_are_angular", bool, default=False)
    kind = _take(kv, "kind", str, default="train")
    label = _take(kv, "label", str, default=preset or "scenario")

    sys_preset = kv.pop("system.preset", None)
    if sys_preset is not None:
        try:
            nu21, nu32, nu31 = MOLECULE_PRESETS_THZ[sys_preset]
        except KeyError:
            raise UnknownPreset(f"unknown molecular preset {sys_preset!r}") from None
        defaults = dict(omega21=nu21, omega32=nu32, omega31=nu31,
                        delta=0.1 * nu31)
    else:
        defaults = dict(omega21=None, omega32=None, omega31=None, delta=None)

    def freq_key(name, dflt):
        return _take(kv, f"system.{name}_thz", float,
                     default=dflt, required=dflt is None)

    system = RawSystem(
        omega21_thz=freq_key("omega21", defaults["omega21"]),
        omega32_thz=freq_key("omega32", defaults["omega32"]),
        omega31_thz=freq_key("omega31", defaults["omega31"]),
        delta_omega_thz=_take(kv, "system.delta_omega_thz", float,
                              default=defaults["delta"],
                              required=defaults["delta"] is None),
        n_excited=_take(kv, "system.n_excited", int, default=5))

    pulse = RawPulse(
        e0=_take(kv, "pulse.e0", float, default=1.0),
        tau_fs=_take(kv, "pulse.tau_fs", float, required=True),
        period_fs=_take(kv, "pulse.period_fs", float, required=True),
        n_pulses=_take(kv, "pulse.n_pulses", int, required=True),
        omega0_thz=_take(kv, "pulse.omega0_thz", float, required=True),
        mod_amplitude=_take(kv, "pulse.mod_amplitude", float, required=True),
        mod_time_fs=_take(kv, "pulse.mod_time_fs", float, required=True),
        phi_rad=_take(kv, "pulse.phi_rad", float, default=0.0))

    rates = RawRates(
        gamma1_per_s=_take(kv, "rates.gamma1_per_s", float, default=0.0),
        gamma2_per_s=_take(kv, "rates.gamma2_per_s", float, default=0.0),
        gamma3_per_s=_take(kv, "rates.gamma3_per_s", float, default=0.0),
        Gamma1_per_s=_take(kv, "rates.Gamma1_per_s", float, default=0.0),
        Gamma2_per_s=_take(kv, "rates.Gamma2_per_s", float, default=0.0),
        Gamma3_per_s=_take(kv, "rates.Gamma3_per_s", float, default=0.0))

    integrator = IntegratorConfig(
        rel_tol=_take(kv, "integrator.rel_tol", float, default=1.0e-9),
        abs_tol=_take(kv, "integrator.abs_tol", float, default=1.0e-11),
        max_step=_take(kv, "integrator.max_step_fs", float, default=None),
        sample_stride=_take(kv, "integrator.sample_stride", int, default=1),
        window_padding=_take(kv, "integrator.window_padding", float, default=8.0),
        max_samples=_take(kv, "integrator.max_samples", int, default=20000))

    cfg = ScenarioConfig(
        kind=kind,
        label=label,
        system=system,
        pulse=pulse,
        rates=rates,
        peak_rabi_thz=_take(kv, "peak_rabi_thz", float, required=True),
        initial_state=_take(kv, "initial_state", str, default="1"),
        frequencies_are_angular=angular,
        integrator=integrator,
        bessel_threshold=_take(kv, "bessel_threshold", float, default=1.0e-12),
        dressed_grid_count=_take(kv, "dressed.grid_count", int, default=4096),
        spectrum_grid_count=_take(kv, "spectrum.grid_count", int, default=4097),
        preset=preset,
        sweep=_resolve_sweep(kv),
        out_dir=_take(kv, "out", str, default=None))

    if kv:
        stray = sorted(kv)[0]
        raise ValidationError(stray, "unknown key")
    return cfg


def load_config(path: str, overrides: dict[str, str] | None = None) -> ScenarioConfig:
    """Read, parse and resolve a config file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return resolve_config(parse_kv_text(text), overrides)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_config(cfg: ScenarioConfig) -> str:
    """Serialize a resolved config; load_config(write_config(c)) == c."""
    lines = [
        f"kind = {cfg.kind}",
        f"label = {cfg.label}",
        f"frequencies_are_angular = {_fmt(cfg.frequencies_are_angular)}",
        f"system.omega21_thz = {_fmt(cfg.system.omega21_thz)}",
        f"system.omega32_thz = {_fmt(cfg.system.omega32_thz)}",
        f"system.omega31_thz = {_fmt(cfg.system.omega31_thz)}",
        f"system.delta_omega_thz = {_fmt(cfg.system.delta_omega_thz)}",
        f"system.n_excited = {cfg.system.n_excited}",
        f"pulse.e0 = {_fmt(cfg.pulse.e0)}",
        f"pulse.tau_fs = {_fmt(cfg.pulse.tau_fs)}",
        f"pulse.period_fs = {_fmt(cfg.pulse.period_fs)}",
        f"pulse.n_pulses = {cfg.pulse.n_pulses}",
        f"pulse.omega0_thz = {_fmt(cfg.pulse.omega0_thz)}",
        f"pulse.mod_amplitude = {_fmt(cfg.pulse.mod_amplitude)}",
        f"pulse.mod_time_fs = {_fmt(cfg.pulse.mod_time_fs)}",
        f"pulse.phi_rad = {_fmt(cfg.pulse.phi_rad)}",
        f"peak_rabi_thz = {_fmt(cfg.peak_rabi_thz)}",
        f"initial_state = {cfg.initial_state}",
        f"rates.gamma1_per_s = {_fmt(cfg.rates.gamma1_per_s)}",
        f"rates.gamma2_per_s = {_fmt(cfg.rates.gamma2_per_s)}",
        f"rates.gamma3_per_s = {_fmt(cfg.rates.gamma3_per_s)}",
        f"rates.Gamma1_per_s = {_fmt(cfg.rates.Gamma1_per_s)}",
        f"rates.Gamma2_per_s = {_fmt(cfg.rates.Gamma2_per_s)}",
        f"rates.Gamma3_per_s = {_fmt(cfg.rates.Gamma3_per_s)}",
        f"integrator.rel_tol = {_fmt(cfg.integrator.rel_tol)}",
        f"integrator.abs_tol = {_fmt(cfg.integrator.abs_tol)}",
        f"integrator.sample_stride = {cfg.integrator.sample_stride}",
        f"integrator.window_padding = {_fmt(cfg.integrator.window_padding)}",
        f"integrator.max_samples = {cfg.integrator.max_samples}",
        f"bessel_threshold = {_fmt(cfg.bessel_threshold)}",
        f"dressed.grid_count = {cfg.dressed_grid_count}",
        f"spectrum.grid_count = {cfg.spectrum_grid_count}",
    ]
    if cfg.integrator.max_step is not None:
        lines.append(f"integrator.max_step_fs = {_fmt(cfg.integrator.max_step)}")
    if cfg.out_dir is not None:
        lines.append(f"out = {cfg.out_dir}")
    for prefix, axis in zip(("sweep", "sweep2"), cfg.sweep):
        lines.append(f"{prefix}.param = {axis.param}")
        lines.append(f"{prefix}.start = {_fmt(axis.start)}")
        lines.append(f"{prefix}.stop = {_fmt(axis.stop)}")
        lines.append(f"{prefix}.count = {axis.count}")
    return "\n".join(lines) + "\n"


def apply_sweep_point(cfg: ScenarioConfig,
                      assignments: dict[str, float]) -> ScenarioConfig:
    """Copy of cfg with swept parameters set (config units), sweep cleared."""
    pulse = cfg.pulse
    peak = cfg.peak_rabi_thz
    for param, value in assignments.items():
        if param == "A":
            pulse = replace(pulse, mod_amplitude=value)
        elif param == "phi":
            pulse = replace(pulse, phi_rad=value)
        elif param == "T0":
            pulse = replace(pulse, mod_time_fs=value)
        elif param == "omega0":
            pulse = replace(pulse, omega0_thz=value)
        elif param == "period":
            pulse = replace(pulse, period_fs=value)
        elif param == "peak_rabi":
            peak = value
        else:
            raise ValidationError("sweep.param", f"unknown parameter {param!r}")
    return replace(cfg, pulse=pulse, peak_rabi_thz=peak, sweep=())
