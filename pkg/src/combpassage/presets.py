"""Scenario preset registry.

Each preset expands to the flat key-value map of an explicit config.  The
expansion is convention-aware: the modulation time is stored as the
resonance relation T0 = 2*pi / omega21_internal (equal to 1/nu21 under the
default ordinary-frequency convention), so a run under the flipped
``frequencies_are_angular`` convention stays on the modulation resonance.

Shared scenario backbone: KRb-like Lambda system, tau = 3 fs Gaussian
pulses, 19.2 ns train period, modulation amplitude 4, carrier on the
upper-leg one-photon resonance (omega0 = omega32), modulation time on the
lower-leg resonance (1/T0 <-> omega21).  The sine/cosine presets differ in
the chirp parity phi; the drive defaults to the strong variant (peak Rabi
frequency equal to the two-photon frequency, 70 THz) with ``-caption``
variants at 7 THz.
"""

import math

from .errors import UnknownPreset
from .system import MOLECULE_PRESETS_THZ
from .units import freq_to_radfs

_TWO_PI = 2.0 * math.pi

HALF_PI = math.pi / 2.0


def _mod_time_fs(nu21_thz: float, angular: bool) -> float:
    """T0 with 2*pi/T0 = omega21 under the active convention."""
    return _TWO_PI / freq_to_radfs(nu21_thz, angular)


def _train_base(molecule: str, phi: float, peak_rabi_thz: float,
                angular: bool, n_pulses: int = 32) -> dict[str, str]:
    nu21, nu32, nu31 = MOLECULE_PRESETS_THZ[molecule]
    return {
        "kind": "train",
        "system.preset": molecule,
        "pulse.e0": "1.0",
        "pulse.tau_fs": "3.0",
        "pulse.period_fs": "1.92e7",
        "pulse.n_pulses": str(n_pulses),
        "pulse.omega0_thz": format(nu32, ".17g"),
        "pulse.mod_amplitude": "4.0",
        "pulse.mod_time_fs": format(_mod_time_fs(nu21, angular), ".17g"),
        "pulse.phi_rad": format(phi, ".17g"),
        "peak_rabi_thz": format(peak_rabi_thz, ".17g"),
        "initial_state": "1",
    }


def _with_decoherence(base: dict[str, str]) -> dict[str, str]:
    base.update({
        "rates.gamma1_per_s": "1e8",
        "rates.gamma2_per_s": "1e8",
        "rates.Gamma1_per_s": "1e4",
        "rates.Gamma2_per_s": "1e4",
        "rates.Gamma3_per_s": "1e4",
    })
    return base


def _dressed_base(molecule: str, phi: float, angular: bool) -> dict[str, str]:
    nu21, nu32, nu31 = MOLECULE_PRESETS_THZ[molecule]
    base = _train_base(molecule, phi, nu31, angular, n_pulses=1)
    base["kind"] = "dressed"
    return base


def _spectrum_base(molecule: str, angular: bool) -> dict[str, str]:
    base = _train_base(molecule, 0.0, 70.0, angular, n_pulses=1)
    base["kind"] = "spectrum"
    return base


_BUILDERS = {
    # 32-pulse transfer scenarios; drive = two-photon frequency (70 THz)
    "fig3-sine": lambda ang: _train_base("krb-sh08", 0.0, 70.0, ang),
    "fig3-sine-caption": lambda ang: _train_base("krb-sh08", 0.0, 7.0, ang),
    "fig5-cosine": lambda ang: _train_base("krb-sh08", HALF_PI, 70.0, ang),
    "fig5-cosine-caption": lambda ang: _train_base("krb-sh08", HALF_PI, 7.0, ang),
    # same scenarios with spontaneous decay and collisional dephasing
    "fig6-decoherence-sine":
        lambda ang: _with_decoherence(_train_base("krb-sh08", 0.0, 70.0, ang)),
    "fig6-decoherence-cosine":
        lambda ang: _with_decoherence(_train_base("krb-sh08", HALF_PI, 70.0, ang)),
    # single-pulse dressed-state traces; drive = 125.5 THz
    "fig4-dressed-sine": lambda ang: _dressed_base("krb-ni08", 0.0, ang),
    "fig4-dressed-cosine": lambda ang: _dressed_base("krb-ni08", HALF_PI, ang),
    # dual-parity spectral dump of the single-pulse field
    "fig2-spectrum": lambda ang: _spectrum_base("krb-sh08", ang),
}

#: alternate spellings accepted for the transfer variants
ALIASES = {
    "fig3-text": "fig3-sine",
    "fig3-caption": "fig3-sine-caption",
}

DESCRIPTIONS = {
    "fig3-sine": "32-pulse sine-chirp transfer, drive 70 THz (text variant)",
    "fig3-sine-caption": "32-pulse sine-chirp transfer, drive 7 THz",
    "fig5-cosine": "32-pulse cosine-chirp transfer, drive 70 THz",
    "fig5-cosine-caption": "32-pulse cosine-chirp transfer, drive 7 THz",
    "fig6-decoherence-sine": "sine transfer with decay 1e8/s, dephasing 1e4/s",
    "fig6-decoherence-cosine": "cosine transfer with decay 1e8/s, dephasing 1e4/s",
    "fig4-dressed-sine": "single-pulse dressed traces, sine chirp, 125.5 THz",
    "fig4-dressed-cosine": "single-pulse dressed traces, cosine chirp, 125.5 THz",
    "fig2-spectrum": "dual-parity spectral dump of the single-pulse field",
    "fig3-text": "alias of fig3-sine",
    "fig3-caption": "alias of fig3-sine-caption",
}


def preset_names() -> list[str]:
    return sorted(_BUILDERS) + sorted(ALIASES)


def expand_preset(name: str, angular: bool = False) -> dict[str, str]:
    """Flat key-value map for a named scenario preset."""
    target = ALIASES.get(name, name)
    try:
        builder = _BUILDERS[target]
    except KeyError:
        raise UnknownPreset(
            f"unknown preset {name!r}; known: {', '.join(preset_names())}") from None
    out = builder(angular)
    out["label"] = name
    return out
