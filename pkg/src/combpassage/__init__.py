"""Piecewise adiabatic population transfer in a driven multi-level Lambda system.

Core pieces:

  field      spectrally phase-modulated pulse train (spectrum, time domain,
             complex Rabi envelopes, active windows)
  system     Lambda-level structure, decoherence rates, RWA Hamiltonian
  engine     adaptive window/gap density-matrix propagation
  dressed    single-pulse dressed-state traces with continuity tracking
  config     key-value scenario configs, presets, units
  scenarios  runs, sweeps, CSV and manifest serialization
"""

__version__ = "0.1.0"

from .bessel import bessel_j, bessel_j_array, truncation_order
from .config import ScenarioConfig, load_config, resolve_config, write_config
from .dressed import DressedTrace, dressed_hamiltonian, eigen_traces
from .engine import (FiveBlockResult, IntegratorConfig, StepStats, Trajectory,
                     basis_state, propagate_gap, propagate_window,
                     run_five_block, run_train)
from .errors import (ArgumentOutOfRange, CombPassageError, ConfigError,
                     InvariantViolation, OrderOutOfRange, ParseError,
                     ShapeMismatch, StepSizeUnderflow, TrackingAmbiguous,
                     TruncationInsufficient, UnknownPreset, ValidationError)
from .field import (BesselTruncation, PulseTrainParams, RabiEnvelopePair,
                    active_windows, field_spectrum, field_time, rabi_envelope,
                    spectral_modulation, window_sparsity)
from .presets import expand_preset, preset_names
from .scenarios import (RunManifest, ScenarioResult, run_scenario, run_sweep,
                        write_outputs)
from .system import (DecoherenceRates, LevelSystem, RwaHamiltonian,
                     build_hamiltonian, level_system_from_thz,
                     molecule_preset, relaxation_rhs)

__all__ = [
    "ArgumentOutOfRange", "BesselTruncation", "CombPassageError",
    "ConfigError", "DecoherenceRates", "DressedTrace", "FiveBlockResult",
    "IntegratorConfig", "InvariantViolation", "LevelSystem",
    "OrderOutOfRange", "ParseError", "PulseTrainParams", "RabiEnvelopePair",
    "RunManifest", "RwaHamiltonian", "ScenarioConfig", "ScenarioResult",
    "ShapeMismatch", "StepSizeUnderflow", "StepStats", "TrackingAmbiguous",
    "Trajectory", "TruncationInsufficient", "UnknownPreset",
    "ValidationError", "active_windows", "basis_state", "bessel_j",
    "bessel_j_array", "build_hamiltonian", "dressed_hamiltonian",
    "eigen_traces", "expand_preset", "field_spectrum", "field_time",
    "level_system_from_thz", "load_config", "molecule_preset",
    "preset_names", "propagate_gap", "propagate_window", "rabi_envelope",
    "relaxation_rhs", "resolve_config", "run_five_block", "run_scenario",
    "run_sweep", "run_train", "spectral_modulation", "truncation_order",
    "window_sparsity", "write_config", "write_outputs",
]
