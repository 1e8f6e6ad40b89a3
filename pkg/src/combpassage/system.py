"""Multi-level Lambda system: levels, decoherence rates, RWA Hamiltonian.

Basis ordering is [ |1>, |2_1>, ..., |2_M>, |3> ]: the weakly bound initial
state, M equally spaced excited sublevels, and the deeply bound final state.
The interaction-representation Hamiltonian has zero diagonal and couples only
|1> <-> |2_q> and |2_q> <-> |3>:

    <1|H(t)|2_q> = Omega(t)  exp(i ((omega0 - omega21) - (q-1) dw) t)
    <2_q|H(t)|3> = Omega'(t) exp(i ((omega0 - omega32) - (q-1) dw) t)

with Omega the complex Rabi envelope, Omega' its conjugate-phase variant and
dw the excited-manifold spacing.  Entries are stored in rad/fs so the
equation of motion is rho_dot = -i [H, rho] + relaxation.

Relaxation (spontaneous decay gamma1: excited->initial, gamma2:
excited->final, optional gamma3: initial->final; collisional dephasing
Gamma1/Gamma2/Gamma3 on the 1-2 / 2-3 / 1-3 coherences):

    rho11_dot += gamma1 * sum_q rho_2q2q - gamma3 * rho11
    rho33_dot += gamma2 * sum_q rho_2q2q + gamma3 * rho11
    rho_2q2q'_dot -= (gamma1 + gamma2) rho_2q2q'           (all q, q')
    rho_12q_dot -= (gamma1/2 + gamma2/2 + Gamma1 + gamma3/2) rho_12q
    rho_2q3_dot -= (gamma1/2 + gamma2/2 + Gamma2) rho_2q3
    rho_13_dot  -= (Gamma3 + gamma3/2) rho_13

The structure conserves the trace exactly and maps Hermitian matrices to
Hermitian matrices.  Excited-excited coherences are damped by population
decay only; collisions between molecules in different excited sublevels are
not modeled.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from . import units
from .errors import ShapeMismatch, ValidationError
from .field import (DEFAULT_TRUNCATION, BesselTruncation, PulseTrainParams,
                    RabiEnvelopePair)


@dataclass(frozen=True)
class LevelSystem:
    """Lambda-system frequencies (rad/fs) and excited-manifold size.

    omega31 is not forced to equal omega32 - omega21; a consistency warning
    is emitted when they disagree beyond 1e-9 relative.
    """

    omega21: float
    omega32: float
    omega31: float
    delta_omega: float
    n_excited: int = 5

    def __post_init__(self):
        if not self.delta_omega >= 0:
            raise ValidationError(
                "system.delta_omega", f"must be >= 0, got {self.delta_omega}")
        if not self.n_excited >= 1:
            raise ValidationError(
                "system.n_excited", f"must be >= 1, got {self.n_excited}")
        mismatch = abs(self.omega32 - self.omega21 - self.omega31)
        if mismatch > 1.0e-9 * abs(self.omega31):
            warnings.warn(
                f"two-photon inconsistency: omega32 - omega21 - omega31 = "
                f"{self.omega32 - self.omega21 - self.omega31:.3e} rad/fs",
                stacklevel=2)

    @property
    def dim(self) -> int:
        return self.n_excited + 2

    @property
    def idx_initial(self) -> int:
        return 0

    @property
    def idx_final(self) -> int:
        return self.n_excited + 1

    def excited_indices(self) -> range:
        return range(1, self.n_excited + 1)

    def block(self, q: int) -> "LevelSystem":
        """Three-level subsystem containing only excited sublevel q (1-based).

        The sublevel offset is absorbed into the transition frequencies so
        the block Hamiltonian reproduces the q-th block of the full one.
        """
        if not 1 <= q <= self.n_excited:
            raise ValidationError("q", f"block index {q} outside 1..{self.n_excited}")
        shift = (q - 1) * self.delta_omega
        return LevelSystem(self.omega21 + shift, self.omega32 + shift,
                           self.omega31, 0.0, n_excited=1)


#: molecular parameter sets quoted in THz (ordinary-frequency reading):
#: (nu21, nu32, nu31), manifold spacing 0.1*nu31, five excited sublevels
MOLECULE_PRESETS_THZ = {
    "krb-sh08": (340.7, 410.7, 70.0),
    "krb-ni08": (309.3, 434.8, 125.5),
}


def level_system_from_thz(nu21: float, nu32: float, nu31: float,
                          delta_nu: float, n_excited: int = 5,
                          angular: bool = False) -> LevelSystem:
    """Build a LevelSystem from quoted THz values under either convention."""
    return LevelSystem(
        units.freq_to_radfs(nu21, angular),
        units.freq_to_radfs(nu32, angular),
        units.freq_to_radfs(nu31, angular),
        units.freq_to_radfs(delta_nu, angular),
        n_excited=n_excited)


def molecule_preset(name: str, n_excited: int = 5, angular: bool = False) -> LevelSystem:
    """Named molecular parameter set; spacing is 0.1 * nu31."""
    from .errors import UnknownPreset
    try:
        nu21, nu32, nu31 = MOLECULE_PRESETS_THZ[name]
    except KeyError:
        raise UnknownPreset(
            f"unknown molecular preset {name!r}; "
            f"known: {sorted(MOLECULE_PRESETS_THZ)}") from None
    return level_system_from_thz(nu21, nu32, nu31, 0.1 * nu31,
                                 n_excited=n_excited, angular=angular)


@dataclass(frozen=True)
class DecoherenceRates:
    """Spontaneous decay and collisional dephasing rates (1/fs).

    gamma1  excited -> initial decay
    gamma2  excited -> final decay
    gamma3  initial -> final decay (prose-only channel; default 0)
    Gamma1  initial-excited dephasing
    Gamma2  excited-final dephasing
    Gamma3  initial-final dephasing
    """

    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma3: float = 0.0
    Gamma1: float = 0.0
    Gamma2: float = 0.0
    Gamma3: float = 0.0

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma3", "Gamma1", "Gamma2", "Gamma3"):
            if getattr(self, name) < 0:
                raise ValidationError(f"rates.{name}", "rates must be >= 0")

    @classmethod
    def zero(cls) -> "DecoherenceRates":
        return cls()

    @classmethod
    def from_per_s(cls, gamma1=0.0, gamma2=0.0, gamma3=0.0,
                   Gamma1=0.0, Gamma2=0.0, Gamma3=0.0) -> "DecoherenceRates":
        c = units.rate_to_perfs
        return cls(c(gamma1), c(gamma2), c(gamma3), c(Gamma1), c(Gamma2), c(Gamma3))

    def is_zero(self) -> bool:
        return (self.gamma1 == self.gamma2 == self.gamma3
                == self.Gamma1 == self.Gamma2 == self.Gamma3 == 0.0)


class RwaHamiltonian:
    """Callable t -> complex Hermitian (M+2)x(M+2) interaction Hamiltonian.

    Zero diagonal; detunings live in the explicit phase factors (metadata in
    ``det12``/``det23``, one entry per excited sublevel).  The callable is
    pure and re-entrant; ``fill`` writes into a caller-provided buffer for
    the integrator's hot path.
    """

    def __init__(self, system: LevelSystem, envelopes: RabiEnvelopePair):
        self.system = system
        self.envelopes = envelopes
        q = np.arange(system.n_excited)
        p = envelopes.params
        self.det12 = (p.omega0 - system.omega21) - q * system.delta_omega
        self.det23 = (p.omega0 - system.omega32) - q * system.delta_omega
        self._dets = np.concatenate([self.det12, self.det23])
        self._m = system.n_excited

    @property
    def dim(self) -> int:
        return self.system.dim

    def fill(self, t: float, out: np.ndarray) -> np.ndarray:
        m = self._m
        a, b = self.envelopes.pair(t)
        out[:] = 0.0
        if a == 0.0 and b == 0.0:
            return out
        ph = np.exp(1j * self._dets * t)
        row = a * ph[:m]
        col = b * ph[m:]
        out[0, 1:m + 1] = row
        out[1:m + 1, 0] = row.conj()
        out[1:m + 1, m + 1] = col
        out[m + 1, 1:m + 1] = col.conj()
        return out

    def __call__(self, t: float) -> np.ndarray:
        return self.fill(t, np.zeros((self.dim, self.dim), dtype=complex))


def build_hamiltonian(system: LevelSystem, pulse: PulseTrainParams,
                      peak_rabi: float,
                      trunc: BesselTruncation = DEFAULT_TRUNCATION) -> RwaHamiltonian:
    """Assemble the RWA Hamiltonian for the given system and drive."""
    return RwaHamiltonian(system, RabiEnvelopePair(pulse, peak_rabi, trunc))


class RelaxationTerms:
    """Precomputed relaxation superoperator for one (dim, rates) pair.

    apply_into adds the relaxation derivative to ``out``; the damping matrix
    is real symmetric so Hermiticity is preserved, and the feed terms exactly
    balance the diagonal losses so the trace derivative is identically zero.
    """

    def __init__(self, rates: DecoherenceRates, dim: int):
        self.rates = rates
        self.dim = dim
        self._any = not rates.is_zero()
        if not self._any:
            self.damp = None
            self._ex = None
            return
        if dim < 3:
            raise ShapeMismatch(
                f"relaxation needs the Lambda layout (dim >= 3), got dim={dim}")
        m = dim - 2
        g_pop = rates.gamma1 + rates.gamma2
        c12 = 0.5 * g_pop + rates.Gamma1 + 0.5 * rates.gamma3
        c23 = 0.5 * g_pop + rates.Gamma2
        c13 = rates.Gamma3 + 0.5 * rates.gamma3

        damp = np.zeros((dim, dim))
        ex = slice(1, m + 1)
        damp[0, 0] = rates.gamma3
        damp[ex, ex] = g_pop
        damp[0, ex] = c12
        damp[ex, 0] = c12
        damp[ex, dim - 1] = c23
        damp[dim - 1, ex] = c23
        damp[0, dim - 1] = c13
        damp[dim - 1, 0] = c13
        self.damp = damp
        self._ex = ex

    def apply_into(self, rho: np.ndarray, out: np.ndarray) -> np.ndarray:
        if not self._any:
            return out
        r = self.rates
        out -= self.damp * rho
        s = np.trace(rho[self._ex, self._ex])
        out[0, 0] += r.gamma1 * s
        out[-1, -1] += r.gamma2 * s + r.gamma3 * rho[0, 0]
        return out


def relaxation_rhs(rho: np.ndarray, rates: DecoherenceRates) -> np.ndarray:
    """Relaxation contribution to rho_dot for a Hermitian density matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ShapeMismatch(f"density matrix must be square, got {rho.shape}")
    out = np.zeros_like(rho)
    RelaxationTerms(rates, rho.shape[0]).apply_into(rho, out)
    return out
