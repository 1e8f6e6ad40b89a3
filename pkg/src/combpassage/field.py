"""Spectrally sine/cosine phase-modulated pulse train.

Frequency domain: a Gaussian pulse spectrum centered at +-omega0, multiplied
by the unimodular modulation M(omega) = exp(-i A sin(omega T0 + phi)) and the
train comb factor sum_k exp(i omega k T).

Time domain: the modulation splits each pulse into sub-pulses at t = n*T0
weighted by Bessel coefficients J_n(A) e^{-i n phi},

    E(t) = E0 Re sum_{n,k} J_n(A) e^{-i n phi}
               exp(-(t - nT0 - kT)^2 / (2 tau^2)) exp(-i omega0 (t - nT0 - kT)),

and the rotating-frame Rabi envelope keeps the complex sub-pulse sum

    Omega(t)  = Omega_R sum_{n,k} J_n(A) e^{-i n (phi + omega0 T0)} g_nk(t)
    Omega'(t) = Omega_R sum_{n,k} J_n(A) e^{-i n (phi - omega0 T0)} g_nk(t)

with g_nk the unit-peak Gaussians.  Omega couples the lower leg of the Lambda
system and the conjugate-phase variant Omega' the upper leg.  The -mu E0/hbar
prefactor never appears: Omega_R is supplied directly and normalized so that
with A = 0 the single-Gaussian envelope peaks at exactly Omega_R.

All sums are truncated at |n| <= n_max with |J_n(A)| < threshold beyond, and
each Gaussian is clipped where its exponent falls below ~e^-120, so the field
is exactly zero far from every sub-pulse center.  That exact-zero support is
what the piecewise window/gap propagation relies on.
"""

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .bessel import bessel_j_array, truncation_order
from .errors import TruncationInsufficient, ValidationError

# Gaussian clipped where exp(-d^2/2tau^2) < e^-120 ~ 7.7e-53
_GAUSS_CLIP_EXPONENT = 120.0


@dataclass(frozen=True)
class PulseTrainParams:
    """Parameters of the modulated pulse train.

    e0            peak field amplitude (arbitrary units; only Omega_R enters
                  the dynamics)
    tau           single-pulse duration (fs, Gaussian sigma of the field)
    period        pulse train period T (fs)
    n_pulses      number of pulses in the train (clusters at k*T,
                  k = 0..n_pulses-1)
    omega0        carrier angular frequency (rad/fs)
    mod_amplitude modulation amplitude A (dimensionless)
    mod_time      modulation time parameter T0 (fs)
    phi           modulation phase (rad); 0 = sine (odd chirp),
                  pi/2 = cosine (even chirp)
    """

    e0: float
    tau: float
    period: float
    n_pulses: int
    omega0: float
    mod_amplitude: float
    mod_time: float
    phi: float

    def __post_init__(self):
        if not self.tau > 0:
            raise ValidationError("pulse.tau", f"must be > 0, got {self.tau}")
        if not self.period > 0:
            raise ValidationError("pulse.period", f"must be > 0, got {self.period}")
        if not self.n_pulses >= 1:
            raise ValidationError("pulse.n_pulses", f"must be >= 1, got {self.n_pulses}")
        if not self.mod_amplitude >= 0:
            raise ValidationError(
                "pulse.mod_amplitude", f"must be >= 0, got {self.mod_amplitude}")
        if not self.mod_time > 0:
            raise ValidationError("pulse.mod_time", f"must be > 0, got {self.mod_time}")
        if self.period < 10.0 * self.tau:
            warnings.warn(
                f"pulse period {self.period} fs < 10*tau = {10*self.tau} fs; "
                "the quiet-gap propagation strategy assumes well separated pulses",
                stacklevel=2)

    def single_pulse(self) -> "PulseTrainParams":
        """Copy with the train collapsed to the k = 0 cluster."""
        return replace(self, n_pulses=1)


@dataclass(frozen=True)
class BesselTruncation:
    """Truncation of the sub-pulse Bessel sum.

    threshold  drop orders with |J_n(A)| below this
    n_max      explicit order cap; None selects the smallest order n with
               |J_m(A)| < threshold for all m > n (backward recurrence scan)
    """

    threshold: float = 1.0e-12
    n_max: int | None = None

    def resolve(self, mod_amplitude: float) -> int:
        auto = truncation_order(mod_amplitude, self.threshold)
        if self.n_max is None:
            return auto
        if self.n_max < auto:
            raise TruncationInsufficient(
                f"explicit n_max={self.n_max} leaves |J_n| >= {self.threshold:.3e} "
                f"terms beyond it (need n_max >= {auto})")
        return self.n_max


DEFAULT_TRUNCATION = BesselTruncation()


def spectral_modulation(omega, p: PulseTrainParams):
    """Unimodular spectral phase factor exp(-i A sin(omega T0 + phi))."""
    omega = np.asarray(omega, dtype=float)
    out = np.exp(-1j * p.mod_amplitude * np.sin(omega * p.mod_time + p.phi))
    return out[()] if out.ndim == 0 else out


def field_spectrum(omega, p: PulseTrainParams):
    """Spectral amplitude of the train.

    sqrt(pi/2) E0 tau [exp(-(w-w0)^2 tau^2/2) + exp(-(w+w0)^2 tau^2/2)]
        * exp(-i A sin(w T0 + phi)) * sum_{k=0}^{n_pulses-1} exp(i w k T)
    """
    omega = np.asarray(omega, dtype=float)
    gauss = (np.exp(-0.5 * (omega - p.omega0) ** 2 * p.tau ** 2)
             + np.exp(-0.5 * (omega + p.omega0) ** 2 * p.tau ** 2))
    comb = np.ones_like(omega, dtype=complex)
    if p.n_pulses > 1:
        comb = np.zeros_like(omega, dtype=complex)
        for k in range(p.n_pulses):
            comb += np.exp(1j * omega * (k * p.period))
    out = (math.sqrt(math.pi / 2.0) * p.e0 * p.tau
           * gauss * spectral_modulation(omega, p) * comb)
    return out[()] if out.ndim == 0 else out


class _GaussianCombSum:
    """sum_c w_c exp(-(t - c)^2 / (2 tau^2)) over precomputed centers.

    Centers are sorted; evaluation gathers only the terms within the clip
    radius, so a scalar call costs O(log C + local terms) and the value is
    exactly zero far from every center.  Two weight sets share one Gaussian
    evaluation (pump and conjugate-phase Stokes envelopes).
    """

    def __init__(self, centers: np.ndarray, weight_sets: list[np.ndarray], tau: float):
        order = np.argsort(centers, kind="stable")
        self.centers = np.ascontiguousarray(centers[order])
        self.weights = [np.ascontiguousarray(w[order]) for w in weight_sets]
        self.tau = tau
        self.cut = tau * math.sqrt(2.0 * _GAUSS_CLIP_EXPONENT)
        self._m_half_inv_tau2 = -0.5 / (tau * tau)

    def eval_scalar(self, t: float) -> list[complex]:
        i0, i1 = np.searchsorted(self.centers, (t - self.cut, t + self.cut))
        if i0 == i1:
            return [0.0 + 0.0j] * len(self.weights)
        d = t - self.centers[i0:i1]
        g = np.exp(d * d * self._m_half_inv_tau2)
        return [complex(np.dot(w[i0:i1], g)) for w in self.weights]

    def eval_grid(self, ts: np.ndarray) -> list[np.ndarray]:
        """Vectorized evaluation on a sorted, ascending time grid."""
        outs = [np.zeros(ts.shape, dtype=complex) for _ in self.weights]
        for c, *ws in zip(self.centers, *self.weights):
            j0, j1 = np.searchsorted(ts, (c - self.cut, c + self.cut))
            if j0 == j1:
                continue
            d = ts[j0:j1] - c
            g = np.exp(d * d * self._m_half_inv_tau2)
            for out, w in zip(outs, ws):
                out[j0:j1] += w * g
        return outs


def _sub_pulse_centers(p: PulseTrainParams, n_max: int):
    """(centers, orders, pulse indices) for the (n, k) sub-pulse lattice."""
    ns = np.arange(-n_max, n_max + 1)
    ks = np.arange(p.n_pulses)
    centers = (ns[:, None] * p.mod_time + ks[None, :] * p.period).ravel()
    n_flat = np.repeat(ns, p.n_pulses)
    return centers, n_flat


def _bessel_weights(p: PulseTrainParams, n_max: int) -> np.ndarray:
    """Signed J_n(A) for n = -n_max..n_max using J_{-n} = (-1)^n J_n."""
    pos = bessel_j_array(n_max, p.mod_amplitude)
    ns = np.arange(-n_max, n_max + 1)
    j = pos[np.abs(ns)]
    j[(ns < 0) & (np.abs(ns) % 2 == 1)] *= -1.0
    return j


def _envelope_sum(p: PulseTrainParams, trunc: BesselTruncation):
    """Comb sum carrying both the pump and conjugate-phase weight sets."""
    n_max = trunc.resolve(p.mod_amplitude)
    centers, n_flat = _sub_pulse_centers(p, n_max)
    j_flat = np.repeat(_bessel_weights(p, n_max), p.n_pulses)
    w_pump = j_flat * np.exp(-1j * n_flat * (p.phi + p.omega0 * p.mod_time))
    w_conj = j_flat * np.exp(-1j * n_flat * (p.phi - p.omega0 * p.mod_time))
    return _GaussianCombSum(centers, [w_pump, w_conj], p.tau)


def _field_sum(p: PulseTrainParams, trunc: BesselTruncation):
    """Comb sum for the real field; carrier phase folded into the weights."""
    n_max = trunc.resolve(p.mod_amplitude)
    centers, n_flat = _sub_pulse_centers(p, n_max)
    j_flat = np.repeat(_bessel_weights(p, n_max), p.n_pulses)
    # J_n e^{-in phi} e^{+i omega0 c}: combined with the outer e^{-i omega0 t}
    # this reconstructs e^{-i omega0 (t - c)} per sub-pulse
    w = j_flat * np.exp(-1j * n_flat * p.phi + 1j * p.omega0 * centers)
    return _GaussianCombSum(centers, [w], p.tau)


def field_time(t, p: PulseTrainParams, trunc: BesselTruncation = DEFAULT_TRUNCATION):
    """Real field E(t) of the modulated train.

    Computed as E0 Re[e^{-i omega0 t} S(t)] with S the complex sub-pulse sum;
    for phi = 0 this reduces to the explicit cosine form of the train.
    """
    comb = _field_sum(p, trunc)
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if scalar:
        s = comb.eval_scalar(float(ts[0]))[0]
        return p.e0 * (np.exp(-1j * p.omega0 * float(ts[0])) * s).real
    if np.all(np.diff(ts) >= 0):
        s = comb.eval_grid(ts)[0]
    else:
        s = np.array([comb.eval_scalar(float(x))[0] for x in ts])
    return p.e0 * (np.exp(-1j * p.omega0 * ts) * s).real


def rabi_envelope(t, peak_rabi: float, p: PulseTrainParams,
                  trunc: BesselTruncation = DEFAULT_TRUNCATION,
                  conjugate: bool = False):
    """Complex Rabi envelope Omega(t) (or the conjugate-phase Omega'(t)).

    conjugate=True flips the sign of omega0*T0 in the per-order phase factor,
    which is the variant coupling the upper (2 <-> 3) leg.
    """
    comb = _envelope_sum(p, trunc)
    idx = 1 if conjugate else 0
    scalar = np.ndim(t) == 0
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if scalar:
        return peak_rabi * comb.eval_scalar(float(ts[0]))[idx]
    if np.all(np.diff(ts) >= 0):
        vals = comb.eval_grid(ts)[idx]
    else:
        vals = np.array([comb.eval_scalar(float(x))[idx] for x in ts])
    return peak_rabi * vals


class RabiEnvelopePair:
    """Pump/Stokes envelope pair sharing one Gaussian evaluation per call.

    This is the integrator's hot path: ``pair(t)`` returns
    (Omega(t), Omega'(t)) already scaled by the peak Rabi frequency.
    """

    def __init__(self, p: PulseTrainParams, peak_rabi: float,
                 trunc: BesselTruncation = DEFAULT_TRUNCATION):
        self.params = p
        self.peak_rabi = peak_rabi
        self.truncation = trunc
        self._comb = _envelope_sum(p, trunc)

    def pair(self, t: float) -> tuple[complex, complex]:
        a, b = self._comb.eval_scalar(t)
        return self.peak_rabi * a, self.peak_rabi * b

    def pair_grid(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a, b = self._comb.eval_grid(np.asarray(ts, dtype=float))
        return self.peak_rabi * a, self.peak_rabi * b


def active_windows(p: PulseTrainParams,
                   trunc: BesselTruncation = DEFAULT_TRUNCATION) -> list[tuple[float, float]]:
    """Disjoint sorted intervals covering all t with |Omega(t)|/Omega_R > threshold.

    Conservative cover: each sub-pulse term |J_n| g(t-c) is given the support
    radius where it alone falls below threshold/(number of terms), so outside
    the union the triangle inequality bounds the full sum below threshold.
    Outside these windows the field is treated as exactly zero.
    """
    n_max = trunc.resolve(p.mod_amplitude)
    centers, n_flat = _sub_pulse_centers(p, n_max)
    weights = np.abs(np.repeat(_bessel_weights(p, n_max), p.n_pulses))
    per_term = trunc.threshold / (2 * n_max + 1)

    keep = weights > per_term
    if not np.any(keep):
        return []
    radii = p.tau * np.sqrt(2.0 * np.log(weights[keep] / per_term))
    starts = centers[keep] - radii
    ends = centers[keep] + radii

    order = np.argsort(starts)
    merged: list[tuple[float, float]] = []
    cur_s, cur_e = starts[order[0]], ends[order[0]]
    for i in order[1:]:
        s, e = starts[i], ends[i]
        if s <= cur_e:
            cur_e = max(cur_e, e)
        else:
            merged.append((float(cur_s), float(cur_e)))
            cur_s, cur_e = s, e
    merged.append((float(cur_s), float(cur_e)))
    return merged


def window_sparsity(windows: list[tuple[float, float]]) -> float:
    """Fraction of the spanned time covered by the windows."""
    if not windows:
        return 0.0
    covered = sum(e - s for s, e in windows)
    span = windows[-1][1] - windows[0][0]
    return covered / span if span > 0 else 1.0
