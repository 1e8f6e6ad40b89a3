"""Dressed-state traces: spectrum structure, tracking, parity comparison."""

import math

import numpy as np
import pytest

from combpassage import (TrackingAmbiguous, dressed_hamiltonian, eigen_traces,
                         molecule_preset)
from combpassage.dressed import default_grid
from combpassage.units import freq_to_radfs



NI08 = molecule_preset("krb-ni08", n_excited=1)
RABI = freq_to_radfs(125.5)


def make_ni08_pulse(phi=0.0):
    # carrier on the upper leg, modulation time on the lower-leg resonance
    from combpassage import PulseTrainParams
    return PulseTrainParams(
        e0=1.0, tau=3.0, period=1.92e7, n_pulses=1,
        omega0=NI08.omega32, mod_amplitude=4.0,
        mod_time=2.0 * math.pi / NI08.omega21, phi=phi)


def test_far_outside_pulse_is_zero():
    h = dressed_hamiltonian(5.0e5, NI08, make_ni08_pulse(), RABI)
    assert np.all(h == 0.0)


def test_unmodulated_peak_couplings():
    from combpassage import PulseTrainParams
    pulse = PulseTrainParams(1.0, 3.0, 1.92e7, 1, NI08.omega32, 0.0,
                             make_ni08_pulse().mod_time, 0.0)
    h = dressed_hamiltonian(0.0, NI08, pulse, RABI)
    assert abs(h[0, 1]) == pytest.approx(RABI, rel=1e-12)
    assert abs(h[1, 2]) == pytest.approx(RABI, rel=1e-12)


def test_spectrum_is_zero_plus_minus_s(rng):
    # eigenvalues are {0, +-sqrt(|H12|^2 + |H23|^2)} at random times/params
    pulse = make_ni08_pulse()
    windows_span = 200.0
    for _ in range(1000):
        t = float(rng.uniform(-windows_span, windows_span))
        rabi = float(rng.uniform(0.05, 1.5))
        h = dressed_hamiltonian(t, NI08, pulse, rabi)
        s = math.sqrt(abs(h[0, 1]) ** 2 + abs(h[1, 2]) ** 2)
        vals = np.linalg.eigvalsh(h)
        ref = np.array([-s, 0.0, s])
        assert np.max(np.abs(vals - ref)) <= 1e-10 * max(s, 1.0)
        assert abs(vals.sum()) <= 1e-12 * max(s, 1.0)


def test_trace_energies_structure():
    trace = eigen_traces(NI08, make_ni08_pulse(), RABI, 0.0)
    s = np.sort(trace.energies, axis=1)
    assert np.max(np.abs(s[:, 1])) <= 1e-10 * max(1.0, float(s[:, 2].max()))
    assert np.max(np.abs(s[:, 0] + s[:, 2])) <= 1e-10
    # overlap columns are normalized eigenvectors
    col_sums = trace.overlaps.sum(axis=1)
    assert np.max(np.abs(col_sums - 1.0)) <= 1e-10


def test_eigenvectors_orthonormal(rng):
    pulse = make_ni08_pulse()
    for _ in range(50):
        t = float(rng.uniform(-150, 150))
        h = dressed_hamiltonian(t, NI08, pulse, RABI)
        _, vecs = np.linalg.eigh(h)
        gram = vecs.conj().T @ vecs
        assert np.max(np.abs(gram - np.eye(3))) <= 1e-10


def test_zero_drive_trace_trivial():
    grid = np.linspace(-50, 50, 64)
    trace = eigen_traces(NI08, make_ni08_pulse(), 0.0, 0.0, grid)
    assert np.all(trace.energies == 0.0)
    eye = np.eye(3)
    assert np.all(trace.overlaps == eye)


def test_tracking_stable_under_refinement():
    pulse = make_ni08_pulse()
    coarse = eigen_traces(NI08, pulse, RABI, 0.0, default_grid(pulse, count=2049))
    fine = eigen_traces(NI08, pulse, RABI, 0.0, default_grid(pulse, count=4097))
    # consecutive assignments never swap branches on either grid: the
    # step-to-step relative permutation is the identity
    for trace in (coarse, fine):
        rel = trace.assignment[1:] != trace.assignment[:-1]
        assert not rel.any()
    # and the 2x-refined grid reproduces the coarse assignment/energies at
    # the shared points (odd point counts make them coincide exactly)
    assert np.array_equal(coarse.assignment, fine.assignment[::2])
    assert np.allclose(coarse.energies, fine.energies[::2], atol=1e-12)


def test_tracking_ambiguous_on_coarse_grid():
    pulse = make_ni08_pulse()
    # a handful of points across the whole window rotates the frame by many
    # radians between samples: branch identification must refuse
    w0, w1 = default_grid(pulse, count=2)[[0, -1]]
    grid = np.linspace(w0, w1, 6)
    with pytest.raises(TrackingAmbiguous):
        eigen_traces(NI08, pulse, RABI, 0.0, grid)


def test_branch_excited_weights_are_structural():
    # a zero-diagonal Lambda matrix pins the per-branch excited weight: the
    # zero branch carries none, each +-s branch exactly one half, for every
    # modulation parity and time
    pulse = make_ni08_pulse()
    for phi in (0.0, math.pi / 2.0):
        trace = eigen_traces(NI08, pulse, RABI, phi)
        ex = trace.overlaps[:, 1, :]
        zero_branch = trace.passage_branch()
        others = [j for j in range(3) if j != zero_branch]
        assert np.max(ex[:, zero_branch]) <= 1e-12
        for j in others:
            assert np.max(np.abs(ex[:, j] - 0.5)) <= 1e-10


def test_parity_signature_in_zero_branch_character():
    # sine chirp: pump and conjugate envelopes have identical magnitude, so
    # the zero branch holds a constant 1/2-1/2 split between the bare end
    # states; cosine chirp swings the same branch between nearly pure |1>
    # and nearly pure |3> character (all three bare states get involved in
    # the +-s branches instead)
    pulse = make_ni08_pulse()
    sine = eigen_traces(NI08, pulse, RABI, 0.0)
    b = sine.passage_branch()
    assert np.max(np.abs(sine.overlaps[:, 0, b] - 0.5)) <= 1e-6
    assert np.max(np.abs(sine.overlaps[:, 2, b] - 0.5)) <= 1e-6

    cosine = eigen_traces(NI08, pulse, RABI, math.pi / 2.0)
    bc = cosine.passage_branch()
    w1 = cosine.overlaps[:, 0, bc]
    swing = float(w1.max() - w1.min())
    assert swing >= 0.5
    assert float(w1.max()) >= 0.9


def test_grid_validation():
    from combpassage import ValidationError
    pulse = make_ni08_pulse()
    with pytest.raises(ValidationError):
        eigen_traces(NI08, pulse, RABI, 0.0, np.array([0.0]))
    with pytest.raises(ValidationError):
        eigen_traces(NI08, pulse, RABI, 0.0, np.array([1.0, 0.5]))
