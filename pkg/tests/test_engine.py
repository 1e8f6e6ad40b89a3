"""Propagation engine: RHS structure, window integrator, gap map, trains."""

import math

import numpy as np
import pytest

from combpassage import (DecoherenceRates, IntegratorConfig, InvariantViolation,
                         ShapeMismatch, StepSizeUnderflow, basis_state,
                         build_hamiltonian, molecule_preset, propagate_gap,
                         propagate_window, relaxation_rhs, run_five_block,
                         run_train)
from combpassage.units import freq_to_radfs

from _oracles import liouville_3level_lines
from test_field import make_pulse

SH08 = molecule_preset("krb-sh08")

# rates of the decoherence scenarios: decay 1e8/s, dephasing 1e4/s
RATES = DecoherenceRates.from_per_s(gamma1=1e8, gamma2=1e8,
                                    Gamma1=1e4, Gamma2=1e4, Gamma3=1e4)


def random_density(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def commutator_rhs(h, rho, rates=None):
    out = -1j * (h @ rho - rho @ h)
    if rates is not None:
        out += relaxation_rhs(rho, rates)
    return out


# -- right-hand side ----------------------------------------------------------

def test_rhs_zero_field_zero_rates():
    rho = basis_state(3, 0)
    assert np.all(commutator_rhs(np.zeros((3, 3)), rho) == 0.0)


def test_rhs_initial_state_coherence_growth():
    # rho = |1><1|, only H12 nonzero: rho11' = 0, rho12' = +i H12
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = 0.3 - 0.1j
    h[1, 0] = np.conj(h[0, 1])
    rho = basis_state(3, 0)
    d = commutator_rhs(h, rho)
    assert d[0, 0] == 0.0
    assert d[0, 1] == pytest.approx(1j * h[0, 1])


def test_commutator_matches_equation_lines(rng):
    # literal six-line transcription is the oracle
    for _ in range(1000):
        rho = random_density(rng, 3)
        h = np.zeros((3, 3), dtype=complex)
        h[0, 1] = rng.normal() + 1j * rng.normal()
        h[1, 2] = rng.normal() + 1j * rng.normal()
        h[1, 0] = np.conj(h[0, 1])
        h[2, 1] = np.conj(h[1, 2])
        got = commutator_rhs(h, rho)
        want = liouville_3level_lines(h, rho)
        assert np.max(np.abs(got - want)) <= 1e-13


# -- window integrator ---------------------------------------------------------

def test_window_identity_without_dynamics():
    rho0 = basis_state(4, 1)
    rho1, samples, stats = propagate_window(
        rho0, None, DecoherenceRates.zero(), 0.0, 100.0, IntegratorConfig())
    assert np.max(np.abs(rho1 - rho0)) <= 1e-12
    assert samples[0][0] == 0.0 and samples[-1][0] == 100.0


def test_rabi_oracle_two_level():
    # resonant constant drive: rho22(t) = sin^2(Omega t / 2) to 1e-6
    omega = 0.05
    h = np.zeros((2, 2), dtype=complex)
    h[0, 1] = h[1, 0] = omega / 2.0
    period = 2.0 * math.pi / omega
    t_end = 10.0 * period
    ts = np.linspace(0.0, t_end, 400)
    rho1, samples, _ = propagate_window(
        basis_state(2, 0), lambda t: h, DecoherenceRates.zero(),
        0.0, t_end, IntegratorConfig(), t_eval=ts)
    worst = max(abs(r[1, 1].real - math.sin(omega * t / 2.0) ** 2)
                for t, r in samples)
    assert worst <= 1e-6


def test_window_self_convergence():
    pulse = make_pulse(n_pulses=1)
    ham = build_hamiltonian(SH08, pulse, freq_to_radfs(70.0))
    rho0 = basis_state(7, 0)
    base = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-11, max_step=pulse.tau / 20)
    tight = IntegratorConfig(rel_tol=5e-10, abs_tol=5e-12, max_step=pulse.tau / 20)
    r1, _, _ = propagate_window(rho0, ham, RATES, -80.0, 80.0, base)
    r2, _, _ = propagate_window(rho0, ham, RATES, -80.0, 80.0, tight)
    diff = np.max(np.abs(np.diag(r1).real - np.diag(r2).real))
    assert diff <= 10.0 * base.rel_tol


def test_step_size_underflow_detected():
    # absurd span with a fast drive: the floor 1e-12*span exceeds any stable step
    h = np.zeros((2, 2), dtype=complex)

    def ham(t):
        h[0, 1] = h[1, 0] = math.cos(t)
        return h

    with pytest.raises(StepSizeUnderflow):
        propagate_window(basis_state(2, 0), ham, DecoherenceRates.zero(),
                         0.0, 1e15, IntegratorConfig())


def test_window_input_validation(rng):
    rho = random_density(rng, 3)
    rho[0, 1] += 1.0  # break Hermiticity
    from combpassage.engine import validate_density_matrix
    with pytest.raises(InvariantViolation):
        validate_density_matrix(rho)
    with pytest.raises(InvariantViolation):
        validate_density_matrix(2.0 * np.eye(3, dtype=complex))
    with pytest.raises(ShapeMismatch):
        validate_density_matrix(np.zeros((2, 3), dtype=complex))


# -- gap propagator -------------------------------------------------------------

def test_gap_identity_without_rates():
    rho = basis_state(7, 0)
    rho[0, 6] = rho[6, 0] = 0.3
    out = propagate_gap(rho, DecoherenceRates.zero(), 1.92e7)
    assert np.array_equal(out, rho)


def test_gap_branching_limit():
    # from an excited state, gamma1 = gamma2 splits population evenly
    g = 1e-4
    rates = DecoherenceRates(gamma1=g, gamma2=g)
    rho = basis_state(3, 1)
    out = propagate_gap(rho, rates, 1e9)
    assert out[0, 0].real == pytest.approx(0.5, abs=1e-12)
    assert out[2, 2].real == pytest.approx(0.5, abs=1e-12)
    assert out[1, 1].real == pytest.approx(0.0, abs=1e-12)


def test_gap_matches_window_integration(rng):
    # acceptance-grade equivalence on a 19.2 ns gap
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    dt = 1.92e7
    for _ in range(100):
        rho0 = random_density(rng, 7)
        closed = propagate_gap(rho0, RATES, dt)
        stepped, _, _ = propagate_window(rho0, None, RATES, 0.0, dt, cfg)
        assert np.max(np.abs(closed - stepped)) <= 1e-10


def test_gap_with_direct_transfer(rng):
    # gamma3 > 0 exercises the two-exponential closed form
    rates = DecoherenceRates(gamma1=2e-7, gamma2=1e-7, gamma3=7e-8,
                             Gamma1=1e-11, Gamma2=1e-11, Gamma3=1e-11)
    cfg = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)
    for dt in (1e5, 1.92e7):
        rho0 = random_density(rng, 7)
        closed = propagate_gap(rho0, rates, dt)
        stepped, _, _ = propagate_window(rho0, None, rates, 0.0, dt, cfg)
        assert np.max(np.abs(closed - stepped)) <= 1e-10
    assert abs(np.trace(closed) - 1.0) <= 1e-12


def test_purity_monotone_under_pure_dephasing(rng):
    rates = DecoherenceRates(Gamma1=1e-4, Gamma2=2e-4, Gamma3=5e-5)
    rho0 = random_density(rng, 7)
    _, samples, _ = propagate_window(rho0, None, rates, 0.0, 2e4,
                                     IntegratorConfig())
    purity = [float(np.sum(np.abs(r) ** 2)) for _, r in samples]
    diffs = np.diff(purity)
    assert np.all(diffs <= 1e-12)


# -- full train -----------------------------------------------------------------

def test_train_constant_with_zero_drive():
    traj = run_train(basis_state(7, 0), SH08, make_pulse(n_pulses=3), 0.0,
                     DecoherenceRates.zero())
    assert np.allclose(traj.populations[:, 0], 1.0, atol=1e-12)
    assert traj.times.size >= 4
    assert np.all(np.diff(traj.times) > 0)


def test_train_invariants_short():
    traj = run_train(basis_state(7, 0), SH08, make_pulse(n_pulses=2),
                     freq_to_radfs(70.0), RATES)
    assert traj.invariant_failures() == []
    assert np.all(np.diff(traj.times) > 0)
    assert traj.step_stats.n_windows == 2
    # coherent-limit purity check on the rate-free variant
    traj0 = run_train(basis_state(7, 0), SH08, make_pulse(n_pulses=2),
                      freq_to_radfs(70.0), DecoherenceRates.zero())
    assert np.max(np.abs(traj0.purity - 1.0)) <= 1e-7


def test_gap_window_splice_equivalence(rng):
    # inserting an artificial zero-field window inside a gap changes nothing
    rho0 = random_density(rng, 7)
    dt = 1.92e7
    direct = propagate_gap(rho0, RATES, dt)
    cfg = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
    mid0, mid1 = 0.4 * dt, 0.4 * dt + 5e4
    spliced = propagate_gap(rho0, RATES, mid0)
    spliced, _, _ = propagate_window(spliced, None, RATES, mid0, mid1, cfg)
    spliced = propagate_gap(spliced, RATES, dt - mid1)
    assert np.max(np.abs(direct - spliced)) <= 1e-9


def test_five_block_runs_and_recombines():
    res = run_five_block(SH08, make_pulse(n_pulses=1), 0.01 * SH08.omega31,
                         DecoherenceRates.zero())
    assert len(res.blocks) == 5
    assert res.rho33_incoherent == pytest.approx(sum(res.rho33_blocks))
    assert 0.0 <= res.rho33_coherent <= 1.0
    for traj in res.blocks:
        assert traj.invariant_failures() == []


def test_train_dimension_mismatch():
    with pytest.raises(ShapeMismatch):
        run_train(basis_state(3, 0), SH08, make_pulse(), 0.1,
                  DecoherenceRates.zero())
