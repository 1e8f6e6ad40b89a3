"""Single-pulse three-level dressed-state analysis.

The field-interaction Hamiltonian of one pulse cluster acting on the
three-level system (one excited sublevel) is

    H_d(t) = [[0,                    Omega(t) e^{i w31 t}, 0          ],
              [conj,                 0,                    Omega'(t)  ],
              [0,                    conj,                 0          ]]

with Omega / Omega' the complex pump / conjugate-phase envelopes of the
k = 0 cluster.  A zero-diagonal Lambda coupling matrix always has the
instantaneous spectrum {0, +s, -s} with s = sqrt(|H12|^2 + |H23|^2), so the
physical content of the analysis lives in the eigenVECTORS: the traces
record, per branch, the bare-state weights |<bare_i|dressed_j>|^2 along the
pulse, with branches ordered by continuity (each step's eigenvectors matched
to the previous step's by maximal overlap; the first step is matched to the
bare basis).
"""

import itertools
from dataclasses import dataclass, replace

import numpy as np

from .errors import TrackingAmbiguous, ValidationError
from .field import (DEFAULT_TRUNCATION, BesselTruncation, PulseTrainParams,
                    RabiEnvelopePair, active_windows)
from .system import LevelSystem

#: branch assignments whose best and runner-up overlaps are closer than this
#: signal a too-coarse grid
AMBIGUITY_MARGIN = 1.0e-3

_PERMS = list(itertools.permutations(range(3)))


def dressed_hamiltonian(t, system: LevelSystem, pulse: PulseTrainParams,
                        peak_rabi: float,
                        trunc: BesselTruncation = DEFAULT_TRUNCATION) -> np.ndarray:
    """3x3 Hermitian dressed Hamiltonian of the single k = 0 pulse cluster."""
    env = RabiEnvelopePair(pulse.single_pulse(), peak_rabi, trunc)
    a, b = env.pair(float(t))
    h12 = a * np.exp(1j * system.omega31 * float(t))
    out = np.zeros((3, 3), dtype=complex)
    out[0, 1] = h12
    out[1, 0] = np.conj(h12)
    out[1, 2] = b
    out[2, 1] = np.conj(b)
    return out


def lambda_spectrum_scale(h: np.ndarray) -> float:
    """s = sqrt(|H12|^2 + |H23|^2); the nonzero eigenvalues are +-s."""
    return float(np.sqrt(abs(h[0, 1]) ** 2 + abs(h[1, 2]) ** 2))


@dataclass
class DressedTrace:
    """Continuity-tracked dressed energies and bare-state overlaps.

    energies[i, j]    eigenvalue of branch j at times[i] (rad/fs)
    overlaps[i, b, j] |<bare_b|dressed_j>|^2; columns sum to 1
    assignment[i]     permutation applied at step i by continuity matching
    """

    times: np.ndarray
    energies: np.ndarray
    overlaps: np.ndarray
    assignment: np.ndarray

    def branch_max_overlap(self, bare_index: int, branch: int) -> float:
        """Peak overlap of one tracked branch with one bare state."""
        return float(self.overlaps[:, bare_index, branch].max())

    def passage_branch(self) -> int:
        """Branch with the largest initial bare-|1> character."""
        return int(np.argmax(self.overlaps[0, 0, :]))


def default_grid(pulse: PulseTrainParams,
                 trunc: BesselTruncation = DEFAULT_TRUNCATION,
                 count: int = 4096) -> np.ndarray:
    """Uniform grid across the single-pulse active window."""
    windows = active_windows(pulse.single_pulse(), trunc)
    if not windows:
        raise ValidationError("pulse", "drive has no active window")
    t0 = windows[0][0]
    t1 = windows[-1][1]
    return np.linspace(t0, t1, count)


def _match_branches(prev_vecs: np.ndarray, vecs: np.ndarray):
    """Permutation of new eigenvector columns maximizing overlap with prev.

    Returns the permutation with ov[i, j] = |<prev_i|new_j>|^2 maximized
    along the diagonal.  Raises TrackingAmbiguous when some previous branch
    sees its best and second-best candidates closer than AMBIGUITY_MARGIN.
    """
    ov = np.abs(prev_vecs.conj().T @ vecs) ** 2
    best, total = None, -1.0
    for perm in _PERMS:
        s = ov[0, perm[0]] + ov[1, perm[1]] + ov[2, perm[2]]
        if s > total:
            best, total = perm, s
    for i in range(3):
        row = np.sort(ov[i])[::-1]
        if row[0] - row[1] < AMBIGUITY_MARGIN:
            raise TrackingAmbiguous(
                f"branch {i}: top overlaps {row[0]:.6f} and {row[1]:.6f} "
                "are indistinguishable; refine the time grid")
    return np.array(best)


def _first_step_order(vals: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """Greedy bare-basis assignment for the first grid point.

    The +-s branches carry identical |overlap|^2 patterns with the bare
    basis, so ties are legal here; they are broken by ascending energy.
    """
    ov = np.abs(vecs) ** 2
    perm = np.full(3, -1, dtype=int)
    taken = [False] * 3
    for slot in range(3):
        best_j, best_key = -1, None
        for j in range(3):
            if taken[j]:
                continue
            key = (ov[slot, j], -vals[j])
            if best_key is None or key > best_key:
                best_j, best_key = j, key
        perm[slot] = best_j
        taken[best_j] = True
    return perm


def eigen_traces(system: LevelSystem, pulse: PulseTrainParams,
                 peak_rabi: float, phi: float,
                 grid: np.ndarray | None = None,
                 trunc: BesselTruncation = DEFAULT_TRUNCATION) -> DressedTrace:
    """Instantaneous eigen-decomposition along the pulse with tracking.

    phi overrides the pulse's modulation phase, so sine/cosine parities can
    be compared on one parameter set.
    """
    pulse = replace(pulse, phi=phi)
    if grid is None:
        grid = default_grid(pulse, trunc)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValidationError("grid", "need a strictly increasing 1-D grid")

    env = RabiEnvelopePair(pulse.single_pulse(), peak_rabi, trunc)
    n = grid.size
    energies = np.zeros((n, 3))
    overlaps = np.zeros((n, 3, 3))
    assignment = np.zeros((n, 3), dtype=int)
    prev_vecs = np.eye(3, dtype=complex)

    h = np.zeros((3, 3), dtype=complex)
    for i, t in enumerate(grid):
        a, b = env.pair(float(t))
        h12 = a * np.exp(1j * system.omega31 * t)
        s = np.sqrt(abs(h12) ** 2 + abs(b) ** 2)
        if s == 0.0:
            vals = np.zeros(3)
            vecs = prev_vecs.copy()
            perm = np.arange(3)
        else:
            h[0, 1] = h12
            h[1, 0] = np.conj(h12)
            h[1, 2] = b
            h[2, 1] = np.conj(b)
            vals, vecs = np.linalg.eigh(h)
            perm = _first_step_order(vals, vecs) if i == 0 else \
                _match_branches(prev_vecs, vecs)
            vals = vals[perm]
            vecs = vecs[:, perm]
        energies[i] = vals
        overlaps[i] = np.abs(vecs) ** 2
        assignment[i] = perm
        prev_vecs = vecs
    return DressedTrace(grid, energies, overlaps, assignment)
