"""Exact chain dynamics restricted to the single-excitation subspace.

Within the rotating-wave approximation a harmonic chain with at most one
quantum anywhere behaves as a spin chain with an xy-interaction: the state
is a complex amplitude vector over the modes and evolves under a real
symmetric hopping matrix ``h``.  For a quadratic chain with potential V the
reduction is

    h = (I + V) / 2,

i.e. on-site energies (1 + V_ii)/2 and hopping V_ij/2.  The same matrix can
be assembled directly from xy-coupling data, which provides an independent
code path used as the equivalence witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .chain import ChainSpec, QuadraticHamiltonian, _site_frequency_offsets, ring_bond_strengths

__all__ = [
    "HoppingMatrix",
    "AmplitudeState",
    "rwa_hopping_matrix",
    "xy_direct_matrix",
    "basis_state",
    "evolve_amplitudes",
    "amplitude_series",
    "site_populations",
    "w_overlap",
    "w_overlap_phase_optimized",
]


@dataclass(frozen=True, eq=False)
class HoppingMatrix:
    """Real symmetric single-excitation Hamiltonian over labelled modes."""

    h: np.ndarray
    labels: tuple
    origin: str  # "rwa-from-quadratic" or "xy-direct"

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        h = np.asarray(self.h, dtype=float)
        if np.max(np.abs(h - h.T), initial=0.0) > 1e-12:
            raise ValueError("hopping matrix is not symmetric")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown mode label {label!r}") from None

    @cached_property
    def _eig(self) -> tuple[np.ndarray, np.ndarray]:
        return np.linalg.eigh(self.h)


@dataclass(frozen=True, eq=False)
class AmplitudeState:
    """Normalized complex amplitude vector over the single-excitation basis."""

    psi: np.ndarray
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        psi = np.asarray(self.psi, dtype=complex)
        if psi.shape != (len(self.labels),):
            raise ValueError("amplitude vector does not match the label count")
        norm = float(np.linalg.norm(psi))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"amplitudes must be normalized, got |psi| = {norm!r}")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown mode label {label!r}") from None


def rwa_hopping_matrix(ham: QuadraticHamiltonian) -> HoppingMatrix:
    """Single-excitation reduction h = (I + V)/2 of a quadratic chain."""
    h = (np.eye(ham.n_modes) + ham.v) / 2.0
    return HoppingMatrix(h, ham.labels, "rwa-from-quadratic")


def xy_direct_matrix(spec: ChainSpec) -> HoppingMatrix:
    """Assemble the xy hopping matrix straight from the chain description.

    Bypasses the quadratic potential entirely: on-site fields and hoppings
    are written down term by term.  The arithmetic mirrors the potential
    assembly exactly, so the result equals
    rwa_hopping_matrix(attach_probes(spec)) to the bit.
    """
    m = spec.ring_size
    labels = spec.labels
    n = len(labels)
    bonds = ring_bond_strengths(m, spec.ring_coupling, spec.disorder)
    offsets = _site_frequency_offsets(m, spec.disorder)

    h = np.zeros((n, n))
    for k in range(m):
        v_kk = (1.0 + offsets[k]) + bonds[k - 1] + bonds[k]
        for p in spec.probes:
            if p.site - 1 == k:
                v_kk += p.epsilon
        h[k, k] = (1.0 + v_kk) / 2.0
        j = (k + 1) % m
        h[k, j] = -bonds[k] / 2.0
        h[j, k] = -bonds[k] / 2.0
    for i, p in enumerate(spec.probes):
        pi = m + i
        s = p.site - 1
        v_pp = 1.0 + 2.0 * p.detuning + p.epsilon
        h[pi, pi] = (1.0 + v_pp) / 2.0
        h[pi, s] = -p.epsilon / 2.0
        h[s, pi] = -p.epsilon / 2.0
    if spec.include_decoupled:
        h[n - 1, n - 1] = (1.0 + 1.0) / 2.0
    return HoppingMatrix(h, labels, "xy-direct")


def basis_state(labels, label) -> AmplitudeState:
    """Single excitation sitting entirely on one mode."""
    labels = tuple(labels)
    psi = np.zeros(len(labels), dtype=complex)
    psi[labels.index(label)] = 1.0
    return AmplitudeState(psi, labels)


def evolve_amplitudes(hop: HoppingMatrix, psi0: AmplitudeState, t: float) -> AmplitudeState:
    """psi(t) = exp(-i h t) psi(0) through the eigendecomposition of h."""
    if psi0.labels != hop.labels:
        raise ValueError("state and hopping matrix are defined over different modes")
    w, u = hop._eig
    psi = u @ (np.exp(-1j * w * t) * (u.T @ psi0.psi))
    return AmplitudeState(psi, hop.labels)


def amplitude_series(hop: HoppingMatrix, psi0: AmplitudeState, ts) -> np.ndarray:
    """Amplitudes at many times at once; returns an array of shape (T, N)."""
    if psi0.labels != hop.labels:
        raise ValueError("state and hopping matrix are defined over different modes")
    w, u = hop._eig
    coeff = u.T @ psi0.psi
    phases = np.exp(-1j * np.outer(np.asarray(ts, dtype=float), w))
    return (phases * coeff) @ u.T


def site_populations(state: AmplitudeState) -> np.ndarray:
    """|psi_i|^2 per mode label; sums to 1."""
    return np.abs(state.psi) ** 2


def _w_amplitude(state: AmplitudeState, x, y, z, probe_labels) -> complex:
    if abs(abs(x) ** 2 + abs(y) ** 2 + abs(z) ** 2 - 1.0) > 1e-8:
        raise ValueError("target coefficients must satisfy |x|^2+|y|^2+|z|^2 = 1")
    a, b, c = (state.psi[state.index(lab)] for lab in probe_labels)
    return np.conj(x) * a + np.conj(y) * b + np.conj(z) * c


def w_overlap(state: AmplitudeState, x, y, z, probe_labels=("a", "b", "c")) -> float:
    """Squared overlap with the three-probe W state x|100> + y|010> + z|001>.

    The target carries no excitation on the ring, so any amplitude left on
    the bus counts as loss: only the three probe amplitudes enter the
    bracket.
    """
    return float(abs(_w_amplitude(state, x, y, z, probe_labels)) ** 2)


def w_overlap_phase_optimized(
    state: AmplitudeState, x, y, z, probe_labels=("a", "b", "c")
) -> float:
    """Squared W overlap after an optimal local phase rotation on each probe.

    Independent phases on the three probes can align every term of the
    bracket, so the optimum is (|x||psi_a| + |y||psi_b| + |z||psi_c|)^2 in
    closed form.
    """
    if abs(abs(x) ** 2 + abs(y) ** 2 + abs(z) ** 2 - 1.0) > 1e-8:
        raise ValueError("target coefficients must satisfy |x|^2+|y|^2+|z|^2 = 1")
    amps = [abs(state.psi[state.index(lab)]) for lab in probe_labels]
    return float((abs(x) * amps[0] + abs(y) * amps[1] + abs(z) * amps[2]) ** 2)
