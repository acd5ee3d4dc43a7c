"""Ring-plus-probe oscillator chains and their normal modes.

The data bus is a ring of ``M`` identical unit-frequency oscillators with
nearest-neighbour coupling ``c``.  Probe oscillators may attach to single
ring sites with a weak coupling ``epsilon`` and an optional detuning of
their bare frequency.  Every Hamiltonian here is quadratic,

    H = (p^T p + x^T V x) / 2     (units hbar = omega = m = 1),

so a chain is fully described by its symmetric potential matrix ``V`` over
an ordered tuple of mode labels: ring sites ``1..M`` (integers) first, then
probe labels, then the decoupled spectator oscillator ``"c"`` if present.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ProbeSpec",
    "DisorderSpec",
    "ChainSpec",
    "QuadraticHamiltonian",
    "ModeBasis",
    "build_ring_potential",
    "ring_bond_strengths",
    "attach_probes",
    "apply_disorder",
    "ring_normal_modes",
    "numeric_normal_modes",
    "QUARTER_MODE_DETUNING",
]


def QUARTER_MODE_DETUNING(ring_coupling: float) -> float:
    """Probe detuning that makes the probes resonant with the M/4 ring mode.

    The probe's bare frequency squared is ``1 + 2*detuning`` and the M/4
    collective mode sits at frequency squared ``1 + 2c``, so exact resonance
    needs ``detuning = c``.
    """
    return float(ring_coupling)


@dataclass(frozen=True)
class ProbeSpec:
    """One probe oscillator attached to a single ring site.

    ``detuning`` shifts the probe's bare frequency squared to
    ``1 + 2*detuning``; zero leaves the probe degenerate with the
    center-of-mass mode of the ring.
    """

    label: str
    site: int
    epsilon: float
    detuning: float = 0.0


@dataclass(frozen=True)
class DisorderSpec:
    """Static disorder drawn deterministically from ``seed``.

    kind "bond": each ring bond ``c`` becomes ``c * (1 + u)`` with u uniform
    on [-spread, spread], and the ring diagonal is rebuilt from the adjacent
    bonds.  This keeps the uniform vector an exact eigenvector of V with
    eigenvalue 1, which is the mechanism behind the chain's robustness.

    kind "site": the unit site frequency squared becomes ``1 + u`` instead.
    This breaks the exact center-of-mass eigenvector and is provided for
    comparison only.
    """

    spread: float
    seed: int
    kind: str = "bond"


@dataclass(frozen=True)
class ChainSpec:
    """Declarative description of a ring with attached probes."""

    ring_size: int
    ring_coupling: float
    probes: tuple[ProbeSpec, ...] = ()
    include_decoupled: bool = False
    allow_shared_sites: bool = False
    disorder: DisorderSpec | None = None

    def __post_init__(self):
        m = self.ring_size
        if not isinstance(m, (int, np.integer)) or m < 3:
            raise ValueError(
                f"ring_size must be an integer >= 3 (a 2-site ring degenerates "
                f"to a double bond), got {m!r}"
            )
        if not self.ring_coupling > 0:
            raise ValueError(f"ring_coupling must be > 0, got {self.ring_coupling!r}")
        object.__setattr__(self, "probes", tuple(self.probes))
        labels = [p.label for p in self.probes]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate probe labels: {labels}")
        if self.include_decoupled and "c" in labels:
            raise ValueError("probe label 'c' collides with the decoupled oscillator")
        sites = [p.site for p in self.probes]
        if not self.allow_shared_sites and len(set(sites)) != len(sites):
            raise ValueError(f"probes share a ring site: {sites}")
        for p in self.probes:
            if not 1 <= p.site <= m:
                raise ValueError(f"probe {p.label!r} site {p.site} outside 1..{m}")
            if p.epsilon < 0:
                raise ValueError(f"probe {p.label!r} coupling must be >= 0")
            if p.detuning < 0:
                raise ValueError(f"probe {p.label!r} detuning must be >= 0")
        d = self.disorder
        if d is not None:
            if not 0.0 <= d.spread < 1.0:
                raise ValueError(
                    f"disorder spread must lie in [0, 1) to keep all bonds "
                    f"positive, got {d.spread!r}"
                )
            if d.kind not in ("bond", "site"):
                raise ValueError(f"unknown disorder kind {d.kind!r}")

    @property
    def labels(self) -> tuple:
        """Mode labels in canonical order: ring sites, probes, spectator."""
        out: list = list(range(1, self.ring_size + 1))
        out += [p.label for p in self.probes]
        if self.include_decoupled:
            out.append("c")
        return tuple(out)


@dataclass(frozen=True, eq=False)
class QuadraticHamiltonian:
    """Symmetric potential matrix ``V`` over labelled modes.

    The kinetic part is always the identity: H = (p^T p + x^T V x)/2.
    """

    labels: tuple
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        v = np.asarray(self.v, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"potential matrix must be square, got {v.shape}")
        if v.shape[0] != len(self.labels):
            raise ValueError("label count does not match matrix dimension")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("mode labels must be unique")
        if np.max(np.abs(v - v.T), initial=0.0) > 1e-12:
            raise ValueError("potential matrix is not symmetric")
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown mode label {label!r}") from None


@dataclass(frozen=True, eq=False)
class ModeBasis:
    """Normal-mode decomposition of a potential matrix.

    ``transform`` has the mode vectors as rows, so that
    transform^dagger @ diag(frequencies_squared) @ transform reconstructs V.
    ``origin`` is "analytic-dft" for the closed-form ring modes and
    "numeric" for a symmetric eigendecomposition.
    """

    transform: np.ndarray
    frequencies_squared: np.ndarray
    origin: str


def build_ring_potential(ring_size: int, ring_coupling: float) -> np.ndarray:
    """Potential matrix of the bare ring: diagonal 1+2c, cyclic bonds -c."""
    m, c = ring_size, ring_coupling
    if not isinstance(m, (int, np.integer)) or m < 3:
        raise ValueError(
            f"ring_size must be an integer >= 3 (a 2-site ring degenerates "
            f"to a double bond), got {m!r}"
        )
    if not c > 0:
        raise ValueError(f"ring_coupling must be > 0, got {c!r}")
    v = np.zeros((m, m))
    idx = np.arange(m)
    v[idx, idx] = 1.0 + 2.0 * c
    v[idx, (idx + 1) % m] = -c
    v[(idx + 1) % m, idx] = -c
    return v


def ring_bond_strengths(
    ring_size: int, ring_coupling: float, disorder: DisorderSpec | None = None
) -> np.ndarray:
    """Per-bond couplings; bond ``k`` joins ring sites k+1 and k+2 (cyclic)."""
    bonds = np.full(ring_size, float(ring_coupling))
    if disorder is not None and disorder.kind == "bond":
        rng = np.random.default_rng(disorder.seed)
        bonds = bonds * (1.0 + rng.uniform(-disorder.spread, disorder.spread, ring_size))
    return bonds


def _site_frequency_offsets(ring_size: int, disorder: DisorderSpec | None) -> np.ndarray:
    if disorder is not None and disorder.kind == "site":
        rng = np.random.default_rng(disorder.seed)
        return rng.uniform(-disorder.spread, disorder.spread, ring_size)
    return np.zeros(ring_size)


def attach_probes(spec: ChainSpec) -> QuadraticHamiltonian:
    """Assemble the full ring-plus-probes potential matrix.

    Each coupling term eps*(x_p - x_s)^2 / 2 contributes +eps to both
    diagonal entries and -eps to the (p, s) off-diagonals.  A probe's bare
    diagonal is 1 + 2*detuning; the decoupled spectator contributes a bare
    diagonal 1 and no off-diagonal entries.
    """
    m = spec.ring_size
    labels = spec.labels
    n = len(labels)
    bonds = ring_bond_strengths(m, spec.ring_coupling, spec.disorder)
    offsets = _site_frequency_offsets(m, spec.disorder)

    v = np.zeros((n, n))
    for k in range(m):
        v[k, k] = (1.0 + offsets[k]) + bonds[k - 1] + bonds[k]
        j = (k + 1) % m
        v[k, j] = -bonds[k]
        v[j, k] = -bonds[k]
    for i, p in enumerate(spec.probes):
        pi = m + i
        s = p.site - 1
        v[pi, pi] = 1.0 + 2.0 * p.detuning + p.epsilon
        v[pi, s] = -p.epsilon
        v[s, pi] = -p.epsilon
        v[s, s] += p.epsilon
    if spec.include_decoupled:
        v[n - 1, n - 1] = 1.0
    return QuadraticHamiltonian(labels, v)


def apply_disorder(
    ham: QuadraticHamiltonian, spread: float, seed: int, kind: str = "bond"
) -> QuadraticHamiltonian:
    """Perturb an existing chain's ring block, leaving probe couplings alone.

    Bond disorder rescales every ring bond by (1 + u) and adjusts the two
    adjacent diagonal entries by the change, so any probe contribution
    already sitting on the diagonal is preserved.
    """
    if not 0.0 <= spread < 1.0:
        raise ValueError(f"spread must lie in [0, 1), got {spread!r}")
    if kind not in ("bond", "site"):
        raise ValueError(f"unknown disorder kind {kind!r}")
    m = sum(1 for lab in ham.labels if isinstance(lab, (int, np.integer)))
    if m < 3:
        raise ValueError("hamiltonian has no ring block to disorder")
    v = np.array(ham.v)
    rng = np.random.default_rng(seed)
    if kind == "bond":
        u = rng.uniform(-spread, spread, m)
        for k in range(m):
            j = (k + 1) % m
            old = -v[k, j]
            new = old * (1.0 + u[k])
            v[k, j] = -new
            v[j, k] = -new
            v[k, k] += new - old
            v[j, j] += new - old
    else:
        u = rng.uniform(-spread, spread, m)
        for k in range(m):
            v[k, k] += u[k]
    return QuadraticHamiltonian(ham.labels, v)


def ring_normal_modes(ring_size: int, ring_coupling: float) -> ModeBasis:
    """Closed-form normal modes of the ordered ring.

    transform[k-1, l-1] = exp(2j*pi*k*l/M)/sqrt(M) and the squared
    frequencies are 1 + 2c - 2c*cos(2*pi*k/M) for k = 1..M; the last entry
    (k = M) is the center-of-mass mode, whose frequency is exactly 1 for
    any ring coupling.
    """
    m, c = ring_size, ring_coupling
    if not isinstance(m, (int, np.integer)) or m < 3:
        raise ValueError(f"ring_size must be an integer >= 3, got {m!r}")
    ks = np.arange(1, m + 1)
    transform = np.exp(2j * np.pi * np.outer(ks, ks) / m) / np.sqrt(m)
    freq2 = 1.0 + 2.0 * c - 2.0 * c * np.cos(2.0 * np.pi * ks / m)
    return ModeBasis(transform, freq2, "analytic-dft")


def numeric_normal_modes(v: np.ndarray | QuadraticHamiltonian) -> ModeBasis:
    """Orthogonal eigendecomposition of a symmetric positive definite V.

    Eigenvalues ascend; each eigenvector's sign is fixed so its first
    component of appreciable size is positive, making the result
    deterministic for disordered chains too.
    """
    if isinstance(v, QuadraticHamiltonian):
        v = v.v
    v = np.asarray(v, dtype=float)
    if np.max(np.abs(v - v.T), initial=0.0) > 1e-12:
        raise ValueError("potential matrix is not symmetric")
    freq2, vecs = np.linalg.eigh(v)
    if freq2[0] <= 0:
        raise ValueError(
            f"potential matrix is not positive definite (min eigenvalue "
            f"{freq2[0]:.3e}); not a valid chain"
        )
    vecs = vecs.T.copy()  # mode vectors as rows
    for row in vecs:
        j = np.argmax(np.abs(row) > 1e-12)
        if row[j] < 0:
            row *= -1.0
    return ModeBasis(vecs, freq2, "numeric")
