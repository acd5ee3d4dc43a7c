"""Gaussian states as covariance matrices and their exact symplectic evolution.

Conventions
-----------
* Quadrature ordering is (x_1..x_N, p_1..p_N); the symplectic form is
  J = [[0, I], [-I, 0]].
* The vacuum covariance matrix is the identity.  A state is physical iff
  Gamma + iJ >= 0.
* Entanglement is quantified by the logarithmic negativity with the natural
  logarithm, under which a two-mode squeezed state of parameter r carries
  exactly E_N = r.  Transfer efficiencies are ratios of negativities and are
  therefore independent of the logarithm base; a ``base`` argument is
  provided to check exactly that.
* First moments are identically zero throughout and never stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import QuadraticHamiltonian

__all__ = [
    "CovarianceState",
    "SymplecticPropagator",
    "UnphysicalStateError",
    "symplectic_form",
    "vacuum_state",
    "two_mode_squeezed",
    "propagator",
    "evolve",
    "reduce_modes",
    "symplectic_eigenvalues",
    "log_negativity",
    "purity",
    "is_physical",
]

# Partial-transpose symplectic eigenvalues this close to 1 are treated as
# rounding noise and contribute no negativity.
_NEGATIVITY_CLIP = 1e-12


class UnphysicalStateError(ValueError):
    """Raised when a covariance matrix violates Gamma + iJ >= 0."""


def _as_labels(labels_or_n) -> tuple:
    if isinstance(labels_or_n, (int, np.integer)):
        return tuple(range(labels_or_n))
    return tuple(labels_or_n)


@dataclass(frozen=True, eq=False)
class CovarianceState:
    """Second-moment matrix of a zero-mean Gaussian state over labelled modes."""

    gamma: np.ndarray
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        g = np.asarray(self.gamma, dtype=float)
        n = len(self.labels)
        if g.shape != (2 * n, 2 * n):
            raise ValueError(
                f"covariance matrix shape {g.shape} does not match "
                f"{n} modes (expected {(2 * n, 2 * n)})"
            )
        if np.max(np.abs(g - g.T), initial=0.0) > 1e-10:
            raise ValueError("covariance matrix is not symmetric")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)

    @property
    def n_modes(self) -> int:
        return len(self.labels)

    def index(self, label) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown mode label {label!r}") from None


@dataclass(frozen=True, eq=False)
class SymplecticPropagator:
    """Linear phase-space map solving the quadratic dynamics at time ``t``."""

    s: np.ndarray
    t: float
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        s = np.asarray(self.s, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "s", s)


def symplectic_form(n_modes: int) -> np.ndarray:
    """Canonical symplectic form J in (x..., p...) ordering."""
    j = np.zeros((2 * n_modes, 2 * n_modes))
    j[:n_modes, n_modes:] = np.eye(n_modes)
    j[n_modes:, :n_modes] = -np.eye(n_modes)
    return j


def vacuum_state(labels_or_n) -> CovarianceState:
    """Vacuum of every mode: the identity covariance matrix."""
    labels = _as_labels(labels_or_n)
    return CovarianceState(np.eye(2 * len(labels)), labels)


def two_mode_squeezed(r: float, i, j, labels_or_n) -> CovarianceState:
    """Two-mode squeezed state of parameter ``r`` on modes ``i`` and ``j``.

    The x-block of the pair is [[cosh r, -sinh r], [-sinh r, cosh r]] and the
    p-block is [[cosh r, sinh r], [sinh r, cosh r]]; every other mode is in
    vacuum.  For r = 0 this is the global vacuum.
    """
    if r < 0:
        raise ValueError(f"squeezing parameter must be >= 0, got {r!r}")
    labels = _as_labels(labels_or_n)
    if i == j:
        raise ValueError("two-mode squeezing needs two distinct modes")
    n = len(labels)
    ia, ib = labels.index(i), labels.index(j)
    g = np.eye(2 * n)
    ch, sh = math.cosh(r), math.sinh(r)
    g[ia, ia] = g[ib, ib] = ch
    g[ia, ib] = g[ib, ia] = -sh
    g[n + ia, n + ia] = g[n + ib, n + ib] = ch
    g[n + ia, n + ib] = g[n + ib, n + ia] = sh
    return CovarianceState(g, labels)


def _spectral(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenfrequencies and orthonormal modes of a positive definite V."""
    freq2, q = np.linalg.eigh(v)
    if freq2[0] <= 0:
        raise ValueError(
            f"potential matrix is not positive definite (min eigenvalue "
            f"{freq2[0]:.3e})"
        )
    return np.sqrt(freq2), q


def propagator(ham: QuadraticHamiltonian, t: float) -> SymplecticPropagator:
    """Exact solution operator of H = (p^T p + x^T V x)/2 at time ``t``.

    Block form S(t) = [[cos(Wt), W^-1 sin(Wt)], [-W sin(Wt), cos(Wt)]] with
    W = sqrt(V), evaluated through the eigendecomposition of V.  There is no
    step error: the map is exact for any t.
    """
    w, q = _spectral(ham.v)
    cos_b = (q * np.cos(w * t)) @ q.T
    sin_over = (q * (np.sin(w * t) / w)) @ q.T
    sin_times = (q * (np.sin(w * t) * w)) @ q.T
    n = len(w)
    s = np.zeros((2 * n, 2 * n))
    s[:n, :n] = cos_b
    s[:n, n:] = sin_over
    s[n:, :n] = -sin_times
    s[n:, n:] = cos_b
    return SymplecticPropagator(s, float(t), ham.labels)


def evolve(state: CovarianceState, prop: SymplecticPropagator) -> CovarianceState:
    """Gamma -> S Gamma S^T, re-symmetrised against rounding."""
    if state.labels != prop.labels:
        raise ValueError("state and propagator are defined over different modes")
    g = prop.s @ state.gamma @ prop.s.T
    return CovarianceState((g + g.T) / 2.0, state.labels)


def reduce_modes(state: CovarianceState, keep) -> CovarianceState:
    """Gaussian partial trace: keep the listed modes, in the order given."""
    keep = tuple(keep)
    if not keep:
        raise ValueError("must keep at least one mode")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate labels in keep: {keep}")
    n = state.n_modes
    idx = [state.index(lab) for lab in keep]
    rows = np.array(idx + [n + i for i in idx])
    return CovarianceState(state.gamma[np.ix_(rows, rows)], keep)


def symplectic_eigenvalues(gamma: np.ndarray | CovarianceState) -> np.ndarray:
    """Positive spectrum of iJ*Gamma, ascending.

    Computed from the Hermitian matrix sqrt(Gamma) (iJ) sqrt(Gamma), whose
    spectrum is +-nu; this is numerically cleaner than the plain
    non-symmetric eigenproblem.
    """
    if isinstance(gamma, CovarianceState):
        gamma = gamma.gamma
    gamma = np.asarray(gamma, dtype=float)
    n = gamma.shape[0] // 2
    w, u = np.linalg.eigh(gamma)
    if w[0] <= 0:
        raise ValueError(
            f"covariance matrix is singular or indefinite (min eigenvalue "
            f"{w[0]:.3e})"
        )
    root = (u * np.sqrt(w)) @ u.T
    herm = 1j * (root @ symplectic_form(n) @ root)
    nu = np.linalg.eigvalsh(herm)
    return nu[n:]


def is_physical(state: CovarianceState, tol: float = 1e-9) -> bool:
    """Check Gamma + iJ >= 0 up to ``tol``."""
    herm = state.gamma + 1j * symplectic_form(state.n_modes)
    return float(np.linalg.eigvalsh(herm)[0]) >= -tol


def purity(state: CovarianceState) -> float:
    """Product of the symplectic eigenvalues: 1 for pure states, > 1 mixed."""
    return float(np.prod(symplectic_eigenvalues(state)))


def log_negativity(state: CovarianceState, side, base: float | None = None) -> float:
    """Logarithmic negativity across a bipartition of the state's modes.

    ``side`` lists the labels on one side of the cut; the rest form the
    other side.  The partial transpose flips the momenta of ``side``, and
    E_N is the sum of -log over the partially transposed symplectic
    eigenvalues below 1.  Natural logarithm by default; pass ``base=2`` for
    the base-2 variant (ratios of negativities do not depend on this).
    """
    side = tuple(side) if not isinstance(side, (str, int)) else (side,)
    if not side:
        raise ValueError("bipartition side must be nonempty")
    idx = {state.index(lab) for lab in side}
    if len(idx) == state.n_modes:
        raise ValueError("bipartition side must be a proper subset of the modes")
    if not is_physical(state):
        raise UnphysicalStateError(
            "input covariance matrix violates the uncertainty relation"
        )
    n = state.n_modes
    signs = np.ones(2 * n)
    for i in idx:
        signs[n + i] = -1.0
    g_pt = state.gamma * np.outer(signs, signs)
    nu = symplectic_eigenvalues(g_pt)
    below = nu[nu < 1.0 - _NEGATIVITY_CLIP]
    value = float(-np.sum(np.log(below))) if below.size else 0.0
    if base is not None:
        value /= math.log(base)
    return value
