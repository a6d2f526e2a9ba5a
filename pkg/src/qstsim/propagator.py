"""Exact time evolution via Hermitian eigendecomposition, and the receiver trace.

Propagation reuses one spectral decomposition for every time and input state,
which is what the fidelity averaging loop needs. The receiver reduction keeps
coherences between different total-magnon sectors that share a receiver level;
those carry the qudit phase information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp_sparse

from .sectors import OperatorMatrix, SectorState

__all__ = [
    "EigenSystem",
    "DensityMatrix",
    "eigendecompose",
    "evolve_pure",
    "evolve_density",
    "evolve_sector_state",
    "reduce_to_receiver",
    "reduce_to_receiver_dense",
]

HERMITICITY_TOL = 1e-9


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition H = V diag(w) V^dag with w ascending."""

    basis: object
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian positive semidefinite unit-trace matrix."""

    dim: int
    matrix: np.ndarray

    def validate(self, trace_tol: float = 1e-10, psd_tol: float = 1e-10) -> None:
        m = self.matrix
        if abs(np.trace(m).real - 1.0) > trace_tol:
            raise ValueError(f"trace {np.trace(m).real} deviates from 1")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("density matrix is not Hermitian")
        w = np.linalg.eigvalsh((m + m.conj().T) / 2)
        if w.min() < -psd_tol:
            raise ValueError(f"negative eigenvalue {w.min()}")


def eigendecompose(H) -> EigenSystem:
    """Decompose a Hermitian operator; rejects non-Hermitian input."""
    basis = None
    if isinstance(H, OperatorMatrix):
        basis = H.basis
        H = H.toarray()
    elif sp_sparse.issparse(H):
        H = H.toarray()
    H = np.asarray(H, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(H))) if H.size else 1.0)
    if np.max(np.abs(H - H.conj().T)) > HERMITICITY_TOL * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((H + H.conj().T) / 2)
    return EigenSystem(basis=basis, eigenvalues=w, eigenvectors=v)


def evolve_pure(es: EigenSystem, psi0: np.ndarray, t: float) -> np.ndarray:
    """psi(t) = V exp(-i w t) V^dag psi0."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (es.dim,):
        raise ValueError(f"state of length {psi0.shape} does not match dim {es.dim}")
    phases = np.exp(-1j * es.eigenvalues * t)
    return es.eigenvectors @ (phases * (es.eigenvectors.conj().T @ psi0))


def evolve_density(es: EigenSystem, rho, t: float):
    """rho(t) = U rho U^dag; accepts and returns DensityMatrix or ndarray."""
    wrapped = isinstance(rho, DensityMatrix)
    m = rho.matrix if wrapped else np.asarray(rho, dtype=complex)
    if m.shape != (es.dim, es.dim):
        raise ValueError(f"density matrix shape {m.shape} does not match dim {es.dim}")
    U = es.eigenvectors * np.exp(-1j * es.eigenvalues * t)
    U = U @ es.eigenvectors.conj().T
    out = U @ m @ U.conj().T
    return DensityMatrix(dim=es.dim, matrix=out) if wrapped else out


def evolve_sector_state(eigensystems: dict, state: SectorState, t: float) -> SectorState:
    """Evolve each sector component with its own eigensystem (keyed by n)."""
    blocks = []
    for basis, vec in state.blocks:
        es = eigensystems[basis.n]
        blocks.append((basis, evolve_pure(es, vec, t)))
    return SectorState(blocks=tuple(blocks))


def _receiver_amplitude_groups(state: SectorState) -> dict:
    """Group amplitudes by the configuration of all sites except the receiver.

    Returns {config: vector over receiver levels 0..cap}. Components from
    different sectors land in the same group when they share a config, which
    is where inter-sector receiver coherence comes from.
    """
    cap = state.blocks[0][0].cap
    groups: dict = {}
    for basis, vec in state.blocks:
        for amp, tup in zip(vec, basis.states):
            if amp == 0:
                continue
            rest, level = tup[:-1], tup[-1]
            g = groups.get(rest)
            if g is None:
                g = np.zeros(cap + 1, dtype=complex)
                groups[rest] = g
            g[level] += amp
    return groups


def reduce_to_receiver(state: SectorState, d: int):
    """Receiver reduced density matrix over the d encoded levels.

    Returns (rho, leakage): rho is d x d over receiver levels 0..d-1 and
    leakage is the population stranded in levels >= d. Tr(rho) + leakage = 1
    for a normalized input; leakage counts as fidelity loss and is never
    renormalized away.
    """
    cap = state.blocks[0][0].cap
    if d > cap + 1:
        raise ValueError(f"d = {d} exceeds the local dimension {cap + 1}")
    full = np.zeros((cap + 1, cap + 1), dtype=complex)
    for g in _receiver_amplitude_groups(state).values():
        full += np.outer(g, g.conj())
    rho = full[:d, :d].copy()
    leakage = float(np.trace(full).real - np.trace(rho).real)
    return rho, leakage


def reduce_to_receiver_dense(psi_or_rho: np.ndarray, n_sites: int, local_dim: int, d: int):
    """Dense-space receiver reduction (oracle for the sector-blockwise path)."""
    if d > local_dim:
        raise ValueError(f"d = {d} exceeds the local dimension {local_dim}")
    arr = np.asarray(psi_or_rho, dtype=complex)
    if arr.ndim == 1:
        psi = arr.reshape((local_dim,) * n_sites)
        axes = list(range(n_sites - 1))
        full = np.tensordot(psi, psi.conj(), axes=(axes, axes))
    else:
        dim_rest = local_dim ** (n_sites - 1)
        rho4 = arr.reshape(dim_rest, local_dim, dim_rest, local_dim)
        full = np.trace(rho4, axis1=0, axis2=2)
    rho = full[:d, :d].copy()
    leakage = float(np.trace(full).real - np.trace(rho).real)
    return rho, leakage
