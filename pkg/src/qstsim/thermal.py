"""Thermal-bus experiments: Gibbs initial states and finite-temperature transfer.

The bus thermal Hamiltonian conserves the bus magnon number, so its Gibbs
state decomposes into eigenvector branches of definite magnon count. Each
branch evolves as a pure state under the full chain Hamiltonian; the receiver
state is the weight-averaged reduction, which is exact because the initial
density matrix is the same convex combination.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effective import effective_spectrum
from .fidelity import (
    QuditState,
    TransferChannel,
    channel_from_components,
    haar_average_exact,
    fidelity_samples,
    mean_and_stderr,
    sample_fubini_study_batch,
)
from .propagator import DensityMatrix, eigendecompose, evolve_sector_state, reduce_to_receiver
from .sectors import (
    SectorState,
    assemble_sector_hamiltonian,
    dense_hamiltonian,
    enumerate_sector,
)
from .spin_model import ChainParams, FieldTerm, HoppingTerm, IsingTerm, field_profile
from .fidelity import sector_eigensystems

__all__ = [
    "ThermalConfig",
    "ThermalBranch",
    "thermal_hamiltonian_terms",
    "thermal_bus_state",
    "thermal_branches",
    "thermal_channel",
    "thermal_transfer",
    "temperature_sweep",
]

THERMAL_CHOICES = ("bus_plus_field", "bus_only")

# relative degeneracy window for the T = 0 ground projection
_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class ThermalConfig:
    """Temperature and the choice of Hamiltonian entering the Gibbs weight.

    bus_only is the literal bus-bond Hamiltonian (zero for N = 1, hence
    maximally mixed at any T > 0); bus_plus_field also includes the bus-site
    Zeeman terms, which is the default and the only choice that produces a
    temperature dependence for the single-site bus.
    """

    T: float
    hamiltonian: str = "bus_plus_field"

    def __post_init__(self):
        if self.T < 0:
            raise ValueError("temperature must be >= 0")
        if self.hamiltonian not in THERMAL_CHOICES:
            raise ValueError(
                f"unknown thermal Hamiltonian {self.hamiltonian!r}; choose from {THERMAL_CHOICES}"
            )


def thermal_hamiltonian_terms(p: ChainParams, kind: str = "bus_plus_field") -> list:
    """Terms of the thermal Hamiltonian over the bus subchain (bus-local sites 0..N-1)."""
    if kind not in THERMAL_CHOICES:
        raise ValueError(f"unknown thermal Hamiltonian {kind!r}")
    terms = []
    for i in range(p.N - 1):
        terms.append(HoppingTerm(i, i + 1, -p.Omega0))
        terms.append(IsingTerm(i, i + 1, -p.Omegaz))
    if kind == "bus_plus_field":
        for i, B in enumerate(field_profile(p).B_bus):
            terms.append(FieldTerm(i, -B))
    return terms


def _gibbs_weights(energies: np.ndarray, T: float) -> np.ndarray:
    """Normalized Boltzmann weights; T = 0 projects on the (possibly
    degenerate) ground level."""
    e0 = float(np.min(energies))
    if T == 0.0:
        window = _DEGENERACY_TOL * max(1.0, abs(e0))
        ground = energies - e0 <= window
        return ground / ground.sum()
    w = np.exp(-(energies - e0) / T)
    return w / w.sum()


def thermal_bus_state(p: ChainParams, cfg: ThermalConfig) -> DensityMatrix:
    """Gibbs state e^(-H/T)/Z of the N-site bus over the full (2S+1)^N space."""
    dim = p.local_dim**p.N
    if dim > 20000:
        raise ValueError(f"bus dimension {dim} too large for a dense Gibbs state")
    H = dense_hamiltonian(thermal_hamiltonian_terms(p, cfg.hamiltonian), p.N, p.S)
    es = eigendecompose(H)
    w = _gibbs_weights(es.eigenvalues, cfg.T)
    rho = (es.eigenvectors * w) @ es.eigenvectors.conj().T
    return DensityMatrix(dim=dim, matrix=rho)


@dataclass(frozen=True)
class ThermalBranch:
    """One Gibbs eigenvector: weight, energy, bus magnon count and amplitudes."""

    weight: float
    energy: float
    basis: object
    vector: np.ndarray

    @property
    def magnons(self) -> int:
        return self.basis.n


def _bus_eigenbranches(p: ChainParams, kind: str) -> list:
    """All bus thermal eigenvectors, sector by sector (definite magnon count)."""
    terms = thermal_hamiltonian_terms(p, kind)
    branches = []
    for m in range(p.N * p.two_s + 1):
        basis = enumerate_sector(p.N, p.two_s, m)
        es = eigendecompose(assemble_sector_hamiltonian(terms, basis, S=p.S))
        for j in range(es.dim):
            branches.append((float(es.eigenvalues[j]), basis, es.eigenvectors[:, j]))
    return branches


def thermal_branches(p: ChainParams, cfg: ThermalConfig) -> list:
    """Spectral decomposition of the bus Gibbs state into weighted branches."""
    raw = _bus_eigenbranches(p, cfg.hamiltonian)
    energies = np.array([e for e, _, _ in raw])
    weights = _gibbs_weights(energies, cfg.T)
    return [
        ThermalBranch(weight=float(w), energy=e, basis=basis, vector=vec)
        for w, (e, basis, vec) in zip(weights, raw)
    ]


def _branch_component(p: ChainParams, branch_basis, branch_vector, u: int, amp: complex):
    """Chain-sector amplitudes of |u>_s (x) |v>_bus (x) |0>_r."""
    n = branch_basis.n + u
    basis = enumerate_sector(p.n_sites, p.two_s, n)
    vec = np.zeros(len(basis), dtype=complex)
    for a, bus_tup in zip(branch_vector, branch_basis.states):
        vec[basis.index[(u,) + bus_tup + (0,)]] = amp * a
    return basis, vec


def _branch_channel(p: ChainParams, branch, eigs, t: float) -> TransferChannel:
    components = []
    for u in range(p.d):
        basis, vec = _branch_component(p, branch.basis, branch.vector, u, 1.0)
        state = SectorState(blocks=((basis, vec),))
        components.append(evolve_sector_state(eigs, state, t))
    return channel_from_components(components, p.d)


def _needed_sectors(p: ChainParams) -> range:
    return range(p.N * p.two_s + p.d)


def thermal_channel(p: ChainParams, cfg: ThermalConfig, t: float | None = None) -> TransferChannel:
    """Process matrix of the transfer with a thermal bus: the weighted sum of
    the per-branch channels."""
    if t is None:
        t = effective_spectrum(p).tau
    eigs = sector_eigensystems(p, _needed_sectors(p))
    branches = thermal_branches(p, cfg)
    matrix = np.zeros((p.d**2, p.d**2), dtype=complex)
    leak = np.zeros((p.d, p.d), dtype=complex)
    for branch in branches:
        if branch.weight == 0.0:
            continue
        ch = _branch_channel(p, branch, eigs, t)
        matrix += branch.weight * ch.matrix
        leak += branch.weight * ch.leak
    return TransferChannel(d=p.d, matrix=matrix, leak=leak)


def thermal_transfer(p: ChainParams, phi: QuditState, cfg: ThermalConfig, t: float | None = None):
    """Receiver state for one input with the bus initially thermal.

    Evolves every Gibbs eigenvector branch as a pure state and convex
    combines the reductions; returns (rho_r, leakage).
    """
    if phi.d != p.d:
        raise ValueError(f"input is {phi.d}-level but the chain encodes d = {p.d}")
    if t is None:
        t = effective_spectrum(p).tau
    eigs = sector_eigensystems(p, _needed_sectors(p))
    rho = np.zeros((p.d, p.d), dtype=complex)
    leakage = 0.0
    for branch in thermal_branches(p, cfg):
        if branch.weight == 0.0:
            continue
        blocks = tuple(
            _branch_component(p, branch.basis, branch.vector, u, amp)
            for u, amp in enumerate(phi.amplitudes)
        )
        evolved = evolve_sector_state(eigs, SectorState(blocks=blocks), t)
        r, leak = reduce_to_receiver(evolved, p.d)
        rho += branch.weight * r
        leakage += branch.weight * leak
    return rho, leakage


def thermal_channels_by_temperature(
    p: ChainParams,
    temperatures,
    hamiltonian: str = "bus_plus_field",
    t: float | None = None,
) -> list:
    """Transfer channels for a whole temperature grid in one reconstruction.

    The per-branch channels do not depend on T; only the Gibbs weights move.
    """
    if t is None:
        t = effective_spectrum(p).tau
    eigs = sector_eigensystems(p, _needed_sectors(p))
    raw = _bus_eigenbranches(p, hamiltonian)
    energies = np.array([e for e, _, _ in raw])
    channels = []
    for e, basis, vec in raw:
        branch = ThermalBranch(weight=1.0, energy=e, basis=basis, vector=vec)
        channels.append(_branch_channel(p, branch, eigs, t))
    out = []
    for T in temperatures:
        w = _gibbs_weights(energies, float(T))
        matrix = sum(wj * ch.matrix for wj, ch in zip(w, channels) if wj != 0.0)
        leak = sum(wj * ch.leak for wj, ch in zip(w, channels) if wj != 0.0)
        out.append(TransferChannel(d=p.d, matrix=matrix, leak=leak))
    return out


def temperature_sweep(
    p: ChainParams,
    temperatures,
    samples: int = 20000,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    hamiltonian: str = "bus_plus_field",
    t: float | None = None,
) -> list:
    """Average fidelity against temperature; returns CSV-ready row dicts.

    The same input-state sample batch is reused at every temperature, so the
    T-trend comparisons are paired.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    if t is None:
        t = effective_spectrum(p).tau
    channels = thermal_channels_by_temperature(p, temperatures, hamiltonian, t)
    states = sample_fubini_study_batch(p.d, samples, rng)
    rows = []
    for T, combined in zip(temperatures, channels):
        mean, stderr = mean_and_stderr(fidelity_samples(combined, states))
        rows.append(
            {
                "T": float(T),
                "mean_fidelity": mean,
                "stderr": stderr,
                "exact_fidelity": haar_average_exact(combined),
                "leakage": float(np.trace(combined.leak).real / p.d),
                "tau": t,
            }
        )
    return rows
