"""Qudit inputs, transfer experiments, and average fidelity over random states.

The receiver state is linear in the sender density matrix, so the whole
transfer experiment collapses to a d^2 x d^2 process matrix reconstructed
from the d computational-ket evolutions. Average fidelity is then available
two independent ways: Monte Carlo over the unitarily invariant measure and a
closed quartic-moment sum; the two must agree and the tests enforce that.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .propagator import (
    DensityMatrix,
    eigendecompose,
    evolve_sector_state,
    reduce_to_receiver,
)
from .sectors import SectorState, assemble_sector_hamiltonian, enumerate_sector
from .spin_model import ChainParams, build_hamiltonian_terms, field_profile
from .effective import effective_spectrum

__all__ = [
    "QuditState",
    "HurwitzAngles",
    "TransferChannel",
    "hurwitz_state",
    "sample_hurwitz_angles",
    "sample_fubini_study",
    "sample_fubini_study_batch",
    "state_fidelity",
    "sector_eigensystems",
    "initial_sector_state",
    "channel_from_components",
    "reconstruct_channel",
    "run_transfer",
    "haar_average_exact",
    "haar_average_mc",
    "average_fidelity_exact",
    "average_fidelity_mc",
]


@dataclass(frozen=True)
class QuditState:
    """Pure d-level state: amplitudes on levels 0..d-1, unit norm."""

    d: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.d,):
            raise ValueError(f"expected {self.d} amplitudes, got shape {amps.shape}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"state norm^2 = {norm2} deviates from 1")


@dataclass(frozen=True)
class HurwitzAngles:
    """Angles (theta_1..theta_{d-1}, phi_1..phi_{d-1}) on the pure-state manifold."""

    thetas: tuple
    phis: tuple

    def __post_init__(self):
        if len(self.thetas) != len(self.phis):
            raise ValueError("need as many polar as azimuthal angles")
        for th in self.thetas:
            if not 0 <= th <= math.pi / 2 + 1e-12:
                raise ValueError(f"theta {th} outside [0, pi/2]")
        for ph in self.phis:
            if not 0 <= ph < 2 * math.pi + 1e-12:
                raise ValueError(f"phi {ph} outside [0, 2 pi)")


def hurwitz_state(angles: HurwitzAngles) -> QuditState:
    """Pure state from Hurwitz coordinates.

    Component 0 is cos(theta_{d-1}); each later component multiplies in one
    more sine and the matching phase, ending with prod(sin) e^{i phi_1}.
    """
    thetas, phis = angles.thetas, angles.phis
    d = len(thetas) + 1
    amps = np.zeros(d, dtype=complex)
    amps[0] = math.cos(thetas[d - 2]) if d > 1 else 1.0
    sin_run = 1.0
    for j in range(1, d):
        sin_run *= math.sin(thetas[d - 1 - j])
        if j < d - 1:
            amps[j] = sin_run * math.cos(thetas[d - 2 - j]) * np.exp(1j * phis[d - 1 - j])
        else:
            amps[j] = sin_run * np.exp(1j * phis[0])
    return QuditState(d=d, amplitudes=amps)


def sample_hurwitz_angles(d: int, rng: np.random.Generator) -> HurwitzAngles:
    """Draw angles with density prod_p cos(theta_p) sin(theta_p)^(2p-1).

    Inverse CDF per angle: sin^(2p)(theta_p) is uniform. Together with
    uniform phases this reproduces the unitarily invariant measure.
    """
    thetas = tuple(
        math.asin(rng.uniform() ** (1.0 / (2 * p))) for p in range(1, d)
    )
    phis = tuple(rng.uniform(0.0, 2 * math.pi) for _ in range(1, d))
    return HurwitzAngles(thetas=thetas, phis=phis)


def sample_fubini_study(d: int, rng: np.random.Generator) -> QuditState:
    """Haar-random pure state: normalized vector of complex Gaussians."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return QuditState(d=d, amplitudes=v / np.linalg.norm(v))


def sample_fubini_study_batch(d: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """(count, d) array of Haar-random pure states."""
    v = rng.standard_normal((count, d)) + 1j * rng.standard_normal((count, d))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def state_fidelity(phi, rho) -> float:
    """F = <phi| rho |phi>, real."""
    amps = phi.amplitudes if isinstance(phi, QuditState) else np.asarray(phi, dtype=complex)
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    if m.shape != (len(amps), len(amps)):
        raise ValueError(f"state of dim {len(amps)} vs density matrix {m.shape}")
    return float(np.vdot(amps, m @ amps).real)


@dataclass(frozen=True)
class TransferChannel:
    """Linear map rho_s -> rho_r as a d^2 x d^2 matrix on row-major vectorized
    operators, plus the leakage form tracking receiver weight above level d-1."""

    d: int
    matrix: np.ndarray
    leak: np.ndarray

    def apply(self, rho_s: np.ndarray) -> np.ndarray:
        rho_s = np.asarray(rho_s, dtype=complex)
        return (self.matrix @ rho_s.ravel()).reshape(self.d, self.d)

    def leakage(self, rho_s: np.ndarray) -> float:
        return float(np.sum(self.leak * np.asarray(rho_s)).real)

    def as_tensor(self) -> np.ndarray:
        """matrix reshaped to [u, u', n, n']."""
        return self.matrix.reshape(self.d, self.d, self.d, self.d)

    def choi(self) -> np.ndarray:
        """Choi matrix sum_{n,n'} |n><n'| (x) map(|n><n'|)."""
        t = self.as_tensor()  # [u, u', n, n']
        return t.transpose(2, 0, 3, 1).reshape(self.d**2, self.d**2)

    def phase_corrected(self, z: complex) -> "TransferChannel":
        """Undo a per-level phase z at the output: rho -> P^dag map(rho) P
        with P = diag(z^u)."""
        powers = np.asarray(z, dtype=complex) ** np.arange(self.d)
        t = self.as_tensor() * powers.conj()[:, None, None, None] * powers[None, :, None, None]
        return TransferChannel(d=self.d, matrix=t.reshape(self.d**2, self.d**2), leak=self.leak)

    def conjugated(self, U: np.ndarray) -> "TransferChannel":
        """Relabeled channel rho -> U^dag map(U rho U^dag) U."""
        t = self.as_tensor()
        t = np.einsum("au,abnm,bv,np,mq->uvpq", U.conj(), t, U, U, U.conj())
        leak = np.einsum("nm,np,mq->pq", self.leak, U, U.conj())
        return TransferChannel(d=self.d, matrix=t.reshape(self.d**2, self.d**2), leak=leak)


def channel_from_components(components, d: int, cp_warn_tol: float = 1e-8) -> TransferChannel:
    """Build the process matrix from the d evolved computational-ket states.

    components[u] is the evolved SectorState for sender level u (bus and
    receiver initially empty, or any other u-independent environment branch).
    Amplitudes are grouped by the configuration of everything but the
    receiver; matching configurations across components produce the
    off-diagonal channel elements.
    """
    if len(components) != d:
        raise ValueError(f"need {d} components, got {len(components)}")
    cap = components[0].blocks[0][0].cap
    groups = [_group_by_config(state, cap) for state in components]
    configs = sorted(set().union(*(g.keys() for g in groups)))
    A = np.zeros((len(configs), d, cap + 1), dtype=complex)
    for u, g in enumerate(groups):
        for ci, c in enumerate(configs):
            vec = g.get(c)
            if vec is not None:
                A[ci, u] = vec
    kept = A[:, :, :d]
    t = np.einsum("cuw,cvx->wxuv", kept, kept.conj())
    lost = A[:, :, d:]
    leak = np.einsum("cuw,cvw->uv", lost, lost.conj())
    channel = TransferChannel(d=d, matrix=t.reshape(d**2, d**2), leak=leak)
    min_eig = float(np.linalg.eigvalsh(channel.choi()).min())
    if min_eig < -cp_warn_tol:
        warnings.warn(
            f"reconstructed channel fails complete positivity: Choi min eigenvalue {min_eig:.3e}",
            stacklevel=2,
        )
    return channel


def _group_by_config(state: SectorState, cap: int) -> dict:
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


def sector_eigensystems(p: ChainParams, ns) -> dict:
    """Eigendecompose the chain Hamiltonian blocks for the listed sectors."""
    terms = build_hamiltonian_terms(p, field_profile(p))
    out = {}
    for n in ns:
        basis = enumerate_sector(p.n_sites, p.two_s, n)
        out[n] = eigendecompose(assemble_sector_hamiltonian(terms, basis, S=p.S))
    return out


def initial_sector_state(p: ChainParams, amplitudes) -> SectorState:
    """|phi>_s |0..0>_bus |0>_r as sector components weighted by alpha_u."""
    blocks = []
    for u, amp in enumerate(np.asarray(amplitudes, dtype=complex)):
        basis = enumerate_sector(p.n_sites, p.two_s, u)
        vec = np.zeros(len(basis), dtype=complex)
        vec[basis.index[(u,) + (0,) * (p.n_sites - 1)]] = amp
        blocks.append((basis, vec))
    return SectorState(blocks=tuple(blocks))


def run_transfer(p: ChainParams, phi: QuditState, t: float | None = None):
    """Full-spin transfer of one input state; returns (rho_r, leakage).

    The vacuum bus initial state populates only sectors 0..d-1, which the
    dynamics never leaves, so the evolution runs sector by sector.
    """
    if phi.d != p.d:
        raise ValueError(f"input is {phi.d}-level but the chain encodes d = {p.d}")
    if t is None:
        t = effective_spectrum(p).tau
    eigs = sector_eigensystems(p, range(p.d))
    state = initial_sector_state(p, phi.amplitudes)
    evolved = evolve_sector_state(eigs, state, t)
    return reduce_to_receiver(evolved, p.d)


def reconstruct_channel(p: ChainParams, t: float | None = None) -> TransferChannel:
    """Process matrix of the transfer at time t (default: the optimal time)."""
    if t is None:
        t = effective_spectrum(p).tau
    eigs = sector_eigensystems(p, range(p.d))
    components = []
    for u in range(p.d):
        amps = np.zeros(p.d)
        amps[u] = 1.0
        components.append(evolve_sector_state(eigs, initial_sector_state(p, amps), t))
    return channel_from_components(components, p.d)


def haar_average_exact(channel: TransferChannel) -> float:
    """Average of <phi| map(|phi><phi|) |phi> over Haar-random pure states.

    With E[a_x a_y cc(a_u) cc(a_v)] = (d(d+1))^-1 (delta_xu delta_yv +
    delta_xv delta_yu) the quartic form reduces to two traces of the process
    matrix. Validated against Monte Carlo in the test suite.
    """
    d = channel.d
    t = channel.as_tensor()
    tr_of_identity_image = np.einsum("uunn->", t).real
    tr_process = np.einsum("uvuv->", t).real
    return float((tr_of_identity_image + tr_process) / (d * (d + 1)))


def haar_average_mc(
    channel: TransferChannel,
    samples: int,
    rng: np.random.Generator,
    sampler: str = "gaussian",
):
    """Monte Carlo average fidelity; returns (mean, standard error).

    sampler="gaussian" draws normalized complex Gaussians; "hurwitz" draws
    the parametrized angles with their volume-element density. Both target
    the same invariant measure. Reduction uses compensated summation so the
    result does not depend on accumulation order.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    d = channel.d
    if sampler == "gaussian":
        states = sample_fubini_study_batch(d, samples, rng)
    elif sampler == "hurwitz":
        states = np.stack(
            [hurwitz_state(sample_hurwitz_angles(d, rng)).amplitudes for _ in range(samples)]
        )
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    fids = fidelity_samples(channel, states)
    return mean_and_stderr(fids)


def fidelity_samples(channel: TransferChannel, states: np.ndarray) -> np.ndarray:
    """F = <phi| map(|phi><phi|) |phi> for a (K, d) batch of pure states."""
    B = states[:, :, None] * states.conj()[:, None, :]
    B = B.reshape(states.shape[0], -1)
    out = B @ channel.matrix.T
    return np.sum(B.conj() * out, axis=1).real


def mean_and_stderr(values) -> tuple:
    """Order-insensitive sample mean and standard error via exact summation."""
    values = list(map(float, values))
    k = len(values)
    mean = math.fsum(values) / k
    if k == 1:
        return mean, 0.0
    var = math.fsum((v - mean) ** 2 for v in values) / (k - 1)
    return mean, math.sqrt(var / k)


def average_fidelity_exact(p: ChainParams, t: float | None = None) -> float:
    """Closed-form average transfer fidelity of the full spin model."""
    return haar_average_exact(reconstruct_channel(p, t))


def average_fidelity_mc(
    p: ChainParams,
    t: float | None = None,
    samples: int = 20000,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
):
    """Monte Carlo average transfer fidelity; returns (mean, standard error)."""
    if rng is None:
        rng = np.random.default_rng(seed)
    return haar_average_mc(reconstruct_channel(p, t), samples, rng)
