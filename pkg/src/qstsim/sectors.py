"""Fixed-total-magnon occupation bases and sector-restricted Hamiltonian assembly.

The chain Hamiltonian commutes with the total boson number, so it block
diagonalizes over bases of occupation tuples (n_s, n_1, ..., n_N, n_r) with a
fixed sum and a per-site cap of 2S. Assembly supports two matrix-element
models: the exact spin ladder factors and the linearized (free-boson) ones.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp_sparse

from .spin_model import FieldTerm, HoppingTerm, IsingTerm, spin_operators

__all__ = [
    "SectorBasis",
    "OperatorMatrix",
    "SectorState",
    "enumerate_sector",
    "assemble_sector_hamiltonian",
    "dense_hamiltonian",
    "total_magnon_operator",
    "embed_state",
    "sector_state_to_dense",
    "dump_sector",
]

# blocks at or above this dimension are stored as sparse triplets
DENSE_THRESHOLD = 512


@dataclass(frozen=True)
class SectorBasis:
    """Ordered occupation-number basis of one total-magnon sector.

    states are all tuples of length `sites` with entries in 0..cap summing to
    n, in lexicographic order; index maps a tuple back to its position.
    """

    sites: int
    cap: int
    n: int
    states: tuple
    index: dict

    def __len__(self) -> int:
        return len(self.states)


def _compositions(sites: int, cap: int, n: int):
    """Yield bounded compositions of n into `sites` parts, lexicographically."""
    if sites == 1:
        if 0 <= n <= cap:
            yield (n,)
        return
    for first in range(min(cap, n) + 1):
        for rest in _compositions(sites - 1, cap, n - first):
            yield (first,) + rest


def enumerate_sector(sites: int, cap: int, n: int) -> SectorBasis:
    """Canonical basis of the n-magnon sector with per-site cap."""
    if sites < 1 or cap < 1:
        raise ValueError(f"need sites >= 1 and cap >= 1, got sites={sites}, cap={cap}")
    if not 0 <= n <= sites * cap:
        raise ValueError(
            f"magnon number n={n} out of range 0..{sites * cap}: sector is empty"
        )
    states = tuple(_compositions(sites, cap, n))
    index = {t: i for i, t in enumerate(states)}
    return SectorBasis(sites=sites, cap=cap, n=n, states=states, index=index)


@dataclass(frozen=True)
class OperatorMatrix:
    """Hermitian matrix of a Hamiltonian block together with its basis.

    basis is None for full-space matrices. data is dense below
    DENSE_THRESHOLD and a sparse CSR matrix above it.
    """

    basis: SectorBasis | None
    data: object

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def toarray(self) -> np.ndarray:
        if sp_sparse.issparse(self.data):
            return self.data.toarray()
        return self.data


def _hop_amplitude(ni: int, nj: int, two_s: int, boson: bool) -> float:
    """Matrix element for moving one boson i -> j, from (ni, nj) occupancies."""
    if boson:
        return (ni * (nj + 1.0)) ** 0.5 * two_s
    return (ni * (two_s - ni + 1.0) * (nj + 1.0) * (two_s - nj)) ** 0.5


def _diagonal_energy(state, terms, S: float, boson: bool) -> float:
    e = 0.0
    for term in terms:
        if isinstance(term, IsingTerm):
            ni, nj = state[term.i], state[term.j]
            if boson:
                e += term.coeff * (S * S - S * (ni + nj))
            else:
                e += term.coeff * (S - ni) * (S - nj)
        elif isinstance(term, FieldTerm):
            e += term.coeff * (S - state[term.i])
    return e


def assemble_sector_hamiltonian(
    terms, basis: SectorBasis, S: float | None = None, mode: str = "spin"
) -> OperatorMatrix:
    """Hamiltonian block over one sector basis.

    mode="spin" uses the exact ladder factors sqrt(n(2S-n+1)) with S inferred
    from the basis cap (cap = 2S); mode="boson" uses the linearized
    Holstein-Primakoff amplitudes sqrt(2S n) at an arbitrary truncation cap,
    which requires S explicitly.
    """
    if mode not in ("spin", "boson"):
        raise ValueError(f"unknown mode {mode!r}")
    boson = mode == "boson"
    if S is None:
        if boson:
            raise ValueError("mode='boson' needs S (cap is a truncation, not 2S)")
        S = basis.cap / 2.0
    two_s = int(round(2 * S))
    if not boson and basis.cap != two_s:
        raise ValueError(f"spin-mode basis cap {basis.cap} != 2S = {two_s}")

    for term in terms:
        sites = (term.i, term.j) if hasattr(term, "j") else (term.i,)
        for s in sites:
            if not 0 <= s < basis.sites:
                raise ValueError(f"term site {s} outside chain of {basis.sites} sites")

    dim = len(basis)
    rows, cols, vals = [], [], []
    hops = [t for t in terms if isinstance(t, HoppingTerm)]
    for a, state in enumerate(basis.states):
        e = _diagonal_energy(state, terms, S, boson)
        if e != 0.0:
            rows.append(a)
            cols.append(a)
            vals.append(e)
        for hop in hops:
            for i, j in ((hop.i, hop.j), (hop.j, hop.i)):
                ni, nj = state[i], state[j]
                if ni == 0 or nj == basis.cap:
                    continue
                moved = list(state)
                moved[i] -= 1
                moved[j] += 1
                b = basis.index[tuple(moved)]
                rows.append(b)
                cols.append(a)
                vals.append(hop.coeff * _hop_amplitude(ni, nj, two_s, boson))

    if dim >= DENSE_THRESHOLD:
        data = sp_sparse.csr_matrix(
            (np.asarray(vals, dtype=complex), (rows, cols)), shape=(dim, dim)
        )
    else:
        data = np.zeros((dim, dim), dtype=complex)
        np.add.at(data, (rows, cols), vals)
    return OperatorMatrix(basis=basis, data=data)


def _site_operator(op: np.ndarray, site: int, n_sites: int, local_dim: int) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for k in range(n_sites):
        out = np.kron(out, op if k == site else np.eye(local_dim, dtype=complex))
    return out


def dense_hamiltonian(terms, n_sites: int, S) -> np.ndarray:
    """Full-space chain Hamiltonian via Kronecker products (oracle path).

    Exact spin matrix elements; dimension (2S+1)**n_sites, so only usable at
    desk scale.
    """
    ops = spin_operators(S)
    L = ops.dim
    H = np.zeros((L**n_sites, L**n_sites), dtype=complex)
    for term in terms:
        if isinstance(term, HoppingTerm):
            pi = _site_operator(ops.sp, term.i, n_sites, L)
            mj = _site_operator(ops.sm, term.j, n_sites, L)
            H += term.coeff * (pi @ mj + mj.conj().T @ pi.conj().T)
        elif isinstance(term, IsingTerm):
            zi = _site_operator(ops.sz, term.i, n_sites, L)
            zj = _site_operator(ops.sz, term.j, n_sites, L)
            H += term.coeff * (zi @ zj)
        elif isinstance(term, FieldTerm):
            H += term.coeff * _site_operator(ops.sz, term.i, n_sites, L)
        else:
            raise TypeError(f"unknown term {term!r}")
    return H


def total_magnon_operator(n_sites: int, S) -> np.ndarray:
    """Dense N_tot = sum_i (S - Sz_i), the conserved total boson number."""
    ops = spin_operators(S)
    L = ops.dim
    number = S * np.eye(L, dtype=complex) - ops.sz
    out = np.zeros((L**n_sites, L**n_sites), dtype=complex)
    for site in range(n_sites):
        out += _site_operator(number, site, n_sites, L)
    return out


@dataclass(frozen=True)
class SectorState:
    """Pure state as a direct sum of sector components: list of (basis, vector)."""

    blocks: tuple

    def norm(self) -> float:
        return float(
            np.sqrt(sum(np.vdot(v, v).real for _, v in self.blocks))
        )


def embed_state(blocks) -> SectorState:
    """Assemble sector components into one normalized block state."""
    blocks = tuple((b, np.asarray(v, dtype=complex)) for b, v in blocks)
    if not blocks:
        raise ValueError("no sector components given")
    sites = blocks[0][0].sites
    cap = blocks[0][0].cap
    for basis, vec in blocks:
        if vec.shape != (len(basis),):
            raise ValueError(
                f"amplitude vector of length {vec.shape} does not match basis size {len(basis)}"
            )
        if basis.sites != sites or basis.cap != cap:
            raise ValueError("sector components belong to different chains")
    state = SectorState(blocks=blocks)
    if abs(state.norm() - 1.0) > 1e-10:
        raise ValueError(f"joint norm {state.norm()} != 1")
    return state


def sector_state_to_dense(state: SectorState, n_sites: int, local_dim: int) -> np.ndarray:
    """Flatten a sector-block state into the full tensor-product space."""
    psi = np.zeros(local_dim**n_sites, dtype=complex)
    for basis, vec in state.blocks:
        if basis.sites != n_sites or basis.cap != local_dim - 1:
            raise ValueError("sector basis does not match the requested dense space")
        for amp, tup in zip(vec, basis.states):
            flat = 0
            for occ in tup:
                flat = flat * local_dim + occ
            psi[flat] = amp
    return psi


def dump_sector(basis: SectorBasis, matrix: OperatorMatrix | np.ndarray) -> str:
    """Plain-text dump of a sector block, one 'tuple : row' line per state."""
    data = matrix.toarray() if isinstance(matrix, OperatorMatrix) else np.asarray(matrix)
    lines = []
    for i, tup in enumerate(basis.states):
        row = " ".join(format(x, ".12g") for x in data[i].real)
        lines.append(f"{tup} : {row}")
    return "\n".join(lines) + "\n"
