"""Spin-S chain model: site operators, engineered field profile, Hamiltonian terms.

The chain has N+2 sites ordered (sender, bus 1..N, receiver). Each site is a
spin S, and the local basis is ordered by boson (magnon) number n = S - m, so
index 0 is the fully polarized state m = S and the ferromagnetic reference
state of the whole chain is the all-zeros occupation tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ChainParams",
    "FieldProfile",
    "SpinOperators",
    "FieldTerm",
    "HoppingTerm",
    "IsingTerm",
    "spin_operators",
    "field_profile",
    "build_hamiltonian_terms",
]


def _check_half_integer(S) -> int:
    """Return 2S as an int, rejecting non-positive or non-half-integer S."""
    two_s = 2 * S
    if abs(two_s - round(two_s)) > 1e-12 or round(two_s) <= 0:
        raise ValueError(f"S must be a positive half-integer, got {S}")
    return int(round(two_s))


@dataclass(frozen=True)
class ChainParams:
    """All physical constants of the chain.

    Energies are ratios to the xy-plane bus coupling, so Omega0 = 1 is the
    conventional unit choice. Times are in 1/Omega0.

    Attributes
    ----------
    N : bus length (sites 1..N between the two registers)
    S : spin quantum number, positive half-integer
    d : qudit dimension encoded in the lowest d levels of the sender
    Omega0 : xy-plane coupling inside the bus
    Omegaz : z-direction coupling inside the bus
    omega0 : xy-plane register-bus coupling
    omegaz : z-direction register-bus coupling
    h : field offset used by the N = 1 profile
    """

    N: int
    S: float
    d: int
    Omegaz: float
    omega0: float
    omegaz: float
    Omega0: float = 1.0
    h: float = 0.0

    def __post_init__(self):
        if self.N < 1 or int(self.N) != self.N:
            raise ValueError(f"N must be a positive integer, got {self.N}")
        two_s = _check_half_integer(self.S)
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"d must be an integer >= 2, got {self.d}")
        if two_s + 1 < self.d:
            raise ValueError(
                f"encoding space does not fit the spin ladder: 2S+1 = {two_s + 1} < d = {self.d}"
            )
        if self.Omega0 <= 0:
            raise ValueError("Omega0 must be strictly positive")
        # The z-couplings and the register coupling admit zero limits
        # (decoupled registers, XX chain); negative values are rejected.
        for name in ("Omegaz", "omega0", "omegaz", "h"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def two_s(self) -> int:
        """2S as an exact integer (also the per-site boson cap)."""
        return _check_half_integer(self.S)

    @property
    def local_dim(self) -> int:
        return self.two_s + 1

    @property
    def n_sites(self) -> int:
        """Total chain length including both registers."""
        return self.N + 2


@dataclass(frozen=True)
class FieldProfile:
    """Local z-fields on (sender, bus sites, receiver)."""

    B_s: float
    B_r: float
    B_bus: tuple

    def site_fields(self) -> tuple:
        """Fields in chain order (s, 1..N, r)."""
        return (self.B_s,) + tuple(self.B_bus) + (self.B_r,)


@dataclass(frozen=True)
class SpinOperators:
    """Ladder and z matrices for one spin-S site, basis ordered by n = S - m."""

    dim: int
    sp: np.ndarray
    sm: np.ndarray
    sz: np.ndarray


def spin_operators(S) -> SpinOperators:
    """Spin matrices for spin S in the Sz eigenbasis ordered by descending m.

    Index n corresponds to m = S - n, i.e. to the local boson number, so
    sz = diag(S, S-1, ..., -S) and <n-1|S+|n> = sqrt(n (2S - n + 1)).
    """
    two_s = _check_half_integer(S)
    dim = two_s + 1
    n = np.arange(1, dim)
    raise_amp = np.sqrt(n * (two_s - n + 1.0))
    sp = np.zeros((dim, dim), dtype=complex)
    sp[n - 1, n] = raise_amp
    sz = np.diag(S - np.arange(dim)).astype(complex)
    return SpinOperators(dim=dim, sp=sp, sm=sp.conj().T, sz=sz)


def field_profile(p: ChainParams) -> FieldProfile:
    """Engineered z-field making the registers resonant with the bus zero mode.

    For N >= 3 the registers sit at 2*Omegaz*S, the bus ends at Omegaz*S and
    the bus interior at omegaz*S. For N = 1 the profile degenerates to
    B_s = B_r = omegaz*S + h with B_1 = h. Even N is rejected: the protocol
    needs the odd-N zero-energy collective mode.
    """
    if p.N % 2 == 0:
        raise ValueError(
            f"N = {p.N} is even; the transfer protocol requires an odd-length bus "
            "(the resonant zero-energy mode exists only for odd N)"
        )
    if p.N == 1:
        return FieldProfile(
            B_s=p.omegaz * p.S + p.h,
            B_r=p.omegaz * p.S + p.h,
            B_bus=(p.h,),
        )
    edge = p.Omegaz * p.S
    interior = p.omegaz * p.S
    bus = (edge,) + (interior,) * (p.N - 2) + (edge,)
    return FieldProfile(B_s=2 * p.Omegaz * p.S, B_r=2 * p.Omegaz * p.S, B_bus=bus)


@dataclass(frozen=True)
class HoppingTerm:
    """coeff * (S+_i S-_j + S-_i S+_j) on the bond (i, j)."""

    i: int
    j: int
    coeff: float


@dataclass(frozen=True)
class IsingTerm:
    """coeff * Sz_i Sz_j on the bond (i, j)."""

    i: int
    j: int
    coeff: float


@dataclass(frozen=True)
class FieldTerm:
    """coeff * Sz_i (coeff carries the -B_i sign)."""

    i: int
    coeff: float


def build_hamiltonian_terms(p: ChainParams, f: FieldProfile | None = None) -> list:
    """Local terms of the full chain Hamiltonian over sites (s, 1..N, r).

    Site indices are 0-based chain positions: 0 = sender, 1..N = bus,
    N+1 = receiver. Hopping and Ising bonds carry the overall minus signs of
    the model; no global matrix is formed here.
    """
    if f is None:
        f = field_profile(p)
    if len(f.B_bus) != p.N:
        raise ValueError(f"field profile has {len(f.B_bus)} bus sites, chain has {p.N}")
    terms = []
    # bus bonds (i, i+1) for bus sites 1..N-1
    for i in range(1, p.N):
        terms.append(HoppingTerm(i, i + 1, -p.Omega0))
        terms.append(IsingTerm(i, i + 1, -p.Omegaz))
    # register bonds (s, 1) and (N, r)
    terms.append(HoppingTerm(0, 1, -p.omega0))
    terms.append(IsingTerm(0, 1, -p.omegaz))
    terms.append(HoppingTerm(p.N, p.N + 1, -p.omega0))
    terms.append(IsingTerm(p.N, p.N + 1, -p.omegaz))
    # Zeeman terms on every site
    for site, B in enumerate(f.site_fields()):
        terms.append(FieldTerm(site, -B))
    return terms
