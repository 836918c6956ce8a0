"""Occupation-number states of spinless fermionic modes.

A basis state is stored as an integer whose bit ``j`` is the occupation of
mode ``j``.  Bases are ordered by that integer, ascending, so for two modes
with one particle the order is ``|10>, |01>`` (mode 0 written leftmost).
Ladder operators carry the sign ``(-1)**(occupied modes below j)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .linalg import hermiticity_error

MAX_BASIS_DIM = 2_000_000
MAX_FULL_MODES = 24
DENSE_DIM_LIMIT = 4096


@dataclass(eq=False, frozen=True)
class FockBasis:
    """Ordered occupation basis over ``L`` modes, optionally at fixed ``N``."""

    L: int
    N: int | None
    states: np.ndarray
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return int(self.states.shape[0])

    @property
    def full(self) -> bool:
        return self.N is None

    def index(self, state: int) -> int:
        idx = self.indices(np.array([state], dtype=np.int64))[0]
        if idx < 0:
            raise KeyError(f"state {self.label_of(state)} not in basis")
        return int(idx)

    def indices(self, states: np.ndarray) -> np.ndarray:
        """Basis positions of integer states; -1 for states outside the basis."""
        states = np.asarray(states, dtype=np.int64)
        if self.full:
            ok = (states >= 0) & (states < self.dim)
            return np.where(ok, states, -1)
        pos = np.searchsorted(self.states, states)
        pos = np.minimum(pos, self.dim - 1)
        return np.where(self.states[pos] == states, pos, -1)

    def state_of(self, bits: Sequence[int]) -> int:
        if len(bits) != self.L:
            raise ValueError(f"expected {self.L} occupations, got {len(bits)}")
        return sum(int(b) << j for j, b in enumerate(bits))

    def label_of(self, state: int) -> str:
        return "".join(str((int(state) >> j) & 1) for j in range(self.L))

    def labels(self) -> list[str]:
        return [self.label_of(s) for s in self.states]

    @property
    def occupations(self) -> np.ndarray:
        """(dim, L) array of 0/1 occupations."""
        occ = self._cache.get("occ")
        if occ is None:
            occ = ((self.states[:, None] >> np.arange(self.L)) & 1).astype(np.int8)
            self._cache["occ"] = occ
        return occ

    def pair_table(self, creators: tuple[int, ...], annihilators: tuple[int, ...]):
        """``(src, dst, sign)`` with ``op |src> = sign |dst>`` for surviving states.

        Raises ``ValueError`` if the operator leaves the basis (sector mismatch).
        """
        key = ("pairs", tuple(creators), tuple(annihilators))
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        for m in (*creators, *annihilators):
            if not 0 <= m < self.L:
                raise IndexError(f"mode {m} outside [0, {self.L})")
        targets, signs = _kernels.ladder_image(
            self.states, np.asarray(creators, dtype=np.int64), np.asarray(annihilators, dtype=np.int64)
        )
        alive = targets >= 0
        dst = self.indices(targets[alive])
        if np.any(dst < 0):
            raise ValueError("operator maps states outside the basis (particle-number sector mismatch)")
        src = np.nonzero(alive)[0].astype(np.int64)
        out = (src, dst.astype(np.int64), signs[alive].astype(np.float64))
        self._cache[key] = out
        return out


def build_basis(L: int, N: int | None = None, max_dim: int = MAX_BASIS_DIM) -> FockBasis:
    """Fixed-``N`` sector of ``L`` modes, or the full ``2**L`` space when ``N`` is None."""
    if not isinstance(L, (int, np.integer)) or L < 1 or L > 62:
        raise ValueError(f"mode count must be an integer in [1, 62], got {L!r}")
    if N is None:
        if L > MAX_FULL_MODES:
            raise ValueError(f"full Fock space limited to {MAX_FULL_MODES} modes")
        dim = 1 << L
        if dim > max_dim:
            raise ValueError(f"basis dimension {dim} exceeds cap {max_dim}")
        return FockBasis(int(L), None, np.arange(dim, dtype=np.int64))
    if not 0 <= N <= L:
        raise ValueError(f"particle number must satisfy 0 <= N <= L, got N={N}, L={L}")
    dim = comb(L, N)
    if dim > max_dim:
        raise ValueError(f"basis dimension {dim} exceeds cap {max_dim}")
    states = np.fromiter(
        (sum(1 << j for j in c) for c in combinations(range(L), N)), dtype=np.int64, count=dim
    )
    states.sort()
    return FockBasis(int(L), int(N), states)


@dataclass(frozen=True)
class LadderTerm:
    """``coefficient * c+_{C0} c+_{C1} ... c_{A0} c_{A1} ...`` (operators in the listed order)."""

    creators: tuple[int, ...]
    annihilators: tuple[int, ...]
    coefficient: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "creators", tuple(int(i) for i in self.creators))
        object.__setattr__(self, "annihilators", tuple(int(i) for i in self.annihilators))
        for name, idx in (("creation", self.creators), ("annihilation", self.annihilators)):
            if any(i < 0 for i in idx):
                raise ValueError(f"negative mode index in {name} list")
            if len(set(idx)) != len(idx):
                raise ValueError(f"repeated index in {name} list {idx} (term vanishes identically)")

    @property
    def number_conserving(self) -> bool:
        return len(self.creators) == len(self.annihilators)

    def adjoint(self) -> "LadderTerm":
        return LadderTerm(self.annihilators[::-1], self.creators[::-1], np.conj(self.coefficient))


def number_term(i: int, coefficient: complex = 1.0) -> LadderTerm:
    return LadderTerm((i,), (i,), coefficient)


def hopping_terms(i: int, j: int, amplitude: complex = 1.0) -> list[LadderTerm]:
    """``amplitude c+_i c_j + h.c.``"""
    return [LadderTerm((i,), (j,), amplitude), LadderTerm((j,), (i,), np.conj(amplitude))]


@dataclass
class StateVector:
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dim,):
            raise ValueError(f"amplitude shape {self.amplitudes.shape} != ({self.basis.dim},)")

    @classmethod
    def from_occupation(cls, basis: FockBasis, bits: Sequence[int] | str) -> "StateVector":
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits]
        amps = np.zeros(basis.dim, dtype=np.complex128)
        amps[basis.index(basis.state_of(bits))] = 1.0
        return cls(basis, amps)

    @classmethod
    def random(cls, basis: FockBasis, rng: np.random.Generator) -> "StateVector":
        v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
        return cls(basis, v / np.linalg.norm(v))

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def amplitude(self, bits: Sequence[int] | str) -> complex:
        if isinstance(bits, str):
            bits = [int(ch) for ch in bits]
        return complex(self.amplitudes[self.basis.index(self.basis.state_of(bits))])


def apply_ladder(term: LadderTerm, state: StateVector) -> StateVector:
    """Exact action of one ladder term (result is not renormalised)."""
    basis = state.basis
    if basis.N is not None and not term.number_conserving:
        raise ValueError("term changes particle number but basis is a fixed-N sector")
    src, dst, sign = basis.pair_table(term.creators, term.annihilators)
    out = np.zeros(basis.dim, dtype=np.complex128)
    np.add.at(out, dst, term.coefficient * sign * state.amplitudes[src])
    return StateVector(basis, out)


def dense_matrix(terms: Iterable[LadderTerm], basis: FockBasis, max_dim: int = DENSE_DIM_LIMIT) -> np.ndarray:
    """Sum of ``terms`` as a dense matrix on ``basis``.  No Hermitian closure is added."""
    if basis.dim > max_dim:
        raise ValueError(f"dense matrix of dimension {basis.dim} exceeds limit {max_dim}")
    m = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for term in terms:
        if basis.N is not None and not term.number_conserving:
            raise ValueError("non-number-conserving term on a fixed-N basis")
        src, dst, sign = basis.pair_table(term.creators, term.annihilators)
        np.add.at(m, (dst, src), term.coefficient * sign)
    return m


def ground_state(matrix: np.ndarray, tol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Lowest eigenpair; the first non-negligible amplitude is made real-positive."""
    matrix = np.asarray(matrix)
    if hermiticity_error(matrix) > tol:
        raise ValueError("matrix is not Hermitian")
    w, v = np.linalg.eigh(matrix)
    vec = v[:, 0]
    k = int(np.argmax(np.abs(vec) > 1e-10))
    vec = vec * (abs(vec[k]) / vec[k])
    return float(w[0]), vec
