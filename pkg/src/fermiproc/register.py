"""Fermion-qubit register: some sites hold a fermionic mode, others a qubit.

Amplitudes are a ``(fermion_dim, 2**n_qubits)`` array.  Fermionic sites are
numbered as modes in site order (qubit sites are skipped, so they never sit
inside a Jordan-Wigner string).  Column bit ``q`` is 1 when qubit ``q`` is in
the ``|1>`` state and 0 for ``|1~>``; Pauli Z is +1 on ``|1>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fock import FockBasis, StateVector, build_basis

FERMION = "f"
QUBIT = "q"


@dataclass
class MixedRegister:
    kinds: tuple[str, ...]
    basis: FockBasis
    amplitudes: np.ndarray

    def __post_init__(self):
        self.kinds = tuple(self.kinds)
        if any(k not in (FERMION, QUBIT) for k in self.kinds):
            raise ValueError("site kinds must be 'f' or 'q'")
        if self.basis.L != self.n_modes:
            raise ValueError("fermionic basis does not match the number of fermionic sites")
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (self.basis.dim, 1 << self.n_qubits):
            raise ValueError(f"amplitude shape {self.amplitudes.shape} does not match register")

    @property
    def n_modes(self) -> int:
        return sum(k == FERMION for k in self.kinds)

    @property
    def n_qubits(self) -> int:
        return sum(k == QUBIT for k in self.kinds)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def mode_of(self, site: int) -> int:
        if self.kinds[site] != FERMION:
            raise ValueError(f"site {site} is a qubit site, not a fermionic mode")
        return sum(k == FERMION for k in self.kinds[:site])

    def qubit_of(self, site: int) -> int:
        if self.kinds[site] != QUBIT:
            raise ValueError(f"site {site} is a fermionic mode, not a qubit site")
        return sum(k == QUBIT for k in self.kinds[:site])

    @classmethod
    def product(
        cls,
        kinds: Sequence[str],
        fermions: Sequence[int] | str,
        qubits: Sequence[Sequence[complex]] | None = None,
        N: int | None = None,
    ) -> "MixedRegister":
        """Product state: fermionic occupations times single-qubit vectors.

        Each qubit vector is given as ``(amp_1tilde, amp_1)``; default ``|1~>``.
        ``N=None`` uses the particle number of ``fermions``; pass ``N="full"``
        semantics via :func:`empty_like_full` if the full Fock space is needed.
        """
        if isinstance(fermions, str):
            fermions = [int(c) for c in fermions]
        nf = sum(k == FERMION for k in kinds)
        nq = len(kinds) - nf
        basis = build_basis(nf, sum(fermions) if N is None else N)
        fvec = np.zeros(basis.dim, dtype=np.complex128)
        fvec[basis.index(basis.state_of(fermions))] = 1.0
        qvec = np.ones(1, dtype=np.complex128)
        qubits = list(qubits) if qubits is not None else [(1.0, 0.0)] * nq
        if len(qubits) != nq:
            raise ValueError(f"expected {nq} qubit vectors, got {len(qubits)}")
        for q in reversed(qubits):
            qvec = np.kron(qvec, np.asarray(q, dtype=np.complex128))
        # kron order above puts qubit 0 in the lowest column bit
        return cls(tuple(kinds), basis, np.outer(fvec, qvec))

    @classmethod
    def zeros(cls, kinds: Sequence[str], basis: FockBasis) -> "MixedRegister":
        nq = sum(k == QUBIT for k in kinds)
        return cls(tuple(kinds), basis, np.zeros((basis.dim, 1 << nq), dtype=np.complex128))

    def copy(self) -> "MixedRegister":
        return MixedRegister(self.kinds, self.basis, self.amplitudes.copy())

    def flat(self) -> np.ndarray:
        return self.amplitudes.reshape(-1)

    def with_flat(self, vec: np.ndarray) -> "MixedRegister":
        return MixedRegister(self.kinds, self.basis, np.asarray(vec).reshape(self.amplitudes.shape))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def inner(self, other: "MixedRegister") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def as_register(state: StateVector) -> MixedRegister:
    return MixedRegister((FERMION,) * state.basis.L, state.basis, state.amplitudes[:, None])
