"""Native fermionic gates, qubit rotations and their hardware protocols.

Every gate is a :class:`GateSpec`.  Gate actions are closed-form: two-level
rotations on pairs of basis states for tunneling-type gates and phase masks
for diagonal ones.  ``generator_terms`` gives the ladder-operator generator
of each fermionic gate so that tests can compare against a dense exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .fock import FockBasis, LadderTerm, StateVector, build_basis
from .register import FERMION, QUBIT, MixedRegister

# kind -> (number of target sites, number of parameters)
ARITY = {
    "t": (2, 3),
    "int": (2, 1),
    "n": (1, 1),
    "dt": (3, 2),
    "pt": (4, 2),
    "ryd": (2, 2),
    "rx": (1, 1),
    "rz": (1, 1),
}
TWO_LEVEL = {"t", "dt", "pt"}
DIAGONAL = {"int", "n", "ryd"}
QUBIT_ONLY = {"rx", "rz"}


@dataclass(frozen=True)
class GateSpec:
    kind: str
    sites: tuple[int, ...]
    params: tuple[float, ...]
    control: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "sites", tuple(int(s) for s in self.sites))
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind not in ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        n_sites, n_par = ARITY[self.kind]
        if len(self.sites) != n_sites:
            raise ValueError(f"{self.kind} gate acts on {n_sites} sites, got {self.sites}")
        if len(self.params) != n_par:
            raise ValueError(f"{self.kind} gate takes {n_par} parameters, got {self.params}")
        every = self.sites + ((self.control,) if self.control is not None else ())
        if len(set(every)) != len(every):
            raise ValueError(f"duplicate target sites in {self.kind} gate: {every}")
        if not all(math.isfinite(p) for p in self.params):
            raise ValueError("gate parameters must be finite")

    @property
    def all_sites(self) -> tuple[int, ...]:
        return self.sites if self.control is None else (self.control, *self.sites)

    def inverse(self) -> "GateSpec":
        p = self.params
        if self.kind == "t":
            q = (-p[0], p[1], -p[2])
        elif self.kind in ("dt", "pt"):
            q = (-p[0], p[1])
        else:
            q = tuple(-x for x in p)
        return GateSpec(self.kind, self.sites, q, self.control)

    def controlled(self, control: int) -> "GateSpec":
        if self.control is not None:
            raise ValueError("gate is already controlled")
        return GateSpec(self.kind, self.sites, self.params, control)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def tunneling_gate(i: int, j: int, theta1: float, theta2: float = 0.0, theta3: float = 0.0) -> GateSpec:
    """``exp(-i[(theta1/2)(e^{-i theta2} c+_i c_j + h.c.) + (theta3/2)(n_i - n_j)])``."""
    return GateSpec("t", (i, j), (theta1, theta2, theta3))


def interaction_gate(i: int, j: int, theta: float) -> GateSpec:
    """``exp(-i theta n_i n_j)``."""
    return GateSpec("int", (i, j), (theta,))


def number_gate(i: int, theta: float) -> GateSpec:
    """``exp(-i theta n_i)``."""
    return GateSpec("n", (i,), (theta,))


def dt_gate(i: int, j: int, k: int, theta1: float, theta2: float = 0.0) -> GateSpec:
    """Density-dependent tunneling ``exp(-i theta1 (e^{-i theta2} c+_i n_j c_k + h.c.))``."""
    return GateSpec("dt", (i, j, k), (theta1, theta2))


def pt_gate(i: int, j: int, k: int, l: int, theta1: float, theta2: float = 0.0) -> GateSpec:
    """Pair tunneling ``exp(-i theta1 (e^{-i theta2} c+_i c+_j c_k c_l + h.c.))``."""
    return GateSpec("pt", (i, j, k, l), (theta1, theta2))


def rydberg_gate(i: int, j: int, phi01: float, phi11: float) -> GateSpec:
    """Blockade pulse: phase ``phi01`` on singly occupied pairs, ``phi11`` on ``|11>``."""
    return GateSpec("ryd", (i, j), (phi01, phi11))


def qubit_rotation(axis: str, site: int, theta: float) -> GateSpec:
    """``exp(-i theta/2 X)`` or ``exp(-i theta/2 Z)`` on the ``{|1~>, |1>}`` qubit."""
    if axis not in ("x", "z"):
        raise ValueError("axis must be 'x' or 'z'")
    return GateSpec("r" + axis, (site,), (theta,))


def controlled_interaction(control: int, j: int, k: int, theta: float = math.pi) -> GateSpec:
    """``|1~><1~| x 1 + |1><1| x U_int_jk(theta)`` with a qubit control."""
    return GateSpec("int", (j, k), (theta,), control)


def controlled_tunneling(control: int, i: int, j: int, theta1: float, theta2: float = 0.0, theta3: float = 0.0) -> GateSpec:
    return GateSpec("t", (i, j), (theta1, theta2, theta3), control)


# ---------------------------------------------------------------------------
# generators (for oracle comparisons)
# ---------------------------------------------------------------------------

def generator_terms(gate: GateSpec) -> list[LadderTerm]:
    """Ladder terms ``H`` with ``gate = exp(-i H)`` for uncontrolled fermionic gates."""
    if gate.control is not None:
        raise ValueError("generator_terms covers uncontrolled gates only")
    k, s, p = gate.kind, gate.sites, gate.params
    if k == "t":
        i, j = s
        a = 0.5 * p[0] * np.exp(-1j * p[1])
        return [
            LadderTerm((i,), (j,), a),
            LadderTerm((j,), (i,), np.conj(a)),
            LadderTerm((i,), (i,), 0.5 * p[2]),
            LadderTerm((j,), (j,), -0.5 * p[2]),
        ]
    if k == "int":
        i, j = s
        # n_i n_j = c+_i c+_j c_j c_i
        return [LadderTerm((i, j), (j, i), p[0])]
    if k == "n":
        return [LadderTerm(s, s, p[0])]
    if k == "dt":
        i, j, kk = s
        a = p[0] * np.exp(-1j * p[1])
        t = LadderTerm((i, j), (j, kk), a)
        return [t, t.adjoint()]
    if k == "pt":
        a = p[0] * np.exp(-1j * p[1])
        t = LadderTerm(s[:2], s[2:], a)
        return [t, t.adjoint()]
    if k == "ryd":
        i, j = s
        phi01, phi11 = p
        return [
            LadderTerm((i,), (i,), -phi01),
            LadderTerm((j,), (j,), -phi01),
            LadderTerm((i, j), (j, i), -(phi11 - 2 * phi01)),
        ]
    raise ValueError(f"{k} gates have no fermionic generator")


# ---------------------------------------------------------------------------
# application
# ---------------------------------------------------------------------------

class _Frame:
    """Uniform view of a StateVector, MixedRegister or a stack of column vectors."""

    def __init__(self, basis: FockBasis, amps: np.ndarray, kinds: tuple[str, ...] | None):
        self.basis = basis
        self.amps = amps
        self.kinds = kinds

    def mode(self, site: int) -> int:
        if self.kinds is None:
            if not 0 <= site < self.basis.L:
                raise IndexError(f"site {site} outside register of {self.basis.L} modes")
            return site
        if self.kinds[site] != FERMION:
            raise ValueError(f"site {site} is a qubit site; this gate needs a fermionic mode")
        return sum(k == FERMION for k in self.kinds[:site])

    def qubit(self, site: int) -> int:
        if self.kinds is None or self.kinds[site] != QUBIT:
            raise ValueError(f"site {site} is not a qubit site")
        return sum(k == QUBIT for k in self.kinds[:site])

    def is_qubit(self, site: int) -> bool:
        return self.kinds is not None and self.kinds[site] == QUBIT

    def occupation(self, site: int) -> np.ndarray:
        """0/1 occupation of a site, broadcastable against ``amps``."""
        if self.is_qubit(site):
            q = self.qubit(site)
            return ((np.arange(self.amps.shape[1]) >> q) & 1)[None, :]
        return self.basis.occupations[:, self.mode(site)][:, None]

    def columns(self, control: int | None) -> np.ndarray:
        cols = np.arange(self.amps.shape[1], dtype=np.int64)
        if control is None:
            return cols
        q = self.qubit(control)
        return cols[(cols >> q) & 1 == 1]


def _block_unitary(d1: float, d2: float, g: complex) -> np.ndarray:
    """``exp(-i [[d1, g], [g*, d2]])`` in closed form."""
    mean = 0.5 * (d1 + d2)
    half = 0.5 * (d1 - d2)
    r = math.hypot(half, abs(g))
    c = math.cos(r)
    sr = math.sin(r) / r if r > 1e-300 else 1.0
    ph = np.exp(-1j * mean)
    return ph * np.array(
        [[c - 1j * sr * half, -1j * sr * g], [-1j * sr * np.conj(g), c + 1j * sr * half]],
        dtype=np.complex128,
    )


def _apply_frame(gate: GateSpec, fr: _Frame) -> None:
    k, s, p = gate.kind, gate.sites, gate.params
    if gate.control is not None:
        fr.qubit(gate.control)  # validates designation
    if k in TWO_LEVEL:
        modes = [fr.mode(x) for x in s]
        if k == "t":
            cre, ann = (modes[0],), (modes[1],)
            u = _block_unitary(0.5 * p[2], -0.5 * p[2], 0.5 * p[0] * np.exp(-1j * p[1]))
        elif k == "dt":
            cre, ann = (modes[0], modes[1]), (modes[1], modes[2])
            u = _block_unitary(0.0, 0.0, p[0] * np.exp(-1j * p[1]))
        else:
            cre, ann = (modes[0], modes[1]), (modes[2], modes[3])
            u = _block_unitary(0.0, 0.0, p[0] * np.exp(-1j * p[1]))
        src, dst, sign = fr.basis.pair_table(cre, ann)
        _kernels.apply_two_level(fr.amps, dst, src, sign, u, fr.columns(gate.control))
        return
    if k in DIAGONAL:
        if k == "ryd":
            na, nb = fr.occupation(s[0]), fr.occupation(s[1])
            single = (na + nb == 1)
            phase_angle = p[0] * single + p[1] * (na * nb)
            phase = np.exp(1j * phase_angle)
        else:
            occ = fr.occupation(s[0])
            for x in s[1:]:
                occ = occ * fr.occupation(x)
            phase = np.exp(-1j * p[0] * occ)
        if gate.control is not None:
            ctrl = fr.occupation(gate.control)
            phase = np.where(ctrl == 1, phase, 1.0)
        fr.amps *= phase
        return
    # qubit rotations
    q = fr.qubit(s[0])
    theta = p[0]
    c, sn = math.cos(theta / 2), math.sin(theta / 2)
    cols = fr.columns(gate.control)
    lo = cols[(cols >> q) & 1 == 0]
    hi = lo | (1 << q)
    x = fr.amps[:, lo].copy()  # |1~>
    y = fr.amps[:, hi].copy()  # |1>
    if k == "rx":
        fr.amps[:, lo] = c * x - 1j * sn * y
        fr.amps[:, hi] = -1j * sn * x + c * y
    else:
        # Z = +1 on |1>
        fr.amps[:, lo] = np.exp(1j * theta / 2) * x
        fr.amps[:, hi] = np.exp(-1j * theta / 2) * y


def apply_gate(gate: GateSpec, state):
    """Return a new state with ``gate`` applied (StateVector or MixedRegister)."""
    return apply_gates([gate], state)


def apply_gates(gates: Sequence[GateSpec], state):
    if isinstance(state, StateVector):
        amps = state.amplitudes.copy()[:, None]
        fr = _Frame(state.basis, amps, None)
        for g in gates:
            _apply_frame(g, fr)
        return StateVector(state.basis, amps[:, 0])
    if isinstance(state, MixedRegister):
        amps = state.amplitudes.copy()
        fr = _Frame(state.basis, amps, state.kinds)
        for g in gates:
            _apply_frame(g, fr)
        return MixedRegister(state.kinds, state.basis, amps)
    raise TypeError(f"cannot apply gates to {type(state).__name__}")


def apply_to_columns(gates: Sequence[GateSpec], basis: FockBasis, columns: np.ndarray) -> np.ndarray:
    """Apply fermionic gates to every column of ``columns`` (shape ``(dim, m)``)."""
    amps = np.array(columns, dtype=np.complex128, order="C", copy=True)
    fr = _Frame(basis, amps, None)
    for g in gates:
        if g.control is not None or g.kind in QUBIT_ONLY:
            raise ValueError("column application supports uncontrolled fermionic gates only")
        _apply_frame(g, fr)
    return amps


def gate_unitary(gates: GateSpec | Sequence[GateSpec], basis: FockBasis) -> np.ndarray:
    """Dense unitary of a fermionic gate (or gate sequence, first applied first) on ``basis``."""
    if isinstance(gates, GateSpec):
        gates = [gates]
    return apply_to_columns(gates, basis, np.eye(basis.dim, dtype=np.complex128))


def register_unitary(gates: GateSpec | Sequence[GateSpec], kinds: Sequence[str], basis: FockBasis) -> np.ndarray:
    """Dense unitary on a mixed register, in the register's flattened ordering."""
    if isinstance(gates, GateSpec):
        gates = [gates]
    reg = MixedRegister.zeros(kinds, basis)
    dim = reg.dim
    out = np.empty((dim, dim), dtype=np.complex128)
    for col in range(dim):
        e = np.zeros(dim, dtype=np.complex128)
        e[col] = 1.0
        out[:, col] = apply_gates(gates, reg.with_flat(e)).flat()
    return out


# ---------------------------------------------------------------------------
# Rydberg blockade protocol
# ---------------------------------------------------------------------------

def rydberg_protocol(i: int, j: int, theta: float, phi01: float) -> list[GateSpec]:
    """Blockade pulse with ``phi11 = 2 phi01 - theta`` followed by single-particle corrections.

    The composition equals ``interaction_gate(i, j, theta)`` exactly.
    """
    return [
        rydberg_gate(i, j, phi01, 2.0 * phi01 - theta),
        number_gate(i, phi01),
        number_gate(j, phi01),
    ]


# ---------------------------------------------------------------------------
# Shuttle protocol
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ShuttleStep:
    """One step of the shuttle sequence: an internal-state pulse or a tweezer move."""

    action: str  # "pulse" or "move"
    site: int  # pulse site, or move destination
    theta: tuple[float, float, float] = (0.0, 0.0, 0.0)


def shuttle_protocol(theta: Sequence[float], i: int, j: int) -> list[ShuttleStep]:
    """Five-step sequence realising ``tunneling_gate(i, j, *theta)`` with a transport tweezer."""
    t1, t2, t3 = (float(x) for x in theta)
    return [
        ShuttleStep("pulse", i, (math.pi, 0.0, 0.0)),
        ShuttleStep("move", j),
        ShuttleStep("pulse", j, (t1, t2 + math.pi / 2, t3)),
        ShuttleStep("move", i),
        ShuttleStep("pulse", i, (-math.pi, 0.0, 0.0)),
    ]


def pulse_gate(site: int, theta: Sequence[float], transport: int) -> GateSpec:
    """Internal rotation ``R_site(theta)`` between storage mode ``site`` and the transport mode.

    Pauli matrices act on ``(|3P0>, |1S0>)`` in that order, so the rotation is
    the tunneling gate with the transport mode first.
    """
    return GateSpec("t", (transport, site), tuple(theta))


def shuttle_gates(steps: Sequence[ShuttleStep], transport: int) -> list[GateSpec]:
    """Pulses of a shuttle sequence as gates on a register that includes the transport mode.

    Moves are ideal and change nothing but the pulse site, which each step
    already carries.
    """
    return [pulse_gate(st.site, st.theta, transport) for st in steps if st.action == "pulse"]


def shuttle_unitary(theta: Sequence[float], i: int, j: int, L: int, N: int | None = None) -> np.ndarray:
    """Realised shuttle unitary on ``L`` storage modes (transport tweezer starts and ends empty)."""
    ext = build_basis(L + 1, N)
    reg = build_basis(L, N)
    gates = shuttle_gates(shuttle_protocol(theta, i, j), transport=L)
    keep = ext.indices(reg.states)  # transport-empty states share the integer encoding
    cols = np.zeros((ext.dim, reg.dim), dtype=np.complex128)
    cols[keep, np.arange(reg.dim)] = 1.0
    out = apply_to_columns(gates, ext, cols)
    return out[keep, :]
