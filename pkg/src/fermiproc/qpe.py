"""Iterative (Kitaev) phase estimation with one qubit ancilla next to the fermionic register.

Phases follow ``U |psi> = exp(-2 pi i phi) |psi>`` with ``phi`` in [0, 1).
The ancilla is register site 0; fermionic mode ``m`` of the target sits at
site ``m + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fock import StateVector
from .gates import GateSpec, apply_gates, dt_gate, interaction_gate, tunneling_gate
from .register import FERMION, QUBIT, MixedRegister

ANCILLA = 0


@dataclass
class QPEResult:
    phase: float
    bits: list[int]
    confidences: list[float] = field(default_factory=list)

    @property
    def min_confidence(self) -> float:
        return min(self.confidences) if self.confidences else 1.0


def shift_sites(gate: GateSpec, by: int) -> GateSpec:
    ctrl = None if gate.control is None else gate.control + by
    return GateSpec(gate.kind, tuple(s + by for s in gate.sites), gate.params, ctrl)


def controlled_power(gates: Sequence[GateSpec], power: int, control: int = ANCILLA) -> list[GateSpec]:
    """Each gate of ``U^power`` made conditional on the ancilla (target sites shifted by one)."""
    one = [shift_sites(g, 1).controlled(control) for g in gates]
    return one * power


def controlled_dt_gates(control: int, i: int, j: int, k: int, theta1: float, theta2: float = 0.0) -> list[GateSpec]:
    """Density-dependent hopping on (i, j, k) that fires only when the control qubit is ``|1>``.

    Tunneling on (i, k) is undone unless the controlled int gates flip the
    sign of the occupied-``j`` branch in between.
    """
    cz = interaction_gate(j, k, math.pi).controlled(control)
    return [
        tunneling_gate(i, k, theta1, theta2, 0.0),
        cz,
        tunneling_gate(i, k, -theta1, theta2, 0.0),
        cz,
    ]


def iterative_qpe(
    unitary: Sequence[GateSpec] | Callable[[int], list[GateSpec]],
    state: StateVector,
    bits: int,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> QPEResult:
    """Estimate ``bits`` binary digits of the eigenphase of ``unitary`` on ``state``.

    ``unitary`` is either a gate list for ``U`` on the target modes (it is
    repeated for powers) or a callable ``power -> controlled gate list`` in
    register sites.  Each round keeps the more probable ancilla outcome from
    exact marginals, or a majority vote over ``shots`` samples when given.
    """
    if bits < 1:
        raise ValueError("need at least one bit")
    if shots is not None and (shots < 1 or rng is None):
        raise ValueError("shot sampling needs shots >= 1 and an rng")
    L = state.basis.L
    kinds = (QUBIT,) + (FERMION,) * L
    if callable(unitary):
        builder = unitary
    else:
        gates = list(unitary)
        builder = lambda p: controlled_power(gates, p)  # noqa: E731

    target = state.amplitudes.copy()
    found: list[int] = []  # b_j for j = bits, bits-1, ...
    conf: list[float] = []
    for j in range(bits, 0, -1):
        plus = np.stack([target, target], axis=1) / math.sqrt(2.0)
        reg = MixedRegister(kinds, state.basis, plus)
        reg = apply_gates(builder(1 << (j - 1)), reg)
        # remove the already-known lower digits 0.0 b_{j+1} b_{j+2} ...
        known = sum(b / 2.0 ** (n + 2) for n, b in enumerate(reversed(found)))
        a0 = reg.amplitudes[:, 0]
        a1 = reg.amplitudes[:, 1] * np.exp(2j * math.pi * known)
        plus_branch = (a0 + a1) / math.sqrt(2.0)
        minus_branch = (a0 - a1) / math.sqrt(2.0)
        p_plus = float(np.vdot(plus_branch, plus_branch).real)
        if shots is None:
            bit = 0 if p_plus >= 0.5 else 1
        else:
            hits = rng.binomial(shots, min(max(p_plus, 0.0), 1.0))
            bit = 0 if 2 * hits >= shots else 1
        branch = plus_branch if bit == 0 else minus_branch
        prob = p_plus if bit == 0 else 1.0 - p_plus
        conf.append(prob)
        target = branch / math.sqrt(prob) if prob > 0 else target
        found.append(bit)
    digits = list(reversed(found))  # b_1 ... b_k
    phase = sum(b / 2.0 ** (n + 1) for n, b in enumerate(digits))
    return QPEResult(phase, digits, list(reversed(conf)))


def diagonal_phase_unitary(mode: int, theta: float) -> Callable[[int], list[GateSpec]]:
    """Controlled powers of ``exp(-i theta n_mode)`` as a single phase gate each."""

    def build(power: int) -> list[GateSpec]:
        return [interaction_gate(ANCILLA, mode + 1, theta * power)]

    return build
