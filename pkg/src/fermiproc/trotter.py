"""First-order Trotter steps built from native gates."""

from __future__ import annotations

import math

import numpy as np

from .circuit import Circuit, gate_support
from .gates import (
    GateSpec,
    dt_gate,
    interaction_gate,
    number_gate,
    pt_gate,
    qubit_rotation,
    tunneling_gate,
)
from .hamiltonian import HERMITICITY_TOL, LGTModel, SecondQuantizedHamiltonian, canonical_two_body


def pack_layers(gates: list[GateSpec], kinds=None) -> Circuit:
    """First-fit layering that may reorder gates (fine inside one first-order Trotter step)."""
    layers: list[list[GateSpec]] = []
    used: list[set[int]] = []
    for g in gates:
        sup = gate_support(g, kinds)
        for n, u in enumerate(used):
            if not u & sup:
                layers[n].append(g)
                u |= sup
                break
        else:
            layers.append([g])
            used.append(set(sup))
    return Circuit(layers, tuple(kinds) if kinds is not None else None)


def trotter_gates(ham: SecondQuantizedHamiltonian, dt: float) -> list[GateSpec]:
    """Native gates whose product is one first-order step of ``exp(-i H dt)``.

    Each Hermitian pair of terms becomes one gate.  Complex coefficients go
    into the tunneling phase ``theta2``.  The constant offset is dropped.
    """
    if not ham.is_hermitian():
        raise ValueError(f"Hamiltonian is not Hermitian (error {ham.hermiticity_error():.3g})")
    gates: list[GateSpec] = []
    for (i, j), h in sorted(ham.one_body.items()):
        if i == j and h.real != 0:
            gates.append(number_gate(i, h.real * dt))
        elif i < j and h != 0:
            gates.append(tunneling_gate(i, j, 2 * abs(h) * dt, -np.angle(h), 0.0))
    table = canonical_two_body(ham.two_body)
    done = set()
    for (cre, ann), g in sorted(table.items()):
        if (cre, ann) in done or abs(g) == 0:
            continue
        done.add((cre, ann))
        done.add((ann, cre))
        partner = table.get((ann, cre), 0.0)
        if cre == ann:
            # c+_i c+_j c_i c_j = -n_i n_j
            if abs(g - np.conj(g)) > HERMITICITY_TOL:
                raise ValueError(f"density-density coefficient for {cre} is not real")
            if g.real:
                gates.append(interaction_gate(cre[0], cre[1], -g.real * dt))
            continue
        if abs(partner - np.conj(g)) > HERMITICITY_TOL:
            raise ValueError(f"two-body term {cre}{ann} has no matching conjugate")
        shared = set(cre) & set(ann)
        if len(shared) == 1:
            (m,) = shared
            a = cre[0] if cre[1] == m else cre[1]
            b = ann[1] if ann[0] == m else ann[0]
            # reorder to c+_a c+_m c_m c_b = c+_a n_m c_b
            s = (1 if cre == (a, m) else -1) * (1 if ann == (m, b) else -1)
            c = s * g
            gates.append(dt_gate(a, m, b, abs(c) * dt, -np.angle(c)))
        else:
            gates.append(pt_gate(cre[0], cre[1], ann[0], ann[1], abs(g) * dt, -np.angle(g)))
    return gates


def trotter_step(ham: SecondQuantizedHamiltonian, dt: float) -> Circuit:
    return pack_layers(trotter_gates(ham, dt))


# ---------------------------------------------------------------------------
# Z2 lattice gauge theory
# ---------------------------------------------------------------------------

def hadamard_gates(site: int) -> list[GateSpec]:
    """Hadamard on a qubit site, up to a global phase."""
    return [
        qubit_rotation("z", site, math.pi / 2),
        qubit_rotation("x", site, math.pi / 2),
        qubit_rotation("z", site, math.pi / 2),
    ]


def cnot_gates(control: int, target: int) -> list[GateSpec]:
    """CNOT between qubit sites from a Rydberg CZ (int gate at pi) and Hadamards.

    With Z = +1 on ``|1>`` the Hadamard sandwich turns the CZ into ``-X`` on
    the target; the closing phase on the control removes that sign.
    """
    return [
        *hadamard_gates(target),
        interaction_gate(control, target, math.pi),
        *hadamard_gates(target),
        number_gate(control, math.pi),
    ]


def plaquette_gates(qubits: tuple[int, ...], angle: float) -> list[GateSpec]:
    """``exp(-i angle Z Z Z Z)`` on four qubit sites via a parity ladder."""
    ladder: list[GateSpec] = []
    for a, b in zip(qubits[:-1], qubits[1:]):
        ladder += cnot_gates(a, b)
    # parity qubit holds Z1..Z4 up to the sign from Z = +1 on |1>
    sign = (-1) ** (len(qubits) - 1)
    mid = [qubit_rotation("z", qubits[-1], 2 * sign * angle)]
    undo = [g.inverse() for g in reversed(ladder)]
    return ladder + mid + undo


def dressed_hopping_gates(x: int, y: int, link_site: int, angle: float) -> list[GateSpec]:
    """``exp(-i angle (c+_x c_y + h.c.) Z_link)``.

    A Rydberg int gate between the link qubit and mode ``x`` dresses the
    hopping with ``(-1)^{n_link} = -Z``.
    """
    cz = interaction_gate(link_site, x, math.pi)
    return [cz, tunneling_gate(x, y, -2.0 * angle, 0.0, 0.0), cz]


def lgt_trotter_gates(model: LGTModel, dt: float) -> list[GateSpec]:
    gates: list[GateSpec] = []
    for x in range(model.n_sites):
        if model.lambda_m:
            gates.append(number_gate(x, model.lambda_m * (-1) ** model.stagger(x) * dt))
    for l in range(model.n_links):
        if model.lambda_e:
            gates.append(qubit_rotation("x", model.link_site(l), 2 * model.lambda_e * dt))
    if model.lambda_j:
        for l, (x, y) in enumerate(model.links):
            gates += dressed_hopping_gates(x, y, model.link_site(l), model.lambda_j * dt)
    if model.lambda_b:
        for plaq in model.plaquettes:
            gates += plaquette_gates(tuple(model.link_site(l) for l in plaq), model.lambda_b * dt)
    return gates


def lgt_trotter_step(model: LGTModel, dt: float) -> Circuit:
    return Circuit.from_gates(lgt_trotter_gates(model, dt), model.kinds)
