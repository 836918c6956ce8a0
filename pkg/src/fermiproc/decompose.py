"""Numerical search for short native-gate circuits that equal the dt and pt gates.

A :class:`Template` is a list of layers of gate slots.  Each slot parameter
is an affine function ``const + a*theta1 + b*theta2`` of the target angles,
optionally plus a free variable.  The search minimises the entrywise
residual between the template unitary and the target (after removing the
best global phase) with ``scipy.optimize.least_squares`` from many starts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares

from .circuit import Circuit
from .fock import build_basis
from .gates import GateSpec, dt_gate, gate_unitary, pt_gate
from .linalg import phase_insensitive_distance

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Param:
    """``const + a*theta1 + b*theta2 (+ free[index])``."""

    free: int | None = None
    a: float = 0.0
    b: float = 0.0
    const: float = 0.0

    def value(self, x: np.ndarray, theta1: float, theta2: float) -> float:
        v = self.const + self.a * theta1 + self.b * theta2
        return v + x[self.free] if self.free is not None else v


@dataclass(frozen=True)
class Slot:
    kind: str
    sites: tuple[int, ...]
    params: tuple[Param, ...]


@dataclass
class Template:
    target: str  # "dt" or "pt"
    layers: list[list[Slot]]
    n_free: int
    name: str = ""

    @property
    def gate_count(self) -> int:
        return sum(len(layer) for layer in self.layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def gates(self, x: np.ndarray, theta1: float, theta2: float) -> list[GateSpec]:
        return [
            GateSpec(s.kind, s.sites, tuple(p.value(x, theta1, theta2) for p in s.params))
            for layer in self.layers
            for s in layer
        ]

    def circuit(self, x: np.ndarray, theta1: float, theta2: float) -> Circuit:
        """Gates grouped by template layer.  Layers may share Jordan-Wigner strings (see ``gate_support``)."""
        gates = self.gates(x, theta1, theta2)
        out, k = [], 0
        for layer in self.layers:
            out.append(gates[k : k + len(layer)])
            k += len(layer)
        return Circuit(out, strings=False)


class _FreeCounter:
    def __init__(self):
        self.n = 0

    def tunneling(self) -> tuple[Param, Param, Param]:
        out = tuple(Param(free=self.n + q) for q in range(3))
        self.n += 3
        return out

    def one(self) -> Param:
        self.n += 1
        return Param(free=self.n - 1)


def dt_template() -> Template:
    """Two tunneling gates between the outer modes interleaved with two int gates on (j, k)."""
    fc = _FreeCounter()
    i, j, k = 0, 1, 2
    layers = [
        [Slot("t", (i, k), fc.tunneling())],
        [Slot("int", (j, k), (fc.one(),))],
        [Slot("t", (i, k), fc.tunneling())],
        [Slot("int", (j, k), (fc.one(),))],
    ]
    return Template("dt", layers, fc.n, "t-int-t-int")


def pt_template() -> Template:
    """Three tunneling layers on (i,k),(j,l) separated by int layers on (i,j),(k,l).

    The int angles follow the target angle (``+theta1`` then ``-theta1``),
    which leaves the tunneling angles independent of ``theta1``.
    """
    fc = _FreeCounter()
    i, j, k, l = 0, 1, 2, 3

    def hop_layer():
        return [Slot("t", (i, k), fc.tunneling()), Slot("t", (j, l), fc.tunneling())]

    def int_layer(sign):
        return [Slot("int", (i, j), (Param(a=sign),)), Slot("int", (k, l), (Param(a=sign),))]

    layers = [hop_layer(), int_layer(+1.0), hop_layer(), int_layer(-1.0), hop_layer()]
    return Template("pt", layers, fc.n, "hop-int-hop-int-hop")


def default_template(target: str) -> Template:
    if target == "dt":
        return dt_template()
    if target == "pt":
        return pt_template()
    raise ValueError(f"no decomposition template for {target!r}")


def target_gate(target: str, theta1: float, theta2: float) -> GateSpec:
    if target == "dt":
        return dt_gate(0, 1, 2, theta1, theta2)
    if target == "pt":
        return pt_gate(0, 1, 2, 3, theta1, theta2)
    raise ValueError(f"unknown decomposition target {target!r}")


@dataclass
class DecompositionResult:
    target: str
    theta1: float
    theta2: float
    template: Template
    x: np.ndarray
    residual: float
    tolerance: float
    restarts_used: int
    evaluations: int = 0
    converged: bool = field(init=False)

    def __post_init__(self):
        self.converged = bool(self.residual < self.tolerance)

    def gates(self) -> list[GateSpec]:
        return self.template.gates(self.x, self.theta1, self.theta2)

    def circuit(self) -> Circuit:
        return self.template.circuit(self.x, self.theta1, self.theta2)


def _register_modes(target: str) -> int:
    return {"dt": 3, "pt": 4}[target]


def find_decomposition(
    target: str,
    theta1: float,
    theta2: float,
    template: Template | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    restarts: int = 64,
    seed: int = 0,
    initial: np.ndarray | None = None,
) -> DecompositionResult:
    """Solve ``template`` for the target gate at ``(theta1, theta2)`` on the full Fock space.

    Starts from ``initial`` (if given) and then from up to ``restarts`` uniform
    random points, stopping at the first residual below ``tolerance``.  The
    residual reported is the phase-insensitive spectral distance.
    """
    template = template or default_template(target)
    if template.target != target:
        raise ValueError(f"template solves {template.target}, not {target}")
    if template.gate_count > 10 or template.depth > 5:
        raise ValueError("templates are limited to five layers")
    basis = build_basis(_register_modes(target))
    want = gate_unitary(target_gate(target, theta1, theta2), basis)

    def unitary(x):
        return gate_unitary(template.gates(x, theta1, theta2), basis)

    def residual(x):
        u = unitary(x)
        ov = np.vdot(want, u)
        ph = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
        d = (u - ph * want).ravel()
        return np.concatenate([d.real, d.imag])

    rng = np.random.default_rng(seed)
    best_x = np.zeros(template.n_free)
    best = phase_insensitive_distance(unitary(best_x), want)
    used = 0
    nfev = 0
    starts = [] if initial is None else [np.asarray(initial, dtype=float)]
    if template.n_free == 0 or best < tolerance:
        return DecompositionResult(target, theta1, theta2, template, best_x, best, tolerance, 0)
    while used < restarts + len(starts[:1]):
        x0 = starts[used] if used < len(starts) else rng.uniform(-math.pi, math.pi, template.n_free)
        used += 1
        sol = least_squares(residual, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        nfev += sol.nfev
        d = phase_insensitive_distance(unitary(sol.x), want)
        if d < best:
            best, best_x = d, sol.x
        if best < tolerance:
            break
    return DecompositionResult(target, theta1, theta2, template, best_x, best, tolerance, used, nfev)


def decomposition_grid(
    target: str,
    theta1_values,
    theta2_values,
    template: Template | None = None,
    tolerance: float = DEFAULT_TOLERANCE,
    restarts: int = 64,
    seed: int = 0,
) -> list[DecompositionResult]:
    """Solve a grid of target angles, warm-starting each point from the previous solution."""
    template = template or default_template(target)
    out = []
    prev = None
    for n, t1 in enumerate(theta1_values):
        for m, t2 in enumerate(theta2_values):
            res = find_decomposition(
                target, float(t1), float(t2), template, tolerance, restarts, seed + 1000 * n + m, prev
            )
            if res.converged:
                prev = res.x
            out.append(res)
    return out


def verify_on_state(result: DecompositionResult, seed: int = 1) -> float:
    """Distance between template and target applied to a fresh random state."""
    from .fock import StateVector
    from .gates import apply_gates

    basis = build_basis(_register_modes(result.target))
    psi = StateVector.random(basis, np.random.default_rng(seed))
    a = apply_gates(result.gates(), psi).amplitudes
    b = apply_gates([target_gate(result.target, result.theta1, result.theta2)], psi).amplitudes
    ov = np.vdot(b, a)
    ph = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
    return float(np.linalg.norm(a - ph * b))
