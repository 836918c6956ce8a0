"""Disentangled unitary coupled-cluster VQE, noiseless and with shuttle noise."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .circuit import Circuit
from .decompose import find_decomposition
from .fock import FockBasis, StateVector, build_basis, ground_state
from .gates import GateSpec, apply_gates, pt_gate, pulse_gate, shuttle_protocol, tunneling_gate
from .hamiltonian import SecondQuantizedHamiltonian
from .noise import NoiseDistribution, TrapParams, noisy_shuttle_gates, overlap_fast, perturbed_pulse

IMAG_TOL = 1e-10


@dataclass(frozen=True)
class UCCAnsatz:
    reference: tuple[int, ...]
    singles: tuple[tuple[int, int], ...]
    doubles: tuple[tuple[int, int, int, int], ...]

    @classmethod
    def from_reference(cls, reference: Sequence[int] | str) -> "UCCAnsatz":
        if isinstance(reference, str):
            reference = [int(c) for c in reference]
        ref = tuple(int(b) for b in reference)
        if any(b not in (0, 1) for b in ref):
            raise ValueError("reference must be a 0/1 occupation string")
        occ = [m for m, b in enumerate(ref) if b]
        virt = [m for m, b in enumerate(ref) if not b]
        singles = tuple((i, a) for i in occ for a in virt)
        doubles = tuple((i, j, a, b) for i, j in combinations(occ, 2) for a, b in combinations(virt, 2))
        return cls(ref, singles, doubles)

    @property
    def L(self) -> int:
        return len(self.reference)

    @property
    def N(self) -> int:
        return sum(self.reference)

    @property
    def n_params(self) -> int:
        return len(self.doubles) + len(self.singles)

    def gates(self, params: Sequence[float]) -> list[GateSpec]:
        """Doubles first, then singles; both lexicographic.  Parameters follow the same order."""
        params = np.asarray(params, dtype=float)
        if params.shape != (self.n_params,):
            raise ValueError(f"expected {self.n_params} parameters, got {params.shape}")
        nd = len(self.doubles)
        out = [pt_gate(i, j, a, b, params[n], math.pi / 2) for n, (i, j, a, b) in enumerate(self.doubles)]
        out += [tunneling_gate(i, a, params[nd + n], math.pi / 2, 0.0) for n, (i, a) in enumerate(self.singles)]
        return out

    def reference_state(self, basis: FockBasis | None = None) -> StateVector:
        basis = basis or build_basis(self.L, self.N)
        bits = list(self.reference) + [0] * (basis.L - self.L)
        return StateVector.from_occupation(basis, bits)


def build_ansatz_circuit(ansatz: UCCAnsatz, params: Sequence[float]) -> Circuit:
    return Circuit.from_gates(ansatz.gates(params))


def energy(state: StateVector, h: np.ndarray) -> float:
    """``<psi|H|psi>`` for a dense ``H`` on the state's basis."""
    if h.shape != (state.basis.dim, state.basis.dim):
        raise ValueError("Hamiltonian matrix does not match the state's basis")
    val = np.vdot(state.amplitudes, h @ state.amplitudes)
    if abs(val.imag) > IMAG_TOL * max(1.0, abs(val.real)):
        raise ValueError(f"energy has imaginary part {val.imag:.3g}; is H Hermitian?")
    return float(val.real)


@dataclass
class VQEProblem:
    ham: SecondQuantizedHamiltonian
    ansatz: UCCAnsatz

    def __post_init__(self):
        if self.ham.L != self.ansatz.L:
            raise ValueError("ansatz and Hamiltonian disagree on the mode count")
        self.basis = build_basis(self.ansatz.L, self.ansatz.N)
        self.h = self.ham.dense(self.basis)
        self.reference = self.ansatz.reference_state(self.basis)

    def state(self, params) -> StateVector:
        return apply_gates(self.ansatz.gates(params), self.reference)

    def energy(self, params) -> float:
        return energy(self.state(params), self.h)

    def exact_energy(self) -> float:
        return ground_state(self.h)[0]


@dataclass
class VQEResult:
    params: np.ndarray
    energy: float
    exact: float
    evaluations: int
    converged: bool
    trace: list[float] = field(default_factory=list)

    @property
    def delta_e(self) -> float:
        return self.energy - self.exact


def optimize(
    ham: SecondQuantizedHamiltonian,
    ansatz: UCCAnsatz,
    method: str = "nelder-mead",
    max_evaluations: int = 20000,
    restarts: int = 3,
    tol: float = 1e-9,
    seed: int = 0,
    fd_step: float = 1e-6,
) -> VQEResult:
    """Minimise the ansatz energy from all-zero parameters.

    ``method`` is ``"nelder-mead"`` (default) or ``"bfgs"``, the latter with
    central finite-difference gradients.  Each restart begins at the best
    point so far plus a small seeded kick, which helps Nelder-Mead leave a
    collapsed simplex.
    """
    prob = VQEProblem(ham, ansatz)
    e0 = prob.exact_energy()
    rng = np.random.default_rng(seed)
    trace: list[float] = []

    def f(x):
        e = prob.energy(x)
        trace.append(e)
        return e

    def grad(x):
        g = np.empty_like(x)
        for n in range(x.size):
            d = np.zeros_like(x)
            d[n] = fd_step
            g[n] = (prob.energy(x + d) - prob.energy(x - d)) / (2 * fd_step)
        return g

    x = np.zeros(ansatz.n_params)
    best_e = f(x)
    converged = ansatz.n_params == 0
    for attempt in range(restarts + 1):
        if ansatz.n_params == 0 or len(trace) >= max_evaluations:
            break
        start = x if attempt == 0 else x + rng.normal(scale=0.05, size=x.size)
        budget = max_evaluations - len(trace)
        if method == "nelder-mead":
            res = minimize(
                f, start, method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": tol, "maxfev": budget, "adaptive": True},
            )
        elif method == "bfgs":
            res = minimize(f, start, jac=grad, method="BFGS", options={"gtol": 1e-10, "maxiter": budget})
        else:
            raise ValueError(f"unknown optimizer {method!r}")
        improved = res.fun < best_e - tol
        if res.fun < best_e:
            best_e, x = float(res.fun), res.x
        converged = bool(res.success)
        if attempt > 0 and not improved:
            break
    return VQEResult(x, best_e, e0, len(trace), converged, trace)


# ---------------------------------------------------------------------------
# noisy execution
# ---------------------------------------------------------------------------

@lru_cache(maxsize=16)
def _pt_solution(theta2: float) -> tuple:
    """Tunneling angles of the pt template at this theta2 (they do not depend on theta1)."""
    res = find_decomposition("pt", 0.7, theta2, seed=11)
    if not res.converged:
        raise RuntimeError(f"pt decomposition failed at theta2={theta2} (residual {res.residual:.2g})")
    return res.template, tuple(res.x)


def native_gates(gates: Sequence[GateSpec]) -> list[GateSpec]:
    """Replace pt gates by their tunneling/int decomposition; other gates pass through."""
    out: list[GateSpec] = []
    for g in gates:
        if g.kind != "pt":
            out.append(g)
            continue
        template, x = _pt_solution(g.params[1])
        for sub in template.gates(np.asarray(x), g.params[0], g.params[1]):
            out.append(GateSpec(sub.kind, tuple(g.sites[s] for s in sub.sites), sub.params))
    return out


def noisy_gate_sequence(
    gates: Sequence[GateSpec],
    transport: int,
    trap: TrapParams,
    noise: NoiseDistribution,
    rng: np.random.Generator,
    per_run: bool = False,
) -> list[GateSpec]:
    """Native gates with every tunneling gate replaced by a perturbed shuttle.

    ``per_run`` reuses one draw for every pulse of the execution instead of
    drawing per pulse.
    """
    fixed = noise.draw(rng) if per_run else None
    out: list[GateSpec] = []
    for g in native_gates(gates):
        if g.kind != "t":
            out.append(g)
            continue
        i, j = g.sites
        if fixed is None:
            out += noisy_shuttle_gates(g.params, i, j, transport, trap, noise, rng)
        else:
            f = float(overlap_fast(fixed.dr, fixed.dz))
            for st in shuttle_protocol(g.params, i, j):
                if st.action == "pulse":
                    out.append(pulse_gate(st.site, perturbed_pulse(st.theta, fixed, trap, f), transport))
    return out


class NoisyEvaluator:
    """Energy of the ansatz executed with noisy shuttles on ``L + 1`` modes (last one is the transport tweezer)."""

    def __init__(self, ham: SecondQuantizedHamiltonian, ansatz: UCCAnsatz, trap: TrapParams | None = None):
        self.problem = VQEProblem(ham, ansatz)
        self.trap = trap or TrapParams()
        self.ext = build_basis(ansatz.L + 1, ansatz.N)
        self.h_ext = ham.dense(self.ext)
        self.start = ansatz.reference_state(self.ext)

    def energy(self, params, noise: NoiseDistribution, rng: np.random.Generator, per_run: bool = False) -> float:
        if noise.is_zero:
            return self.problem.energy(params)
        seq = noisy_gate_sequence(
            self.problem.ansatz.gates(params), self.problem.ansatz.L, self.trap, noise, rng, per_run
        )
        return energy(apply_gates(seq, self.start), self.h_ext)


@dataclass
class NoiseStat:
    delta_wr: float
    delta_r: float
    mean_de: float
    stderr: float
    n: int


def _sample_seed(seed: int, k: int) -> np.random.Generator:
    return np.random.default_rng([seed, k])


def noisy_energy_mc(
    evaluator: NoisyEvaluator,
    params,
    noise: NoiseDistribution,
    samples: int,
    seed: int,
    exact: float | None = None,
    per_run: bool = False,
) -> NoiseStat:
    """Mean and standard error of ``E_noisy - E0`` over ``samples`` executions.

    Sample ``k`` uses a generator seeded by ``(seed, k)``, so the draws are
    shared across noise widths (common random numbers).
    """
    if samples < 2:
        raise ValueError("need at least two samples")
    e0 = evaluator.problem.exact_energy() if exact is None else exact
    vals = np.array(
        [evaluator.energy(params, noise, _sample_seed(seed, k), per_run) - e0 for k in range(samples)]
    )
    return NoiseStat(noise.delta_wr, noise.delta_r, float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples)), samples)


def _sweep_cell(args):
    ham, ansatz, trap, params, noise, samples, seed, e0 = args
    ev = NoisyEvaluator(ham, ansatz, trap)
    return noisy_energy_mc(ev, params, noise, samples, seed, e0)


def noise_sweep(
    ham: SecondQuantizedHamiltonian,
    ansatz: UCCAnsatz,
    params,
    delta_wr_values: Sequence[float],
    delta_r_values: Sequence[float],
    samples: int,
    seed: int,
    trap: TrapParams | None = None,
    delta_z: float | None = None,
    workers: int = 1,
) -> list[NoiseStat]:
    """Grid over (frequency spread, radial spread).  ``delta_z`` defaults to the radial width."""
    trap = trap or TrapParams()
    e0 = VQEProblem(ham, ansatz).exact_energy()
    params = np.asarray(params, dtype=float)
    tasks = [
        (ham, ansatz, trap, params, NoiseDistribution(dw, dr, dr if delta_z is None else delta_z), samples, seed, e0)
        for dw in delta_wr_values
        for dr in delta_r_values
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_cell, tasks))
    return [_sweep_cell(t) for t in tasks]


def threshold_crossing(stats: Sequence[NoiseStat], threshold: float) -> NoiseStat | None:
    """Smallest grid cell (by summed widths) whose mean error exceeds ``threshold``."""
    over = [s for s in stats if s.mean_de > threshold]
    return min(over, key=lambda s: (s.delta_wr + s.delta_r, s.delta_wr)) if over else None
