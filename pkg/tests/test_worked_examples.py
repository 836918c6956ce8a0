"""Small hand-checkable cases for each module, with expected values worked out by hand."""

import math

import numpy as np
import pytest
from scipy.linalg import expm

from fermiproc.echo import accumulated_relative_phase, floquet_step, permutations
from fermiproc.fock import LadderTerm, StateVector, apply_ladder, build_basis, dense_matrix, ground_state, hopping_terms
from fermiproc.gates import (
    apply_gates,
    apply_to_columns,
    controlled_interaction,
    dt_gate,
    gate_unitary,
    interaction_gate,
    number_gate,
    pt_gate,
    qubit_rotation,
    rydberg_gate,
    register_unitary,
    rydberg_protocol,
    shuttle_unitary,
    tunneling_gate,
)
from fermiproc.hamiltonian import (
    SecondQuantizedHamiltonian,
    gauss_operator,
    lgt_dense,
    parse_hamiltonian,
    single_plaquette,
)
from fermiproc.linalg import phase_insensitive_distance
from fermiproc.noise import (
    NoiseDistribution,
    NoiseSample,
    TrapParams,
    dephasing_time_estimate,
    motion_budget,
    noisy_shuttle_gates,
    overlap_factor,
    perturbed_pulse,
    rydberg_heating_probability,
)
from fermiproc.qpe import iterative_qpe
from fermiproc.register import MixedRegister
from fermiproc.trotter import lgt_trotter_gates, trotter_step
from fermiproc.vqe import UCCAnsatz, VQEProblem, energy, optimize

from oracles import MixedOps


# -- Fock space --------------------------------------------------------------

@pytest.mark.parametrize("L,N,dim", [(4, 2, 6), (3, 0, 1), (10, 5, 252)])
def test_sector_sizes(L, N, dim):
    assert build_basis(L, N).dim == dim


def test_vacuum_sector():
    b = build_basis(3, 0)
    assert b.labels() == ["000"]


def test_ladder_actions():
    b = build_basis(3)
    psi = StateVector.from_occupation(b, "011")
    out = apply_ladder(LadderTerm((0,), (2,)), psi)
    assert out.amplitude("110") == -1
    n1 = apply_ladder(LadderTerm((1,), (1,)), StateVector.from_occupation(b, "010"))
    assert n1.amplitude("010") == 1
    vac = apply_ladder(LadderTerm((), (0,)), StateVector.from_occupation(b, "000"))
    assert vac.norm() == 0


def test_small_dense_matrices():
    h = dense_matrix(hopping_terms(0, 1), build_basis(2, 1))
    assert build_basis(2, 1).labels() == ["10", "01"]
    np.testing.assert_array_equal(h, [[0, 1], [1, 0]])
    nn = dense_matrix([LadderTerm((0, 1), (1, 0))], build_basis(2, 2))
    np.testing.assert_array_equal(nn, [[1]])


def test_hubbard_dimer_ground_energy():
    # two sites, spin interleaved as modes (0 up, 0 down, 1 up, 1 down); E0 = (U - sqrt(U^2 + 16 t^2)) / 2
    t, U = 1.0, 2.0
    one = {}
    for a, b in ((0, 2), (1, 3)):
        one[(a, b)] = -t
        one[(b, a)] = -t
    ham = SecondQuantizedHamiltonian(4, one, {(0, 1, 1, 0): U, (2, 3, 3, 2): U})
    e0, _ = ground_state(ham.dense(build_basis(4, 2)))
    assert e0 == pytest.approx((U - math.sqrt(U * U + 16 * t * t)) / 2, abs=1e-12)


def test_two_by_two_eigensolver():
    e, v = ground_state(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert e == pytest.approx(-1)
    np.testing.assert_allclose(v, np.array([1, -1]) / math.sqrt(2), atol=1e-12)
    e, _ = ground_state(np.diag([3.0, -2.0, 5.0]))
    assert e == -2.0


# -- gates -------------------------------------------------------------------

def test_tunneling_examples(rng):
    b = build_basis(2, 1)
    out = apply_gates([tunneling_gate(0, 1, math.pi)], StateVector.from_occupation(b, "10"))
    assert out.amplitude("01") == pytest.approx(-1j)
    out = apply_gates([tunneling_gate(0, 1, 0.0, 0.0, 0.8)], StateVector.from_occupation(b, "10"))
    assert out.amplitude("10") == pytest.approx(np.exp(-0.4j))
    b4 = build_basis(4)
    g = tunneling_gate(1, 3, math.pi / 2, math.pi / 3, 0.7)
    ops = MixedOps("ffff")
    for _ in range(3):
        psi = StateVector.random(b4, rng)
        np.testing.assert_allclose(apply_gates([g], psi).amplitudes, ops.unitary([g]) @ psi.amplitudes, atol=1e-13)


def test_interaction_examples():
    b = build_basis(4)
    out = apply_gates([interaction_gate(0, 1, math.pi)], StateVector.from_occupation(b, "1100"))
    assert out.amplitude("1100") == pytest.approx(-1)
    out = apply_gates([interaction_gate(0, 1, 0.9)], StateVector.from_occupation(b, "1000"))
    assert out.amplitude("1000") == 1
    out = apply_gates([interaction_gate(0, 3, 0.3)], StateVector.from_occupation(b, "1011"))
    assert out.amplitude("1011") == pytest.approx(np.exp(-0.3j))


def test_rydberg_examples():
    b = build_basis(2)
    np.testing.assert_allclose(
        gate_unitary(rydberg_gate(0, 1, 0.0, -1.3), b), gate_unitary(interaction_gate(0, 1, 1.3), b), atol=1e-15
    )
    u = gate_unitary(rydberg_protocol(0, 1, 1.1, 0.4), b)
    assert rydberg_protocol(0, 1, 1.1, 0.4)[0].params[1] == pytest.approx(-0.3)
    assert np.abs(u - gate_unitary(interaction_gate(0, 1, 1.1), b)).max() < 1e-12
    assert gate_unitary(rydberg_gate(0, 1, 0.7, 2.1), b)[0, 0] == 1


def test_shuttle_examples():
    assert phase_insensitive_distance(shuttle_unitary((0, 0, 0), 0, 1, 2), np.eye(4)) < 1e-14
    want = gate_unitary(tunneling_gate(0, 1, math.pi), build_basis(2))
    assert phase_insensitive_distance(shuttle_unitary((math.pi, 0, 0), 0, 1, 2), want) < 1e-12


def test_qubit_rotation_examples():
    # an idle empty mode hosts the register; the qubit sits at site 1
    low = MixedRegister.product("fq", "0", qubits=[(1.0, 0.0)])  # |1~>
    high = MixedRegister.product("fq", "0", qubits=[(0.0, 1.0)])  # |1>
    out = apply_gates([qubit_rotation("x", 1, math.pi)], low)
    np.testing.assert_allclose(out.amplitudes, [[0, -1j]], atol=1e-15)
    out = apply_gates([qubit_rotation("z", 1, 0.6)], high)
    np.testing.assert_allclose(out.amplitudes, [[0, np.exp(-0.3j)]])
    out = apply_gates([qubit_rotation("x", 1, math.pi / 2)], low)
    np.testing.assert_allclose(out.amplitudes, [[1 / math.sqrt(2), -1j / math.sqrt(2)]])


def test_controlled_interaction_examples():
    kinds = "qff"
    cz = controlled_interaction(0, 1, 2, math.pi)
    off = MixedRegister.product(kinds, "11", qubits=[(1.0, 0.0)])
    np.testing.assert_allclose(apply_gates([cz], off).amplitudes, off.amplitudes)
    on = MixedRegister.product(kinds, "11", qubits=[(0.0, 1.0)])
    np.testing.assert_allclose(apply_gates([cz], on).amplitudes, -on.amplitudes, atol=1e-15)
    plus = MixedRegister.product(kinds, "11", qubits=[(1 / math.sqrt(2), 1 / math.sqrt(2))])
    minus = MixedRegister.product(kinds, "11", qubits=[(1 / math.sqrt(2), -1 / math.sqrt(2))])
    np.testing.assert_allclose(apply_gates([cz], plus).amplitudes, minus.amplitudes, atol=1e-15)


def test_density_dependent_hopping_examples():
    b = build_basis(3)
    psi = StateVector.from_occupation(b, "100")
    assert apply_gates([dt_gate(0, 1, 2, 1.3, 0.2)], psi).amplitude("100") == pytest.approx(1)
    np.testing.assert_allclose(gate_unitary(dt_gate(0, 1, 2, 0.0, 0.7), b), np.eye(8))
    g = dt_gate(0, 1, 2, math.pi, 0.0)
    ops = MixedOps("fff")
    psi = StateVector.from_occupation(b, "011")
    np.testing.assert_allclose(apply_gates([g], psi).amplitudes, ops.unitary([g]) @ psi.amplitudes, atol=1e-14)


def test_pair_tunneling_examples():
    b = build_basis(4)
    out = apply_gates([pt_gate(0, 1, 2, 3, math.pi / 2, 0.0)], StateVector.from_occupation(b, "0011"))
    assert abs(out.amplitude("1100")) == pytest.approx(1)
    np.testing.assert_allclose(gate_unitary(pt_gate(0, 1, 2, 3, 0.0, 1.0), b), np.eye(16))
    psi = StateVector.from_occupation(b, "0101")
    assert apply_gates([pt_gate(0, 1, 2, 3, 1.0, 0.3)], psi).amplitude("0101") == pytest.approx(1)


# -- Trotter and lattice gauge model ------------------------------------------

def test_six_site_chain_depth():
    one = {}
    for i in range(5):
        one[(i, i + 1)] = one[(i + 1, i)] = 0.8
    assert trotter_step(SecondQuantizedHamiltonian(6, one), 0.2).depth == 2


def test_commuting_lattice_terms_are_exact():
    model = single_plaquette(lambda_e=0.6, lambda_b=0.0, lambda_j=0.0, lambda_m=1.1)
    basis = build_basis(4, 2)
    u = register_unitary(lgt_trotter_gates(model, 0.9), model.kinds, basis)
    np.testing.assert_allclose(u, expm(-0.9j * lgt_dense(model, basis)), atol=1e-12)


def test_vacuum_with_plus_links_is_gauss_eigenstate():
    model = single_plaquette()
    basis = build_basis(4, 0)
    vec = np.full(16, 0.25, dtype=complex)
    for x in range(4):
        np.testing.assert_allclose(gauss_operator(model, basis, x) @ vec, vec)


def test_electric_only_model_symmetric_under_link_flip():
    model = single_plaquette(lambda_e=0.8, lambda_b=0.0, lambda_j=0.0, lambda_m=0.0)
    basis = build_basis(4, 2)
    h = lgt_dense(model, basis)
    ops = MixedOps("ffffqqqq")
    # sigma-x on link 2 sends sigma-z to -sigma-z; restrict the full-space flip to the N=2 block
    idx = np.concatenate([s * 16 + np.arange(16) for s in basis.states])
    flip = ops.pauli(np.array([[0, 1], [1, 0]]), 6)[np.ix_(idx, idx)]
    np.testing.assert_allclose(flip @ h @ flip, h, atol=1e-14)


def test_half_filling_mass_ground_sector_matches_brute_force():
    lam = dict(lambda_e=0.4, lambda_b=0.7, lambda_j=0.0, lambda_m=1.3)
    model = single_plaquette(**lam)
    basis = build_basis(4, 2)
    e0 = np.linalg.eigvalsh(lgt_dense(model, basis))[0]
    # without hopping, matter and links decouple: best staggered filling plus the link ground energy
    matter = min(
        lam["lambda_m"] * sum((-1) ** model.stagger(x) for x in occ)
        for occ in [(a, b) for a in range(4) for b in range(a + 1, 4)]
    )
    links = single_plaquette(lambda_e=0.4, lambda_b=0.7, lambda_j=0.0, lambda_m=0.0)
    link_e0 = np.linalg.eigvalsh(lgt_dense(links, build_basis(4, 0)))[0]
    assert e0 == pytest.approx(matter + link_e0, abs=1e-12)


# -- phase estimation --------------------------------------------------------

def test_qpe_examples():
    b1 = build_basis(1, 1)
    res = iterative_qpe([number_gate(0, math.pi / 2)], StateVector.from_occupation(b1, "1"), 8)
    assert res.phase == 0.25
    res = iterative_qpe([number_gate(0, 0.0)], StateVector.from_occupation(b1, "1"), 1)
    assert res.bits == [0]
    b2 = build_basis(2, 1)
    sym = StateVector(b2, np.array([1, 1]) / math.sqrt(2))
    res = iterative_qpe([tunneling_gate(0, 1, math.pi / 3)], sym, 8)
    # symmetric state has generator eigenvalue theta1 / 2, so phi = (pi/6) / (2 pi)
    assert abs(res.phase - 1 / 12) <= 2.0**-8


# -- Hamiltonian files and VQE -----------------------------------------------

def test_dimer_file():
    ham = parse_hamiltonian("L 2\n1 0 1 1 0\n1 1 0 1 0\n")
    np.testing.assert_array_equal(ham.dense(build_basis(2, 1)), [[0, 1], [1, 0]])
    with pytest.warns(UserWarning):
        half = parse_hamiltonian("L 2\n1 0 1 1 0\n")
    np.testing.assert_array_equal(half.dense(build_basis(2, 1)), [[0, 1], [1, 0]])


def test_ansatz_examples(rng):
    a = UCCAnsatz.from_reference("1100")
    assert a.n_params == 5
    ham = SecondQuantizedHamiltonian(4, {(m, m): d for m, d in enumerate([-1.0, -0.5, 0.3, 0.9])})
    prob = VQEProblem(ham, a)
    assert prob.energy(np.zeros(5)) == pytest.approx(-1.5)
    res = optimize(ham, a)
    assert res.delta_e == pytest.approx(0.0, abs=1e-12)
    np.testing.assert_allclose(res.params, 0.0, atol=1e-6)
    lih_like = UCCAnsatz.from_reference("11000000")
    basis = build_basis(8, 2)
    psi = StateVector.random(basis, rng)
    out = apply_gates(lih_like.gates(rng.normal(size=lih_like.n_params)), psi)
    assert out.norm() == pytest.approx(1.0, abs=1e-12)


def test_energy_examples(rng):
    h = dense_matrix(hopping_terms(0, 1, 0.7), build_basis(2, 1))
    psi = StateVector.random(build_basis(2, 1), rng)
    assert energy(psi, h) == pytest.approx(np.vdot(psi.amplitudes, h @ psi.amplitudes).real)
    e0, vec = ground_state(h)
    assert energy(StateVector(build_basis(2, 1), vec), h) == pytest.approx(e0)


# -- noise model ---------------------------------------------------------------

def test_overlap_decreases_with_axial_offset():
    vals = [overlap_factor(0.0, z) for z in (0.0, 0.2, 0.5, 1.0, 2.0)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_pulse_scaling_examples():
    trap = TrapParams()
    assert perturbed_pulse((0.8, 0.1, 0.2), NoiseSample(), trap) == (0.8, 0.1, 0.2)
    t1, _, _ = perturbed_pulse((0.8, 0.1, 0.2), NoiseSample(), trap, f=0.99)
    assert t1 == pytest.approx(0.99 * 0.8)


def test_shuttle_fidelity_falls_with_offset_width(rng):
    trap = TrapParams()
    ext = build_basis(4, 1)
    reg = build_basis(3, 1)
    keep = ext.indices(reg.states)
    ideal = gate_unitary(tunneling_gate(0, 2, 1.0, 0.3, 0.0), reg)
    means, errs = [], []
    for width in (0.1, 0.3, 0.6):
        noise = NoiseDistribution(0.0, width, width)
        vals = []
        for k in range(200):
            gates = noisy_shuttle_gates((1.0, 0.3, 0.0), 0, 2, 3, trap, noise, np.random.default_rng([3, k]))
            u = np.eye(ext.dim, dtype=complex)
            u = apply_to_columns(gates, ext, u)[np.ix_(keep, keep)]
            vals.append(abs(np.trace(ideal.conj().T @ u)) ** 2 / reg.dim**2)
        means.append(np.mean(vals))
        errs.append(np.std(vals, ddof=1) / math.sqrt(len(vals)))
    for n in range(2):
        assert means[n + 1] < means[n] + 2 * math.hypot(errs[n], errs[n + 1])
    assert means[0] > means[-1]


def test_budget_examples():
    assert rydberg_heating_probability(2 * math.pi * 15e3, 100e-9) == pytest.approx(2.2e-5, rel=0.01)
    assert rydberg_heating_probability(2 * math.pi * 15e3, 0.0) == 0.0
    assert rydberg_heating_probability(2.0, 1.0) == 1.0
    t2 = dephasing_time_estimate(50e3, 0.002)
    assert t2 == pytest.approx(1.6e-3, rel=0.01)
    assert dephasing_time_estimate(100e3, 0.002) == pytest.approx(t2 / 2)
    assert motion_budget(500e-6, 4)[0] == pytest.approx(2e-3)
    assert motion_budget(0.0, 77)[0] == 0.0


# -- echo ------------------------------------------------------------------------

def test_clean_rounds_equal_layered_hopping():
    L, J, tau = 6, 1.0, 0.3
    u = np.eye(L, dtype=complex)
    sigma = np.arange(L)
    for t in range(2):
        u = floquet_step(u, J, tau, t % 2, np.zeros(L), sigma)
    layers = []
    for parity in (0, 1):
        h = np.zeros((L, L))
        for i in range(parity, L, 2):
            j = (i + 1) % L
            h[i, j] = h[j, i] = J
        layers.append(expm(-1j * tau * h))
    np.testing.assert_allclose(u, layers[1] @ layers[0], atol=1e-14)


def test_beam_splitter_round():
    u = floquet_step(np.eye(2, dtype=complex), 1.0, math.pi / 2, 0, np.zeros(2), np.arange(2))
    np.testing.assert_allclose(u[:, 0], [0, -1j], atol=1e-15)


def test_first_cyclic_round_is_unshifted():
    first = next(permutations("cyclic", 7, 1))
    np.testing.assert_array_equal(first, np.arange(7))


def test_relative_phase_examples(rng):
    h = rng.normal(size=10)
    assert accumulated_relative_phase("cyclic", h, 3, 0) == pytest.approx(h[4] - h[3])
    assert accumulated_relative_phase("none", h, 3, 9) == pytest.approx(10 * (h[4] - h[3]))


def test_static_disorder_phase_dwarfs_echo_bound(rng):
    h = rng.normal(size=20)
    bound = 2 * np.abs(h).max()
    static = max(abs(accumulated_relative_phase("none", h, b, 10**4)) for b in range(20))
    assert static >= 1e3 * bound
