import math

import numpy as np
import pytest
from scipy.linalg import expm

from fermiproc.fock import build_basis
from fermiproc.gates import register_unitary
from fermiproc.hamiltonian import (
    LGTModel,
    gauss_eigenvalues,
    gauss_operator,
    lgt_dense,
    parse_lattice,
    single_plaquette,
)
from fermiproc.trotter import (
    cnot_gates,
    dressed_hopping_gates,
    hadamard_gates,
    lgt_trotter_gates,
    lgt_trotter_step,
    plaquette_gates,
)

from oracles import MixedOps, SX, SZ

COUPLINGS = dict(lambda_e=0.7, lambda_b=0.5, lambda_j=0.9, lambda_m=0.3)


def step_unitary(model, dt, N):
    basis = build_basis(model.n_sites, N)
    return register_unitary(lgt_trotter_gates(model, dt), model.kinds, basis), basis


def test_hadamard_and_cnot():
    # one idle fermionic mode in front of two qubits
    kinds = "fqq"
    ops = MixedOps(kinds)
    h = register_unitary(hadamard_gates(1), kinds, build_basis(1))
    target = ops.pauli((SX + SZ) / math.sqrt(2), 1)
    ov = np.vdot(target, h) / 8
    np.testing.assert_allclose(h, ov * target, atol=1e-13)
    cx = register_unitary(cnot_gates(1, 2), kinds, build_basis(1))
    # control in |1> flips the target
    p1 = ops.occ(1)
    want = (np.eye(8) - p1) + p1 @ ops.pauli(SX, 2)
    ov = np.vdot(want, cx) / 8
    np.testing.assert_allclose(cx, ov * want, atol=1e-13)


def test_plaquette_gate_is_exact():
    kinds = "fqqqq"
    ops = MixedOps(kinds)
    zzzz = ops.pauli(SZ, 1) @ ops.pauli(SZ, 2) @ ops.pauli(SZ, 3) @ ops.pauli(SZ, 4)
    u = register_unitary(plaquette_gates((1, 2, 3, 4), 0.37), kinds, build_basis(1))
    want = expm(-0.37j * zzzz)
    ov = np.vdot(want, u) / u.shape[0]
    assert abs(abs(ov) - 1) < 1e-12
    np.testing.assert_allclose(u, ov * want, atol=1e-12)


def test_dressed_hopping_is_exact():
    kinds = "ffq"
    ops = MixedOps(kinds)
    hop = ops.cd(0) @ ops.c(1)
    gen = (hop + hop.conj().T) @ ops.pauli(SZ, 2)
    u = register_unitary(dressed_hopping_gates(0, 1, 2, 0.45), kinds, build_basis(2))
    np.testing.assert_allclose(u, expm(-0.45j * gen), atol=1e-13)


@pytest.mark.parametrize("which", ["lambda_e", "lambda_b", "lambda_m"])
def test_single_coupling_step_is_exact(which):
    couplings = {k: 0.0 for k in COUPLINGS}
    couplings[which] = 0.8
    model = single_plaquette(**couplings)
    u, basis = step_unitary(model, 0.3, 2)
    np.testing.assert_allclose(u, expm(-0.3j * lgt_dense(model, basis)), atol=1e-12)


def test_single_link_hopping_is_exact():
    model = LGTModel([(0,), (1,)], [(0, 1)], [], lambda_e=0, lambda_b=0, lambda_j=1.1, lambda_m=0)
    u, basis = step_unitary(model, 0.4, 1)
    np.testing.assert_allclose(u, expm(-0.4j * lgt_dense(model, basis)), atol=1e-13)


def test_zero_couplings_give_identity():
    model = single_plaquette(lambda_e=0, lambda_b=0, lambda_j=0, lambda_m=0)
    assert lgt_trotter_gates(model, 0.1) == []
    u, _ = step_unitary(model, 0.1, 2)
    np.testing.assert_allclose(u, np.eye(u.shape[0]))


def test_step_error_is_second_order_per_step():
    model = single_plaquette(**COUPLINGS)
    errs = []
    for dt in (0.1, 0.05, 0.025):
        u, basis = step_unitary(model, dt, 2)
        errs.append(np.linalg.norm(u - expm(-1j * dt * lgt_dense(model, basis)), 2))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all(np.abs(ratios - 4) < 0.4)


@pytest.mark.parametrize("N", [0, 1, 2, 3])
def test_gauss_operators(N):
    model = single_plaquette(**COUPLINGS)
    basis = build_basis(4, N)
    h = lgt_dense(model, basis)
    vs = [gauss_operator(model, basis, x) for x in range(4)]
    for v in vs:
        np.testing.assert_allclose(v @ v, np.eye(len(v)), atol=0)
        assert np.linalg.norm(h @ v - v @ h, 2) < 1e-12
    for a in vs:
        for b in vs:
            assert np.linalg.norm(a @ b - b @ a) == 0


def test_trotter_step_commutes_with_gauss_operators():
    model = single_plaquette(**COUPLINGS)
    u, basis = step_unitary(model, 0.07, 2)
    for x in range(4):
        v = gauss_operator(model, basis, x)
        assert np.linalg.norm(u @ v - v @ u, 2) < 1e-12


def test_gauss_operators_multiply_to_particle_parity():
    # every link is flipped twice, leaving (-1)^N
    model = single_plaquette(**COUPLINGS)
    for N in range(5):
        basis = build_basis(4, N)
        prod = np.eye(basis.dim * 16)
        for x in range(4):
            prod = prod @ gauss_operator(model, basis, x)
        np.testing.assert_allclose(prod, (-1) ** N * np.eye(len(prod)), atol=0)


def test_gauss_eigenvalues_of_projected_state():
    model = single_plaquette(**COUPLINGS)
    basis = build_basis(4, 2)
    vec = np.zeros(basis.dim * 16, dtype=complex)
    vec[0] = 1.0
    g = [gauss_operator(model, basis, x) for x in range(4)]
    for v in g:
        vec = 0.5 * (vec + v @ vec)
    vec /= np.linalg.norm(vec)
    np.testing.assert_allclose(gauss_eigenvalues(model, basis, vec), 1.0, atol=1e-14)


def test_lattice_file():
    text = """
    # unit square
    site 0 0 0
    site 1 1 0
    site 2 1 1
    site 3 0 1
    link 0 0 1
    link 1 1 2
    link 2 2 3
    link 3 3 0
    plaquette 0 1 2 3
    """
    model = parse_lattice(text, **COUPLINGS)
    ref = single_plaquette(**COUPLINGS)
    assert model.coords == ref.coords and model.links == ref.links and model.plaquettes == ref.plaquettes
    circ = lgt_trotter_step(model, 0.1)
    circ.check_layers()


@pytest.mark.parametrize(
    "text",
    [
        "site 0 0 0\nsite 1 1 0\nlink 0 0 0\n",
        "site 0 0 0\nsite 1 1 0\nlink 0 0 1\nplaquette 0 0 0 0\n",
        "site 0 0 0\nsite 2 1 0\nlink 0 0 2\n",
        "site 0 0 0\nsite 1 1 0\nlink 0 0 1\nsite 2 5 5\n",
        "site 0 0 0\nsite 1 1 x\n",
        "bond 0 1\n",
    ],
)
def test_bad_lattices(text):
    with pytest.raises(ValueError):
        parse_lattice(text)
