import warnings
from importlib import resources

import numpy as np
import pytest

from fermiproc.fock import build_basis, ground_state
from fermiproc.hamiltonian import (
    HamiltonianFormatError,
    SecondQuantizedHamiltonian,
    canonical_two_body,
    format_hamiltonian,
    load_hamiltonian,
    parse_hamiltonian,
    random_hamiltonian,
)
from fermiproc.linalg import hermiticity_error


def bundled(name):
    return resources.files("fermiproc") / "data" / f"{name}.ham"


def reference_energy(path) -> float:
    for line in path.read_text().splitlines():
        if "exact ground energy" in line:
            return float(line.split()[-1])
    raise AssertionError("fixture has no reference energy")


@pytest.mark.parametrize("name,N", [("h2", 2), ("lih", 2)])
def test_bundled_fixture_ground_energy(name, N):
    path = bundled(name)
    ham = load_hamiltonian(path)
    assert ham.is_hermitian()
    h = ham.dense(build_basis(ham.L, N))
    assert hermiticity_error(h) < 1e-12
    assert ground_state(h)[0] == pytest.approx(reference_energy(path), abs=1e-9)


def test_h2_reference_value():
    # full-CI energy of H2 at 0.735 angstrom in a minimal basis, in hartree
    assert reference_energy(bundled("h2")) == pytest.approx(-1.1373, abs=1e-4)


def test_format_round_trip(rng):
    ham = random_hamiltonian(5, 8, rng)
    ham.constant = 0.25
    back = parse_hamiltonian(format_hamiltonian(ham))
    basis = build_basis(5, 2)
    np.testing.assert_allclose(back.dense(basis), ham.dense(basis), atol=1e-15)


def test_missing_partner_is_completed_with_warning():
    text = "L 3\n1 0 1 0.5 0.25\n1 2 2 1.0 0.0\n"
    with pytest.warns(UserWarning, match="added 1"):
        ham = parse_hamiltonian(text)
    assert ham.one_body[(1, 0)] == pytest.approx(0.5 - 0.25j)
    assert ham.is_hermitian()


def test_self_adjoint_two_body_needs_no_partner():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        ham = parse_hamiltonian("L 2\n2 0 1 0 1 0.7 0.0\n")
    # c+_0 c+_1 c_0 c_1 = -n_0 n_1
    h = ham.dense(build_basis(2))
    assert h[3, 3] == pytest.approx(-0.7)


@pytest.mark.parametrize(
    "text,match",
    [
        ("1 0 1 1.0 0.0\n", "before the 'L' header"),
        ("L 2\nL 3\n", "repeated"),
        ("L 2\n1 0 2 1.0 0.0\n", "outside"),
        ("L 2\n3 0 1 1.0 0.0\n", "unknown record"),
        ("L 2\n1 0 1 1.0\n", "expected 2 indices"),
        ("L 2\n1 0 1 abc 0.0\n", "cannot parse number"),
        ("L 2\n1 0 1 1.0 0.0\n1 0 1 2.0 0.0\n", "conflicting duplicate"),
        ("L 2\n1 0 1 1.0 0.0\n1 1 0 2.0 0.0\n", "not conjugate"),
        ("L 2\n0 1.0 0.5\n", "constant term must be real"),
        ("# nothing\n", "missing 'L"),
    ],
)
def test_format_errors(text, match):
    with pytest.raises(HamiltonianFormatError, match=match):
        parse_hamiltonian(text)


def test_load_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_hamiltonian(tmp_path / "absent.ham")


def test_canonical_two_body_absorbs_signs():
    table = canonical_two_body({(1, 0, 2, 3): 1.0, (0, 1, 3, 2): 0.5, (0, 0, 1, 2): 9.0})
    assert table == {((0, 1), (2, 3)): -1.5}


def test_spectrum_invariant_under_relabelling(rng):
    ham = random_hamiltonian(5, 10, rng)
    perm = rng.permutation(5)
    basis = build_basis(5, 2)
    a = np.linalg.eigvalsh(ham.dense(basis))
    b = np.linalg.eigvalsh(ham.permuted(perm).dense(basis))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_random_models_are_hermitian(rng):
    for L in (2, 4, 6):
        ham = random_hamiltonian(L, 12, rng)
        assert ham.is_hermitian()
        assert hermiticity_error(ham.dense(build_basis(L))) < 1e-12


def test_index_validation():
    with pytest.raises(ValueError):
        SecondQuantizedHamiltonian(2, {(0, 2): 1.0})
