"""Number-conserving fermionic Hamiltonians and the Z2 lattice gauge model.

Hamiltonian files are plain text::

    # comment
    L 4
    0 -7.86 0.0            constant energy offset (optional)
    1 i j re im            h1[i, j] c+_i c_j
    2 i j k l re im        h2[i, j, k, l] c+_i c+_j c_k c_l

Indices are 0-based.  Two-body coefficients multiply the operator string
exactly as written; nothing is reordered on load.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .fock import DENSE_DIM_LIMIT, FockBasis, LadderTerm, build_basis, dense_matrix
from .register import FERMION, QUBIT

HERMITICITY_TOL = 1e-10


class HamiltonianFormatError(ValueError):
    pass


def _two_body_partner(key):
    i, j, k, l = key
    return (l, k, j, i)


@dataclass
class SecondQuantizedHamiltonian:
    L: int
    one_body: dict[tuple[int, int], complex] = field(default_factory=dict)
    two_body: dict[tuple[int, int, int, int], complex] = field(default_factory=dict)
    constant: float = 0.0

    def __post_init__(self):
        for key in (*self.one_body, *self.two_body):
            if any(not 0 <= m < self.L for m in key):
                raise ValueError(f"index in {key} outside [0, {self.L})")

    def hermiticity_error(self) -> float:
        err = 0.0
        for (i, j), h in self.one_body.items():
            err = max(err, abs(h - np.conj(self.one_body.get((j, i), 0.0))))
        canon = canonical_two_body(self.two_body)
        for (cre, ann), g in canon.items():
            err = max(err, abs(g - np.conj(canon.get((ann, cre), 0.0))))
        return float(err)

    def is_hermitian(self, tol: float = HERMITICITY_TOL) -> bool:
        return self.hermiticity_error() <= tol

    def terms(self) -> list[LadderTerm]:
        out = [LadderTerm((i,), (j,), h) for (i, j), h in self.one_body.items() if h != 0]
        for (i, j, k, l), h in self.two_body.items():
            if h == 0 or i == j or k == l:
                continue  # Pauli exclusion: identically zero
            out.append(LadderTerm((i, j), (k, l), h))
        return out

    def dense(self, basis: FockBasis, max_dim: int = DENSE_DIM_LIMIT) -> np.ndarray:
        m = dense_matrix(self.terms(), basis, max_dim)
        m[np.diag_indices_from(m)] += self.constant
        return m

    def permuted(self, perm: Sequence[int]) -> "SecondQuantizedHamiltonian":
        """Relabel mode ``m`` as ``perm[m]``."""
        p = list(perm)
        return SecondQuantizedHamiltonian(
            self.L,
            {(p[i], p[j]): h for (i, j), h in self.one_body.items()},
            {tuple(p[m] for m in key): h for key, h in self.two_body.items()},
            self.constant,
        )

    def with_hermitian_closure(self) -> tuple["SecondQuantizedHamiltonian", int]:
        """Copy with missing conjugate partners filled in; also returns how many were added.

        Two-body partners are matched as operators (after sorting each index
        pair), so ``h c+_0 c+_1 c_0 c_1`` with real ``h`` needs no partner.
        """
        one = dict(self.one_body)
        two = dict(self.two_body)
        added = 0
        for (i, j), h in self.one_body.items():
            if (j, i) not in one:
                one[(j, i)] = np.conj(h)
                added += 1
        canon = canonical_two_body(self.two_body)
        for (cre, ann), g in canon.items():
            if (ann, cre) not in canon:
                key = (ann[1], ann[0], cre[1], cre[0])
                two[key] = two.get(key, 0) + np.conj(g)
                added += 1
        return SecondQuantizedHamiltonian(self.L, one, two, self.constant), added


def _perm_sign(pair: tuple[int, int]) -> int:
    return -1 if pair[0] > pair[1] else 1


def canonical_two_body(two_body: dict) -> dict[tuple[tuple[int, int], tuple[int, int]], complex]:
    """Two-body coefficients keyed by (sorted creators, sorted annihilators), signs absorbed."""
    out: dict = {}
    for (i, j, k, l), h in two_body.items():
        if i == j or k == l or h == 0:
            continue
        sign = _perm_sign((i, j)) * _perm_sign((k, l))
        key = ((min(i, j), max(i, j)), (min(k, l), max(k, l)))
        out[key] = out.get(key, 0) + sign * h
    return out


def _num(tok: str, lineno: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise HamiltonianFormatError(f"line {lineno}: cannot parse number {tok!r}") from None


def _idx(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise HamiltonianFormatError(f"line {lineno}: cannot parse index {tok!r}") from None


def parse_hamiltonian(text: str, source: str = "<string>") -> SecondQuantizedHamiltonian:
    L = None
    const = 0.0
    one: dict = {}
    two: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        head = tok[0]
        if head == "L":
            if L is not None:
                raise HamiltonianFormatError(f"line {lineno}: repeated L header")
            if len(tok) != 2:
                raise HamiltonianFormatError(f"line {lineno}: expected 'L <modes>'")
            L = _idx(tok[1], lineno)
            if L < 1:
                raise HamiltonianFormatError(f"line {lineno}: mode count must be positive")
            continue
        if L is None:
            raise HamiltonianFormatError(f"line {lineno}: coefficient before the 'L' header")
        order = {"0": 0, "1": 2, "2": 4}.get(head)
        if order is None:
            raise HamiltonianFormatError(f"line {lineno}: unknown record type {head!r}")
        if len(tok) != 1 + order + 2:
            raise HamiltonianFormatError(f"line {lineno}: expected {order} indices and re im")
        key = tuple(_idx(t, lineno) for t in tok[1 : 1 + order])
        if any(not 0 <= m < L for m in key):
            raise HamiltonianFormatError(f"line {lineno}: index outside [0, {L})")
        val = complex(_num(tok[-2], lineno), _num(tok[-1], lineno))
        if order == 0:
            if abs(val.imag) > HERMITICITY_TOL:
                raise HamiltonianFormatError(f"line {lineno}: constant term must be real")
            const += val.real
            continue
        table = one if order == 2 else two
        if key in table and abs(table[key] - val) > HERMITICITY_TOL:
            raise HamiltonianFormatError(f"line {lineno}: conflicting duplicate entry for {key}")
        table[key] = val
    if L is None:
        raise HamiltonianFormatError(f"{source}: missing 'L <modes>' header")
    ham = SecondQuantizedHamiltonian(L, one, two, const)
    # partners that are present must agree; missing ones are filled in
    for (i, j), h in one.items():
        if (j, i) in one and abs(one[(j, i)] - np.conj(h)) > HERMITICITY_TOL:
            raise HamiltonianFormatError(f"{source}: h1{(i, j)} and h1{(j, i)} are not conjugate")
    canon = canonical_two_body(two)
    for (cre, ann), g in canon.items():
        if (ann, cre) in canon and abs(canon[(ann, cre)] - np.conj(g)) > HERMITICITY_TOL:
            raise HamiltonianFormatError(f"{source}: two-body terms {cre}{ann} and {ann}{cre} are not conjugate")
    ham, added = ham.with_hermitian_closure()
    if added:
        warnings.warn(f"{source}: added {added} missing Hermitian-conjugate coefficient(s)", stacklevel=3)
    return ham


def load_hamiltonian(path: str | Path) -> SecondQuantizedHamiltonian:
    path = Path(path)
    return parse_hamiltonian(path.read_text(), str(path))


def format_hamiltonian(ham: SecondQuantizedHamiltonian) -> str:
    def num(v: complex) -> str:
        v = complex(v)  # numpy scalars would otherwise print as np.float64(...)
        return f"{v.real!r} {v.imag!r}"

    lines = [f"L {ham.L}"]
    if ham.constant:
        lines.append(f"0 {num(ham.constant)}")
    for (i, j), h in sorted(ham.one_body.items()):
        lines.append(f"1 {i} {j} {num(h)}")
    for key, h in sorted(ham.two_body.items()):
        lines.append("2 " + " ".join(map(str, key)) + f" {num(h)}")
    return "\n".join(lines) + "\n"


def random_hamiltonian(L: int, n_terms: int, rng: np.random.Generator, two_body: bool = True) -> SecondQuantizedHamiltonian:
    """Random Hermitian model: ``n_terms`` random terms, each added together with its conjugate."""
    one: dict = {}
    two: dict = {}
    for _ in range(n_terms):
        h = complex(rng.normal(), rng.normal())
        if two_body and L >= 4 and rng.random() < 0.5:
            i, j, k, l = (int(x) for x in rng.permutation(L)[:4])
            if rng.random() < 0.5:
                k = i  # density-dependent hopping shape
            for key, v in (((i, j, k, l), h), ((l, k, j, i), np.conj(h))):
                two[key] = two.get(key, 0) + 0.5 * v
        else:
            i, j = (int(x) for x in rng.choice(L, size=2, replace=False))
            one[(i, j)] = one.get((i, j), 0) + h
            one[(j, i)] = one.get((j, i), 0) + np.conj(h)
    return SecondQuantizedHamiltonian(L, one, two)


# ---------------------------------------------------------------------------
# Z2 lattice gauge theory
# ---------------------------------------------------------------------------

@dataclass
class LGTModel:
    """Matter fermions on sites, Z2 gauge qubits on links.

    Register layout: matter sites first (fermionic modes ``0..n_sites-1``),
    then one qubit per link.  Staggering ``s_x`` is the parity of the site's
    coordinate sum.
    """

    coords: list[tuple[int, ...]]
    links: list[tuple[int, int]]
    plaquettes: list[tuple[int, int, int, int]]
    lambda_e: float = 1.0
    lambda_b: float = 1.0
    lambda_j: float = 1.0
    lambda_m: float = 1.0

    def __post_init__(self):
        n = len(self.coords)
        if n == 0:
            raise ValueError("lattice has no sites")
        for a, b in self.links:
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise ValueError(f"link ({a}, {b}) does not join two distinct sites")
        for x in range(n):
            if not self.incident(x):
                raise ValueError(f"site {x} has no incident link")
        for plaq in self.plaquettes:
            self._check_loop(plaq)

    def _check_loop(self, plaq):
        if len(plaq) != 4 or len(set(plaq)) != 4:
            raise ValueError(f"plaquette {plaq} must list four distinct links")
        degree: dict[int, int] = {}
        for l in plaq:
            if not 0 <= l < len(self.links):
                raise ValueError(f"plaquette refers to unknown link {l}")
            for s in self.links[l]:
                degree[s] = degree.get(s, 0) + 1
        if len(degree) != 4 or any(d != 2 for d in degree.values()):
            raise ValueError(f"plaquette {plaq} does not form a closed loop")

    @property
    def n_sites(self) -> int:
        return len(self.coords)

    @property
    def n_links(self) -> int:
        return len(self.links)

    @property
    def kinds(self) -> tuple[str, ...]:
        return (FERMION,) * self.n_sites + (QUBIT,) * self.n_links

    def link_site(self, link: int) -> int:
        """Register site index of a link qubit."""
        return self.n_sites + link

    def stagger(self, x: int) -> int:
        return sum(self.coords[x]) % 2

    def incident(self, x: int) -> list[int]:
        return [n for n, (a, b) in enumerate(self.links) if x in (a, b)]

    def with_couplings(self, **kw) -> "LGTModel":
        args = dict(
            lambda_e=self.lambda_e, lambda_b=self.lambda_b, lambda_j=self.lambda_j, lambda_m=self.lambda_m
        )
        args.update(kw)
        return LGTModel(list(self.coords), list(self.links), list(self.plaquettes), **args)


def single_plaquette(**couplings) -> LGTModel:
    """Four sites on a unit square, links 0..3 running around it."""
    coords = [(0, 0), (1, 0), (1, 1), (0, 1)]
    links = [(0, 1), (1, 2), (2, 3), (3, 0)]
    return LGTModel(coords, links, [(0, 1, 2, 3)], **couplings)


def parse_lattice(text: str, **couplings) -> LGTModel:
    """Lattice spec lines: ``site <id> <x> <y>``, ``link <id> <a> <b>``, ``plaquette <l1> <l2> <l3> <l4>``."""
    sites: dict[int, tuple[int, ...]] = {}
    links: dict[int, tuple[int, int]] = {}
    plaqs: list[tuple[int, int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        try:
            vals = [int(t) for t in tok[1:]]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field") from None
        if tok[0] == "site" and len(vals) >= 2:
            sites[vals[0]] = tuple(vals[1:])
        elif tok[0] == "link" and len(vals) == 3:
            links[vals[0]] = (vals[1], vals[2])
        elif tok[0] == "plaquette" and len(vals) == 4:
            plaqs.append(tuple(vals))
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    if sorted(sites) != list(range(len(sites))) or sorted(links) != list(range(len(links))):
        raise ValueError("site and link ids must be 0..n-1 without gaps")
    return LGTModel(
        [sites[i] for i in range(len(sites))], [links[i] for i in range(len(links))], plaqs, **couplings
    )


# single-qubit operators in the column basis (bit 0 = |1~>, bit 1 = |1>); Z = +1 on |1>
_SX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_SZ = np.diag([-1.0, 1.0]).astype(np.complex128)


def _qubit_op(op: np.ndarray, q: int, nq: int) -> np.ndarray:
    return np.kron(np.kron(np.eye(1 << (nq - 1 - q)), op), np.eye(1 << q))


def lgt_basis(model: LGTModel, N: int | None = None) -> FockBasis:
    return build_basis(model.n_sites, N)


def lgt_dense(model: LGTModel, basis: FockBasis, max_dim: int = DENSE_DIM_LIMIT) -> np.ndarray:
    """Dense lattice-gauge Hamiltonian on (fermion basis) x (link qubits), flattened row-major."""
    nq = model.n_links
    dim = basis.dim << nq
    if dim > max_dim:
        raise ValueError(f"dense LGT matrix of dimension {dim} exceeds limit {max_dim}")
    f_id = np.eye(basis.dim)
    q_id = np.eye(1 << nq)
    h = np.zeros((dim, dim), dtype=np.complex128)
    for l in range(nq):
        h += model.lambda_e * np.kron(f_id, _qubit_op(_SX, l, nq))
    for plaq in model.plaquettes:
        zz = q_id.astype(np.complex128)
        for l in plaq:
            zz = zz @ _qubit_op(_SZ, l, nq)
        h += model.lambda_b * np.kron(f_id, zz)
    for l, (x, y) in enumerate(model.links):
        hop = dense_matrix([LadderTerm((x,), (y,)), LadderTerm((y,), (x,))], basis)
        h += model.lambda_j * np.kron(hop, _qubit_op(_SZ, l, nq))
    mass = dense_matrix(
        [LadderTerm((x,), (x,), (-1.0) ** model.stagger(x)) for x in range(model.n_sites)], basis
    )
    h += model.lambda_m * np.kron(mass, q_id)
    return h


def gauss_operator(model: LGTModel, basis: FockBasis, x: int) -> np.ndarray:
    """``(-1)^{n_x}`` times sigma-x on every link touching ``x``."""
    if not 0 <= x < model.n_sites:
        raise IndexError(f"site {x} outside lattice")
    nq = model.n_links
    parity = np.diag((-1.0) ** basis.occupations[:, x]).astype(np.complex128)
    flips = np.eye(1 << nq, dtype=np.complex128)
    for l in model.incident(x):
        flips = flips @ _qubit_op(_SX, l, nq)
    return np.kron(parity, flips)


def gauss_eigenvalues(model: LGTModel, basis: FockBasis, vec: np.ndarray) -> np.ndarray:
    """``<V_x>`` for every site."""
    return np.array([np.vdot(vec, gauss_operator(model, basis, x) @ vec).real for x in range(model.n_sites)])
