"""Regenerate the bundled molecular Hamiltonian files with pyscf.

    python scripts/make_fixtures.py

Spin orbitals are interleaved (alpha, beta) per spatial orbital.  The
two-body records follow H = sum h1[p,q] c+_p c_q
+ 1/2 sum (pq|rs) c+_p c+_r c_s c_q, written as ``2 p r s q`` lines.
The exact ground energy of each file is printed and stored in a header
comment so tests can compare against it.
"""

import sys
from itertools import product
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, mcscf, scf

OUT = Path(__file__).resolve().parents[1] / "src" / "fermiproc" / "data"
CUTOFF = 1e-12


def spin_orbital_tables(h1, eri, n_orb):
    one = {}
    two = {}
    for p, q in product(range(n_orb), repeat=2):
        for s in range(2):
            if abs(h1[p, q]) > CUTOFF:
                one[(2 * p + s, 2 * q + s)] = h1[p, q]
    for p, q, r, s in product(range(n_orb), repeat=4):
        v = eri[p, q, r, s]
        if abs(v) <= CUTOFF:
            continue
        for a, b in product(range(2), repeat=2):
            P, Q, R, S = 2 * p + a, 2 * q + a, 2 * r + b, 2 * s + b
            if P == R or S == Q:
                continue
            two[(P, R, S, Q)] = two.get((P, R, S, Q), 0.0) + 0.5 * v
    return one, two


def active_space(mol, n_elec, n_orb):
    mf = scf.RHF(mol).run(verbose=0)
    cas = mcscf.CASCI(mf, n_orb, n_elec)
    cas.verbose = 0
    h1, ecore = cas.get_h1eff()
    eri = ao2mo.restore(1, cas.get_h2eff(), n_orb)
    e_casci = cas.kernel()[0]
    return h1, eri, ecore, e_casci


def write(name, mol_desc, h1, eri, ecore, e_ref, n_orb):
    one, two = spin_orbital_tables(h1, eri, n_orb)
    e_ref, ecore = float(e_ref), float(ecore)
    one = {k: float(v) for k, v in one.items()}
    two = {k: float(v) for k, v in two.items()}
    lines = [
        f"# {mol_desc}",
        f"# exact ground energy (CASCI) {e_ref!r}",
        f"L {2 * n_orb}",
        f"0 {ecore!r} 0.0",
    ]
    lines += [f"1 {p} {q} {v!r} 0.0" for (p, q), v in sorted(one.items())]
    lines += ["2 " + " ".join(map(str, k)) + f" {v!r} 0.0" for k, v in sorted(two.items()) if abs(v) > CUTOFF]
    (OUT / name).write_text("\n".join(lines) + "\n")
    print(name, e_ref)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    h2 = gto.M(atom="H 0 0 0; H 0 0 0.735", basis="sto-3g", verbose=0)
    write("h2.ham", "H2 0.735 A STO-3G, full space 2e/2o", *active_space(h2, 2, 2), 2)
    lih = gto.M(atom="Li 0 0 0; H 0 0 1.45", basis="sto-3g", verbose=0)
    write("lih.ham", "LiH 1.45 A STO-3G, CAS 2e/4o", *active_space(lih, 2, 4), 4)


if __name__ == "__main__":
    sys.exit(main())
