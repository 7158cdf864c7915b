#!/usr/bin/env python3
"""Regenerate the bundled H2 STO-3G Bravyi-Kitaev coefficient table and the
committed qubit operators (S^2, S_z, N, cluster generators).

Requires pyscf and openfermion. Usage:

    python3 scripts/gen_h2_bk.py crates/core/data/h2_sto3g_bk.json
"""
import json
import sys

import numpy as np
import openfermion as of
from openfermion import FermionOperator, InteractionOperator, bravyi_kitaev, hermitian_conjugated
from openfermion.chem.molecular_data import spinorb_from_spatial
from pyscf import ao2mo, fci, gto, scf

N_QUBITS = 4


def to_label(term):
    label = ["I"] * N_QUBITS
    for q, p in term:
        label[q] = p
    return "".join(label)


def bk_terms(op):
    q = bravyi_kitaev(op)
    q.compress(1e-14)
    return q


def hamiltonian(r):
    mol = gto.M(atom=f"H 0 0 0; H 0 0 {r}", basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    one, two = spinorb_from_spatial(h1, eri.transpose(0, 2, 3, 1))
    op = of.get_fermion_operator(InteractionOperator(mol.energy_nuc(), one, 0.5 * two))
    q = bk_terms(op)
    terms = {}
    for t, v in q.terms.items():
        assert abs(v.imag) < 1e-12
        terms[to_label(t)] = float(v.real)
    e_fci = fci.FCI(mf).kernel()[0]
    dense = of.get_sparse_operator(q, N_QUBITS).toarray()
    assert abs(np.linalg.eigvalsh(dense)[0] - e_fci) < 1e-9, r
    return terms, e_fci


def show(name, op):
    q = bk_terms(op)
    print(name)
    for t, v in sorted(q.terms.items(), key=lambda kv: to_label(kv[0])):
        print(f"    {to_label(t)} {v}")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "h2_sto3g_bk.json"
    records = []
    for k in range(1, 26):
        r = round(0.1 * k, 10)
        terms, e_fci = hamiltonian(r)
        records.append({"r": r, "terms": terms})
        print(f"r={r:.1f}  E_fci={e_fci:.10f}", file=sys.stderr)
    with open(out, "w") as fh:
        json.dump(records, fh, indent=1)
        fh.write("\n")

    show("S^2", of.s_squared_operator(2))
    show("S_z", of.sz_operator(2))
    show("N", of.number_operator(N_QUBITS))
    # Cluster generators: one representative string per excitation, the
    # highest-weight string of bk(T - T^dagger), ties broken by label order.
    excitations = [((2, 1), (0, 0)), ((3, 1), (0, 0)), ((2, 1), (1, 0)), ((3, 1), (1, 0)),
                   ((3, 1), (2, 1), (1, 0), (0, 0))]
    for ex in excitations:
        t = FermionOperator(ex)
        q = bk_terms(t - hermitian_conjugated(t))
        labels = sorted(to_label(s) for s in q.terms)
        best = max(labels, key=lambda s: (sum(ch != "I" for ch in s), [-ord(ch) for ch in s]))
        print("generator", ex, "->", best, "from", labels)


if __name__ == "__main__":
    main()
