"""Regenerate the bundled FCIDUMP fixtures (requires pyscf).

Hydrogen molecule at 0.741 Angstrom and linear hydrogen chains with 0.8
Angstrom spacing, STO-3G basis, RHF canonical orbitals.
"""
import os

from pyscf import fci, gto, mp, scf, tools

HERE = os.path.dirname(os.path.abspath(__file__))


def chain(n, d):
    return "; ".join(f"H 0 0 {i * d}" for i in range(n))


def build(name, atom):
    mol = gto.M(atom=atom, basis="sto-3g", unit="Angstrom", verbose=0)
    hf = scf.RHF(mol)
    hf.conv_tol = 1e-12
    hf.kernel()
    e_mp2 = hf.e_tot + mp.MP2(hf).kernel()[0]
    e_fci = fci.FCI(hf).kernel()[0]
    path = os.path.join(HERE, f"{name}.fcidump")
    tools.fcidump.from_scf(hf, path, tol=1e-15)
    print(f"{name}: HF {hf.e_tot:.12f} MP2 {e_mp2:.12f} FCI {e_fci:.12f}")


if __name__ == "__main__":
    build("h2_sto3g", "H 0 0 0; H 0 0 0.741")
    for n in (4, 6, 8):
        build(f"h{n}_sto3g", chain(n, 0.8))
