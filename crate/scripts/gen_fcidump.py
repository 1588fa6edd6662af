"""Generate STO-3G FCIDUMP fixtures for H2 and linear H4.

Requires pyscf. Writes files into data/ named <molecule>_<R>.fcidump where R
is the H-H distance in Angstrom. Also writes data/fci_reference.csv with the
PySCF FCI energies, used only as an external cross-check in tests.
"""
import os
import sys

from pyscf import fci, gto, scf
from pyscf.tools import fcidump

H2_GRID = [0.3, 0.5, 0.7, 0.7414, 0.9, 1.1, 1.3, 1.5, 1.7, 1.9, 2.1]
H4_GRID = [0.8, 1.0, 1.5, 2.0]


def geometry(molecule, r):
    n = {"h2": 2, "h4": 4}[molecule]
    return [("H", (0.0, 0.0, i * r)) for i in range(n)]


def main(out_dir):
    rows = []
    for molecule, grid in (("h2", H2_GRID), ("h4", H4_GRID)):
        for r in grid:
            mol = gto.M(atom=geometry(molecule, r), basis="sto-3g", unit="Angstrom", verbose=0)
            mf = scf.RHF(mol)
            mf.conv_tol = 1e-12
            mf.kernel()
            path = os.path.join(out_dir, f"{molecule}_{r!r}.fcidump")
            fcidump.from_scf(mf, path, tol=1e-15)
            e_fci = fci.FCI(mf).kernel()[0]
            rows.append((molecule, r, mf.e_tot, e_fci))
            print(path, mf.e_tot, e_fci)
    with open(os.path.join(out_dir, "fci_reference.csv"), "w") as fh:
        fh.write("molecule,R_angstrom,E_rhf_hartree,E_fci_hartree\n")
        for molecule, r, e_hf, e_fci in rows:
            fh.write(f"{molecule},{r},{e_hf:.12f},{e_fci:.12f}\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data")
