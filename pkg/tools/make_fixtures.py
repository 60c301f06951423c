"""Regenerate the molecular fixture Hamiltonians under fixtures/.

Requires pyscf (not a package dependency).  Integrals come from an RHF
calculation; the active-space Hamiltonian is mapped to qubits with the
Jordan-Wigner transformation (spin orbital 2p+s on qubit 2p+s, qubit 0
leftmost) by building the dense second-quantized matrix and decomposing it
into Pauli strings.  Reference energies are the CASCI/FCI energies reported
by pyscf and are cross-checked against exact diagonalization of the qubit
Hamiltonian in the relevant particle-number sector.

    python tools/make_fixtures.py
"""

from __future__ import annotations

import itertools
import json
from pathlib import Path

import numpy as np
from pyscf import ao2mo, gto, mcscf, scf

from cspulse.pauli import from_matrix, to_matrix

ROOT = Path(__file__).resolve().parents[1] / "fixtures"


def annihilators(n: int) -> list[np.ndarray]:
    z = np.diag([1.0, -1.0])
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])  # |0><1|, occupied = |1>
    eye = np.eye(2)
    ops = []
    for j in range(n):
        m = np.ones((1, 1))
        for k in range(n):
            m = np.kron(m, z if k < j else lower if k == j else eye)
        ops.append(m)
    return ops


def qubit_hamiltonian(h1: np.ndarray, eri: np.ndarray, e_core: float):
    """Spatial-orbital integrals (chemist notation) -> dense spin-orbital matrix."""
    norb = h1.shape[0]
    n = 2 * norb
    a = annihilators(n)
    ad = [m.T for m in a]
    dim = 1 << n
    H = e_core * np.eye(dim)
    for p, q in itertools.product(range(norb), repeat=2):
        if abs(h1[p, q]) < 1e-14:
            continue
        for s in (0, 1):
            H += h1[p, q] * ad[2 * p + s] @ a[2 * q + s]
    for p, q, r, s in itertools.product(range(norb), repeat=4):
        g = eri[p, q, r, s]  # (pq|rs)
        if abs(g) < 1e-14:
            continue
        for s1, s2 in itertools.product((0, 1), repeat=2):
            P, Q, R, S = 2 * p + s1, 2 * q + s1, 2 * r + s2, 2 * s + s2
            H += 0.5 * g * ad[P] @ ad[R] @ a[S] @ a[Q]
    return H


def number_sector_ground(H: np.ndarray, n_elec: int) -> float:
    dim = H.shape[0]
    idx = [b for b in range(dim) if bin(b).count("1") == n_elec]
    return float(np.linalg.eigvalsh(H[np.ix_(idx, idx)])[0])


def build(name, atom, basis, ncas, nelecas, cas_orbitals=None, note=""):
    mol = gto.M(atom=atom, basis=basis, unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    mc = mcscf.CASCI(mf, ncas, nelecas)
    mo = mf.mo_coeff
    if cas_orbitals is not None:
        mo = mc.sort_mo(cas_orbitals)
    e_cas = mc.kernel(mo)[0]
    h1, e_core = mc.get_h1eff()
    eri = ao2mo.restore(1, mc.get_h2eff(), ncas)
    H = qubit_hamiltonian(h1, eri, e_core)
    ps = from_matrix(H)
    fock_ground = float(np.linalg.eigvalsh(to_matrix(ps))[0])
    sector = number_sector_ground(H, sum(nelecas) if isinstance(nelecas, tuple) else nelecas)
    print(f"{name}: n={ps.n} terms={len(ps)} casci={e_cas:.10f} sector={sector:.10f} fock={fock_ground:.10f}")
    assert abs(sector - e_cas) < 1e-8, "qubit Hamiltonian disagrees with pyscf CASCI"
    doc = {
        "name": name,
        "n_qubits": ps.n,
        "terms": [[p.label, c] for p, c in ps.sorted_items()],
        "reference_energy": fock_ground,
        "metadata": {
            "source": "pyscf RHF + CASCI integrals, Jordan-Wigner (interleaved spin orbitals)",
            "geometry": atom,
            "basis": basis,
            "active_space": f"{nelecas} electrons in {ncas} spatial orbitals",
            "casci_energy": repr(e_cas),
            "reference_note": "exact ground of the qubit Hamiltonian over all particle numbers; "
                              + ("equals the CASCI energy" if abs(fock_ground - e_cas) < 1e-8
                                 else "lies below the CASCI energy (other particle-number sector)"),
            "note": note,
        },
    }
    path = ROOT / f"{name}.ham"
    path.write_text(json.dumps(doc, indent=1) + "\n")
    return doc


if __name__ == "__main__":
    ROOT.mkdir(exist_ok=True)
    build("h2_sto3g", "H 0 0 0; H 0 0 0.735", "sto-3g", 2, 2)
    build("lih_sto3g_cas6", "Li 0 0 0; H 0 0 1.595", "sto-3g", 3, 2, cas_orbitals=[2, 3, 6],
          note="Li 1s frozen; sigma-type active orbitals")
    build("h4_chain_sto3g", "H 0 0 0; H 0 0 1.0; H 0 0 2.0; H 0 0 3.0", "sto-3g", 4, 4)
