"""Generate FCIDUMP and CCSD amplitude fixtures with PySCF.

Writes, for each system, `<name>.fcidump` (with orbital-energy lines) and
`<name>.amps` (spin-orbital CCSD amplitudes, interleaved alpha/beta map,
1-based indices), plus `<name>.ref` with reference numbers.
"""
import os
import sys
import numpy as np
from pyscf import gto, scf, cc, mcscf, ao2mo, fci

OUT = sys.argv[1] if len(sys.argv) > 1 else "crates/core/tests/data"


def write_fcidump(path, norb, nelec, ms2, h1, h2, ecore, mo_e):
    h2 = ao2mo.restore(1, h2, norb)
    with open(path, "w") as f:
        f.write(f" &FCI NORB={norb},NELEC={nelec},MS2={ms2},\n")
        f.write("  ORBSYM=" + "1," * norb + "\n  ISYM=1,\n &END\n")
        for i in range(norb):
            for j in range(i + 1):
                for k in range(norb):
                    for l in range(k + 1):
                        if i * (i + 1) // 2 + j < k * (k + 1) // 2 + l:
                            continue
                        v = h2[i, j, k, l]
                        if abs(v) > 1e-14:
                            f.write(f"{v: .16e} {i+1:4d} {j+1:4d} {k+1:4d} {l+1:4d}\n")
        for i in range(norb):
            for j in range(i + 1):
                v = h1[i, j]
                if abs(v) > 1e-14:
                    f.write(f"{v: .16e} {i+1:4d} {j+1:4d}    0    0\n")
        for i in range(norb):
            f.write(f"{mo_e[i]: .16e} {i+1:4d}    0    0    0\n")
        f.write(f"{ecore: .16e}    0    0    0    0\n")


def write_amps(path, nocc, nvir, t1, t2):
    lines = []
    for i in range(nocc):
        for a in range(nvir):
            A = nocc + a
            for s in (0, 1):
                lines.append(f"S {2*i+s+1} {2*A+s+1} {t1[i,a]:.12e}")
    for i in range(nocc):
        for j in range(nocc):
            for a in range(nvir):
                for b in range(nvir):
                    # alpha-beta
                    I, J, A, B = 2 * i, 2 * j + 1, 2 * (nocc + a), 2 * (nocc + b) + 1
                    t = t2[i, j, a, b]
                    sign = 1.0
                    if I > J:
                        I, J = J, I
                        sign = -sign
                    if A > B:
                        A, B = B, A
                        sign = -sign
                    lines.append(f"D {I+1} {J+1} {A+1} {B+1} {sign*t:.12e}")
    for s in (0, 1):
        for i in range(nocc):
            for j in range(i + 1, nocc):
                for a in range(nvir):
                    for b in range(a + 1, nvir):
                        t = t2[i, j, a, b] - t2[i, j, b, a]
                        I, J = 2 * i + s, 2 * j + s
                        A, B = 2 * (nocc + a) + s, 2 * (nocc + b) + s
                        lines.append(f"D {I+1} {J+1} {A+1} {B+1} {t:.12e}")
    with open(path, "w") as f:
        f.write("# spin-orbital CCSD amplitudes, 1-based, interleaved (2p+1 = alpha p)\n")
        f.write("\n".join(lines) + "\n")


def active_space(name, mol, ncore, ncas, nelecas, guess=None):
    mf = scf.RHF(mol).run(conv_tol=1e-12)
    mc = mcscf.CASCI(mf, ncas, nelecas)
    h1, ecore = mc.get_h1eff()
    h2 = mc.get_h2eff()
    mo_e = mf.mo_energy[ncore:ncore + ncas]
    nocc = nelecas // 2
    write_fcidump(f"{OUT}/{name}.fcidump", ncas, nelecas, 0, h1, h2, ecore, mo_e)
    mycc = cc.CCSD(mf, frozen=ncore if ncore else None)
    mycc.max_cycle = 1000
    mycc.conv_tol = 1e-7
    mycc.kernel(*(guess or (None, None)))
    if not mycc.converged:
        raise RuntimeError(f"CCSD did not converge for {name}")
    write_amps(f"{OUT}/{name}.amps", nocc, ncas - nocc, mycc.t1, mycc.t2)
    mc.fcisolver.conv_tol = 1e-13
    mc.kernel()
    e_cas, ci = mc.e_tot, mc.ci
    hf_overlap2 = float(ci[0, 0] ** 2)
    with open(f"{OUT}/{name}.ref", "w") as f:
        f.write(f"e_hf={mf.e_tot:.12f}\n")
        f.write(f"e_casci={e_cas:.12f}\n")
        f.write(f"hf_overlap2={hf_overlap2:.6f}\n")
        f.write(f"hf_overlap={abs(float(ci[0, 0])):.6f}\n")
    print(name, mf.e_tot, e_cas, hf_overlap2)
    return mycc.t1, mycc.t2


if __name__ == "__main__":
    r = 1.5
    h4 = gto.M(atom=[("H", (0, 0, i * r)) for i in range(4)], basis="sto-3g", unit="Angstrom")
    active_space("h4_chain_r150", h4, 0, 4, 4)
    # Stretched N2 CCSD only converges when continued from shorter bonds.
    guess = None
    for step in range(11, 26):
        rnn = step / 10
        n2 = gto.M(atom=f"N 0 0 0; N 0 0 {rnn}", basis="sto-3g", unit="Angstrom", verbose=0)
        name = f"n2_sto3g_r{step * 10:03d}"
        guess = active_space(name, n2, 2, 8, 10, guess)
        if step not in (11, 18, 25):
            for ext in ("fcidump", "amps", "ref"):
                os.remove(f"{OUT}/{name}.{ext}")
