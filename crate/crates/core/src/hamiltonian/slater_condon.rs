//! Slater–Condon rules on interleaved spin-orbital bitmasks.
//!
//! Fermionic signs follow the Jordan–Wigner convention: a ladder operator on
//! spin orbital `q` picks up `(-1)^{#occupied below q}`.

use super::determinant::Determinant;
use super::integrals::MolecularIntegrals;
use crate::{Error, Result};

#[inline]
fn sign_below(occ: u64, q: u32) -> f64 {
    if (occ & ((1u64 << q) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `⟨PQ|RS⟩` over spin orbitals, chemists' `(pr|qs)` with spin deltas.
#[inline]
fn phys(ints: &MolecularIntegrals, p: u32, q: u32, r: u32, s: u32) -> f64 {
    if (p & 1) != (r & 1) || (q & 1) != (s & 1) {
        return 0.0;
    }
    ints.h2((p >> 1) as usize, (r >> 1) as usize, (q >> 1) as usize, (s >> 1) as usize)
}

#[inline]
fn anti(ints: &MolecularIntegrals, p: u32, q: u32, r: u32, s: u32) -> f64 {
    phys(ints, p, q, r, s) - phys(ints, p, q, s, r)
}

#[inline]
fn h1_so(ints: &MolecularIntegrals, p: u32, q: u32) -> f64 {
    if (p & 1) != (q & 1) {
        0.0
    } else {
        ints.h1((p >> 1) as usize, (q >> 1) as usize)
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros();
            m &= m - 1;
            Some(b)
        }
    })
}

/// Diagonal element `⟨x|H|x⟩` (includes the core energy).
pub fn diagonal(x: &Determinant, ints: &MolecularIntegrals) -> f64 {
    let occ = x.spin_orbitals();
    let mut e = ints.e_core;
    for i in bits(occ) {
        e += h1_so(ints, i, i);
        for j in bits(occ) {
            if j > i {
                e += anti(ints, i, j, i, j);
            }
        }
    }
    e
}

/// `⟨bra|H|ket⟩` for determinants given as spin-orbital masks of equal
/// particle number. Zero beyond double excitations.
pub fn matrix_element_masks(bra: u64, ket: u64, ints: &MolecularIntegrals) -> f64 {
    let diff = bra ^ ket;
    match diff.count_ones() {
        0 => diagonal(&Determinant::from_spin_orbitals(ket), ints),
        2 => {
            let i = (ket & diff).trailing_zeros();
            let a = (bra & diff).trailing_zeros();
            let mut sign = sign_below(ket, i);
            let mid = ket ^ (1u64 << i);
            sign *= sign_below(mid, a);
            let mut v = h1_so(ints, a, i);
            for j in bits(mid) {
                v += anti(ints, a, j, i, j);
            }
            sign * v
        }
        4 => {
            let mut holes = bits(ket & diff);
            let (i, j) = (holes.next().unwrap(), holes.next().unwrap());
            let mut parts = bits(bra & diff);
            let (a, b) = (parts.next().unwrap(), parts.next().unwrap());
            // a†_a a†_b a_j a_i |ket⟩, applied right to left.
            let mut occ = ket;
            let mut sign = sign_below(occ, i);
            occ ^= 1u64 << i;
            sign *= sign_below(occ, j);
            occ ^= 1u64 << j;
            sign *= sign_below(occ, b);
            occ ^= 1u64 << b;
            sign *= sign_below(occ, a);
            sign * anti(ints, a, b, i, j)
        }
        _ => 0.0,
    }
}

/// `⟨x|H|y⟩` with the fermionic sign of ascending spin-orbital ordering.
pub fn slater_condon(x: &Determinant, y: &Determinant, ints: &MolecularIntegrals) -> Result<f64> {
    if x.sector() != y.sector() {
        let (a, b) = x.sector();
        let (c, d) = y.sector();
        return Err(Error::SectorMismatch(a, b, c, d));
    }
    Ok(matrix_element_masks(x.spin_orbitals(), y.spin_orbitals(), ints))
}

/// Spin-orbital masks connected to `ket` by at most a double excitation
/// within the same `(n_alpha, n_beta)` sector, excluding `ket` itself.
pub fn connected_masks(ket: u64, n_spin_orbitals: u32, mut visit: impl FnMut(u64)) {
    let full = if n_spin_orbitals >= 64 { u64::MAX } else { (1u64 << n_spin_orbitals) - 1 };
    let occ: Vec<u32> = bits(ket).collect();
    let vir: Vec<u32> = bits(!ket & full).collect();
    for &i in &occ {
        for &a in &vir {
            if (i ^ a) & 1 == 0 {
                visit(ket ^ (1u64 << i) ^ (1u64 << a));
            }
        }
    }
    for (n, &i) in occ.iter().enumerate() {
        for &j in &occ[n + 1..] {
            let spins_ij = (i & 1) + (j & 1);
            for (m, &a) in vir.iter().enumerate() {
                for &b in &vir[m + 1..] {
                    let spins_ab = (a & 1) + (b & 1);
                    if spins_ab != spins_ij {
                        continue;
                    }
                    // For one α and one β the spins must pair up, which the
                    // count check already guarantees.
                    visit(ket ^ (1u64 << i) ^ (1u64 << j) ^ (1u64 << a) ^ (1u64 << b));
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::determinant::sector_determinants;
    use crate::rng;

    #[test]
    fn beyond_double_is_zero() {
        let ints = MolecularIntegrals::random(4, 2, 2, &mut rng::stream(5, &[]));
        let x = Determinant::new(0b0011, 0b0011);
        let y = Determinant::new(0b1100, 0b0101);
        assert_eq!(x.excitation_degree(&y), 3);
        assert_eq!(slater_condon(&x, &y, &ints).unwrap(), 0.0);
    }

    #[test]
    fn symmetric() {
        let ints = MolecularIntegrals::random(4, 2, 1, &mut rng::stream(6, &[]));
        let dets = sector_determinants(4, 2, 1);
        for x in &dets {
            for y in &dets {
                let a = slater_condon(x, y, &ints).unwrap();
                let b = slater_condon(y, x, &ints).unwrap();
                assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sector_mismatch() {
        let ints = MolecularIntegrals::random(3, 1, 1, &mut rng::stream(6, &[]));
        let r = slater_condon(&Determinant::new(1, 1), &Determinant::new(3, 0), &ints);
        assert!(matches!(r, Err(Error::SectorMismatch(..))));
    }

    #[test]
    fn connections_cover_all_degree_le_two() {
        let dets = sector_determinants(5, 2, 2);
        let x = dets[7];
        let mut found = Vec::new();
        connected_masks(x.spin_orbitals(), 10, |m| found.push(m));
        found.sort_unstable();
        let mut expect: Vec<u64> = dets
            .iter()
            .filter(|y| **y != x && x.excitation_degree(y) <= 2)
            .map(|y| y.spin_orbitals())
            .collect();
        expect.sort_unstable();
        assert_eq!(found, expect);
    }
}
