//! Hamiltonian projected onto a determinant subspace and its lowest eigenpair.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::selection::DeterminantSet;
use super::wavefunction::SampledWavefunction;
use crate::hamiltonian::slater_condon::{connected_masks, matrix_element_masks};
use crate::hamiltonian::{hf_determinant, Determinant, MolecularIntegrals};
use crate::linalg::{lanczos_lowest, lowest_dense, CsrMatrix, DENSE_LIMIT};
use crate::{par, Error, Result};

const LANCZOS_TOL: f64 = 1e-9;
const LANCZOS_KRYLOV: usize = 120;

/// Dense subspace matrix `H_ij = ⟨x_i|H|x_j⟩`, exactly symmetric.
pub fn dense_matrix(dets: &[Determinant], ints: &MolecularIntegrals) -> DMatrix<f64> {
    let n = dets.len();
    let masks: Vec<u64> = dets.iter().map(Determinant::spin_orbitals).collect();
    let rows: Vec<Vec<f64>> = par::map_range(n, |i| {
        (0..=i)
            .map(|j| {
                if (masks[i] ^ masks[j]).count_ones() > 4 {
                    0.0
                } else {
                    matrix_element_masks(masks[i], masks[j], ints)
                }
            })
            .collect()
    });
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Sparse subspace matrix from excitation enumeration and lookup.
pub fn sparse_matrix(dets: &[Determinant], ints: &MolecularIntegrals) -> CsrMatrix {
    let masks: Vec<u64> = dets.iter().map(Determinant::spin_orbitals).collect();
    let index: HashMap<u64, u32> = masks.iter().enumerate().map(|(i, &m)| (m, i as u32)).collect();
    let nso = 2 * ints.n_orb as u32;
    let rows = par::map_range(masks.len(), |i| {
        let mut row = vec![(i as u32, matrix_element_masks(masks[i], masks[i], ints))];
        connected_masks(masks[i], nso, |m| {
            if let Some(&j) = index.get(&m) {
                let v = matrix_element_masks(masks[i], m, ints);
                if v != 0.0 {
                    row.push((j, v));
                }
            }
        });
        row.sort_by_key(|e| e.0);
        row
    });
    CsrMatrix::from_rows(rows)
}

fn fix_sign(v: &mut [f64], hf: Option<usize>) {
    let pivot = match hf {
        Some(k) if v[k].abs() > 1e-12 => k,
        _ => {
            let mut best = 0;
            for (i, x) in v.iter().enumerate() {
                if x.abs() > v[best].abs() + 1e-12 {
                    best = i;
                }
            }
            best
        }
    };
    if v[pivot] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Lowest eigenpair of `H` in the span of `dets` (any order, no duplicates).
///
/// Within a degenerate ground space the vector with the largest weight on the
/// Hartree–Fock determinant is returned; the sign makes that weight (or, if
/// HF is absent, the largest coefficient) non-negative.
pub fn diagonalize_determinants(dets: &[Determinant], ints: &MolecularIntegrals) -> Result<SampledWavefunction> {
    diagonalize_with_limit(dets, ints, DENSE_LIMIT)
}

/// As [`diagonalize_determinants`] with an explicit dense/sparse switch.
pub fn diagonalize_with_limit(dets: &[Determinant], ints: &MolecularIntegrals, dense_limit: usize) -> Result<SampledWavefunction> {
    if dets.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let mut dets = dets.to_vec();
    dets.sort();
    let sector = dets[0].sector();
    if let Some(bad) = dets.iter().find(|d| d.sector() != sector) {
        let (c, d) = bad.sector();
        return Err(Error::SectorMismatch(sector.0, sector.1, c, d));
    }
    let hf = dets.binary_search(&hf_determinant(ints)).ok();
    let n = dets.len();
    let (energy, mut v) = if n <= dense_limit {
        let (e, vecs) = lowest_dense(dense_matrix(&dets, ints));
        let v = match (hf, vecs.len()) {
            (Some(k), l) if l > 1 => {
                let mut acc = DVector::zeros(n);
                for u in &vecs {
                    acc += u * u[k];
                }
                let norm = acc.norm();
                if norm > 1e-8 {
                    acc / norm
                } else {
                    vecs[0].clone()
                }
            }
            _ => vecs[0].clone(),
        };
        (e, v.as_slice().to_vec())
    } else {
        let h = sparse_matrix(&dets, ints);
        let diag = h.diagonal();
        let lowest = (0..n).min_by(|&a, &b| diag[a].total_cmp(&diag[b])).unwrap_or(0);
        let start: Vec<f64> = (0..n)
            .map(|i| {
                let noise = ((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 11) as f64 / (1u64 << 53) as f64;
                if i == lowest { 1.0 } else { 1e-3 * (noise - 0.5) }
            })
            .collect();
        lanczos_lowest(&h, &start, LANCZOS_TOL, LANCZOS_KRYLOV)?
    };
    fix_sign(&mut v, hf);
    if !energy.is_finite() {
        return Err(Error::NonFinite("subspace eigenvalue"));
    }
    Ok(SampledWavefunction { dets, coeffs: v, energy })
}

/// Lowest eigenpair of the projected Hamiltonian over a determinant set.
pub fn diagonalize_subspace(s: &DeterminantSet, ints: &MolecularIntegrals) -> Result<SampledWavefunction> {
    diagonalize_determinants(&s.determinants(), ints)
}

/// Rayleigh quotient `⟨ψ|H|ψ⟩/⟨ψ|ψ⟩` of a sparse wavefunction.
pub fn expectation(wf: &SampledWavefunction, ints: &MolecularIntegrals) -> f64 {
    let h = sparse_matrix(&wf.dets, ints);
    let mut hv = vec![0.0; wf.len()];
    h.matvec(&wf.coeffs, &mut hv);
    let num: f64 = hv.iter().zip(&wf.coeffs).map(|(a, b)| a * b).sum();
    num / wf.norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::determinant::sector_determinants;
    use crate::hamiltonian::slater_condon::diagonal;
    use crate::rng;

    #[test]
    fn single_hf_determinant() {
        let ints = MolecularIntegrals::random(4, 2, 2, &mut rng::stream(1, &[]));
        let hf = hf_determinant(&ints);
        let wf = diagonalize_determinants(&[hf], &ints).unwrap();
        assert!((wf.energy - diagonal(&hf, &ints)).abs() < 1e-14);
        assert_eq!(wf.coeffs, vec![1.0]);
    }

    #[test]
    fn sparse_and_dense_agree() {
        let ints = MolecularIntegrals::random(5, 2, 2, &mut rng::stream(2, &[]));
        let dets = sector_determinants(5, 2, 2);
        let d = dense_matrix(&dets, &ints);
        let s = sparse_matrix(&dets, &ints).to_dense();
        assert!((d - s).abs().max() < 1e-14);
    }

    #[test]
    fn lanczos_path_matches_dense() {
        let ints = MolecularIntegrals::random(7, 3, 3, &mut rng::stream(3, &[]));
        let dets = sector_determinants(7, 3, 3);
        let wf = diagonalize_with_limit(&dets, &ints, 0).unwrap();
        let (e, _) = lowest_dense(sparse_matrix(&dets, &ints).to_dense());
        assert!((wf.energy - e).abs() < 1e-9, "{} vs {e}", wf.energy);
        assert!((wf.norm_sqr() - 1.0).abs() < 1e-12);
        assert!((expectation(&wf, &ints) - e).abs() < 1e-9);
    }

    #[test]
    fn empty_and_mixed_sector() {
        let ints = MolecularIntegrals::random(3, 1, 1, &mut rng::stream(4, &[]));
        assert!(matches!(diagonalize_determinants(&[], &ints), Err(Error::EmptySubspace)));
        let r = diagonalize_determinants(&[Determinant::new(1, 1), Determinant::new(3, 0)], &ints);
        assert!(matches!(r, Err(Error::SectorMismatch(..))));
    }
}
