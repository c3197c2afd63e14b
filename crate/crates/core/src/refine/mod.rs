//! Refinement map: merge sparse wavefunctions through a generalized
//! eigenproblem, keep the `d_max` heaviest determinants and rediagonalize.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::hamiltonian::{Determinant, MolecularIntegrals};
use crate::qsci::subspace::sparse_matrix;
use crate::qsci::{diagonalize_determinants, SampledWavefunction};
use crate::{par, Error, Result};

/// Overlap eigenvalues at or below this are dropped before solving.
pub const OVERLAP_THRESHOLD: f64 = 1e-10;

/// Result of [`refine_detailed`].
#[derive(Clone, Debug)]
pub struct Refinement {
    pub wavefunction: SampledWavefunction,
    /// Lowest generalized eigenvalue, before truncation.
    pub mixed_energy: f64,
    pub union_size: usize,
    /// Rank of the overlap matrix after thresholding.
    pub rank: usize,
}

/// Projected `H` and `S` over the inputs, expressed on the union support.
pub fn overlap_system(inputs: &[SampledWavefunction], ints: &MolecularIntegrals) -> (Vec<Determinant>, DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut union: Vec<Determinant> = inputs.iter().flat_map(|w| w.dets.iter().copied()).collect();
    union.sort_unstable();
    union.dedup();
    let n = inputs.len();
    // Column j holds input j's coefficients on the union.
    let mut coeffs = DMatrix::zeros(union.len(), n);
    for (j, w) in inputs.iter().enumerate() {
        for (d, c) in w.iter() {
            let row = union.binary_search(d).expect("support is in the union");
            coeffs[(row, j)] = c;
        }
    }
    let h = sparse_matrix(&union, ints);
    let hc_cols = par::map_range(n, |j| {
        let mut y = vec![0.0; union.len()];
        h.matvec(coeffs.column(j).as_slice(), &mut y);
        y
    });
    let hc = DMatrix::from_fn(union.len(), n, |r, j| hc_cols[j][r]);
    let mut hm = coeffs.transpose() * &hc;
    let sm = coeffs.transpose() * &coeffs;
    // Symmetrize away rounding asymmetry.
    hm = (&hm + hm.transpose()) * 0.5;
    (union, coeffs, hm, sm)
}

/// Lowest root of `H c = E S c` by canonical orthogonalization.
pub fn generalized_lowest(h: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<(f64, Vec<f64>, usize)> {
    let eig = SymmetricEigen::new(s.clone());
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > OVERLAP_THRESHOLD).collect();
    if keep.is_empty() {
        return Err(Error::RankDeficient);
    }
    let n = s.nrows();
    let x = DMatrix::from_fn(n, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])] / eig.eigenvalues[keep[c]].sqrt());
    let hp = x.transpose() * h * &x;
    let hp = (&hp + hp.transpose()) * 0.5;
    let (e, vecs) = crate::linalg::lowest_dense(hp);
    let c = &x * &vecs[0];
    Ok((e, c.as_slice().to_vec(), keep.len()))
}

/// Refinement with diagnostics.
pub fn refine_detailed(inputs: &[SampledWavefunction], d_max: usize, ints: &MolecularIntegrals) -> Result<Refinement> {
    if inputs.is_empty() {
        return Err(Error::NoInputs);
    }
    let mut sector = None;
    for w in inputs {
        if let Some(s) = w.sector() {
            match sector {
                None => sector = Some(s),
                Some(t) if t != s => return Err(Error::SectorMismatch(t.0, t.1, s.0, s.1)),
                _ => {}
            }
        }
    }
    let (union, coeffs, h, s) = overlap_system(inputs, ints);
    let (mixed_energy, c, rank) = generalized_lowest(&h, &s)?;
    let mixed = &coeffs * nalgebra::DVector::from_vec(c);
    let mut order: Vec<usize> = (0..union.len()).collect();
    // Stable sort: equal weights keep canonical order.
    order.sort_by(|&a, &b| (mixed[b] * mixed[b]).total_cmp(&(mixed[a] * mixed[a])));
    order.truncate(d_max.max(1));
    let kept: Vec<Determinant> = order.iter().map(|&i| union[i]).collect();
    let wavefunction = diagonalize_determinants(&kept, ints)?;
    Ok(Refinement { wavefunction, mixed_energy, union_size: union.len(), rank })
}

/// `R(ψ_1, …, ψ_n)`.
pub fn refine(inputs: &[SampledWavefunction], d_max: usize, ints: &MolecularIntegrals) -> Result<SampledWavefunction> {
    Ok(refine_detailed(inputs, d_max, ints)?.wavefunction)
}

/// Merges the `M` wavefunctions of one batch.
pub fn local_refine(batch: &[SampledWavefunction], d_max: usize, ints: &MolecularIntegrals) -> Result<SampledWavefunction> {
    refine(batch, d_max, ints)
}

/// One row of the refinement trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub e_local: f64,
    pub e_global: f64,
    pub support_local: usize,
    pub support_global: usize,
}

/// Global wavefunction carried across iterations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RefinementState {
    pub global: Option<SampledWavefunction>,
    /// Number of completed global updates.
    pub iter: usize,
    pub history: Vec<TraceRow>,
}

impl RefinementState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn energy(&self) -> Option<f64> {
        self.global.as_ref().map(|g| g.energy)
    }

    /// CSV `iter,E_local,E_global,support_local,support_global`.
    pub fn write_trace<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iter", "E_local", "E_global", "support_local", "support_global"])?;
        for r in &self.history {
            out.write_record([
                r.iter.to_string(),
                format!("{:.12}", r.e_local),
                format!("{:.12}", r.e_global),
                r.support_local.to_string(),
                r.support_global.to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// First call adopts `local`; later calls set `global ← R(global, local)`.
pub fn global_refine(
    mut state: RefinementState,
    local: SampledWavefunction,
    d_max: usize,
    ints: &MolecularIntegrals,
) -> Result<RefinementState> {
    let e_local = local.energy;
    let support_local = local.len();
    let next = match state.global.take() {
        None => local,
        Some(prev) => {
            if let (Some(a), Some(b)) = (prev.sector(), local.sector()) {
                if a != b {
                    return Err(Error::SectorMismatch(a.0, a.1, b.0, b.1));
                }
            }
            refine(&[prev, local], d_max, ints)?
        }
    };
    state.history.push(TraceRow {
        iter: state.iter,
        e_local,
        e_global: next.energy,
        support_local,
        support_global: next.len(),
    });
    state.global = Some(next);
    state.iter += 1;
    Ok(state)
}

#[cfg(test)]
mod tests;
