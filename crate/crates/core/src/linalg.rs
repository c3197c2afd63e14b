//! Symmetric eigensolvers: dense (nalgebra) for small problems, Lanczos with
//! full reorthogonalization on a CSR matrix for large ones.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::{par, Error, Result};

/// Dimension up to which dense diagonalization is used.
pub const DENSE_LIMIT: usize = 2000;

/// Lowest eigenvalue of a dense symmetric matrix and an orthonormal basis of
/// its (numerically) degenerate eigenspace.
pub fn lowest_dense(mat: DMatrix<f64>) -> (f64, Vec<DVector<f64>>) {
    let n = mat.nrows();
    let eig = SymmetricEigen::new(mat);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let e0 = eig.eigenvalues[order[0]];
    let tol = 1e-9 * e0.abs().max(1.0);
    let vecs = order
        .iter()
        .take_while(|&&k| eig.eigenvalues[k] - e0 <= tol)
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();
    (e0, vecs)
}

/// Row-compressed symmetric matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    pub fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let nnz = rows.iter().map(Vec::len).sum();
        let mut cols = Vec::with_capacity(nnz);
        let mut vals = Vec::with_capacity(nnz);
        for r in rows {
            for (c, v) in r {
                cols.push(c);
                vals.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                (self.row_ptr[i]..self.row_ptr[i + 1])
                    .find(|&k| self.cols[k] as usize == i)
                    .map_or(0.0, |k| self.vals[k])
            })
            .collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        par::fill_indexed(y, |i| {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            acc
        });
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.cols[k] as usize)] = self.vals[k];
            }
        }
        m
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Lowest eigenpair by restarted Lanczos with full reorthogonalization.
///
/// Converged when the residual norm `‖Av − λv‖` drops below `tol`.
pub fn lanczos_lowest(
    a: &CsrMatrix,
    start: &[f64],
    tol: f64,
    max_krylov: usize,
) -> Result<(f64, Vec<f64>)> {
    let n = a.n;
    if n == 0 {
        return Err(Error::EmptySubspace);
    }
    if n == 1 {
        return Ok((a.diagonal()[0], vec![1.0]));
    }
    let m = max_krylov.clamp(2, n);
    let mut v0 = start.to_vec();
    if normalize(&mut v0) == 0.0 {
        return Err(Error::Eigensolver("zero start vector".into()));
    }
    let mut w = vec![0.0; n];
    let mut best = (f64::INFINITY, f64::INFINITY);
    for _restart in 0..200 {
        let mut basis: Vec<Vec<f64>> = vec![v0.clone()];
        let mut alpha: Vec<f64> = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        loop {
            let k = basis.len() - 1;
            a.matvec(&basis[k], &mut w);
            let ak = dot(&basis[k], &w);
            alpha.push(ak);
            // Two passes of classical Gram–Schmidt against the whole basis.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &w);
                    w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
                }
            }
            let bk = dot(&w, &w).sqrt();
            let dim = alpha.len();
            let t = DMatrix::from_fn(dim, dim, |i, j| {
                if i == j {
                    alpha[i]
                } else if i + 1 == j {
                    beta[i]
                } else if j + 1 == i {
                    beta[j]
                } else {
                    0.0
                }
            });
            let (theta, ys) = lowest_dense(t);
            let y = &ys[0];
            let resid = (bk * y[dim - 1]).abs();
            let exhausted = dim == m || bk < 1e-12 || dim == n;
            if resid < tol || exhausted {
                let mut ritz = vec![0.0; n];
                for (c, b) in y.iter().zip(&basis) {
                    ritz.iter_mut().zip(b).for_each(|(r, x)| *r += c * x);
                }
                normalize(&mut ritz);
                if resid < tol || dim == n || bk < 1e-12 {
                    // Confirm with the true residual.
                    a.matvec(&ritz, &mut w);
                    let lam = dot(&ritz, &w);
                    let r: f64 = w
                        .iter()
                        .zip(&ritz)
                        .map(|(x, v)| (x - lam * v).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    if r < tol.max(1e-12) * 10.0 || dim == n {
                        return Ok((lam, ritz));
                    }
                }
                if (theta, resid) < best {
                    best = (theta, resid);
                }
                v0 = ritz;
                break;
            }
            beta.push(bk);
            let next: Vec<f64> = w.iter().map(|x| x / bk).collect();
            basis.push(next);
        }
    }
    Err(Error::Eigensolver(format!(
        "Lanczos stalled at residual {:.3e} (eigenvalue {})",
        best.1, best.0
    )))
}
