use std::io::{BufRead, Write};

use crate::hamiltonian::Determinant;
use crate::{Error, Result};

/// Sparse real wavefunction over determinants in canonical order, with the
/// energy it was obtained at.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledWavefunction {
    pub dets: Vec<Determinant>,
    pub coeffs: Vec<f64>,
    pub energy: f64,
}

impl SampledWavefunction {
    /// Builds from unsorted entries; sorts canonically.
    pub fn new(entries: Vec<(Determinant, f64)>, energy: f64) -> Self {
        let mut entries = entries;
        entries.sort_by_key(|a| a.0);
        let (dets, coeffs) = entries.into_iter().unzip();
        Self { dets, coeffs, energy }
    }

    pub fn len(&self) -> usize {
        self.dets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dets.is_empty()
    }

    pub fn coefficient(&self, d: &Determinant) -> f64 {
        self.dets.binary_search(d).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Determinant, f64)> {
        self.dets.iter().zip(self.coeffs.iter().copied())
    }

    pub fn sector(&self) -> Option<(u32, u32)> {
        self.dets.first().map(Determinant::sector)
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        while i < self.dets.len() && j < other.dets.len() {
            match self.dets[i].cmp(&other.dets[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.coeffs[i] * other.coeffs[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// CSV: `energy=<value>` line, then `alpha_hex,beta_hex,coefficient` rows.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "energy={:.17e}", self.energy)?;
        writeln!(w, "alpha_hex,beta_hex,coefficient")?;
        for (d, c) in self.iter() {
            writeln!(w, "{:x},{:x},{:.17e}", d.alpha, d.beta, c)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Config(format!("wavefunction line {line}: {msg}"));
        let mut lines = r.lines();
        let first = lines.next().ok_or_else(|| bad(1, "empty file"))??;
        let energy: f64 = first
            .trim()
            .strip_prefix("energy=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(1, "expected energy=<value>"))?;
        let mut entries = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if n == 0 && line.starts_with("alpha_hex") {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(n + 2, "expected 3 fields"));
            }
            let d = Determinant::from_hex(f[0], f[1])?;
            let c: f64 = f[2].trim().parse().map_err(|_| bad(n + 2, "bad coefficient"))?;
            entries.push((d, c));
        }
        Ok(Self::new(entries, energy))
    }
}
