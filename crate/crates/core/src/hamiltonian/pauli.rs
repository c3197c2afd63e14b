use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::{Error, Result};

/// Tensor product of single-qubit Paulis in symplectic form.
///
/// Letter on qubit `q`: `(x, z)` bits `(0,0)=I, (1,0)=X, (1,1)=Y, (0,1)=Z`. The
/// string denotes the plain letter product (no hidden phase), so
/// `P = i^{|x∧z|} X^x Z^z`. Text form is one letter per qubit with qubit 0
/// rightmost; [`Ord`] agrees with lexicographic order of that text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    pub n_qubits: usize,
    pub x: u64,
    pub z: u64,
}

/// Multiplication phase as a power of `i`.
pub type PhaseExp = u8;

#[inline]
pub fn phase(exp: PhaseExp) -> Complex64 {
    match exp & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    pub fn new(n_qubits: usize, x: u64, z: u64) -> Self {
        Self { n_qubits, x, z }
    }

    /// Single letter `c` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, c: char) -> Self {
        let mut p = Self::identity(n_qubits);
        p.set(qubit, c);
        p
    }

    pub fn letter(&self, q: usize) -> char {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 'I',
            (1, 0) => 'X',
            (1, 1) => 'Y',
            _ => 'Z',
        }
    }

    pub fn set(&mut self, q: usize, c: char) {
        let bit = 1u64 << q;
        let (x, z) = match c {
            'X' => (true, false),
            'Y' => (true, true),
            'Z' => (false, true),
            _ => (false, false),
        };
        self.x = if x { self.x | bit } else { self.x & !bit };
        self.z = if z { self.z | bit } else { self.z & !bit };
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// Counts of (X, Y, Z) letters.
    pub fn letter_counts(&self) -> (u32, u32, u32) {
        let y = (self.x & self.z).count_ones();
        ((self.x & !self.z).count_ones(), y, (self.z & !self.x).count_ones())
    }

    /// `self · other = i^k · result`.
    #[inline]
    pub fn mul(&self, other: &Self) -> (PhaseExp, Self) {
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let k = (self.x & self.z).count_ones()
            + (other.x & other.z).count_ones()
            + 2 * (self.z & other.x).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        (
            (k % 4) as PhaseExp,
            Self {
                n_qubits: self.n_qubits.max(other.n_qubits),
                x,
                z,
            },
        )
    }

    pub fn commutes(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// `P|b⟩ = amp · |flipped⟩`.
    #[inline]
    pub fn apply_to_basis(&self, b: u64) -> (Complex64, u64) {
        let exp = (self.x & self.z).count_ones() + 2 * (self.z & b).count_ones();
        (phase((exp % 4) as PhaseExp), b ^ self.x)
    }

    fn letter_rank(&self, q: usize) -> u8 {
        match self.letter(q) {
            'I' => 0,
            'X' => 1,
            'Y' => 2,
            _ => 3,
        }
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.n_qubits.max(other.n_qubits);
        for q in (0..n).rev() {
            match self.letter_rank(q).cmp(&other.letter_rank(q)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.n_qubits.cmp(&other.n_qubits)
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n_qubits).rev().map(|q| self.letter(q)).collect();
        f.write_str(&s)
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.chars().count();
        if n > 64 {
            return Err(Error::Config(format!("Pauli string longer than 64 qubits: {s}")));
        }
        let mut p = PauliString::identity(n);
        for (i, c) in s.chars().enumerate() {
            let c = c.to_ascii_uppercase();
            if !matches!(c, 'I' | 'X' | 'Y' | 'Z') {
                return Err(Error::Config(format!("invalid Pauli letter '{c}' in {s}")));
            }
            p.set(n - 1 - i, c);
        }
        Ok(p)
    }
}

/// Real-coefficient sum of Pauli strings, sorted canonically with no duplicates.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHamiltonian {
    pub n_qubits: usize,
    pub terms: Vec<(f64, PauliString)>,
}

impl PauliHamiltonian {
    pub fn new(n_qubits: usize, mut terms: Vec<(f64, PauliString)>) -> Self {
        terms.sort_by_key(|a| a.1);
        let mut merged: Vec<(f64, PauliString)> = Vec::with_capacity(terms.len());
        for (c, p) in terms {
            match merged.last_mut() {
                Some(last) if last.1 == p => last.0 += c,
                _ => merged.push((c, p)),
            }
        }
        Self { n_qubits, terms: merged }
    }

    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, p)| p.is_identity())
            .map_or(0.0, |(c, _)| *c)
    }

    /// Non-identity terms.
    pub fn non_identity(&self) -> impl Iterator<Item = &(f64, PauliString)> {
        self.terms.iter().filter(|(_, p)| !p.is_identity())
    }

    /// `⟨bra|H|ket⟩` on computational basis states.
    pub fn matrix_element(&self, bra: u64, ket: u64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, p) in &self.terms {
            if bra ^ ket == p.x {
                let (amp, _) = p.apply_to_basis(ket);
                acc += amp * *c;
            }
        }
        acc
    }

    /// `H|ψ⟩` for a dense amplitude vector.
    pub fn apply(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = 1usize << self.n_qubits;
        if psi.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: psi.len() });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (c, p) in &self.terms {
            for (b, a) in psi.iter().enumerate() {
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let (amp, nb) = p.apply_to_basis(b as u64);
                out[nb as usize] += amp * *a * *c;
            }
        }
        Ok(out)
    }

    /// Dense row-major matrix; only sensible for a handful of qubits.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (c, p) in &self.terms {
            for ket in 0..dim {
                let (amp, bra) = p.apply_to_basis(ket as u64);
                m[bra as usize * dim + ket] += amp * *c;
            }
        }
        m
    }

    /// `Σ |c_j|` over non-identity terms.
    pub fn lambda(&self) -> f64 {
        self.non_identity().map(|(c, _)| c.abs()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn text_roundtrip_and_order() {
        assert_eq!(p("IXYZ").to_string(), "IXYZ");
        assert_eq!(p("IXYZ").letter(0), 'Z');
        assert_eq!(p("IXYZ").letter(3), 'I');
        assert!(p("IXII") < p("IYII"));
        assert!(p("XIII") > p("IZZZ"));
        assert_eq!(p("XIYZ").weight(), 3);
    }

    #[test]
    fn single_qubit_products() {
        // XY = iZ, YX = -iZ, ZX = iY, XX = I
        assert_eq!(p("X").mul(&p("Y")), (1, p("Z")));
        assert_eq!(p("Y").mul(&p("X")), (3, p("Z")));
        assert_eq!(p("Z").mul(&p("X")), (1, p("Y")));
        assert_eq!(p("Y").mul(&p("Z")), (1, p("X")));
        assert_eq!(p("X").mul(&p("X")), (0, p("I")));
        assert_eq!(p("Y").mul(&p("Y")), (0, p("I")));
    }

    #[test]
    fn basis_action() {
        // Y|0> = i|1>, Y|1> = -i|0>, Z|1> = -|1>
        assert_eq!(p("Y").apply_to_basis(0), (Complex64::new(0.0, 1.0), 1));
        assert_eq!(p("Y").apply_to_basis(1), (Complex64::new(0.0, -1.0), 0));
        assert_eq!(p("Z").apply_to_basis(1), (Complex64::new(-1.0, 0.0), 1));
    }

    #[test]
    fn merge_duplicates() {
        let h = PauliHamiltonian::new(2, vec![(0.5, p("ZI")), (0.25, p("II")), (0.5, p("ZI"))]);
        assert_eq!(h.terms.len(), 2);
        assert_eq!(h.terms[1], (1.0, p("ZI")));
        assert_eq!(h.identity_coefficient(), 0.25);
    }

    #[test]
    fn dense_matches_elementwise() {
        let h = PauliHamiltonian::new(2, vec![(0.3, p("XY")), (-0.2, p("ZZ")), (0.1, p("YI"))]);
        let d = h.to_dense();
        for i in 0..4u64 {
            for j in 0..4u64 {
                assert_eq!(d[(i * 4 + j) as usize], h.matrix_element(i, j));
            }
        }
    }
}
