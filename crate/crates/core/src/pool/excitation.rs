use std::collections::HashSet;
use std::fmt;

use crate::hamiltonian::MolecularIntegrals;
use crate::{Error, Result};

/// Spin-orbital excitation on interleaved qubit indices (`2p` α, `2p+1` β).
///
/// Doubles are stored with `i < j` and `a < b`; the amplitude sign absorbs
/// the reordering.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Excitation {
    Single { i: usize, a: usize, t: f64 },
    Double { i: usize, j: usize, a: usize, b: usize, t: f64 },
}

impl Excitation {
    /// Single `a†_a a_i`.
    pub fn single(i: usize, a: usize, t: f64) -> Self {
        Excitation::Single { i, a, t }
    }

    /// Double `a†_a a†_b a_j a_i`, normalized to ascending index pairs.
    pub fn double(mut i: usize, mut j: usize, mut a: usize, mut b: usize, mut t: f64) -> Self {
        if i > j {
            std::mem::swap(&mut i, &mut j);
            t = -t;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
            t = -t;
        }
        Excitation::Double { i, j, a, b, t }
    }

    pub fn amplitude(&self) -> f64 {
        match *self {
            Excitation::Single { t, .. } | Excitation::Double { t, .. } => t,
        }
    }

    pub fn occupied(&self) -> Vec<usize> {
        match *self {
            Excitation::Single { i, .. } => vec![i],
            Excitation::Double { i, j, .. } => vec![i, j],
        }
    }

    pub fn virtuals(&self) -> Vec<usize> {
        match *self {
            Excitation::Single { a, .. } => vec![a],
            Excitation::Double { a, b, .. } => vec![a, b],
        }
    }

    /// Sort key: singles before doubles, then by index tuple.
    pub fn key(&self) -> (u8, [usize; 4]) {
        match *self {
            Excitation::Single { i, a, .. } => (0, [i, a, 0, 0]),
            Excitation::Double { i, j, a, b, .. } => (1, [i, j, a, b]),
        }
    }

    /// Checks that occupied indices are set in `reference` and virtual ones are not.
    pub fn check_reference(&self, reference: u64, n_qubits: usize) -> Result<()> {
        for q in self.occupied().into_iter().chain(self.virtuals()) {
            if q >= n_qubits {
                return Err(Error::Config(format!("excitation {self} exceeds {n_qubits} qubits")));
            }
        }
        let occ_ok = self.occupied().iter().all(|&q| reference >> q & 1 == 1);
        let vir_ok = self.virtuals().iter().all(|&q| reference >> q & 1 == 0);
        if !(occ_ok && vir_ok) {
            return Err(Error::Config(format!("excitation {self} is not relative to the reference")));
        }
        Ok(())
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Excitation::Single { i, a, .. } => write!(f, "S:{i}->{a}"),
            Excitation::Double { i, j, a, b, .. } => write!(f, "D:{i},{j}->{a},{b}"),
        }
    }
}

/// Parses `S i a t` and `D i j a b t` lines with 1-based spin-orbital indices.
pub fn parse_amplitudes(text: &str) -> Result<Vec<Excitation>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Amplitudes { line, msg };
        let f: Vec<&str> = content.split_whitespace().collect();
        let n_idx = match f[0] {
            "S" | "s" => 2,
            "D" | "d" => 4,
            other => return Err(err(format!("unknown excitation kind '{other}'"))),
        };
        if f.len() != n_idx + 2 {
            return Err(err(format!("expected {} fields, got {}", n_idx + 2, f.len())));
        }
        let mut idx = [0usize; 4];
        for k in 0..n_idx {
            let v: usize = f[1 + k].parse().map_err(|_| err(format!("bad index '{}'", f[1 + k])))?;
            if v == 0 {
                return Err(err("indices are 1-based".into()));
            }
            idx[k] = v - 1;
        }
        let t: f64 = f[n_idx + 1]
            .replace(['D', 'd'], "e")
            .parse()
            .map_err(|_| err(format!("bad amplitude '{}'", f[n_idx + 1])))?;
        if !t.is_finite() {
            return Err(err("non-finite amplitude".into()));
        }
        let distinct: HashSet<usize> = idx[..n_idx].iter().copied().collect();
        if distinct.len() != n_idx {
            return Err(err("repeated spin-orbital index".into()));
        }
        let ex = if n_idx == 2 {
            Excitation::single(idx[0], idx[1], t)
        } else {
            Excitation::double(idx[0], idx[1], idx[2], idx[3], t)
        };
        if !seen.insert(ex.key()) {
            return Err(err(format!("duplicate excitation {ex}")));
        }
        out.push(ex);
    }
    Ok(out)
}

/// Antisymmetrized `⟨PQ||RS⟩` over interleaved spin orbitals.
fn antisym(ints: &MolecularIntegrals, p: usize, q: usize, r: usize, s: usize) -> f64 {
    let direct = if p % 2 == r % 2 && q % 2 == s % 2 { ints.h2(p / 2, r / 2, q / 2, s / 2) } else { 0.0 };
    let exchange = if p % 2 == s % 2 && q % 2 == r % 2 { ints.h2(p / 2, s / 2, q / 2, r / 2) } else { 0.0 };
    direct - exchange
}

/// First-order perturbative doubles `t = ⟨ij||ab⟩ / (ε_i + ε_j − ε_a − ε_b)`
/// relative to the Hartree–Fock determinant. Zero amplitudes are omitted.
pub fn mp2_amplitudes(ints: &MolecularIntegrals) -> Result<Vec<Excitation>> {
    let eps = ints.orb_energies.as_ref().ok_or(Error::MissingOrbitalEnergies)?;
    let hf = ints.hf_determinant().spin_orbitals();
    let nq = 2 * ints.n_orb;
    let occ: Vec<usize> = (0..nq).filter(|&q| hf >> q & 1 == 1).collect();
    let vir: Vec<usize> = (0..nq).filter(|&q| hf >> q & 1 == 0).collect();
    let e = |q: usize| eps[q / 2];
    let mut out = Vec::new();
    for (x, &i) in occ.iter().enumerate() {
        for &j in &occ[x + 1..] {
            for (y, &a) in vir.iter().enumerate() {
                for &b in &vir[y + 1..] {
                    // Spin projection must be conserved.
                    if (i % 2 + j % 2) != (a % 2 + b % 2) {
                        continue;
                    }
                    let denom = e(i) + e(j) - e(a) - e(b);
                    if denom.abs() < 1e-8 {
                        return Err(Error::VanishingDenominator(denom));
                    }
                    let num = antisym(ints, i, j, a, b);
                    if num != 0.0 {
                        out.push(Excitation::double(i, j, a, b, num / denom));
                    }
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let ex = parse_amplitudes("# header\nS 1 5 0.02\nD 1 2 5 6 -0.1 # trailing\n\n").unwrap();
        assert_eq!(ex[0], Excitation::Single { i: 0, a: 4, t: 0.02 });
        assert_eq!(ex[1], Excitation::Double { i: 0, j: 1, a: 4, b: 5, t: -0.1 });
    }

    #[test]
    fn parse_normalizes_double_order() {
        let ex = parse_amplitudes("D 2 1 5 6 0.3").unwrap();
        assert_eq!(ex[0], Excitation::Double { i: 0, j: 1, a: 4, b: 5, t: -0.3 });
    }

    #[test]
    fn parse_errors() {
        assert!(parse_amplitudes("S 1 5 0.02\nS 1 5 0.03").is_err());
        assert!(parse_amplitudes("D 1 2 5 6 0.1\nD 2 1 6 5 0.1").is_err());
        assert!(parse_amplitudes("S 0 5 0.02").is_err());
        assert!(parse_amplitudes("S 1 5").is_err());
        assert!(parse_amplitudes("T 1 2 3 0.1").is_err());
        assert!(parse_amplitudes("S 1 x 0.1").is_err());
        assert!(parse_amplitudes("S 1 1 0.1").is_err());
        match parse_amplitudes("S 1 2 0.1\nS 1 2 oops") {
            Err(Error::Amplitudes { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    fn two_orbital(g: f64, eps: [f64; 2]) -> MolecularIntegrals {
        let mut ints = MolecularIntegrals::zeros(2, 1, 1).unwrap();
        ints.set_h1(0, 0, eps[0]);
        ints.set_h1(1, 1, eps[1]);
        ints.set_h2(0, 1, 0, 1, g);
        ints.orb_energies = Some(eps.to_vec());
        ints
    }

    #[test]
    fn mp2_hand_formula() {
        // Only (01|01) is nonzero: ⟨0α 0β || 1α 1β⟩ = (01|01).
        let ints = two_orbital(0.2, [-0.5, 0.3]);
        let amps = mp2_amplitudes(&ints).unwrap();
        assert_eq!(amps.len(), 1);
        let want = 0.2 / (2.0 * -0.5 - 2.0 * 0.3);
        assert_eq!(amps[0], Excitation::Double { i: 0, j: 1, a: 2, b: 3, t: want });
    }

    #[test]
    fn mp2_guards() {
        assert!(mp2_amplitudes(&two_orbital(0.0, [-0.5, 0.3])).unwrap().is_empty());
        assert!(matches!(mp2_amplitudes(&two_orbital(0.2, [0.1, 0.1])), Err(Error::VanishingDenominator(_))));
        let mut ints = two_orbital(0.2, [-0.5, 0.3]);
        ints.orb_energies = None;
        assert!(matches!(mp2_amplitudes(&ints), Err(Error::MissingOrbitalEnergies)));
    }

    #[test]
    fn reference_check() {
        let ex = Excitation::single(0, 4, 0.1);
        assert!(ex.check_reference(0b0011, 8).is_ok());
        assert!(ex.check_reference(0b10001, 8).is_err());
        assert!(ex.check_reference(0b0011, 4).is_err());
    }
}
