//! Spin-symmetry completion of determinant sets.
//!
//! A determinant's completion class keeps its doubly occupied, open-shell
//! and empty orbitals and its number of α electrons on the open shells, and
//! ranges over every α/β assignment of the open shells. A class with `m`
//! open shells and `k` open-shell α electrons has `C(m, k)` members.

use std::collections::BTreeMap;

use super::selection::DeterminantSet;
use crate::hamiltonian::determinant::combinations;
use crate::hamiltonian::Determinant;

/// `(doubly occupied, open shells, open-shell α count)`, which fixes the class.
fn class_key(d: &Determinant) -> (u64, u64, u32) {
    let open = d.alpha ^ d.beta;
    (d.alpha & d.beta, open, (d.alpha & open).count_ones())
}

/// Every member of `d`'s completion class, in canonical order.
pub fn completion_class(d: &Determinant) -> Vec<Determinant> {
    let (doubly, open, k) = class_key(d);
    let positions: Vec<u32> = (0..64).filter(|b| (open >> b) & 1 == 1).collect();
    let mut out: Vec<Determinant> = combinations(positions.len(), k as usize)
        .into_iter()
        .map(|sel| {
            let mut up = 0u64;
            for (i, &p) in positions.iter().enumerate() {
                if (sel >> i) & 1 == 1 {
                    up |= 1 << p;
                }
            }
            Determinant::new(doubly | up, doubly | (open & !up))
        })
        .collect();
    out.sort();
    out
}

/// Union of the completion classes of every member. Each member of a class
/// carries the largest frequency found among that class's inputs, which
/// makes the operation idempotent.
pub fn symmetry_complete(s: &DeterminantSet) -> DeterminantSet {
    let mut best: BTreeMap<(u64, u64, u32), (Determinant, u64)> = BTreeMap::new();
    for (d, &f) in s.iter() {
        let e = best.entry(class_key(d)).or_insert((*d, f));
        e.1 = e.1.max(f);
    }
    let mut out = DeterminantSet::new();
    for (seed, f) in best.into_values() {
        for m in completion_class(&seed) {
            out.insert_max(m, f);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::determinant::binomial;

    /// Orbital pattern string like "2ud0" (orbital 0 first) to a determinant.
    fn pattern(p: &str) -> Determinant {
        let (mut a, mut b) = (0u64, 0u64);
        for (i, c) in p.chars().enumerate() {
            match c {
                '2' => {
                    a |= 1 << i;
                    b |= 1 << i;
                }
                'u' => a |= 1 << i,
                'd' => b |= 1 << i,
                _ => {}
            }
        }
        Determinant::new(a, b)
    }

    #[test]
    fn missing_partner_added() {
        let s = DeterminantSet::from_counts([(pattern("2ud0"), 4)]);
        let c = symmetry_complete(&s);
        assert_eq!(c.len(), 2);
        assert_eq!(c.frequency(&pattern("2du0")), Some(4));
    }

    #[test]
    fn closed_shell_unchanged() {
        let s = DeterminantSet::from_counts([(pattern("220"), 4), (pattern("202"), 1)]);
        assert_eq!(symmetry_complete(&s), s);
    }

    #[test]
    fn four_open_two_alpha() {
        let d = pattern("uudd0");
        assert_eq!(completion_class(&d).len(), binomial(4, 2));
        let c = symmetry_complete(&DeterminantSet::from_counts([(d, 1)]));
        assert_eq!(c.len(), 6);
        assert!(c.iter().all(|(x, _)| x.sector() == d.sector()));
    }

    #[test]
    fn max_frequency_inherited() {
        let s = DeterminantSet::from_counts([(pattern("ud"), 2), (pattern("du"), 9)]);
        let c = symmetry_complete(&s);
        assert_eq!(c.frequency(&pattern("ud")), Some(9));
        assert_eq!(symmetry_complete(&c), c);
    }
}
