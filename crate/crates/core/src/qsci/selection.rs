use std::collections::BTreeMap;

use crate::hamiltonian::Determinant;
use crate::simulator::ShotHistogram;

/// Unique determinants of one sector with their sampling frequencies,
/// iterated in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DeterminantSet {
    pub entries: BTreeMap<Determinant, u64>,
}

impl DeterminantSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_counts(it: impl IntoIterator<Item = (Determinant, u64)>) -> Self {
        let mut s = Self::new();
        for (d, c) in it {
            s.insert_max(d, c);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, d: &Determinant) -> bool {
        self.entries.contains_key(d)
    }

    pub fn frequency(&self, d: &Determinant) -> Option<u64> {
        self.entries.get(d).copied()
    }

    /// Inserts `d`, keeping the larger frequency if present.
    pub fn insert_max(&mut self, d: Determinant, freq: u64) {
        let e = self.entries.entry(d).or_insert(freq);
        *e = (*e).max(freq);
    }

    pub fn determinants(&self) -> Vec<Determinant> {
        self.entries.keys().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Determinant, &u64)> {
        self.entries.iter()
    }
}

/// Keeps histogram outcomes in the `(n_alpha, n_beta)` sector with their counts.
pub fn select_determinants(h: &ShotHistogram, sector: (u32, u32)) -> DeterminantSet {
    let mut s = DeterminantSet::new();
    for (&bits, &count) in &h.counts {
        let d = Determinant::from_spin_orbitals(bits);
        if d.sector() == sector {
            s.entries.insert(d, count);
        }
    }
    s
}

/// Top `d_max` by frequency; ties go to the canonically smaller determinant.
pub fn truncate(s: &DeterminantSet, d_max: usize) -> DeterminantSet {
    if s.len() <= d_max {
        return s.clone();
    }
    let mut v: Vec<(Determinant, u64)> = s.iter().map(|(d, c)| (*d, *c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(d_max);
    DeterminantSet { entries: v.into_iter().collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(u64, u64)]) -> ShotHistogram {
        ShotHistogram::from_counts(pairs.iter().copied())
    }

    #[test]
    fn sector_filter() {
        // qubits: 0b0011 = α0 β0 (1,1); 0b0101 = α0 α1 (2,0)
        let h = hist(&[(0b0011, 7), (0b0101, 3)]);
        let s = select_determinants(&h, (1, 1));
        assert_eq!(s.len(), 1);
        assert_eq!(s.frequency(&Determinant::new(1, 1)), Some(7));
        assert!(select_determinants(&h, (0, 2)).is_empty());
    }

    #[test]
    fn truncation_rules() {
        let s = DeterminantSet::from_counts([
            (Determinant::new(1, 2), 5),
            (Determinant::new(2, 1), 9),
            (Determinant::new(1, 1), 5),
        ]);
        assert_eq!(truncate(&s, 5), s);
        let t1 = truncate(&s, 1);
        assert_eq!(t1.determinants(), vec![Determinant::new(2, 1)]);
        let t2 = truncate(&s, 2);
        assert_eq!(t2.determinants(), vec![Determinant::new(1, 1), Determinant::new(2, 1)]);

        let flat = DeterminantSet::from_counts((0..6).map(|i| (Determinant::new(i, 1), 1)));
        assert_eq!(
            truncate(&flat, 3).determinants(),
            vec![Determinant::new(0, 1), Determinant::new(1, 1), Determinant::new(2, 1)]
        );
    }
}
