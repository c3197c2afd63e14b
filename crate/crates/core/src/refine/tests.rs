use rand::seq::SliceRandom;

use super::*;
use crate::hamiltonian::determinant::sector_determinants;
use crate::rng::stream;

fn toy(seed: u64) -> MolecularIntegrals {
    MolecularIntegrals::random(4, 2, 2, &mut stream(seed, &[]))
}

fn random_subset(all: &[Determinant], k: usize, seed: u64) -> Vec<Determinant> {
    let mut v = all.to_vec();
    v.shuffle(&mut stream(seed, &[]));
    v.truncate(k);
    v
}

#[test]
fn single_input_is_fixed_point() {
    let ints = toy(1);
    let all = sector_determinants(4, 2, 2);
    let w = diagonalize_determinants(&random_subset(&all, 10, 2), &ints).unwrap();
    let r = refine(std::slice::from_ref(&w), 36, &ints).unwrap();
    assert!((r.energy - w.energy).abs() < 1e-10);
    let twice = refine(&[w.clone(), w.clone()], 36, &ints).unwrap();
    assert!((twice.energy - w.energy).abs() < 1e-10);
}

#[test]
fn union_oracle_and_bounds() {
    let ints = toy(3);
    let all = sector_determinants(4, 2, 2);
    for k in 0..10 {
        let a = diagonalize_determinants(&random_subset(&all, 6, 10 + k), &ints).unwrap();
        let b = diagonalize_determinants(&random_subset(&all, 7, 20 + k), &ints).unwrap();
        let det = refine_detailed(&[a.clone(), b.clone()], 36, &ints).unwrap();
        let mut union = a.dets.clone();
        union.extend(&b.dets);
        union.sort();
        union.dedup();
        assert_eq!(det.union_size, union.len());
        let oracle = diagonalize_determinants(&union, &ints).unwrap();
        assert!((det.wavefunction.energy - oracle.energy).abs() < 1e-10);
        assert!(det.wavefunction.energy <= a.energy.min(b.energy) + 1e-10);
        assert!(det.mixed_energy <= a.energy.min(b.energy) + 1e-10);
        let swapped = refine(&[b, a], 36, &ints).unwrap();
        assert!((swapped.energy - det.wavefunction.energy).abs() < 1e-10);
    }
}

#[test]
fn support_is_capped() {
    let ints = toy(4);
    let all = sector_determinants(4, 2, 2);
    let a = diagonalize_determinants(&random_subset(&all, 12, 5), &ints).unwrap();
    let b = diagonalize_determinants(&random_subset(&all, 12, 6), &ints).unwrap();
    for d_max in [1, 3, 8] {
        assert!(refine(&[a.clone(), b.clone()], d_max, &ints).unwrap().len() <= d_max);
    }
}

#[test]
fn errors() {
    let ints = toy(5);
    assert!(matches!(refine(&[], 4, &ints), Err(Error::NoInputs)));
    let empty = SampledWavefunction::new(vec![], 0.0);
    assert!(matches!(refine(&[empty], 4, &ints), Err(Error::RankDeficient)));
}

#[test]
fn global_recursion() {
    let ints = toy(6);
    let all = sector_determinants(4, 2, 2);
    let w1 = diagonalize_determinants(&random_subset(&all, 5, 7), &ints).unwrap();
    let st = global_refine(RefinementState::new(), w1.clone(), 36, &ints).unwrap();
    assert_eq!(st.global.as_ref().unwrap(), &w1);
    let st = global_refine(st, w1.clone(), 36, &ints).unwrap();
    assert!((st.energy().unwrap() - w1.energy).abs() < 1e-10);
    let mut st = st;
    let mut last = st.energy().unwrap();
    for k in 0..3 {
        let w = diagonalize_determinants(&random_subset(&all, 4, 30 + k), &ints).unwrap();
        st = global_refine(st, w, 36, &ints).unwrap();
        assert!(st.energy().unwrap() <= last + 1e-10);
        last = st.energy().unwrap();
    }
    assert_eq!(st.history.len(), 5);
    assert_eq!(st.iter, 5);
    let mut buf = Vec::new();
    st.write_trace(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("iter,E_local,E_global,support_local,support_global\n0,"));
    assert_eq!(text.lines().count(), 6);

    let other = MolecularIntegrals::random(4, 1, 3, &mut stream(8, &[]));
    let w = diagonalize_determinants(&sector_determinants(4, 1, 3)[..3], &other).unwrap();
    assert!(global_refine(st, w, 36, &ints).is_err());
}
