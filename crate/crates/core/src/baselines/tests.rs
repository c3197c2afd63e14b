use super::*;
use crate::hamiltonian::slater_condon::diagonal;
use crate::hamiltonian::{jordan_wigner, PauliString};
use crate::rng::stream;

fn toy(seed: u64) -> (MolecularIntegrals, PauliHamiltonian) {
    let ints = MolecularIntegrals::random(3, 1, 1, &mut stream(seed, &[]));
    let ham = jordan_wigner(&ints);
    (ints, ham)
}

#[test]
fn shot_split_conserves_budget() {
    assert_eq!(split_shots(10, 3), vec![4, 3, 3]);
    assert_eq!(split_shots(2, 4), vec![1, 1, 0, 0]);
    let s = split_shots(100_000, 1500);
    assert_eq!(s.iter().sum::<u64>(), 100_000);
    assert!(s.windows(2).all(|w| w[0] >= w[1]));
}

#[test]
fn tiny_time_step_gives_hartree_fock() {
    let (ints, ham) = toy(1);
    let cfg = TimeEvolvedConfig::single(1e-9, 1000);
    let r = time_evolved_qsci(&cfg, &ints, &ham, 9, &mut stream(2, &[])).unwrap();
    let e_hf = diagonal(&ints.hf_determinant(), &ints);
    assert!((r.wavefunction.energy - e_hf).abs() < 1e-9);
    assert_eq!(r.shots, 1000);
}

#[test]
fn time_evolved_matches_reachable_support() {
    let (ints, ham) = toy(3);
    let cfg = TimeEvolvedConfig::single(0.7, 200_000);
    let r = time_evolved_qsci(&cfg, &ints, &ham, 9, &mut stream(4, &[])).unwrap();
    // Oracle: completion of everything with non-zero probability.
    let state = run_circuit(&trotter_circuit(&ham, 0.7, 1, ints.hf_determinant()));
    let reach = ShotHistogram::from_counts(
        state.probabilities().iter().enumerate().filter(|(_, p)| **p > 1e-6).map(|(b, _)| (b as u64, 1)),
    );
    let oracle = qsci_from_histogram(&reach, 9, &ints).unwrap();
    assert!((r.wavefunction.energy - oracle.energy).abs() < 1e-6);
}

#[test]
fn multiple_with_single_k_reproduces_single() {
    let (ints, ham) = toy(5);
    let single = time_evolved_qsci(&TimeEvolvedConfig::single(1.0, 5000), &ints, &ham, 9, &mut stream(6, &[])).unwrap();
    let mut m = TimeEvolvedConfig::multiple(5000);
    m.k_list = vec![1];
    let multi = time_evolved_qsci(&m, &ints, &ham, 9, &mut stream(6, &[])).unwrap();
    assert_eq!(single.wavefunction, multi.wavefunction);
    assert_eq!(single.histogram, multi.histogram);
    let five = time_evolved_qsci(&TimeEvolvedConfig::multiple(5003), &ints, &ham, 9, &mut stream(6, &[])).unwrap();
    assert_eq!(five.shots, 5003);
    assert_eq!(five.n_circuits, 5);
}

#[test]
fn sqdrift_contracts() {
    let (ints, ham) = toy(7);
    let cfg = SqDriftConfig { n_excitations: 4, randomizations: 20, k_list: vec![1, 2, 3], shots: 6001 };
    let a = sqdrift_qsci(&cfg, &ints, &ham, 9, &mut stream(8, &[])).unwrap();
    let b = sqdrift_qsci(&cfg, &ints, &ham, 9, &mut stream(8, &[])).unwrap();
    assert_eq!(a.wavefunction, b.wavefunction);
    assert_eq!(a.shots, 6001);
    assert_eq!(a.n_circuits, 60);
    let one = SqDriftConfig { randomizations: 1, k_list: vec![1], ..cfg.clone() };
    let single = sqdrift_qsci(&one, &ints, &ham, 9, &mut stream(8, &[])).unwrap();
    assert!(a.histogram.unique() >= single.histogram.unique());
}

#[test]
fn sqdrift_single_term_is_exact_evolution() {
    let (ints, _) = toy(9);
    let p: PauliString = "IIIIXX".parse().unwrap();
    let ham = PauliHamiltonian::new(6, vec![(0.4, p)]);
    let cfg = SqDriftConfig { n_excitations: 3, randomizations: 1, k_list: vec![1], shots: 1000 };
    let r = sqdrift_qsci(&cfg, &ints, &ham, 9, &mut stream(10, &[])).unwrap();
    let exact = run_circuit(&trotter_circuit(&ham, 1.0, 1, ints.hf_determinant()));
    for (b, count) in &r.histogram.counts {
        assert!(exact.probabilities()[*b as usize] > 0.0 && *count > 0);
    }
}

#[test]
fn exact_state_contracts() {
    let (ints, _) = toy(11);
    let (e_fci, ground) = fci_ground_state(&ints, DEFAULT_FCI_CAP).unwrap();
    let full = exact_state_qsci(&ints, 1_000_000, 9, &mut stream(12, &[])).unwrap();
    assert!((full.wavefunction.energy - e_fci).abs() < 1e-9);
    let one = exact_state_qsci(&ints, 100_000, 1, &mut stream(13, &[])).unwrap();
    let top = ground.iter().max_by(|a, b| (a.1 * a.1).total_cmp(&(b.1 * b.1))).unwrap().0;
    assert!((one.wavefunction.energy - diagonal(top, &ints)).abs() < 1e-12);
    let again = exact_state_qsci(&ints, 100_000, 1, &mut stream(13, &[])).unwrap();
    assert_eq!(one.wavefunction, again.wavefunction);
}

#[test]
fn gspgs_schedule_and_estimator() {
    let s = GspgsSchedule::default();
    assert_eq!(s.eta(0), 0.1 / 11f64.powf(0.602));
    assert_eq!(s.c(0), 0.05);
    let mut rng = stream(14, &[]);
    let (g, v) = gspgs::gradient_estimate(&mut |_: &[f64], _: &mut Stream| 3.0, &[0.1, 0.2], 0.05, 5, 0, &mut rng);
    assert!(g.iter().all(|x| *x == 0.0));
    assert_eq!(v.len(), 10);

    // Quadratic objective: E[ĝ] = 2θ.
    let theta = [0.5, -0.5, 0.5];
    let mut mean = [0.0; 3];
    let draws = 1000;
    for t in 0..draws {
        let (g, _) = gspgs::gradient_estimate(&mut |x: &[f64], _: &mut Stream| x.iter().map(|v| v * v).sum(), &theta, 1e-3, 5, t, &mut rng);
        for k in 0..3 {
            mean[k] += g[k] / draws as f64;
        }
    }
    let err: f64 = (0..3).map(|k| (mean[k] - 2.0 * theta[k]).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = theta.iter().map(|t| 4.0 * t * t).sum::<f64>().sqrt();
    assert!(err / norm < 0.05, "{mean:?}");

    let res = gspgs_minimize(|x: &[f64], _: &mut Stream| x.iter().map(|v| v * v).sum(), &theta, &GspgsSchedule { iterations: 7, ..s }, &mut rng);
    assert_eq!(res.evaluations, 70);
    assert_eq!(res.trace.len(), 7);
    assert!(res.trace.windows(2).all(|w| w[1].best <= w[0].best));
}

#[test]
fn baseline_csv_header() {
    let mut buf = Vec::new();
    let row = BaselineRow { method: "exact".into(), param: "-".into(), shots: 10, cost: GateCost::default(), n_dets: 3, energy: -1.0, error: 0.5 };
    write_baseline_csv(&[row], &mut buf).unwrap();
    let t = String::from_utf8(buf).unwrap();
    assert!(t.starts_with("method,param,shots,gate_2q,gate_rot,gate_total,n_dets,energy,error\nexact,-,10,0,0,0,3,"));
}
