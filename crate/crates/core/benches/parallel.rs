//! Parallel vs sequential backend.
//!
//! The backend is chosen at compile time, so the comparison is two runs
//! with the same benchmark ids:
//!
//! ```text
//! cargo bench -p gqe-qsci --no-default-features -- --save-baseline sequential
//! cargo bench -p gqe-qsci -- --baseline sequential
//! ```

use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use gqe_qsci::hamiltonian::{read_fcidump, sector_determinants, Determinant, MolecularIntegrals, PauliString};
use gqe_qsci::policy::{compute_advantages, grpo_loss_and_grad, sample_sequences, GrpoConfig, PolicyConfig, PolicyParameters};
use gqe_qsci::qsci::{qsci_energy, subspace::sparse_matrix};
use gqe_qsci::rng::stream;
use gqe_qsci::simulator::Statevector;
use gqe_qsci::{par, pool, simulator};

fn fixture(name: &str) -> MolecularIntegrals {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    read_fcidump(p).expect("fixture")
}

fn backend() -> &'static str {
    if par::is_parallel() {
        "rayon"
    } else {
        "sequential"
    }
}

fn gates(c: &mut Criterion) {
    let n = 20;
    let p: PauliString = "XYZZIIZZXYIZZYXIIZXY".parse().unwrap();
    let mut sv = Statevector::basis(n, 0b1010_1010_1010);
    c.bench_function("rotation_20q", |b| b.iter(|| sv.apply_rotation(black_box(&p), 0.3).unwrap()));
}

fn batch_qsci(c: &mut Criterion) {
    let ints = fixture("n2_sto3g_r250.fcidump");
    let amps = pool::parse_amplitudes(&std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/n2_sto3g_r250.amps")).unwrap()).unwrap();
    let pool = pool::build_pool(&amps, pool::DEFAULT_THRESHOLD, 2 * ints.n_orb);
    let hf = ints.hf_determinant();
    let tokens: Vec<Vec<usize>> = (0..10).map(|m| (0..10).map(|l| 1 + (7 * m + 3 * l) % (pool.len() - 1)).collect()).collect();
    c.bench_function("batch_qsci_n2_m10", |b| {
        b.iter(|| {
            par::map_range(tokens.len(), |m| {
                let state = simulator::run_circuit(&pool.circuit(hf, &tokens[m]));
                qsci_energy(&state, 10_000, 170, &ints, &mut stream(1, &[m as u64])).map(|w| w.energy).ok()
            })
        })
    });
}

fn assembly(c: &mut Criterion) {
    let ints = fixture("n2_sto3g_r250.fcidump");
    let dets: Vec<Determinant> = sector_determinants(ints.n_orb, ints.n_alpha, ints.n_beta);
    c.bench_function("sparse_assembly_n2_4900", |b| b.iter(|| sparse_matrix(black_box(&dets), &ints)));
}

fn grpo(c: &mut Criterion) {
    let p = PolicyParameters::init(PolicyConfig::new(30, 10, 0), &mut stream(0, &[])).unwrap();
    let mut batch = sample_sequences(&p, 10, 10, 1.2, &mut stream(1, &[])).unwrap();
    batch.rewards = (0..10).map(|i| -(i as f64)).collect();
    batch.advantages = compute_advantages(&batch.rewards, 1e-8);
    let cfg = GrpoConfig::default();
    c.bench_function("grpo_loss_grad_default", |b| {
        b.iter_batched(|| batch.clone(), |bt| grpo_loss_and_grad(&p, &bt.logprobs, &bt, &cfg).unwrap(), BatchSize::SmallInput)
    });
}

fn report_backend(_: &mut Criterion) {
    eprintln!("backend: {}", backend());
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = report_backend, gates, batch_qsci, assembly, grpo
}
criterion_main!(benches);
