#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use gqe_qsci::hamiltonian::{read_fcidump, MolecularIntegrals};
use gqe_qsci::pool::{parse_amplitudes, Excitation};

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn integrals(system: &str) -> MolecularIntegrals {
    read_fcidump(data(&format!("{system}.fcidump"))).expect("fixture FCIDUMP")
}

pub fn amplitudes(system: &str) -> Vec<Excitation> {
    parse_amplitudes(&std::fs::read_to_string(data(&format!("{system}.amps"))).unwrap()).unwrap()
}

/// `key=value` reference values written alongside each fixture.
pub fn reference(system: &str) -> HashMap<String, f64> {
    std::fs::read_to_string(data(&format!("{system}.ref")))
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().parse().unwrap()))
        .collect()
}
