//! CSV emission. Every energy column is paired with its error against the
//! exact sector ground state.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::run::RunRecord;
use crate::baselines::write_baseline_csv;
use crate::{Result, CHEMICAL_PRECISION};

// Shortest round-trip representation, so columns parse back exactly.
fn e(x: f64) -> String {
    format!("{x}")
}

fn err(x: f64) -> String {
    format!("{x:e}")
}

fn chem() -> String {
    format!("{CHEMICAL_PRECISION:e}")
}

/// `iter, E_best_batch, E_mean_batch, best_so_far, E_local, E_global` with
/// the errors of the last three.
pub fn write_history<W: Write>(r: &RunRecord, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record([
        "iter", "e_batch_min", "e_batch_mean", "best_so_far", "e_local", "e_global", "n_local", "n_global",
        "error_best_so_far", "error_local", "error_global", "chem_precision",
    ])?;
    for it in &r.iterations {
        let es: Vec<f64> = it.evaluations.iter().filter_map(|ev| ev.energy).collect();
        let min = es.iter().copied().fold(f64::INFINITY, f64::min);
        let mean = es.iter().sum::<f64>() / es.len().max(1) as f64;
        out.write_record([
            it.iter.to_string(),
            e(min),
            e(mean),
            e(it.best_so_far),
            e(it.e_local),
            e(it.e_global),
            it.n_local.to_string(),
            it.n_global.to_string(),
            err(it.best_so_far - r.e_fci),
            err(it.e_local - r.e_fci),
            err(it.e_global - r.e_fci),
            chem(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Error and distinct bitstrings against cumulative shots.
pub fn write_sampling<W: Write>(r: &RunRecord, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "shots", "unique_bitstrings", "e_global", "error", "chem_precision"])?;
    for it in &r.iterations {
        out.write_record([
            it.iter.to_string(),
            it.cumulative_shots.to_string(),
            it.cumulative_unique.to_string(),
            e(it.e_global),
            err(it.e_global - r.e_fci),
            chem(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Gate counts of the best circuit so far against its error.
pub fn write_gates<W: Write>(r: &RunRecord, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "gate_2q", "gate_rot", "gate_total", "best_so_far", "error", "chem_precision"])?;
    for it in &r.iterations {
        out.write_record([
            it.iter.to_string(),
            it.best_cost.two_qubit_gates.to_string(),
            it.best_cost.rotation_gates.to_string(),
            it.best_cost.total_gates.to_string(),
            e(it.best_so_far),
            err(it.best_so_far - r.e_fci),
            chem(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Determinants retained by the global wavefunction against its error.
pub fn write_compactness<W: Write>(r: &RunRecord, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "n_dets", "e_global", "error", "chem_precision"])?;
    for it in &r.iterations {
        out.write_record([it.iter.to_string(), it.n_global.to_string(), e(it.e_global), err(it.e_global - r.e_fci), chem()])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_training<W: Write>(r: &RunRecord, w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["iter", "update", "loss", "mean_reward", "best_energy"])?;
    for t in &r.training {
        out.write_record([t.iter.to_string(), t.update.to_string(), err(t.loss), e(t.mean_reward), e(t.best_energy)])?;
    }
    out.flush()?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Writes every report for `r` into `dir` as `<method>_<report>.csv` and
/// returns the paths.
pub fn emit_reports(r: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let m = &r.method;
    let mut written = Vec::new();
    let mut emit = |name: String, f: &dyn Fn(&mut BufWriter<File>) -> Result<()>| -> Result<()> {
        let mut w = create(dir, &name)?;
        f(&mut w)?;
        w.flush()?;
        written.push(dir.join(name));
        Ok(())
    };
    emit(format!("{m}_history.csv"), &|w| write_history(r, w))?;
    emit(format!("{m}_sampling.csv"), &|w| write_sampling(r, w))?;
    emit(format!("{m}_gates.csv"), &|w| write_gates(r, w))?;
    emit(format!("{m}_compactness.csv"), &|w| write_compactness(r, w))?;
    emit(format!("{m}_refinement.csv"), &|w| r.refinement.write_trace(w))?;
    if !r.training.is_empty() {
        emit(format!("{m}_training.csv"), &|w| write_training(r, w))?;
    }
    if let Some(row) = &r.baseline {
        emit(format!("{m}_baseline.csv"), &|w| write_baseline_csv(std::slice::from_ref(row), w))?;
    }
    if let Some(b) = &r.best {
        let text = b.circuit.to_text();
        emit(format!("{m}_best_circuit.txt"), &|w| Ok(w.write_all(text.as_bytes())?))?;
    }
    Ok(written)
}
