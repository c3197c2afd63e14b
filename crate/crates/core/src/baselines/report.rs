use std::io::Write;

use crate::simulator::GateCost;
use crate::Result;

/// One line of the baseline CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct BaselineRow {
    pub method: String,
    pub param: String,
    pub shots: u64,
    pub cost: GateCost,
    pub n_dets: usize,
    pub energy: f64,
    /// `energy − E_FCI`.
    pub error: f64,
}

/// CSV `method,param,shots,gate_2q,gate_rot,gate_total,n_dets,energy,error`.
pub fn write_baseline_csv<W: Write>(rows: &[BaselineRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["method", "param", "shots", "gate_2q", "gate_rot", "gate_total", "n_dets", "energy", "error"])?;
    for r in rows {
        out.write_record([
            r.method.clone(),
            r.param.clone(),
            r.shots.to_string(),
            r.cost.two_qubit_gates.to_string(),
            r.cost.rotation_gates.to_string(),
            r.cost.total_gates.to_string(),
            r.n_dets.to_string(),
            format!("{:.12}", r.energy),
            format!("{:.6e}", r.error),
        ])?;
    }
    out.flush()?;
    Ok(())
}
