use std::iter::Sum;
use std::ops::Add;

use super::circuit::Circuit;
use crate::hamiltonian::PauliString;

/// Gate counts under all-to-all connectivity with a CX-ladder decomposition
/// of each Pauli rotation: `2(w-1)` CX, one arbitrary-angle `Rz`, and two
/// single-qubit Cliffords per X or Y letter for the basis change.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCost {
    pub two_qubit_gates: u64,
    pub rotation_gates: u64,
    pub total_gates: u64,
}

impl Add for GateCost {
    type Output = GateCost;
    fn add(self, o: GateCost) -> GateCost {
        GateCost {
            two_qubit_gates: self.two_qubit_gates + o.two_qubit_gates,
            rotation_gates: self.rotation_gates + o.rotation_gates,
            total_gates: self.total_gates + o.total_gates,
        }
    }
}

impl Sum for GateCost {
    fn sum<I: Iterator<Item = GateCost>>(iter: I) -> GateCost {
        iter.fold(GateCost::default(), Add::add)
    }
}

impl GateCost {
    /// Componentwise maximum.
    pub fn max(self, o: GateCost) -> GateCost {
        GateCost {
            two_qubit_gates: self.two_qubit_gates.max(o.two_qubit_gates),
            rotation_gates: self.rotation_gates.max(o.rotation_gates),
            total_gates: self.total_gates.max(o.total_gates),
        }
    }
}

pub fn rotation_cost(p: &PauliString) -> GateCost {
    let w = p.weight() as u64;
    if w == 0 {
        return GateCost::default();
    }
    let (nx, ny, _) = p.letter_counts();
    let cx = 2 * (w - 1);
    GateCost {
        two_qubit_gates: cx,
        rotation_gates: 1,
        total_gates: cx + 1 + 2 * (nx + ny) as u64,
    }
}

pub fn gate_cost(c: &Circuit) -> GateCost {
    c.gates.iter().map(|g| rotation_cost(&g.pauli)).sum()
}
