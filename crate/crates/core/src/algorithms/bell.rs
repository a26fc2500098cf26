use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::error::{QlabError, Result};
use crate::gate::Gate;
use crate::state::SparseState;

/// The four maximally entangled two-qubit states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    /// `(|00⟩ + |11⟩)/√2`
    PhiPlus,
    /// `(|00⟩ − |11⟩)/√2`
    PhiMinus,
    /// `(|01⟩ + |10⟩)/√2`
    PsiPlus,
    /// `(|01⟩ − |10⟩)/√2`
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellState {
    type Err = QlabError;

    fn from_str(s: &str) -> Result<Self> {
        BellState::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| QlabError::input(format!("unknown Bell state {s:?}")))
    }
}

/// Textbook amplitudes of `which`.
pub fn bell_state(which: BellState) -> SparseState {
    let h = FRAC_1_SQRT_2;
    let (a, b, sign) = match which {
        BellState::PhiPlus => ("00", "11", 1.0),
        BellState::PhiMinus => ("00", "11", -1.0),
        BellState::PsiPlus => ("01", "10", 1.0),
        BellState::PsiMinus => ("01", "10", -1.0),
    };
    SparseState::from_labels(
        2,
        [
            (a, Complex64::new(h, 0.0)),
            (b, Complex64::new(sign * h, 0.0)),
        ],
    )
    .expect("valid Bell labels")
}

/// `H` on qubit 0 and `CNOT(0→1)`, preceded by `X(0)` for the minus states
/// and followed by `X(1)` for the Ψ states. Ends with a measurement of both
/// qubits. Ψ⁻ comes out with a global phase of −1.
pub fn bell_circuit(which: BellState) -> Circuit {
    let mut c = Circuit::new(2).expect("two qubits");
    let minus = matches!(which, BellState::PhiMinus | BellState::PsiMinus);
    let psi = matches!(which, BellState::PsiPlus | BellState::PsiMinus);
    let mut gates = Vec::new();
    if minus {
        gates.push(Gate::x(0));
    }
    gates.extend([Gate::h(0), Gate::cnot(0, 1)]);
    if psi {
        gates.push(Gate::x(1));
    }
    c.extend(gates).expect("bell gates");
    c.measure(&[0, 1]).expect("bell measurement");
    c
}
