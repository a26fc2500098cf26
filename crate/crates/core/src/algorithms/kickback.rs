use crate::circuit::Circuit;
use crate::gate::Gate;

/// Control qubit 0 in `|+⟩`, target qubit 1 in `|1⟩`, then a controlled
/// phase of `theta`. The target is an eigenstate, so the phase lands on the
/// control: `(|0⟩ + e^{iθ}|1⟩)/√2 ⊗ |1⟩`.
pub fn phase_kickback_circuit(theta: f64) -> Circuit {
    let mut c = Circuit::new(2).expect("two qubits");
    c.extend([Gate::x(1), Gate::h(0), Gate::cphase(0, 1, theta)])
        .expect("kickback gates");
    c
}

/// [`phase_kickback_circuit`] followed by `H` on the control and a
/// measurement of it. `P("1") = sin²(θ/2)`.
pub fn phase_kickback_readout(theta: f64) -> Circuit {
    let mut c = phase_kickback_circuit(theta);
    c.append(Gate::h(0)).expect("readout h");
    c.measure(&[0]).expect("readout measure");
    c
}
