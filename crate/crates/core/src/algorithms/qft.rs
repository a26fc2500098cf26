use std::f64::consts::PI;

use crate::circuit::Circuit;
use crate::error::{QlabError, Result};
use crate::gate::Gate;

/// QFT gate list on `register`, where `register[i]` carries weight `2^i`.
///
/// Hadamard plus controlled-phase ladder from the most significant qubit
/// down, then SWAPs to restore bit order. The result implements
/// `|x⟩ → 2^{-m/2} Σ_y e^{2πi·xy/2^m} |y⟩`. With `inverse` set the adjoint
/// sequence is returned.
pub fn qft_gates(register: &[usize], inverse: bool) -> Vec<Gate> {
    let m = register.len();
    let mut gates = Vec::with_capacity(m * (m + 1) / 2 + m / 2);
    for j in (0..m).rev() {
        gates.push(Gate::h(register[j]));
        for k in (0..j).rev() {
            let angle = PI / (1u64 << (j - k)) as f64;
            gates.push(Gate::cphase(register[k], register[j], angle));
        }
    }
    for i in 0..m / 2 {
        gates.push(Gate::swap(register[i], register[m - 1 - i]));
    }
    if inverse {
        gates.reverse();
        gates.iter_mut().for_each(|g| *g = g.inverse());
    }
    gates
}

/// `n`-qubit (inverse) QFT circuit, without measurement.
pub fn qft_circuit(n: usize, inverse: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(QlabError::input("QFT needs at least one qubit"));
    }
    let register: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n)?;
    c.extend(qft_gates(&register, inverse))?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{self, DenseMatrix};
    use num_complex::Complex64;

    #[test]
    fn one_qubit_is_hadamard() {
        let c = qft_circuit(1, false).unwrap();
        assert_eq!(c.ops().len(), 1);
        let h = crate::gate::gate_unitary(&Gate::h(0), 1).unwrap();
        assert!(dense::max_abs_diff(&c.unitary().unwrap(), &h) < 1e-15);
    }

    #[test]
    fn two_qubit_matrix() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let want = DenseMatrix::from_row_slice(
            4,
            4,
            &[
                one, one, one, one, one, i, -one, -i, one, -one, one, -one, one, -i, -one, i,
            ],
        ) * Complex64::new(0.5, 0.0);
        let got = qft_circuit(2, false).unwrap().unitary().unwrap();
        assert!(dense::max_abs_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn matches_dft_up_to_five_qubits() {
        for n in 1..=5 {
            let got = qft_circuit(n, false).unwrap().unitary().unwrap();
            assert!(
                dense::max_abs_diff(&got, &dense::dft_matrix(n)) <= 1e-9,
                "n={n}"
            );
            let inv = qft_circuit(n, true).unwrap().unitary().unwrap();
            assert!(dense::max_abs_diff(&(inv * got), &dense::identity(1 << n)) <= 1e-9);
        }
    }

    #[test]
    fn zero_goes_to_uniform() {
        let s = qft_circuit(4, false).unwrap().run_state().unwrap();
        assert_eq!(s.len(), 16);
        for (_, a) in s.entries() {
            assert!((a - Complex64::new(0.25, 0.0)).norm() < 1e-12);
        }
    }
}
