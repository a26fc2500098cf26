use std::f64::consts::TAU;

use super::qft_gates;
use crate::circuit::Circuit;
use crate::error::{QlabError, Result};
use crate::gate::Gate;
use crate::state::MAX_QUBITS;

/// Estimate the eigenphase `phase` of a phase gate with `t` counting qubits.
///
/// Counting qubits are `0..t` (qubit `j` weighs `2^j`), the eigenstate qubit
/// `t` is prepared in `|1⟩`. Counting qubit `j` controls `PHASE(2π·phase·2^j)`
/// on it, the counting register is inverse-Fourier-transformed and measured.
/// The outcome `y` estimates `phase ≈ y / 2^t`.
pub fn phase_estimation_circuit(phase: f64, t: usize) -> Result<Circuit> {
    if !(0.0..1.0).contains(&phase) {
        return Err(QlabError::input(format!("phase {phase} is outside [0, 1)")));
    }
    if t == 0 {
        return Err(QlabError::input("phase estimation needs a counting qubit"));
    }
    if t + 1 > MAX_QUBITS {
        return Err(QlabError::Capacity {
            what: "counting qubits",
            requested: t,
            limit: MAX_QUBITS - 1,
        });
    }
    let counting: Vec<usize> = (0..t).collect();
    let mut c = Circuit::new(t + 1)?;
    c.append(Gate::x(t))?;
    c.extend(counting.iter().map(|&q| Gate::h(q)))?;
    for j in 0..t {
        // reduce phase·2^j mod 1 before scaling to keep precision for large j
        let turns = (phase * 2f64.powi(j as i32)).fract();
        c.append(Gate::cphase(j, t, TAU * turns))?;
    }
    c.extend(qft_gates(&counting, true))?;
    c.measure(&counting)?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::format_label;
    use num_complex::Complex64;

    fn distribution(phase: f64, t: usize) -> std::collections::BTreeMap<String, f64> {
        let counting: Vec<usize> = (0..t).collect();
        phase_estimation_circuit(phase, t)
            .unwrap()
            .without_measurements()
            .run_state()
            .unwrap()
            .marginal_probabilities(&counting)
            .unwrap()
    }

    #[test]
    fn dyadic_phases_are_exact() {
        assert!((distribution(0.25, 3)["010"] - 1.0).abs() < 1e-9);
        assert!((distribution(0.0, 3)["000"] - 1.0).abs() < 1e-9);
        for t in 1..=5usize {
            for k in 0..1u64 << t {
                let d = distribution(k as f64 / (1u64 << t) as f64, t);
                assert!((d[&format_label(k, t)] - 1.0).abs() <= 1e-9, "k={k} t={t}");
            }
        }
    }

    // Independent oracle: amplitude of outcome y is
    // 2^{-t} Σ_x e^{2πi x (φ − y/2^t)}.
    fn analytic_probability(phase: f64, t: usize, y: u64) -> f64 {
        let size = 1u64 << t;
        let amp: Complex64 = (0..size)
            .map(|x| Complex64::from_polar(1.0, TAU * x as f64 * (phase - y as f64 / size as f64)))
            .sum();
        (amp / size as f64).norm_sqr()
    }

    #[test]
    fn one_third_with_four_qubits() {
        let d = distribution(1.0 / 3.0, 4);
        let (mode, p) = d.iter().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        assert_eq!(mode, "0101");
        assert!(*p >= 0.4, "{p}");
        for y in 0..16u64 {
            let got = d.get(&format_label(y, 4)).copied().unwrap_or(0.0);
            assert!((got - analytic_probability(1.0 / 3.0, 4, y)).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(phase_estimation_circuit(1.0, 3).is_err());
        assert!(phase_estimation_circuit(-0.1, 3).is_err());
        assert!(phase_estimation_circuit(0.5, 0).is_err());
    }
}
