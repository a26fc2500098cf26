use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::index;
use rand::Rng;

use super::OracleSpec;
use crate::circuit::{Circuit, PermutationOp};
use crate::error::{QlabError, Result};
use crate::gate::Gate;
use crate::state::SparseState;

fn check_counts(domain: u64, marked: u64) -> Result<()> {
    if marked == 0 || marked > domain {
        return Err(QlabError::input(format!(
            "need 1 <= marked <= domain size, got {marked} of {domain}"
        )));
    }
    Ok(())
}

/// Uniform superposition, then `iterations` rounds of phase oracle and
/// diffusion, then a measurement of every qubit.
///
/// The oracle flips the sign of marked labels; the diffusion operator is
/// `H⊗ⁿ · (2|0⟩⟨0| − I) · H⊗ⁿ`. Both reflections are diagonal permutation
/// ops.
pub fn grover_circuit(oracle: &OracleSpec, iterations: usize) -> Result<Circuit> {
    if oracle.ones() == 0 {
        return Err(QlabError::input("Grover needs at least one marked item"));
    }
    let n = oracle.num_inputs();
    let register: Vec<usize> = (0..n).collect();
    let one = Complex64::new(1.0, 0.0);
    let sign = |negate: bool| if negate { -one } else { one };
    let phase_oracle = PermutationOp::diagonal(
        "grover_oracle",
        register.clone(),
        (0..oracle.domain_size())
            .map(|x| sign(oracle.eval(x)))
            .collect(),
    )?;
    let zero_reflection = PermutationOp::diagonal(
        "reflect_zero",
        register.clone(),
        (0..oracle.domain_size()).map(|x| sign(x != 0)).collect(),
    )?;

    let mut c = Circuit::new(n)?;
    c.extend(register.iter().map(|&q| Gate::h(q)))?;
    for _ in 0..iterations {
        c.append(phase_oracle.clone())?;
        c.extend(register.iter().map(|&q| Gate::h(q)))?;
        c.append(zero_reflection.clone())?;
        c.extend(register.iter().map(|&q| Gate::h(q)))?;
    }
    c.measure(&register)?;
    Ok(c)
}

/// Total probability of the oracle's marked labels in `state`.
pub fn marked_probability(state: &SparseState, oracle: &OracleSpec) -> f64 {
    oracle
        .marked_values()
        .into_iter()
        .map(|x| state.amplitude_at(x).norm_sqr())
        .sum()
}

/// `⌊(π/4)·√(N/M)⌋`.
pub fn grover_optimal_iterations(domain: u64, marked: u64) -> Result<u64> {
    check_counts(domain, marked)?;
    Ok((PI / 4.0 * (domain as f64 / marked as f64).sqrt()).floor() as u64)
}

/// `sin²((2k+1)·asin(√(M/N)))`.
pub fn grover_success_probability(domain: u64, marked: u64, iterations: u64) -> Result<f64> {
    check_counts(domain, marked)?;
    let theta = (marked as f64 / domain as f64).sqrt().asin();
    Ok(((2 * iterations + 1) as f64 * theta).sin().powi(2))
}

/// `(N+1)/(M+1)`: mean number of queries a random-order scan needs to hit
/// one of `M` marked items among `N`.
pub fn expected_classical_queries(domain: u64, marked: u64) -> Result<f64> {
    check_counts(domain, marked)?;
    Ok((domain + 1) as f64 / (marked + 1) as f64)
}

/// Monte Carlo mean of the queries a classical scan needs: the `M` marked
/// items sit at uniformly random distinct positions among `N`, and the scan
/// stops at the first one.
pub fn classical_search_baseline<R: Rng + ?Sized>(
    domain: u64,
    marked: u64,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    check_counts(domain, marked)?;
    if trials == 0 {
        return Err(QlabError::input("trials must be at least 1"));
    }
    let n = usize::try_from(domain).map_err(|_| QlabError::input("domain too large"))?;
    let m = marked as usize;
    let mut total = 0u64;
    for _ in 0..trials {
        let first = index::sample(rng, n, m).into_iter().min().expect("m >= 1");
        total += first as u64 + 1;
    }
    Ok(total as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    fn exact_marked(oracle: &OracleSpec, k: usize) -> f64 {
        let state = grover_circuit(oracle, k)
            .unwrap()
            .without_measurements()
            .run_state()
            .unwrap();
        marked_probability(&state, oracle)
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(grover_optimal_iterations(4, 1).unwrap(), 1);
        assert!((grover_success_probability(4, 1, 1).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(grover_optimal_iterations(1024, 1).unwrap(), 25);
        assert_eq!(grover_optimal_iterations(8, 1).unwrap(), 2);
        for k in 0..5 {
            assert!((grover_success_probability(16, 16, k).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(grover_optimal_iterations(4, 5).is_err());
        assert!(grover_success_probability(4, 0, 1).is_err());
    }

    #[test]
    fn simulated_examples() {
        let two = OracleSpec::marked(2, &["10"]).unwrap();
        assert!((exact_marked(&two, 1) - 1.0).abs() < 1e-9);
        let three = OracleSpec::marked(3, &["101"]).unwrap();
        // sin²(5·asin(√(1/8))) = 121/128
        assert!((exact_marked(&three, 2) - 0.9453).abs() < 1e-4);
        assert!((exact_marked(&three, 2) - 121.0 / 128.0).abs() < 1e-12);
        assert!((exact_marked(&three, 0) - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn circuit_agrees_with_closed_form() {
        for n in 1..=4usize {
            let domain = 1u64 << n;
            for m in 1..=2u64.min(domain) {
                let labels: Vec<u64> = (0..m).map(|i| (i * 5 + 3) % domain).collect();
                let oracle = OracleSpec::from_fn(n, |x| labels.contains(&x)).unwrap();
                for k in 0..=6 {
                    let got = exact_marked(&oracle, k);
                    let want = grover_success_probability(domain, m, k as u64).unwrap();
                    assert!(
                        (got - want).abs() <= 1e-9,
                        "n={n} m={m} k={k}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn classical_baseline() {
        let mut rng = seeded_rng(10);
        let mean = classical_search_baseline(8, 1, 100_000, &mut rng).unwrap();
        assert!((mean - 4.5).abs() <= 0.05, "{mean}");
        assert_eq!(
            classical_search_baseline(16, 16, 100, &mut rng).unwrap(),
            1.0
        );
        assert!(classical_search_baseline(8, 0, 10, &mut rng).is_err());
        assert_eq!(expected_classical_queries(1024, 1).unwrap(), 512.5);
        assert!(
            (grover_optimal_iterations(1024, 1).unwrap() as f64)
                < expected_classical_queries(1024, 1).unwrap()
        );
    }

    #[test]
    fn empty_marked_set() {
        let o = OracleSpec::constant(3, false).unwrap();
        assert!(grover_circuit(&o, 1).is_err());
    }
}
