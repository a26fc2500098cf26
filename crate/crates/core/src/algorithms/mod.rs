//! Reference implementations of the lab algorithms.
//!
//! Every builder returns a plain [`Circuit`](crate::Circuit); circuits meant
//! to be sampled end in terminal measurements of their readout register, and
//! [`Circuit::without_measurements`](crate::Circuit::without_measurements)
//! gives the exact-mode version.

mod bell;
mod deutsch_jozsa;
mod grover;
mod kickback;
pub mod number;
mod oracle;
mod phase_estimation;
mod qft;
mod shor;

pub use bell::{bell_circuit, bell_state, BellState};
pub use deutsch_jozsa::{dj_circuit, dj_classify, dj_classify_state, DjVerdict};
pub use grover::{
    classical_search_baseline, expected_classical_queries, grover_circuit,
    grover_optimal_iterations, grover_success_probability, marked_probability,
};
pub use kickback::{phase_kickback_circuit, phase_kickback_readout};
pub use number::{continued_fractions, Fraction};
pub use oracle::OracleSpec;
pub use phase_estimation::phase_estimation_circuit;
pub use qft::{qft_circuit, qft_gates};
pub use shor::{
    default_counting_qubits, order_finding, order_finding_circuit, shor_factor, FactorMethod,
    Factorization, OrderFinder,
};
