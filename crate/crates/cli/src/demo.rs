//! Printed walkthroughs of each algorithm.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write;

use clap::ValueEnum;
use qlab_core::algorithms::{
    bell_circuit, bell_state, classical_search_baseline, dj_circuit, dj_classify,
    expected_classical_queries, grover_circuit, grover_optimal_iterations,
    grover_success_probability, marked_probability, phase_estimation_circuit,
    phase_kickback_circuit, phase_kickback_readout, qft_circuit, shor_factor, BellState,
    FactorMethod, OracleSpec,
};
use qlab_core::dense::{dft_matrix, max_abs_diff};
use qlab_core::{seeded_rng, Complex64, Result};

use crate::histogram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemoName {
    Bell,
    Kickback,
    Dj,
    Grover,
    Qft,
    Qpe,
    Shor,
}

#[derive(Debug, Clone)]
pub struct DemoParams {
    pub n: Option<u64>,
    pub marked: Option<String>,
    pub theta: Option<f64>,
    pub seed: u64,
    pub shots: u64,
}

const CLASSICAL_TRIALS: u64 = 100_000;
const SHOR_ATTEMPTS: u32 = 50;

pub fn run(name: DemoName, p: &DemoParams) -> Result<String> {
    let mut out = String::new();
    match name {
        DemoName::Bell => bell(p, &mut out)?,
        DemoName::Kickback => kickback(p, &mut out)?,
        DemoName::Dj => deutsch_jozsa(p, &mut out)?,
        DemoName::Grover => grover(p, &mut out)?,
        DemoName::Qft => qft(p, &mut out)?,
        DemoName::Qpe => qpe(p, &mut out)?,
        DemoName::Shor => shor(p, &mut out)?,
    }
    Ok(out)
}

fn width(p: &DemoParams, default: u64, max: u64) -> Result<usize> {
    let n = p.n.unwrap_or(default);
    if !(1..=max).contains(&n) {
        return Err(qlab_core::QlabError::InvalidInput(format!(
            "--n {n} is outside 1..={max} for this demo"
        )));
    }
    Ok(n as usize)
}

fn fmt_complex(z: Complex64) -> String {
    let re = if z.re.abs() < 5e-13 { 0.0 } else { z.re };
    let im = if z.im.abs() < 5e-13 { 0.0 } else { z.im };
    format!("{re:+.4}{im:+.4}i")
}

fn bell(p: &DemoParams, out: &mut String) -> Result<()> {
    writeln!(out, "Bell states: H on qubit 0, CNOT 0 -> 1").unwrap();
    for which in BellState::ALL {
        let state = bell_circuit(which).without_measurements().run_state()?;
        let overlap = bell_state(which).inner_product(&state)?.norm();
        writeln!(
            out,
            "{which:<5} {state}   overlap with textbook state {overlap:.6}"
        )
        .unwrap();
    }
    let counts = bell_circuit(BellState::PhiPlus).run_shots(p.shots, p.seed, None)?;
    writeln!(out, "\nphi+ measured, seed {}:", p.seed).unwrap();
    out.push_str(&histogram::render(&counts));
    Ok(())
}

fn kickback(p: &DemoParams, out: &mut String) -> Result<()> {
    let theta = p.theta.unwrap_or(FRAC_PI_2);
    let state = phase_kickback_circuit(theta).run_state()?;
    writeln!(
        out,
        "Phase kickback, controlled PHASE({theta:.6}) with target in |1>"
    )
    .unwrap();
    writeln!(out, "state: {state}").unwrap();
    let ratio = state.amplitude_at(0b11) / state.amplitude_at(0b10);
    writeln!(
        out,
        "relative phase on control: {:.6} rad (target qubit unchanged)",
        ratio.arg()
    )
    .unwrap();
    let readout = phase_kickback_readout(theta);
    let exact = readout
        .without_measurements()
        .run_state()?
        .marginal_probabilities(&[0])?;
    writeln!(
        out,
        "after H on control: P(0) = {:.6}, expected (1 + cos theta)/2 = {:.6}",
        exact.get("0").copied().unwrap_or(0.0),
        (1.0 + theta.cos()) / 2.0
    )
    .unwrap();
    out.push_str(&histogram::render(
        &readout.run_shots(p.shots, p.seed, None)?,
    ));
    Ok(())
}

fn deutsch_jozsa(p: &DemoParams, out: &mut String) -> Result<()> {
    let n = width(p, 3, 10)?;
    writeln!(
        out,
        "Deutsch-Jozsa on {n} input bits, one oracle query each"
    )
    .unwrap();
    let oracles = [
        ("constant 0", OracleSpec::constant(n, false)?),
        ("constant 1", OracleSpec::constant(n, true)?),
        (
            "parity",
            OracleSpec::from_fn(n, |x| x.count_ones() % 2 == 1)?,
        ),
        (
            "top bit",
            OracleSpec::from_fn(n, |x| x >> (n - 1) & 1 == 1)?,
        ),
    ];
    for (name, oracle) in &oracles {
        let counts = dj_circuit(oracle)?.run_shots(p.shots, p.seed, None)?;
        let zeros = counts.get(&"0".repeat(n));
        writeln!(
            out,
            "{name:<11} -> {:<8}  ({zeros}/{} shots read all zeros)",
            dj_classify(&counts)?.label(),
            counts.shots
        )
        .unwrap();
    }
    Ok(())
}

fn grover(p: &DemoParams, out: &mut String) -> Result<()> {
    let n = width(p, 3, 12)?;
    let marked = p.marked.clone().unwrap_or_else(|| "1".repeat(n));
    let labels: Vec<&str> = marked.split(',').map(str::trim).collect();
    let oracle = OracleSpec::marked(n, &labels)?;
    let domain = oracle.domain_size();
    let m = oracle.ones();
    let k = grover_optimal_iterations(domain, m)?;
    let closed = grover_success_probability(domain, m, k)?;
    let circuit = grover_circuit(&oracle, k as usize)?;
    let exact = marked_probability(&circuit.without_measurements().run_state()?, &oracle);
    let counts = circuit.run_shots(p.shots, p.seed, None)?;
    let hits: u64 = labels.iter().map(|l| counts.get(l)).sum();
    let mut rng = seeded_rng(p.seed);
    let baseline = classical_search_baseline(domain, m, CLASSICAL_TRIALS, &mut rng)?;

    writeln!(
        out,
        "Grover search: N = {domain}, marked {} ({m} item(s))",
        labels.join(", ")
    )
    .unwrap();
    writeln!(out, "optimal k = {k}").unwrap();
    writeln!(
        out,
        "success probability: closed form {closed:.4}, simulated {exact:.4}"
    )
    .unwrap();
    writeln!(
        out,
        "sampled: {hits}/{} shots hit a marked item ({:.4})",
        counts.shots,
        hits as f64 / counts.shots as f64
    )
    .unwrap();
    writeln!(
        out,
        "classical baseline: {:.1} expected queries, Monte Carlo mean {baseline:.3} over {CLASSICAL_TRIALS} trials",
        expected_classical_queries(domain, m)?
    )
    .unwrap();
    out.push_str(&histogram::render(&counts));

    writeln!(out, "\nscaling, one marked item:").unwrap();
    writeln!(
        out,
        "{:>8}  {:>9}  {:>10}  {:>16}",
        "N", "quantum k", "P(success)", "classical mean"
    )
    .unwrap();
    for bits in [2u32, 4, 6, 8, 10, 12, 16, 20] {
        let big_n = 1u64 << bits;
        let k = grover_optimal_iterations(big_n, 1)?;
        writeln!(
            out,
            "{big_n:>8}  {k:>9}  {:>10.4}  {:>16.1}",
            grover_success_probability(big_n, 1, k)?,
            expected_classical_queries(big_n, 1)?
        )
        .unwrap();
    }
    Ok(())
}

fn qft(p: &DemoParams, out: &mut String) -> Result<()> {
    let n = width(p, 2, 6)?;
    let u = qft_circuit(n, false)?.unitary()?;
    let dft = dft_matrix(n);
    writeln!(out, "QFT on {n} qubit(s), {0}x{0} unitary:", 1 << n).unwrap();
    if n <= 3 {
        for row in u.row_iter() {
            let cells: Vec<String> = row.iter().map(|z| fmt_complex(*z)).collect();
            writeln!(out, "  {}", cells.join("  ")).unwrap();
        }
    }
    writeln!(out, "max |QFT - DFT| = {:.3e}", max_abs_diff(&u, &dft)).unwrap();
    let round_trip = qft_circuit(n, true)?.unitary()? * &u;
    let id = qlab_core::dense::identity(1 << n);
    writeln!(
        out,
        "max |QFT^-1 QFT - I| = {:.3e}",
        max_abs_diff(&round_trip, &id)
    )
    .unwrap();
    Ok(())
}

fn qpe(p: &DemoParams, out: &mut String) -> Result<()> {
    let t = width(p, 4, 16)?;
    let phase = p.theta.unwrap_or(1.0 / 3.0);
    let circuit = phase_estimation_circuit(phase, t)?;
    let counting: Vec<usize> = (0..t).collect();
    let exact = circuit
        .without_measurements()
        .run_state()?
        .marginal_probabilities(&counting)?;
    let (mode, p_mode) = exact
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, v)| (k.clone(), *v))
        .expect("nonempty distribution");
    let y = u64::from_str_radix(&mode, 2).expect("binary label");
    writeln!(
        out,
        "Phase estimation of phase {phase:.6} (x 2 pi) with {t} counting qubits"
    )
    .unwrap();
    writeln!(
        out,
        "most likely outcome {mode} = {y}, estimate {y}/{} = {:.6}, probability {p_mode:.4}",
        1u64 << t,
        y as f64 / (1u64 << t) as f64
    )
    .unwrap();
    let top: Vec<(&String, &f64)> = exact.iter().filter(|(_, &v)| v > 1e-3).collect();
    out.push_str(&histogram::render_probabilities(top));
    let counts = circuit.run_shots(p.shots, p.seed, None)?;
    writeln!(out, "sampled, seed {}:", p.seed).unwrap();
    out.push_str(&histogram::render(&counts));
    Ok(())
}

fn shor(p: &DemoParams, out: &mut String) -> Result<()> {
    let n = p.n.unwrap_or(15);
    let mut rng = seeded_rng(p.seed);
    writeln!(out, "Shor factoring of {n}, seed {}", p.seed).unwrap();
    match shor_factor(n, &mut rng, SHOR_ATTEMPTS)? {
        Some(f) => {
            let how = match f.method {
                FactorMethod::EvenScreen => "n is even".to_string(),
                FactorMethod::PerfectPower { root, exponent } => {
                    format!("n = {root}^{exponent}")
                }
                FactorMethod::LuckyGcd { a, attempt } => {
                    format!("attempt {attempt}: base {a} shares a factor with n")
                }
                FactorMethod::OrderFinding { a, order, attempt } => format!(
                    "attempt {attempt}: order of {a} mod {n} is {order}, gcd({a}^{} +/- 1, {n})",
                    order / 2
                ),
            };
            writeln!(out, "{how}").unwrap();
            writeln!(out, "factors: {} \u{d7} {}", f.p, f.q).unwrap();
        }
        None => writeln!(out, "no factor found in {SHOR_ATTEMPTS} attempts").unwrap(),
    }
    Ok(())
}
