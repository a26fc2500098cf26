use std::fmt;
use std::str::FromStr;

use super::OracleSpec;
use crate::circuit::{Circuit, Counts, PermutationOp};
use crate::error::{QlabError, Result};
use crate::gate::Gate;
use crate::state::SparseState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DjVerdict {
    Constant,
    Balanced,
}

impl DjVerdict {
    pub fn label(self) -> &'static str {
        match self {
            DjVerdict::Constant => "CONSTANT",
            DjVerdict::Balanced => "BALANCED",
        }
    }
}

impl fmt::Display for DjVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for DjVerdict {
    type Err = QlabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "CONSTANT" => Ok(DjVerdict::Constant),
            "BALANCED" => Ok(DjVerdict::Balanced),
            other => Err(QlabError::input(format!("unknown verdict {other:?}"))),
        }
    }
}

/// Deutsch-Jozsa on `n` input qubits (`0..n`) plus ancilla qubit `n`.
///
/// The oracle `|x, y⟩ → |x, y ⊕ f(x)⟩` is a single permutation over all
/// `n + 1` qubits. Only the input register is measured.
pub fn dj_circuit(oracle: &OracleSpec) -> Result<Circuit> {
    if !oracle.is_constant() && !oracle.is_balanced() {
        return Err(QlabError::input(format!(
            "oracle has {} ones out of {}; it is neither constant nor balanced",
            oracle.ones(),
            oracle.domain_size()
        )));
    }
    let n = oracle.num_inputs();
    let input_mask = oracle.domain_size() - 1;
    let register: Vec<usize> = (0..=n).collect();
    let perm = PermutationOp::from_fn("dj_oracle", register, |v| {
        v ^ ((oracle.eval(v & input_mask) as u64) << n)
    })?;

    let mut c = Circuit::new(n + 1)?;
    c.append(Gate::x(n))?;
    c.extend((0..=n).map(Gate::h))?;
    c.append(perm)?;
    c.extend((0..n).map(Gate::h))?;
    c.measure(&(0..n).collect::<Vec<_>>())?;
    Ok(c)
}

/// CONSTANT iff every shot read all zeros on the input register.
pub fn dj_classify(counts: &Counts) -> Result<DjVerdict> {
    if counts.shots == 0 {
        return Err(QlabError::input("cannot classify an empty sample"));
    }
    let width = counts
        .width()
        .ok_or_else(|| QlabError::input("counts have no outcomes"))?;
    let zeros = "0".repeat(width);
    Ok(if counts.get(&zeros) == counts.shots {
        DjVerdict::Constant
    } else {
        DjVerdict::Balanced
    })
}

/// Exact-mode classification. Returns the verdict and the probability of
/// reading all zeros on the `num_inputs` low qubits.
pub fn dj_classify_state(state: &SparseState, num_inputs: usize) -> Result<(DjVerdict, f64)> {
    let inputs: Vec<usize> = (0..num_inputs).collect();
    let marginal = state.marginal_probabilities(&inputs)?;
    let p_zero = marginal
        .get(&"0".repeat(num_inputs))
        .copied()
        .unwrap_or(0.0);
    let verdict = if p_zero > 0.5 {
        DjVerdict::Constant
    } else {
        DjVerdict::Balanced
    };
    Ok((verdict, p_zero))
}
