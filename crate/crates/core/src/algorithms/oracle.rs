use std::collections::BTreeMap;

use crate::circuit::MAX_PERMUTATION_QUBITS;
use crate::error::{QlabError, Result};
use crate::state::{format_label, parse_label};

/// A Boolean function on `num_inputs` bits, stored as its truth table.
///
/// Deutsch-Jozsa reads it as `f`; Grover reads the inputs with `f(x) = 1`
/// as the marked set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSpec {
    num_inputs: usize,
    truth_table: Vec<bool>,
}

impl OracleSpec {
    /// `truth_table[x]` is `f(x)` for the integer value `x` of the input label.
    pub fn from_truth_table(num_inputs: usize, truth_table: Vec<bool>) -> Result<Self> {
        if num_inputs == 0 {
            return Err(QlabError::input("an oracle needs at least one input bit"));
        }
        // one extra qubit is needed for the Deutsch-Jozsa ancilla
        if num_inputs >= MAX_PERMUTATION_QUBITS {
            return Err(QlabError::Capacity {
                what: "oracle input width",
                requested: num_inputs,
                limit: MAX_PERMUTATION_QUBITS - 1,
            });
        }
        if truth_table.len() != 1 << num_inputs {
            return Err(QlabError::input(format!(
                "truth table for {num_inputs} inputs needs {} entries, got {}",
                1u64 << num_inputs,
                truth_table.len()
            )));
        }
        Ok(OracleSpec {
            num_inputs,
            truth_table,
        })
    }

    pub fn from_fn(num_inputs: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        if num_inputs >= MAX_PERMUTATION_QUBITS {
            return Self::from_truth_table(num_inputs, Vec::new());
        }
        Self::from_truth_table(num_inputs, (0..1u64 << num_inputs).map(f).collect())
    }

    /// Truth table given as `label -> 0/1`; every input label must appear.
    pub fn from_labels(num_inputs: usize, table: &BTreeMap<String, u8>) -> Result<Self> {
        if num_inputs == 0 || num_inputs >= MAX_PERMUTATION_QUBITS {
            return Self::from_truth_table(num_inputs, Vec::new());
        }
        let mut bits = vec![None; 1 << num_inputs];
        for (label, &v) in table {
            let x = parse_label(label, num_inputs)?;
            if v > 1 {
                return Err(QlabError::input(format!("f({label}) = {v} is not 0 or 1")));
            }
            bits[x as usize] = Some(v == 1);
        }
        let table = bits
            .into_iter()
            .enumerate()
            .map(|(x, b)| {
                b.ok_or_else(|| {
                    QlabError::input(format!(
                        "truth table misses input {}",
                        format_label(x as u64, num_inputs)
                    ))
                })
            })
            .collect::<Result<_>>()?;
        Self::from_truth_table(num_inputs, table)
    }

    /// Grover oracle marking the given labels.
    pub fn marked<S: AsRef<str>>(num_inputs: usize, labels: &[S]) -> Result<Self> {
        let mut spec = Self::from_fn(num_inputs, |_| false)?;
        for label in labels {
            let x = parse_label(label.as_ref(), num_inputs)?;
            spec.truth_table[x as usize] = true;
        }
        Ok(spec)
    }

    pub fn constant(num_inputs: usize, value: bool) -> Result<Self> {
        Self::from_fn(num_inputs, |_| value)
    }

    pub fn num_inputs(&self) -> usize {
        self.num_inputs
    }

    pub fn domain_size(&self) -> u64 {
        1 << self.num_inputs
    }

    pub fn eval(&self, x: u64) -> bool {
        self.truth_table[x as usize]
    }

    pub fn truth_table(&self) -> &[bool] {
        &self.truth_table
    }

    pub fn ones(&self) -> u64 {
        self.truth_table.iter().filter(|&&b| b).count() as u64
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.ones();
        ones == 0 || ones == self.domain_size()
    }

    pub fn is_balanced(&self) -> bool {
        2 * self.ones() == self.domain_size()
    }

    /// Marked inputs as integer label values, ascending.
    pub fn marked_values(&self) -> Vec<u64> {
        (0..self.domain_size()).filter(|&x| self.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors() {
        let o = OracleSpec::from_fn(3, |x| x & 1 == 1).unwrap();
        assert!(o.is_balanced() && !o.is_constant());
        assert!(OracleSpec::constant(3, true).unwrap().is_constant());
        let m = OracleSpec::marked(3, &["101"]).unwrap();
        assert_eq!(m.marked_values(), [5]);
        assert!(OracleSpec::marked(3, &["10"]).is_err());
        assert!(OracleSpec::from_truth_table(2, vec![true; 3]).is_err());
        assert!(OracleSpec::from_truth_table(0, vec![true]).is_err());

        let table: BTreeMap<String, u8> = [("0", 1u8), ("1", 0u8)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        assert_eq!(
            OracleSpec::from_labels(1, &table).unwrap().marked_values(),
            [0]
        );
        let partial = BTreeMap::from([("0".to_string(), 1u8)]);
        assert!(OracleSpec::from_labels(1, &partial).is_err());
    }
}
