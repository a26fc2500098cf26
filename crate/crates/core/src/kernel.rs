//! Sparse gate and permutation kernels.
//!
//! Both scatter each stored amplitude into a fresh map, so work is
//! proportional to the number of stored entries rather than to `2ⁿ`.

use num_complex::Complex64;

use crate::error::{QlabError, Result};
use crate::gate::Gate;
use crate::state::{extract_bits, AmplitudeMap, SparseState, MAX_ENTRIES};

fn controls_mask(gate: &Gate) -> u64 {
    gate.controls().iter().fold(0, |m, &q| m | (1 << q))
}

fn check_entries(count: usize) -> Result<()> {
    if count > MAX_ENTRIES {
        return Err(QlabError::Capacity {
            what: "stored amplitudes",
            requested: count,
            limit: MAX_ENTRIES,
        });
    }
    Ok(())
}

impl SparseState {
    /// Apply `gate`, returning the new (pruned) state.
    pub fn apply_gate(&self, gate: &Gate) -> Result<SparseState> {
        gate.check_bounds(self.num_qubits())?;
        let mask = controls_mask(gate);
        let old = self.map();
        let mut out = AmplitudeMap::default();

        match gate.matrix2() {
            Some(m) => {
                let bit = 1u64 << gate.targets()[0];
                // Branching gates can at most double the support.
                if m[0][1] != Complex64::default() || m[1][0] != Complex64::default() {
                    check_entries(old.len().saturating_mul(2))?;
                }
                out.reserve(old.len());
                for (&k, &a) in old {
                    if k & mask != mask {
                        *out.entry(k).or_default() += a;
                        continue;
                    }
                    let col = ((k & bit) != 0) as usize;
                    let base = k & !bit;
                    for (row, target) in [(0, base), (1, base | bit)] {
                        let coeff = m[row][col];
                        if coeff != Complex64::default() {
                            *out.entry(target).or_default() += coeff * a;
                        }
                    }
                }
            }
            None => {
                let (a, b) = (gate.targets()[0], gate.targets()[1]);
                out.reserve(old.len());
                for (&k, &amp) in old {
                    let (ba, bb) = ((k >> a) & 1, (k >> b) & 1);
                    let swapped = if k & mask == mask && ba != bb {
                        k ^ ((1 << a) | (1 << b))
                    } else {
                        k
                    };
                    out.insert(swapped, amp);
                }
            }
        }
        Ok(SparseState::from_map(self.num_qubits(), out))
    }

    /// Relabel the basis states of `register`: the register value `v` goes to
    /// `map[v]` and picks up `phases[v]` when given. `register[i]` holds bit
    /// `i` of the register value. Callers validate `map` as a bijection.
    pub(crate) fn apply_relabel(
        &self,
        register: &[usize],
        map: &[u64],
        phases: Option<&[Complex64]>,
    ) -> SparseState {
        let reg_mask = register.iter().fold(0u64, |m, &q| m | (1 << q));
        let mut out = AmplitudeMap::default();
        out.reserve(self.len());
        for (&k, &a) in self.map() {
            let value = extract_bits(k, register) as usize;
            let image = map[value];
            let scattered = register
                .iter()
                .enumerate()
                .fold(k & !reg_mask, |acc, (i, &q)| {
                    acc | (((image >> i) & 1) << q)
                });
            let amp = match phases {
                Some(p) => a * p[value],
                None => a,
            };
            out.insert(scattered, amp);
        }
        SparseState::from_map(self.num_qubits(), out)
    }
}
