//! Sparse state representation: a map from basis labels to amplitudes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rustc_hash::FxHashMap;

use crate::error::{QlabError, Result};

/// Amplitudes with magnitude below this are dropped after every kernel.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

/// Labels are packed into a `u64`, so registers are limited to 63 qubits.
pub const MAX_QUBITS: usize = 63;

/// Upper bound on stored amplitudes. Keeps a runaway circuit (e.g. 40
/// Hadamards) from exhausting memory; it fails with a capacity error instead.
pub const MAX_ENTRIES: usize = 1 << 24;

/// Largest register `to_dense` will expand.
pub const DENSE_QUBIT_LIMIT: usize = 20;

pub(crate) type AmplitudeMap = FxHashMap<u64, Complex64>;

/// An `n`-qubit pure state stored as `label -> amplitude`.
///
/// Labels are little-endian bitstrings: qubit 0 is the rightmost character.
/// Internally a label is held as its integer value. Absent labels have
/// amplitude zero. Operations never mutate `self`; they return new states.
#[derive(Clone, PartialEq)]
pub struct SparseState {
    num_qubits: usize,
    amps: AmplitudeMap,
}

/// Result of measuring a subset of qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// Measured bits, ordered by qubit index with the lowest index rightmost.
    pub bits: String,
    /// Collapsed and renormalized state.
    pub post_state: SparseState,
}

pub(crate) fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(QlabError::input("a register needs at least one qubit"));
    }
    if n > MAX_QUBITS {
        return Err(QlabError::Capacity {
            what: "qubit count",
            requested: n,
            limit: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Format the low `width` bits of `value` as a label, most significant first.
pub fn format_label(value: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|bit| if (value >> bit) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse a label of exactly `width` characters from `{0,1}`.
pub fn parse_label(label: &str, width: usize) -> Result<u64> {
    if label.len() != width {
        return Err(QlabError::input(format!(
            "label {label:?} has {} characters, expected {width}",
            label.len()
        )));
    }
    if width > 64 {
        return Err(QlabError::Capacity {
            what: "label width",
            requested: width,
            limit: 64,
        });
    }
    label.bytes().try_fold(0u64, |acc, b| match b {
        b'0' => Ok(acc << 1),
        b'1' => Ok((acc << 1) | 1),
        _ => Err(QlabError::input(format!(
            "label {label:?} contains a character other than 0 or 1"
        ))),
    })
}

/// Validate a list of distinct qubit indices against a register size.
pub(crate) fn check_qubit_list(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(QlabError::input(format!(
                "qubit index {q} out of range for {num_qubits} qubits"
            )));
        }
        if qubits[..i].contains(&q) {
            return Err(QlabError::input(format!("qubit index {q} repeated")));
        }
    }
    Ok(())
}

/// Gather the bits at `qubits` (ascending order) into a packed integer whose
/// bit `i` is the value of `qubits[i]`.
pub(crate) fn extract_bits(index: u64, qubits: &[usize]) -> u64 {
    qubits
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &q)| acc | (((index >> q) & 1) << i))
}

pub(crate) fn sorted_unique(qubits: &[usize], num_qubits: usize) -> Result<Vec<usize>> {
    if qubits.is_empty() {
        return Err(QlabError::input("measurement needs at least one qubit"));
    }
    check_qubit_list(qubits, num_qubits)?;
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    Ok(sorted)
}

/// Inverse-CDF sampler over a finite set of packed outcomes.
pub(crate) struct Sampler {
    keys: Vec<u64>,
    cumulative: Vec<f64>,
}

impl Sampler {
    /// `weights` need not be normalized; zero weights are dropped.
    pub(crate) fn new(weights: BTreeMap<u64, f64>) -> Self {
        let mut keys = Vec::with_capacity(weights.len());
        let mut cumulative = Vec::with_capacity(weights.len());
        let mut total = 0.0;
        for (k, w) in weights {
            if w > 0.0 {
                total += w;
                keys.push(k);
                cumulative.push(total);
            }
        }
        Sampler { keys, cumulative }
    }

    pub(crate) fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = rng.gen::<f64>() * self.total();
        let pos = self.cumulative.partition_point(|&c| c <= u);
        self.keys[pos.min(self.keys.len() - 1)]
    }
}

impl SparseState {
    /// The all-zeros state `|0…0⟩`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amps = AmplitudeMap::default();
        amps.insert(0, Complex64::new(1.0, 0.0));
        Ok(SparseState { num_qubits, amps })
    }

    /// Computational basis state for `label`, e.g. `basis_state(2, "10")`.
    pub fn basis_state(num_qubits: usize, label: &str) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let index = parse_label(label, num_qubits)?;
        Self::basis_index(num_qubits, index)
    }

    /// Computational basis state by integer value of the label.
    pub fn basis_index(num_qubits: usize, index: u64) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        if num_qubits < 64 && index >> num_qubits != 0 {
            return Err(QlabError::input(format!(
                "basis index {index} does not fit in {num_qubits} qubits"
            )));
        }
        let mut amps = AmplitudeMap::default();
        amps.insert(index, Complex64::new(1.0, 0.0));
        Ok(SparseState { num_qubits, amps })
    }

    /// Build a state from `(label, amplitude)` pairs. Repeated labels are
    /// summed. The result is pruned but not renormalized.
    pub fn from_labels<'a, I>(num_qubits: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Complex64)>,
    {
        check_qubit_count(num_qubits)?;
        let mut amps = AmplitudeMap::default();
        for (label, amp) in entries {
            let index = parse_label(label, num_qubits)?;
            *amps.entry(index).or_default() += amp;
        }
        Ok(Self::from_map(num_qubits, amps))
    }

    /// Build a state from a dense vector indexed by label value.
    pub fn from_dense(vector: &[Complex64]) -> Result<Self> {
        let len = vector.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QlabError::input(format!(
                "dense vector length {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > DENSE_QUBIT_LIMIT {
            return Err(QlabError::Capacity {
                what: "dense qubit count",
                requested: num_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let amps = vector
            .iter()
            .enumerate()
            .map(|(i, &a)| (i as u64, a))
            .collect();
        Ok(Self::from_map(num_qubits, amps))
    }

    pub(crate) fn from_map(num_qubits: usize, mut amps: AmplitudeMap) -> Self {
        amps.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
        SparseState { num_qubits, amps }
    }

    pub(crate) fn map(&self) -> &AmplitudeMap {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of stored (nonzero) amplitudes.
    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Amplitude of `label`; zero when absent.
    pub fn amplitude(&self, label: &str) -> Result<Complex64> {
        let index = parse_label(label, self.num_qubits)?;
        Ok(self.amplitude_at(index))
    }

    pub fn amplitude_at(&self, index: u64) -> Complex64 {
        self.amps.get(&index).copied().unwrap_or_default()
    }

    /// Stored entries as `(label value, amplitude)`, sorted by label.
    pub fn entries(&self) -> Vec<(u64, Complex64)> {
        let mut out: Vec<_> = self.amps.iter().map(|(&k, &v)| (k, v)).collect();
        out.sort_unstable_by_key(|&(k, _)| k);
        out
    }

    /// Stored entries keyed by label string.
    pub fn labeled(&self) -> BTreeMap<String, Complex64> {
        self.amps
            .iter()
            .map(|(&k, &v)| (format_label(k, self.num_qubits), v))
            .collect()
    }

    /// `Σ |amplitude|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.entries().iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// Rescale to unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm < PRUNE_THRESHOLD {
            return Err(QlabError::input("cannot normalize a zero state"));
        }
        let amps = self.amps.iter().map(|(&k, &a)| (k, a / norm)).collect();
        Ok(Self::from_map(self.num_qubits, amps))
    }

    /// Multiply every amplitude by `e^{i·theta}`.
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let phase = Complex64::from_polar(1.0, theta);
        let amps = self.amps.iter().map(|(&k, &a)| (k, a * phase)).collect();
        Self::from_map(self.num_qubits, amps)
    }

    /// Born-rule probabilities of every stored label.
    pub fn probabilities(&self) -> BTreeMap<String, f64> {
        self.amps
            .iter()
            .map(|(&k, a)| (format_label(k, self.num_qubits), a.norm_sqr()))
            .collect()
    }

    /// Marginal probabilities of the packed outcomes on `qubits`.
    ///
    /// `qubits` must be sorted ascending; see [`extract_bits`].
    pub(crate) fn marginal(&self, qubits: &[usize]) -> BTreeMap<u64, f64> {
        let mut out = BTreeMap::new();
        for (k, a) in self.entries() {
            *out.entry(extract_bits(k, qubits)).or_insert(0.0) += a.norm_sqr();
        }
        out
    }

    /// Marginal distribution over the bits of `qubits`, keyed by the
    /// measured-bit label (lowest qubit index rightmost).
    pub fn marginal_probabilities(&self, qubits: &[usize]) -> Result<BTreeMap<String, f64>> {
        let sorted = sorted_unique(qubits, self.num_qubits)?;
        Ok(self
            .marginal(&sorted)
            .into_iter()
            .map(|(k, p)| (format_label(k, sorted.len()), p))
            .collect())
    }

    /// `⟨self|other⟩ = Σ conj(self[k])·other[k]`.
    pub fn inner_product(&self, other: &SparseState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(QlabError::input(format!(
                "inner product of {}-qubit and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        // Only the intersection of supports contributes.
        Ok(self
            .entries()
            .into_iter()
            .filter_map(|(k, a)| other.amps.get(&k).map(|b| a.conj() * b))
            .sum())
    }

    /// Tensor product `self ⊗ low`: the qubits of `low` become indices
    /// `0..low.num_qubits()` and those of `self` sit above them.
    pub fn tensor(&self, low: &SparseState) -> Result<Self> {
        let n = self.num_qubits + low.num_qubits;
        check_qubit_count(n)?;
        let count = self.amps.len().saturating_mul(low.amps.len());
        if count > MAX_ENTRIES {
            return Err(QlabError::Capacity {
                what: "stored amplitudes",
                requested: count,
                limit: MAX_ENTRIES,
            });
        }
        let shift = low.num_qubits;
        let mut amps = AmplitudeMap::default();
        amps.reserve(count);
        for (&hi, &a) in &self.amps {
            for (&lo, &b) in &low.amps {
                amps.insert((hi << shift) | lo, a * b);
            }
        }
        Ok(Self::from_map(n, amps))
    }

    /// Dense vector of length `2ⁿ` indexed by label value.
    pub fn to_dense(&self) -> Result<Vec<Complex64>> {
        if self.num_qubits > DENSE_QUBIT_LIMIT {
            return Err(QlabError::Capacity {
                what: "dense qubit count",
                requested: self.num_qubits,
                limit: DENSE_QUBIT_LIMIT,
            });
        }
        let mut out = vec![Complex64::default(); 1 << self.num_qubits];
        for (&k, &a) in &self.amps {
            out[k as usize] = a;
        }
        Ok(out)
    }

    /// Measure `qubits`, drawing one outcome from the Born marginal and
    /// collapsing onto it.
    pub fn measure<R: Rng + ?Sized>(&self, qubits: &[usize], rng: &mut R) -> Result<Outcome> {
        let sorted = sorted_unique(qubits, self.num_qubits)?;
        let sampler = Sampler::new(self.marginal(&sorted));
        if sampler.total() <= 0.0 {
            return Err(QlabError::input("cannot measure a zero state"));
        }
        let outcome = sampler.draw(rng);
        let kept: AmplitudeMap = self
            .amps
            .iter()
            .filter(|(&k, _)| extract_bits(k, &sorted) == outcome)
            .map(|(&k, &a)| (k, a))
            .collect();
        let post_state = Self::from_map(self.num_qubits, kept).normalized()?;
        Ok(Outcome {
            bits: format_label(outcome, sorted.len()),
            post_state,
        })
    }

    /// Sample `shots` full-register measurements without collapsing `self`.
    pub fn sample_counts<R: Rng + ?Sized>(
        &self,
        shots: u64,
        rng: &mut R,
    ) -> Result<BTreeMap<String, u64>> {
        let all: Vec<usize> = (0..self.num_qubits).collect();
        self.sample_marginal_counts(&all, shots, rng)
    }

    /// Sample `shots` measurements of `qubits`; keys are measured-bit labels.
    pub fn sample_marginal_counts<R: Rng + ?Sized>(
        &self,
        qubits: &[usize],
        shots: u64,
        rng: &mut R,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(QlabError::input("shots must be at least 1"));
        }
        let sorted = sorted_unique(qubits, self.num_qubits)?;
        let sampler = Sampler::new(self.marginal(&sorted));
        if sampler.total() <= 0.0 {
            return Err(QlabError::input("cannot sample a zero state"));
        }
        let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
        for _ in 0..shots {
            *tally.entry(sampler.draw(rng)).or_insert(0) += 1;
        }
        Ok(tally
            .into_iter()
            .map(|(k, c)| (format_label(k, sorted.len()), c))
            .collect())
    }
}

impl fmt::Debug for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SparseState")
            .field("num_qubits", &self.num_qubits)
            .field("amplitudes", &self.labeled())
            .finish()
    }
}

impl fmt::Display for SparseState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, a) in self.entries() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(
                f,
                "({:.6}{:+.6}i)|{}⟩",
                a.re,
                a.im,
                format_label(k, self.num_qubits)
            )?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> SparseState {
        SparseState::from_labels(
            2,
            [("00", c(FRAC_1_SQRT_2, 0.0)), ("11", c(FRAC_1_SQRT_2, 0.0))],
        )
        .unwrap()
    }

    #[test]
    fn basis_states() {
        let s = SparseState::basis_state(1, "0").unwrap();
        assert_eq!(
            s.labeled(),
            BTreeMap::from([("0".to_string(), c(1.0, 0.0))])
        );
        let s = SparseState::basis_state(2, "10").unwrap();
        assert_eq!(
            s.labeled(),
            BTreeMap::from([("10".to_string(), c(1.0, 0.0))])
        );
        assert_eq!(s.amplitude_at(2), c(1.0, 0.0));
        assert!(matches!(
            SparseState::basis_state(3, "1011"),
            Err(QlabError::InvalidInput(_))
        ));
        assert!(SparseState::basis_state(2, "1a").is_err());
        assert!(SparseState::basis_state(0, "").is_err());
    }

    #[test]
    fn probabilities_are_squared_magnitudes() {
        let s = SparseState::from_labels(1, [("0", c(0.6, 0.0)), ("1", c(0.0, 0.8))]).unwrap();
        let p = s.probabilities();
        assert!((p["0"] - 0.36).abs() < 1e-12);
        assert!((p["1"] - 0.64).abs() < 1e-12);
        let p = SparseState::basis_state(2, "00").unwrap().probabilities();
        assert_eq!(p["00"], 1.0);
    }

    #[test]
    fn inner_products() {
        let zero = SparseState::basis_state(1, "0").unwrap();
        let one = SparseState::basis_state(1, "1").unwrap();
        let plus = SparseState::from_labels(
            1,
            [("0", c(FRAC_1_SQRT_2, 0.0)), ("1", c(FRAC_1_SQRT_2, 0.0))],
        )
        .unwrap();
        assert_eq!(zero.inner_product(&zero).unwrap(), c(1.0, 0.0));
        assert_eq!(zero.inner_product(&one).unwrap(), c(0.0, 0.0));
        assert!((plus.inner_product(&one).unwrap() - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(zero.inner_product(&bell()).is_err());
    }

    #[test]
    fn tensor_puts_right_operand_low() {
        let zero = SparseState::basis_state(1, "0").unwrap();
        let one = SparseState::basis_state(1, "1").unwrap();
        let t = zero.tensor(&one).unwrap();
        assert_eq!(t.labeled().keys().collect::<Vec<_>>(), ["01"]);

        let plus = SparseState::from_labels(
            1,
            [("0", c(FRAC_1_SQRT_2, 0.0)), ("1", c(FRAC_1_SQRT_2, 0.0))],
        )
        .unwrap();
        let t = plus.tensor(&zero).unwrap();
        assert_eq!(t.labeled().keys().collect::<Vec<_>>(), ["00", "10"]);
        assert_eq!(plus.tensor(&plus).unwrap().len(), 4);
    }

    #[test]
    fn dense_conversion() {
        let one = SparseState::basis_state(1, "1").unwrap();
        assert_eq!(one.to_dense().unwrap(), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let d = bell().to_dense().unwrap();
        assert!((d[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((d[3].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(d[1], c(0.0, 0.0));
        let big = SparseState::zero(21).unwrap();
        assert!(matches!(big.to_dense(), Err(QlabError::Capacity { .. })));
        assert!(SparseState::from_dense(&[c(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn deterministic_measurement() {
        let s = SparseState::basis_state(1, "1").unwrap();
        let out = s.measure(&[0], &mut seeded_rng(1)).unwrap();
        assert_eq!(out.bits, "1");
        assert_eq!(out.post_state, s);
        assert!(s.measure(&[], &mut seeded_rng(1)).is_err());
        assert!(s.measure(&[1], &mut seeded_rng(1)).is_err());
    }

    #[test]
    fn bell_collapse_is_correlated() {
        let mut rng = seeded_rng(9);
        for _ in 0..200 {
            let out = bell().measure(&[0], &mut rng).unwrap();
            let labels: Vec<_> = out.post_state.labeled().into_keys().collect();
            match out.bits.as_str() {
                "0" => assert_eq!(labels, ["00"]),
                "1" => assert_eq!(labels, ["11"]),
                other => panic!("unexpected bits {other}"),
            }
        }
    }

    #[test]
    fn marginal_measurement_frequency() {
        let s = SparseState::from_labels(
            2,
            [
                ("00", c(0.36f64.sqrt(), 0.0)),
                ("10", c(0.64f64.sqrt(), 0.0)),
            ],
        )
        .unwrap();
        let mut rng = seeded_rng(2024);
        let trials = 10_000;
        let ones = (0..trials)
            .filter(|_| s.measure(&[1], &mut rng).unwrap().bits == "1")
            .count();
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.64).abs() <= 0.01, "freq {freq}");
    }

    #[test]
    fn sample_counts_contracts() {
        let s = SparseState::basis_state(2, "00").unwrap();
        let counts = s.sample_counts(5, &mut seeded_rng(0)).unwrap();
        assert_eq!(counts, BTreeMap::from([("00".to_string(), 5)]));
        assert!(s.sample_counts(0, &mut seeded_rng(0)).is_err());

        let counts = bell().sample_counts(1000, &mut seeded_rng(3)).unwrap();
        assert!(counts.keys().all(|k| k == "00" || k == "11"));
        assert_eq!(counts.values().sum::<u64>(), 1000);

        let plus = SparseState::from_labels(
            1,
            [("0", c(FRAC_1_SQRT_2, 0.0)), ("1", c(FRAC_1_SQRT_2, 0.0))],
        )
        .unwrap();
        let counts = plus.sample_counts(100_000, &mut seeded_rng(42)).unwrap();
        let frac = counts["1"] as f64 / 1e5;
        assert!((frac - 0.5).abs() <= 0.005, "frac {frac}");
        assert_eq!(
            counts,
            plus.sample_counts(100_000, &mut seeded_rng(42)).unwrap()
        );
    }

    #[test]
    fn labels_round_trip() {
        assert_eq!(format_label(0b101, 4), "0101");
        assert_eq!(parse_label("0101", 4).unwrap(), 5);
        assert_eq!(extract_bits(0b1010, &[1, 3]), 0b11);
        assert_eq!(extract_bits(0b1010, &[0, 2]), 0);
    }
}
