//! Automated lab assessment.
//!
//! Three grading modes, each producing a [`GradeReport`]:
//!
//! - state: `|⟨reference|submitted⟩| ≥ 1 − tol`, blind to global phase,
//! - distribution: total variation distance between observed frequencies
//!   and expected probabilities `≤ tol`,
//! - classifier: exact match against a declared label set.
//!
//! Malformed input never panics; it yields an `INVALID` verdict.

mod labs;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::circuit::{counts_width, Counts};
use crate::error::{QlabError, Result};
use crate::state::{format_label, parse_label, Sampler, SparseState};

pub use labs::{
    builtin_labs, find_lab, load_labs_from_dir, run_lab, run_lab_bytes, LabMode, LabReference,
    LabSpec, DEFAULT_SHOTS, DEFAULT_STATE_TOLERANCE, DEFAULT_TVD_TOLERANCE,
};

/// Tolerance on the total of an expected probability map.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Widest register readout mitigation will expand densely.
pub const MAX_MITIGATION_BITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Invalid,
}

impl Verdict {
    /// Process exit code: 0 pass, 1 fail, 2 invalid.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Invalid => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Invalid => "INVALID",
        })
    }
}

/// Outcome of grading one submission. `statistic` is NaN (serialized as
/// `null`) for invalid submissions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradeReport {
    pub lab_id: String,
    pub verdict: Verdict,
    pub statistic: f64,
    pub threshold: f64,
    pub detail: String,
}

impl GradeReport {
    pub fn invalid(detail: impl Into<String>) -> Self {
        GradeReport {
            lab_id: String::new(),
            verdict: Verdict::Invalid,
            statistic: f64::NAN,
            threshold: f64::NAN,
            detail: detail.into(),
        }
    }

    pub fn with_lab_id(mut self, id: impl Into<String>) -> Self {
        self.lab_id = id.into();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialize")
    }
}

fn check_tolerance(tol: f64) -> Option<GradeReport> {
    (!(tol > 0.0 && tol.is_finite()))
        .then(|| GradeReport::invalid(format!("tolerance {tol} must be positive")))
}

/// Fidelity-style comparison of two pure states, insensitive to global phase.
pub fn grade_state(submitted: &SparseState, reference: &SparseState, tol: f64) -> GradeReport {
    if let Some(r) = check_tolerance(tol) {
        return r;
    }
    let overlap = match reference.inner_product(submitted) {
        Ok(o) => o.norm().min(1.0),
        Err(e) => return GradeReport::invalid(e.to_string()),
    };
    let threshold = 1.0 - tol;
    let verdict = if overlap >= threshold {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    GradeReport {
        lab_id: String::new(),
        verdict,
        statistic: overlap,
        threshold,
        detail: format!("|<reference|submitted>| = {overlap:.9}, required >= {threshold:.9}"),
    }
}

/// `½ Σ |p(x) − q(x)|` over the union of supports.
pub fn total_variation_distance(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> f64 {
    let keys: BTreeSet<&String> = p.keys().chain(q.keys()).collect();
    keys.into_iter()
        .map(|k| (p.get(k).unwrap_or(&0.0) - q.get(k).unwrap_or(&0.0)).abs())
        .sum::<f64>()
        / 2.0
}

/// Check that `expected` is a probability map over equal-width labels.
pub fn validate_distribution(expected: &BTreeMap<String, f64>) -> Result<Option<usize>> {
    let as_counts: BTreeMap<String, u64> = expected.keys().map(|k| (k.clone(), 0)).collect();
    let width = counts_width(&as_counts)?;
    if width == Some(0) {
        return Err(QlabError::input("empty outcome label"));
    }
    if let Some((k, p)) = expected
        .iter()
        .find(|(_, p)| !(**p >= 0.0 && p.is_finite()))
    {
        return Err(QlabError::input(format!("probability of {k} is {p}")));
    }
    let total: f64 = expected.values().sum();
    if (total - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(QlabError::input(format!(
            "expected probabilities sum to {total}, not 1"
        )));
    }
    Ok(width)
}

/// Compare observed counts with expected probabilities by total variation
/// distance. Submissions with fewer than `shots_required` shots are invalid.
pub fn grade_distribution(
    observed: &Counts,
    expected: &BTreeMap<String, f64>,
    tol_tvd: f64,
    shots_required: u64,
) -> GradeReport {
    if let Some(r) = check_tolerance(tol_tvd) {
        return r;
    }
    let expected_width = match validate_distribution(expected) {
        Ok(w) => w,
        Err(e) => return GradeReport::invalid(format!("reference distribution: {e}")),
    };
    if observed.shots == 0 || observed.shots < shots_required {
        return GradeReport::invalid(format!(
            "{} shots submitted, at least {} required",
            observed.shots,
            shots_required.max(1)
        ));
    }
    let observed_width = match counts_width(&observed.counts) {
        Ok(w) => w,
        Err(e) => return GradeReport::invalid(e.to_string()),
    };
    if observed_width != expected_width {
        return GradeReport::invalid(format!(
            "outcome width {} does not match the lab's {}",
            observed_width.unwrap_or(0),
            expected_width.unwrap_or(0)
        ));
    }
    let freqs = observed.frequencies();
    let tvd = total_variation_distance(&freqs, expected);
    let keys: BTreeSet<&String> = freqs.keys().chain(expected.keys()).collect();
    let residuals: Vec<String> = keys
        .into_iter()
        .map(|k| {
            let r = freqs.get(k).unwrap_or(&0.0) - expected.get(k).unwrap_or(&0.0);
            format!("{k}:{r:+.4}")
        })
        .collect();
    let verdict = if tvd <= tol_tvd {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    GradeReport {
        lab_id: String::new(),
        verdict,
        statistic: tvd,
        threshold: tol_tvd,
        detail: format!(
            "TVD = {tvd:.6} over {} shots, allowed <= {tol_tvd}; residuals {}",
            observed.shots,
            residuals.join(" ")
        ),
    }
}

/// Exact label match; labels outside `labels` are invalid.
pub fn grade_classifier<S: AsRef<str>>(
    submitted: &str,
    expected: &str,
    labels: &[S],
) -> GradeReport {
    let known = |l: &str| labels.iter().any(|x| x.as_ref() == l);
    if !known(expected) {
        return GradeReport::invalid(format!("lab label {expected:?} is not in its label set"));
    }
    if !known(submitted) {
        let list: Vec<&str> = labels.iter().map(AsRef::as_ref).collect();
        return GradeReport::invalid(format!(
            "label {submitted:?} is not one of {}",
            list.join(", ")
        ));
    }
    let matched = submitted == expected;
    GradeReport {
        lab_id: String::new(),
        verdict: if matched {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        statistic: if matched { 1.0 } else { 0.0 },
        threshold: 1.0,
        detail: format!("submitted {submitted}, expected {expected}"),
    }
}

/// Undo independent per-bit readout flips of probability `flip_prob`.
///
/// Applies the inverse of `[[1−p, p], [p, 1−p]]` to every bit, clips
/// negative entries to zero and renormalizes. The result covers all `2^m`
/// labels of the counts' width `m`.
pub fn readout_mitigate(counts: &Counts, flip_prob: f64) -> Result<BTreeMap<String, f64>> {
    if !(0.0..0.5).contains(&flip_prob) {
        return Err(QlabError::input(format!(
            "flip probability {flip_prob} must lie in [0, 0.5)"
        )));
    }
    if counts.shots == 0 {
        return Err(QlabError::input("cannot mitigate empty counts"));
    }
    let width =
        counts_width(&counts.counts)?.ok_or_else(|| QlabError::input("counts have no outcomes"))?;
    if width > MAX_MITIGATION_BITS {
        return Err(QlabError::Capacity {
            what: "mitigation width",
            requested: width,
            limit: MAX_MITIGATION_BITS,
        });
    }
    let mut freq = vec![0.0; 1 << width];
    for (label, &c) in &counts.counts {
        freq[parse_label(label, width)? as usize] = c as f64 / counts.shots as f64;
    }
    let p = flip_prob;
    let scale = 1.0 / (1.0 - 2.0 * p);
    for bit in 0..width {
        let mask = 1usize << bit;
        for i in (0..freq.len()).filter(|i| i & mask == 0) {
            let (x0, x1) = (freq[i], freq[i | mask]);
            freq[i] = ((1.0 - p) * x0 - p * x1) * scale;
            freq[i | mask] = ((1.0 - p) * x1 - p * x0) * scale;
        }
    }
    freq.iter_mut().for_each(|x| *x = x.max(0.0));
    let total: f64 = freq.iter().sum();
    Ok(freq
        .into_iter()
        .enumerate()
        .map(|(i, x)| (format_label(i as u64, width), x / total))
        .collect())
}

/// Draw `shots` outcomes from a probability map, as a correct submission
/// would produce.
pub fn sample_distribution<R: Rng + ?Sized>(
    expected: &BTreeMap<String, f64>,
    shots: u64,
    rng: &mut R,
) -> Result<Counts> {
    validate_distribution(expected)?;
    if shots == 0 {
        return Err(QlabError::input("shots must be at least 1"));
    }
    let labels: Vec<&String> = expected.keys().collect();
    let sampler = Sampler::new(
        expected
            .values()
            .enumerate()
            .map(|(i, &p)| (i as u64, p))
            .collect(),
    );
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        *counts
            .entry(labels[sampler.draw(rng) as usize].clone())
            .or_insert(0) += 1;
    }
    Ok(Counts::from_map(counts))
}

#[cfg(test)]
mod tests;
