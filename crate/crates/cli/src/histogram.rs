//! Text histograms.

use std::fmt::Write;

use qlab_core::Counts;

pub const BAR_WIDTH: usize = 50;

/// One line per observed outcome, sorted by label, bars scaled to the
/// largest count.
pub fn render(counts: &Counts) -> String {
    let max = counts.counts.values().copied().max().unwrap_or(0);
    let label_width = counts.width().unwrap_or(0).max(5);
    let count_width = max.to_string().len();
    let mut out = String::new();
    writeln!(out, "{:<label_width$}  {} shots", "state", counts.shots).unwrap();
    for (label, &c) in &counts.counts {
        let len = if max == 0 {
            0
        } else {
            ((c as f64 / max as f64) * BAR_WIDTH as f64).round() as usize
        };
        writeln!(
            out,
            "{label:<label_width$}  {:<BAR_WIDTH$}  {c:>count_width$}  {:.4}",
            "#".repeat(len.max(usize::from(c > 0))),
            c as f64 / counts.shots as f64,
        )
        .unwrap();
    }
    out
}

/// Probability table for exact distributions, one line per label.
pub fn render_probabilities<'a>(probs: impl IntoIterator<Item = (&'a String, &'a f64)>) -> String {
    let rows: Vec<(&String, f64)> = probs.into_iter().map(|(k, v)| (k, *v)).collect();
    let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let label_width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    for (label, p) in rows {
        let len = if max > 0.0 {
            (p / max * BAR_WIDTH as f64).round() as usize
        } else {
            0
        };
        writeln!(
            out,
            "{label:<label_width$}  {:<BAR_WIDTH$}  {p:.6}",
            "#".repeat(len)
        )
        .unwrap();
    }
    out
}
