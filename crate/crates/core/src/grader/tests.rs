use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;

use super::*;
use crate::seeded_rng;

fn bell(plus: bool) -> SparseState {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let labels = if plus { ["00", "11"] } else { ["01", "10"] };
    SparseState::from_labels(2, labels.iter().map(|l| (*l, a))).unwrap()
}

fn counts(pairs: &[(&str, u64)]) -> Counts {
    Counts::from_map(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
}

fn probs(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn half_half() -> BTreeMap<String, f64> {
    probs(&[("00", 0.5), ("11", 0.5)])
}

#[test]
fn state_grading_ignores_global_phase() {
    let r = grade_state(&bell(true), &bell(true), 1e-6);
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.statistic - 1.0).abs() < 1e-12);

    let rotated = bell(true).with_global_phase(PI / 7.0);
    assert_eq!(
        grade_state(&rotated, &bell(true), 1e-6).verdict,
        Verdict::Pass
    );

    let r = grade_state(&bell(false), &bell(true), 1e-6);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.statistic.abs() < 1e-12);
}

#[test]
fn state_grading_rejects_width_mismatch() {
    let one = SparseState::zero(1).unwrap();
    assert_eq!(
        grade_state(&one, &bell(true), 1e-6).verdict,
        Verdict::Invalid
    );
    assert_eq!(
        grade_state(&bell(true), &bell(true), 0.0).verdict,
        Verdict::Invalid
    );
}

#[test]
fn distribution_examples() {
    let r = grade_distribution(
        &counts(&[("00", 490), ("11", 510)]),
        &half_half(),
        0.05,
        1000,
    );
    assert_eq!(r.verdict, Verdict::Pass);
    assert!((r.statistic - 0.01).abs() < 1e-12);

    let r = grade_distribution(&counts(&[("01", 1000)]), &half_half(), 0.05, 1000);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.statistic - 1.0).abs() < 1e-12);
}

#[test]
fn distribution_invalid_inputs() {
    let few = counts(&[("00", 5), ("11", 5)]);
    assert_eq!(
        grade_distribution(&few, &half_half(), 0.05, 1000).verdict,
        Verdict::Invalid
    );
    let wide = counts(&[("000", 1000)]);
    assert_eq!(
        grade_distribution(&wide, &half_half(), 0.05, 1000).verdict,
        Verdict::Invalid
    );
    let bad_ref = probs(&[("00", 0.7), ("11", 0.5)]);
    let ok = counts(&[("00", 500), ("11", 500)]);
    assert_eq!(
        grade_distribution(&ok, &bad_ref, 0.05, 1000).verdict,
        Verdict::Invalid
    );
}

#[test]
fn tvd_is_symmetric_and_bounded() {
    let mut rng = seeded_rng(3);
    for _ in 0..200 {
        let mut draw = || {
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = w.iter().sum();
            let labels = ["00", "01", "10", "11"];
            labels
                .iter()
                .zip(&w)
                .map(|(l, x)| (l.to_string(), x / s))
                .collect::<BTreeMap<_, _>>()
        };
        let (p, q) = (draw(), draw());
        let d = total_variation_distance(&p, &q);
        assert!((d - total_variation_distance(&q, &p)).abs() < 1e-15);
        assert!((0.0..=1.0).contains(&d));
        assert!(total_variation_distance(&p, &p) < 1e-15);
    }
}

#[test]
fn far_distributions_fail() {
    // TVD 0.1 against tolerance 0.05.
    let observed = counts(&[("00", 600), ("11", 400)]);
    let r = grade_distribution(&observed, &half_half(), 0.05, 1000);
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.statistic >= 0.1 - 1e-12);
}

#[test]
fn classifier_examples() {
    let labels = ["CONSTANT", "BALANCED"];
    assert_eq!(
        grade_classifier("BALANCED", "BALANCED", &labels).verdict,
        Verdict::Pass
    );
    assert_eq!(
        grade_classifier("CONSTANT", "BALANCED", &labels).verdict,
        Verdict::Fail
    );
    assert_eq!(
        grade_classifier("MAYBE", "BALANCED", &labels).verdict,
        Verdict::Invalid
    );
}

#[test]
fn mitigation_examples() {
    let c = counts(&[("0", 100), ("1", 900)]);
    let m = readout_mitigate(&c, 0.0).unwrap();
    assert!((m["0"] - 0.1).abs() < 1e-12 && (m["1"] - 0.9).abs() < 1e-12);

    let m = readout_mitigate(&counts(&[("0", 100), ("1", 900)]), 0.1).unwrap();
    assert!((m["1"] - 1.0).abs() < 1e-12);
    assert!(m["0"].abs() < 1e-12);

    let c = counts(&[("00", 400), ("01", 100), ("11", 500)]);
    let m = readout_mitigate(&c, 0.2).unwrap();
    assert_eq!(m.len(), 4);
    assert!((m.values().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(m.values().all(|&x| x >= 0.0));

    assert!(readout_mitigate(&c, 0.5).is_err());
}

#[test]
fn mitigation_inverts_independent_flips() {
    // Exact forward model: flip each bit independently with probability p.
    let p: f64 = 0.05;
    let truth = [0.5, 0.0, 0.25, 0.25];
    let mut noisy = [0.0; 4];
    for (i, t) in truth.iter().enumerate() {
        for (j, n) in noisy.iter_mut().enumerate() {
            let flips = (i ^ j).count_ones() as i32;
            *n += t * p.powi(flips) * (1.0 - p).powi(2 - flips);
        }
    }
    let shots = 1_000_000u64;
    let c = Counts::from_map(
        noisy
            .iter()
            .enumerate()
            .map(|(i, x)| (format_label(i as u64, 2), (x * shots as f64).round() as u64))
            .collect(),
    );
    let m = readout_mitigate(&c, p).unwrap();
    for (i, t) in truth.iter().enumerate() {
        assert!((m[&format_label(i as u64, 2)] - t).abs() < 1e-5);
    }
}

#[test]
fn builtin_labs_load() {
    let labs = builtin_labs();
    let ids: Vec<&str> = labs.iter().map(|l| l.id.as_str()).collect();
    assert_eq!(
        ids,
        ["lab1", "lab2", "lab3", "lab4", "lab5", "lab6", "lab7", "lab8"]
    );
    for lab in &labs {
        if let Some(p) = lab.expected_distribution() {
            assert!(validate_distribution(p).is_ok());
        }
    }
    assert!(find_lab(&labs, "lab9").is_none());
}

#[test]
fn sampled_reference_passes() {
    let labs = builtin_labs();
    let mut rng = seeded_rng(11);
    for lab in labs.iter().filter(|l| l.mode == LabMode::Distribution) {
        let expected = lab.expected_distribution().unwrap();
        let c = sample_distribution(expected, lab.shots_required, &mut rng).unwrap();
        let report = run_lab_bytes(lab, c.to_json().as_bytes());
        assert_eq!(
            report.verdict,
            Verdict::Pass,
            "{}: {}",
            lab.id,
            report.detail
        );
        assert_eq!(report.lab_id, lab.id);
    }
}

#[test]
fn malformed_submissions_are_invalid() {
    let labs = builtin_labs();
    for lab in &labs {
        for bad in [
            &b""[..],
            b"   ",
            b"{",
            b"\xff\xfe",
            b"{\"qubits\": 2}",
            b"null",
        ] {
            let r = run_lab_bytes(lab, bad);
            assert_eq!(r.verdict, Verdict::Invalid, "{} accepted {:?}", lab.id, bad);
            assert_eq!(r.verdict.exit_code(), 2);
        }
    }
}

#[test]
fn classifier_submission_forms() {
    let lab = find_lab(&builtin_labs(), "lab4").cloned().unwrap();
    assert_eq!(run_lab_bytes(&lab, b"BALANCED\n").verdict, Verdict::Pass);
    assert_eq!(run_lab_bytes(&lab, b"\"BALANCED\"").verdict, Verdict::Pass);
    assert_eq!(run_lab_bytes(&lab, b"CONSTANT").verdict, Verdict::Fail);
    assert_eq!(run_lab_bytes(&lab, b"MAYBE").verdict, Verdict::Invalid);
}

#[test]
fn manifest_validation() {
    let bad = [
        r#"{"id": "x", "title": "t", "mode": "STATE", "reference": {"label": "A"}}"#,
        r#"{"id": "x", "title": "t", "mode": "CLASSIFIER", "reference": {"label": "A", "labels": ["B"]}}"#,
        r#"{"id": "x", "title": "t", "mode": "DISTRIBUTION", "reference": {"probabilities": {"0": 0.3}}}"#,
        r#"{"id": "", "title": "t", "mode": "CLASSIFIER", "reference": {"label": "A", "labels": ["A"]}}"#,
        r#"{"id": "x", "title": "t", "mode": "GUESS", "reference": {}}"#,
        r#"{"id": "x", "title": "t", "mode": "STATE", "reference": {"circuit": {"qubits": 1, "ops": []}}, "tolerance": -1}"#,
    ];
    for text in bad {
        assert!(LabSpec::parse(text.as_bytes(), "m").is_err(), "{text}");
    }
    let from_circuit = r#"{"id": "b", "title": "t", "mode": "DISTRIBUTION", "reference": {"circuit":
        {"qubits": 2, "ops": [{"gate": "h", "targets": [0]}, {"gate": "x", "targets": [1], "controls": [0]}, {"measure": [0, 1]}]}}}"#;
    let lab = LabSpec::parse(from_circuit.as_bytes(), "m").unwrap();
    let p = lab.expected_distribution().unwrap();
    assert!((p["00"] - 0.5).abs() < 1e-12 && (p["11"] - 0.5).abs() < 1e-12);
    assert_eq!(lab.shots_required, DEFAULT_SHOTS);
    assert_eq!(lab.tolerance, DEFAULT_TVD_TOLERANCE);
}

#[test]
fn report_json_shape() {
    let r = grade_classifier("BALANCED", "BALANCED", &["CONSTANT", "BALANCED"]).with_lab_id("lab4");
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["lab_id"], "lab4");
    let v: serde_json::Value = serde_json::from_str(&GradeReport::invalid("x").to_json()).unwrap();
    assert_eq!(v["verdict"], "INVALID");
    assert!(v["statistic"].is_null());
}
