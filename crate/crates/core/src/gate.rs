//! Gate set: named single-qubit unitaries plus SWAP, each optionally controlled.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dense::{self, DenseMatrix};
use crate::error::{QlabError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Phase,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Phase,
        GateKind::Swap,
    ];

    /// Lowercase name used in circuit and noise files.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::Phase => "phase",
            GateKind::Swap => "swap",
        }
    }

    pub fn takes_angle(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Phase
        )
    }

    pub fn target_count(self) -> usize {
        if self == GateKind::Swap {
            2
        } else {
            1
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = QlabError;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| QlabError::input(format!("unknown gate {s:?}")))
    }
}

/// A gate instance: kind, target qubits, control qubits and optional angle.
///
/// Construction checks everything that does not depend on the register size;
/// index bounds are checked when the gate meets a state or circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    controls: Vec<usize>,
    angle: Option<f64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn new(
        kind: GateKind,
        targets: Vec<usize>,
        controls: Vec<usize>,
        angle: Option<f64>,
    ) -> Result<Self> {
        if targets.len() != kind.target_count() {
            return Err(QlabError::input(format!(
                "{kind} takes {} target(s), got {}",
                kind.target_count(),
                targets.len()
            )));
        }
        match (kind.takes_angle(), angle) {
            (true, None) => return Err(QlabError::input(format!("{kind} requires an angle"))),
            (false, Some(_)) => {
                return Err(QlabError::input(format!("{kind} does not take an angle")))
            }
            (true, Some(a)) if !a.is_finite() => {
                return Err(QlabError::input(format!("{kind} angle must be finite")))
            }
            _ => {}
        }
        let all: Vec<usize> = targets.iter().chain(&controls).copied().collect();
        for (i, q) in all.iter().enumerate() {
            if all[..i].contains(q) {
                return Err(QlabError::input(format!(
                    "qubit {q} used more than once by {kind}"
                )));
            }
        }
        Ok(Gate {
            kind,
            targets,
            controls,
            angle,
        })
    }

    fn fixed(kind: GateKind, target: usize) -> Self {
        Gate {
            kind,
            targets: vec![target],
            controls: Vec::new(),
            angle: None,
        }
    }

    fn rotation(kind: GateKind, target: usize, angle: f64) -> Self {
        Gate {
            kind,
            targets: vec![target],
            controls: Vec::new(),
            angle: Some(angle),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, q)
    }
    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, q)
    }
    pub fn y(q: usize) -> Self {
        Self::fixed(GateKind::Y, q)
    }
    pub fn z(q: usize) -> Self {
        Self::fixed(GateKind::Z, q)
    }
    pub fn s(q: usize) -> Self {
        Self::fixed(GateKind::S, q)
    }
    pub fn t(q: usize) -> Self {
        Self::fixed(GateKind::T, q)
    }
    pub fn rx(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rx, q, angle)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Ry, q, angle)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Rz, q, angle)
    }
    pub fn phase(q: usize, angle: f64) -> Self {
        Self::rotation(GateKind::Phase, q, angle)
    }

    /// Panics if `a == b`.
    pub fn swap(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "swap needs two distinct qubits");
        Gate {
            kind: GateKind::Swap,
            targets: vec![a, b],
            controls: Vec::new(),
            angle: None,
        }
    }

    /// Controlled-X. Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::x(target)
            .controlled(&[control])
            .expect("cnot control equals target")
    }

    /// Controlled phase `diag(1,1,1,e^{iθ})`. Panics if `control == target`.
    pub fn cphase(control: usize, target: usize, angle: f64) -> Self {
        Self::phase(target, angle)
            .controlled(&[control])
            .expect("cphase control equals target")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn controls(&self) -> &[usize] {
        &self.controls
    }

    pub fn angle(&self) -> Option<f64> {
        self.angle
    }

    /// Every qubit the gate touches, targets first.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().chain(&self.controls).copied()
    }

    /// Same gate with `extra` appended to its controls.
    pub fn controlled(&self, extra: &[usize]) -> Result<Gate> {
        let mut controls = self.controls.clone();
        controls.extend_from_slice(extra);
        Gate::new(self.kind, self.targets.clone(), controls, self.angle)
    }

    /// The adjoint gate, expressed in the same gate set.
    pub fn inverse(&self) -> Gate {
        let (kind, angle) = match (self.kind, self.angle) {
            (GateKind::S, _) => (GateKind::Phase, Some(-FRAC_PI_2)),
            (GateKind::T, _) => (GateKind::Phase, Some(-FRAC_PI_4)),
            (k, Some(a)) => (k, Some(-a)),
            (k, None) => (k, None),
        };
        Gate {
            kind,
            targets: self.targets.clone(),
            controls: self.controls.clone(),
            angle,
        }
    }

    /// Check every index against a register of `num_qubits`.
    pub fn check_bounds(&self, num_qubits: usize) -> Result<()> {
        match self.qubits().find(|&q| q >= num_qubits) {
            Some(q) => Err(QlabError::input(format!(
                "{} uses qubit {q}, out of range for {num_qubits} qubits",
                self.kind
            ))),
            None => Ok(()),
        }
    }

    /// The 2×2 matrix of a single-target kind, row-major `[[m00, m01], [m10, m11]]`.
    /// `None` for SWAP.
    pub fn matrix2(&self) -> Option<[[Complex64; 2]; 2]> {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let theta = self.angle.unwrap_or(0.0);
        let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        Some(match self.kind {
            GateKind::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                [[h, h], [h, -h]]
            }
            GateKind::X => [[zero, one], [one, zero]],
            GateKind::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
            GateKind::Z => [[one, zero], [zero, -one]],
            GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
            GateKind::T => [[one, zero], [zero, Complex64::from_polar(1.0, FRAC_PI_4)]],
            GateKind::Rx => [[c(cos, 0.0), c(0.0, -sin)], [c(0.0, -sin), c(cos, 0.0)]],
            GateKind::Ry => [[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]],
            GateKind::Rz => [
                [Complex64::from_polar(1.0, -theta / 2.0), zero],
                [zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::Phase => [[one, zero], [zero, Complex64::from_polar(1.0, theta)]],
            GateKind::Swap => return None,
        })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if let Some(a) = self.angle {
            write!(f, "({a})")?;
        }
        write!(f, " {:?}", self.targets)?;
        if !self.controls.is_empty() {
            write!(f, " ctrl {:?}", self.controls)?;
        }
        Ok(())
    }
}

fn to_dense2(m: [[Complex64; 2]; 2]) -> DenseMatrix {
    DenseMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]])
}

fn pauli(kind: GateKind) -> DenseMatrix {
    to_dense2(Gate::fixed(kind, 0).matrix2().expect("pauli"))
}

/// Embed single-qubit `factors` (by qubit) into an `n`-qubit operator.
fn embed(n: usize, placed: &[(usize, DenseMatrix)]) -> DenseMatrix {
    let mut factors = vec![dense::identity(2); n];
    for (q, m) in placed {
        factors[*q] = m.clone();
    }
    dense::kron_qubits(&factors)
}

/// Full `2ⁿ×2ⁿ` unitary of `gate` on an `n`-qubit register.
///
/// Built from Kronecker products and projectors, independently of the
/// sparse kernel: `U = (I − P) + P·G`, where `P` projects the controls onto
/// `|1…1⟩` and `G` is the uncontrolled gate. SWAP is `(I + XX + YY + ZZ)/2`.
pub fn gate_unitary(gate: &Gate, n: usize) -> Result<DenseMatrix> {
    dense::check_unitary_size(n)?;
    if n == 0 {
        return Err(QlabError::input("a register needs at least one qubit"));
    }
    gate.check_bounds(n)?;
    let dim = 1usize << n;
    let bare = match gate.matrix2() {
        Some(m) => embed(n, &[(gate.targets[0], to_dense2(m))]),
        None => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            let mut sum = dense::identity(dim);
            for kind in [GateKind::X, GateKind::Y, GateKind::Z] {
                sum += embed(n, &[(a, pauli(kind)), (b, pauli(kind))]);
            }
            sum * c(0.5, 0.0)
        }
    };
    if gate.controls.is_empty() {
        return Ok(bare);
    }
    let one_proj = to_dense2([[c(0.0, 0.0); 2], [c(0.0, 0.0), c(1.0, 0.0)]]);
    let placed: Vec<_> = gate
        .controls
        .iter()
        .map(|&q| (q, one_proj.clone()))
        .collect();
    let proj = embed(n, &placed);
    Ok(dense::identity(dim) - &proj + &proj * bare)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn hadamard_and_z_matrices() {
        let h = gate_unitary(&Gate::h(0), 1).unwrap();
        let s = FRAC_1_SQRT_2;
        let expected =
            DenseMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        assert!(dense::max_abs_diff(&h, &expected) < 1e-15);
        let z = gate_unitary(&Gate::z(0), 1).unwrap();
        let expected = DenseMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(1.0, 0.0),
            c(-1.0, 0.0),
        ]));
        assert!(dense::max_abs_diff(&z, &expected) < 1e-15);
    }

    #[test]
    fn cnot_is_little_endian_permutation() {
        // control 0, target 1: |01⟩ (index 1) ↔ |11⟩ (index 3)
        let u = gate_unitary(&Gate::cnot(0, 1), 2).unwrap();
        let mapping = [0usize, 3, 2, 1];
        for (col, &row) in mapping.iter().enumerate() {
            for r in 0..4 {
                let want = if r == row { 1.0 } else { 0.0 };
                assert!((u[(r, col)] - c(want, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn every_kind_is_unitary() {
        for kind in GateKind::ALL {
            let targets = if kind == GateKind::Swap {
                vec![0, 2]
            } else {
                vec![1]
            };
            let angle = kind.takes_angle().then_some(0.37);
            let g = Gate::new(kind, targets, vec![3], angle).unwrap();
            let u = gate_unitary(&g, 4).unwrap();
            assert!(dense::unitarity_error(&u) < 1e-12, "{kind}");
            let inv = gate_unitary(&g.inverse(), 4).unwrap();
            assert!(
                dense::max_abs_diff(&(inv * u), &dense::identity(16)) < 1e-12,
                "{kind}"
            );
        }
    }

    #[test]
    fn construction_errors() {
        assert!(Gate::new(GateKind::Swap, vec![0], vec![], None).is_err());
        assert!(Gate::new(GateKind::X, vec![0, 1], vec![], None).is_err());
        assert!(Gate::new(GateKind::Rx, vec![0], vec![], None).is_err());
        assert!(Gate::new(GateKind::H, vec![0], vec![], Some(1.0)).is_err());
        assert!(Gate::new(GateKind::Rz, vec![0], vec![], Some(f64::NAN)).is_err());
        assert!(Gate::x(0).controlled(&[0]).is_err());
        assert!(Gate::x(0).controlled(&[1, 1]).is_err());
        assert!("frobnicate".parse::<GateKind>().is_err());
        assert_eq!("phase".parse::<GateKind>().unwrap(), GateKind::Phase);
        assert!(matches!(
            gate_unitary(&Gate::h(0), 7),
            Err(QlabError::Capacity { .. })
        ));
        assert!(gate_unitary(&Gate::h(3), 2).is_err());
    }

    #[test]
    fn controlled_extends_controls() {
        let g = Gate::phase(0, PI / 2.0).controlled(&[1, 2]).unwrap();
        assert_eq!(g.controls(), &[1, 2]);
        assert_eq!(g.targets(), &[0]);
        let u = gate_unitary(&g, 3).unwrap();
        for i in 0..8 {
            let want = if i == 7 { c(0.0, 1.0) } else { c(1.0, 0.0) };
            assert!((u[(i, i)] - want).norm() < 1e-15);
        }
        assert_eq!(Gate::x(1).controlled(&[0]).unwrap(), Gate::cnot(0, 1));
    }
}
