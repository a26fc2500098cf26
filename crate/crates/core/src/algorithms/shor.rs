//! Order finding and Shor's factoring at desk scale.
//!
//! Controlled modular multiplication is a [`PermutationOp`] on the control
//! qubit plus the work register, so the simulator never builds arithmetic
//! gate networks. Quantum output is only a hypothesis: every order candidate
//! is checked classically before use.

use std::collections::BTreeMap;

use rand::Rng;

use super::number::{continued_fractions, gcd, is_prime, mod_pow, perfect_power};
use super::qft_gates;
use crate::circuit::{Circuit, PermutationOp, MAX_PERMUTATION_QUBITS};
use crate::error::{QlabError, Result};
use crate::gate::Gate;
use crate::state::Sampler;

/// Largest factoring input; keeps the order-finding register near 19 qubits.
pub const MAX_FACTOR_INPUT: u64 = 64;

/// Cap on counting plus work qubits of an order-finding circuit.
pub const MAX_ORDER_FINDING_QUBITS: usize = 24;

fn work_bits(modulus: u64) -> usize {
    (64 - (modulus - 1).leading_zeros()) as usize
}

/// `2·⌈log₂ modulus⌉ + 1`.
pub fn default_counting_qubits(modulus: u64) -> usize {
    2 * work_bits(modulus.max(2)) + 1
}

fn check_order_args(a: u64, modulus: u64, t: usize) -> Result<()> {
    if modulus < 3 {
        return Err(QlabError::input(format!(
            "modulus {modulus} must be at least 3"
        )));
    }
    if a == 0 || a >= modulus {
        return Err(QlabError::input(format!(
            "base {a} must lie in [1, {modulus})"
        )));
    }
    if gcd(a, modulus) != 1 {
        return Err(QlabError::input(format!(
            "gcd({a}, {modulus}) = {} is not 1; the factor is already known",
            gcd(a, modulus)
        )));
    }
    if t == 0 {
        return Err(QlabError::input("order finding needs a counting qubit"));
    }
    let w = work_bits(modulus);
    if w + 1 > MAX_PERMUTATION_QUBITS || t + w > MAX_ORDER_FINDING_QUBITS {
        return Err(QlabError::Capacity {
            what: "order-finding qubits",
            requested: t + w,
            limit: MAX_ORDER_FINDING_QUBITS,
        });
    }
    Ok(())
}

/// Phase-estimation circuit for the order of `a` modulo `modulus`.
///
/// Counting qubits `0..t`, work register `t..t+w` with
/// `w = ⌈log₂ modulus⌉`, initialized to `|1⟩`. Counting qubit `j` controls
/// `x ↦ a^(2^j)·x mod modulus` on work values below `modulus` (values at or
/// above it are left alone, which keeps the map a bijection). Ends with the
/// inverse QFT and a measurement of the counting register.
pub fn order_finding_circuit(a: u64, modulus: u64, t: usize) -> Result<Circuit> {
    check_order_args(a, modulus, t)?;
    let w = work_bits(modulus);
    let counting: Vec<usize> = (0..t).collect();
    let mut c = Circuit::new(t + w)?;
    c.append(Gate::x(t))?;
    c.extend(counting.iter().map(|&q| Gate::h(q)))?;
    let mut multiplier = a % modulus;
    for j in 0..t {
        let register: Vec<usize> = std::iter::once(j).chain(t..t + w).collect();
        let m = multiplier;
        let op = PermutationOp::from_fn(format!("mul_{m}_mod_{modulus}"), register, |v| {
            let x = v >> 1;
            if v & 1 == 1 && x < modulus {
                ((m * x % modulus) << 1) | 1
            } else {
                v
            }
        })?;
        c.append(op)?;
        multiplier = multiplier * multiplier % modulus;
    }
    c.extend(qft_gates(&counting, true))?;
    c.measure(&counting)?;
    Ok(c)
}

/// Exact counting-register distribution for one `(a, modulus, t)`, ready to
/// be sampled repeatedly.
pub struct OrderFinder {
    a: u64,
    modulus: u64,
    t: usize,
    distribution: BTreeMap<u64, f64>,
    sampler: Sampler,
}

impl OrderFinder {
    pub fn new(a: u64, modulus: u64, t: usize) -> Result<Self> {
        let circuit = order_finding_circuit(a, modulus, t)?;
        let state = circuit.without_measurements().run_state()?;
        let counting: Vec<usize> = (0..t).collect();
        let distribution = state.marginal(&counting);
        let sampler = Sampler::new(distribution.clone());
        Ok(OrderFinder {
            a,
            modulus,
            t,
            distribution,
            sampler,
        })
    }

    /// Probability of each counting-register outcome `y`.
    pub fn distribution(&self) -> &BTreeMap<u64, f64> {
        &self.distribution
    }

    pub fn counting_qubits(&self) -> usize {
        self.t
    }

    /// Draw one counting-register outcome.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.sampler.draw(rng)
    }

    /// Smallest convergent denominator `r` of `y/2^t` with `a^r ≡ 1`.
    pub fn candidate(&self, y: u64) -> Option<u64> {
        let convergents = continued_fractions(y, 1 << self.t, self.modulus).ok()?;
        convergents
            .into_iter()
            .map(|f| f.denominator())
            .find(|&r| mod_pow(self.a, r, self.modulus) == 1)
    }

    /// Sample once and post-process; `None` means no verified order.
    pub fn run<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<u64> {
        let y = self.sample(rng);
        self.candidate(y)
    }
}

/// One quantum order-finding run. `Ok(None)` is NOT_FOUND.
pub fn order_finding<R: Rng + ?Sized>(
    a: u64,
    modulus: u64,
    t: usize,
    rng: &mut R,
) -> Result<Option<u64>> {
    Ok(OrderFinder::new(a, modulus, t)?.run(rng))
}

/// How a factorization was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMethod {
    EvenScreen,
    PerfectPower { root: u64, exponent: u32 },
    LuckyGcd { a: u64, attempt: u32 },
    OrderFinding { a: u64, order: u64, attempt: u32 },
}

/// `p · q = n` with `1 < p ≤ q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Factorization {
    pub p: u64,
    pub q: u64,
    pub method: FactorMethod,
}

impl Factorization {
    fn new(n: u64, factor: u64, method: FactorMethod) -> Self {
        let other = n / factor;
        Factorization {
            p: factor.min(other),
            q: factor.max(other),
            method,
        }
    }
}

/// Shor's algorithm for composite `n` in `[4, 64]`.
///
/// Classical screens run first: even numbers, perfect powers, and a random
/// base sharing a factor with `n`. Otherwise a random coprime base goes
/// through order finding; odd orders and `a^(r/2) ≡ ±1` are rejected.
/// `Ok(None)` means all `max_attempts` bases failed.
pub fn shor_factor<R: Rng + ?Sized>(
    n: u64,
    rng: &mut R,
    max_attempts: u32,
) -> Result<Option<Factorization>> {
    if !(4..=MAX_FACTOR_INPUT).contains(&n) {
        return Err(QlabError::input(format!(
            "n = {n} is outside the supported range [4, {MAX_FACTOR_INPUT}]"
        )));
    }
    if is_prime(n) {
        return Err(QlabError::input(format!("n = {n} is prime")));
    }
    if n.is_multiple_of(2) {
        return Ok(Some(Factorization::new(n, 2, FactorMethod::EvenScreen)));
    }
    if let Some((root, exponent)) = perfect_power(n) {
        return Ok(Some(Factorization::new(
            n,
            root,
            FactorMethod::PerfectPower { root, exponent },
        )));
    }

    let t = default_counting_qubits(n);
    let mut finders: BTreeMap<u64, OrderFinder> = BTreeMap::new();
    for attempt in 1..=max_attempts {
        let a = rng.gen_range(2..n);
        let g = gcd(a, n);
        if g > 1 {
            return Ok(Some(Factorization::new(
                n,
                g,
                FactorMethod::LuckyGcd { a, attempt },
            )));
        }
        let finder = match finders.entry(a) {
            std::collections::btree_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::btree_map::Entry::Vacant(e) => e.insert(OrderFinder::new(a, n, t)?),
        };
        let Some(order) = finder.run(rng) else {
            continue;
        };
        if order % 2 == 1 {
            continue;
        }
        let half = mod_pow(a, order / 2, n);
        if half == 1 || half == n - 1 {
            continue;
        }
        let factor = [gcd(half - 1, n), gcd(half + 1, n)]
            .into_iter()
            .find(|&f| f > 1 && f < n);
        if let Some(f) = factor {
            return Ok(Some(Factorization::new(
                n,
                f,
                FactorMethod::OrderFinding { a, order, attempt },
            )));
        }
    }
    Ok(None)
}
