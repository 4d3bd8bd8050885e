//! Probability model of the N-fold Bell ensemble and its entropy bounds.
//!
//! All logarithms are base 2. Per-sequence probabilities `q_m = Π p_{m_n}`
//! are compared in log space; sequences are grouped into type classes
//! (symbol counts) so sums over `4^N` sequences cost `O(N³)`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitString;

/// Tolerance on `Σ p = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;
/// Default floor `δ` for the log-range `Δ`.
pub const DEFAULT_DELTA_FLOOR: f64 = 1.0;
/// Default half-width of the `CRITICAL` band `|H - 1| <= tol` in phase labels.
pub const DEFAULT_CRITICAL_TOLERANCE: f64 = 1e-9;
/// Largest `N` handled by the type-class evaluators.
pub const MAX_TYPE_CLASS_QUBITS: usize = 64;

/// Single-copy distribution `(p00, p01, p10, p11)` over Bell labels, indexed by
/// `2·z + x` where `(z, x)` are the Z- and X-bits of a qubit's Pauli label.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct ProbVec4([f64; 4]);

impl ProbVec4 {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidProbability(format!("entries must be finite and non-negative: {p:?}")));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidProbability(format!("entries sum to {sum}, not 1")));
        }
        Ok(Self(p))
    }

    pub fn uniform() -> Self {
        Self([0.25; 4])
    }

    /// `p = (s, t, 1 - s - t, 0)`.
    pub fn from_st(s: f64, t: f64) -> Result<Self> {
        Self::new([s, t, (1.0 - s - t).max(0.0), 0.0])
    }

    pub fn as_array(&self) -> [f64; 4] {
        self.0
    }

    pub fn get(&self, symbol: usize) -> f64 {
        self.0[symbol]
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(0.0, f64::max)
    }

    /// Symbols with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).filter(|&x| self.0[x] > 0.0)
    }

    pub fn support_size(&self) -> usize {
        self.support().count()
    }

    /// `log2 p_x` per symbol, `-inf` where `p_x = 0`.
    pub fn log2_table(&self) -> [f64; 4] {
        self.0.map(|x| if x > 0.0 { x.log2() } else { f64::NEG_INFINITY })
    }
}

impl TryFrom<[f64; 4]> for ProbVec4 {
    type Error = Error;
    fn try_from(p: [f64; 4]) -> Result<Self> {
        Self::new(p)
    }
}

impl From<ProbVec4> for [f64; 4] {
    fn from(p: ProbVec4) -> Self {
        p.0
    }
}

impl fmt::Display for ProbVec4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

/// Bell label of qubit `n` in a packed Pauli word, as an index into [`ProbVec4`].
#[inline]
pub fn symbol_of(word: u64, n: usize) -> usize {
    let z = (word >> (2 * n)) & 1;
    let x = (word >> (2 * n + 1)) & 1;
    (2 * z + x) as usize
}

/// Symbol counts `(k00, k01, k10, k11)` of a packed Pauli word on `n` qubits.
#[inline]
pub fn symbol_counts(word: u64, n: usize) -> [u32; 4] {
    let z = word & crate::gf2::Z_MASK;
    let x = (word >> 1) & crate::gf2::Z_MASK;
    let k11 = (z & x).count_ones();
    let k10 = (z & !x).count_ones();
    let k01 = (x & !z).count_ones();
    [n as u32 - k11 - k10 - k01, k01, k10, k11]
}

/// `Σ k_x log2 p_x`, with `-inf` whenever a zero-probability symbol occurs.
#[inline]
pub fn log2_prob_of_counts(counts: &[u32; 4], log2_p: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for x in 0..4 {
        if counts[x] > 0 {
            acc += counts[x] as f64 * log2_p[x];
        }
    }
    acc
}

/// `q_m = Π_n p_{m_n}`.
pub fn product_prob(p: &ProbVec4, m: &BitString) -> Result<f64> {
    if !m.len().is_multiple_of(2) {
        return Err(Error::Precondition(format!("Pauli label needs an even length, got {}", m.len())));
    }
    let log2_p = p.log2_table();
    let mut counts = [0u32; 4];
    for n in 0..m.len() / 2 {
        let z = m.get(2 * n) as usize;
        let x = m.get(2 * n + 1) as usize;
        counts[2 * z + x] += 1;
    }
    Ok(log2_prob_of_counts(&counts, &log2_p).exp2())
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn entropy(p: &ProbVec4) -> f64 {
    -p.0.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>() + 0.0
}

/// `γ⁽¹⁾`: the sum of the two largest entries.
pub fn gamma1_single(p: &ProbVec4) -> f64 {
    let mut v = p.0;
    v.sort_by(|a, b| b.total_cmp(a));
    v[0] + v[1]
}

/// PPT criterion for Bell-diagonal states: separable iff every `p_x <= 1/2`.
pub fn is_separable(p: &ProbVec4) -> bool {
    p.max() <= 0.5 + 1e-12
}

/// `|Σ_{support} p log2(2p) - (1 - H(p))|`.
pub fn entropy_identity_gap(p: &ProbVec4) -> f64 {
    let lhs: f64 = p.support().map(|x| p.0[x] * (2.0 * p.0[x]).log2()).sum();
    (lhs - (1.0 - entropy(p))).abs()
}

/// Parameters of the Hoeffding tail bound `2 exp(-2 ε² N / Δ²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub epsilon: f64,
    pub delta_floor: f64,
    /// `Δ = max(log2 p_max - log2 p_min over the support, δ)`.
    pub delta: f64,
}

impl TailParams {
    pub fn new(p: &ProbVec4, epsilon: f64) -> Result<Self> {
        Self::with_floor(p, epsilon, DEFAULT_DELTA_FLOOR)
    }

    pub fn with_floor(p: &ProbVec4, epsilon: f64, delta_floor: f64) -> Result<Self> {
        if delta_floor.is_nan() || delta_floor <= 0.0 {
            return Err(Error::Precondition(format!("delta floor must be positive, got {delta_floor}")));
        }
        let lg = p.log2_table();
        let support: Vec<f64> = p.support().map(|x| lg[x]).collect();
        let hi = support.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = support.iter().copied().fold(f64::INFINITY, f64::min);
        Self::from_delta(epsilon, (hi - lo).max(delta_floor), delta_floor)
    }

    /// Direct construction from `ε` and `Δ`.
    pub fn from_delta(epsilon: f64, delta: f64, delta_floor: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::Precondition(format!("epsilon must be positive, got {epsilon}")));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::Precondition(format!("Delta must be positive, got {delta}")));
        }
        Ok(Self { epsilon, delta_floor, delta })
    }
}

/// `2 exp(-2 ε² N / Δ²)`.
pub fn aep_tail_bound(params: &TailParams, n: usize) -> f64 {
    2.0 * (-2.0 * params.epsilon * params.epsilon * n as f64 / (params.delta * params.delta)).exp()
}

/// The typical-set bound on the top-`2^N` mass:
/// `2^{N(1 - H + ε)} + 2 exp(-2 ε² N / Δ²)`.
pub fn theorem1_bound(p: &ProbVec4, n: usize, epsilon: f64) -> Result<f64> {
    let params = TailParams::new(p, epsilon)?;
    Ok((n as f64 * (1.0 - entropy(p) + epsilon)).exp2() + aep_tail_bound(&params, n))
}

/// All sequences on `N` qubits sharing one symbol-count vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypeClass {
    pub counts: [u32; 4],
    pub multiplicity: u128,
    /// `log2` of the common per-sequence probability.
    pub log2_prob: f64,
}

impl TypeClass {
    /// Total probability mass of the class.
    pub fn mass(&self) -> f64 {
        self.multiplicity as f64 * self.log2_prob.exp2()
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c
}

/// Multinomial coefficient `N! / Π k_x!` for `N <= 64`.
pub fn multinomial(counts: &[u32; 4]) -> u128 {
    let n: u32 = counts.iter().sum();
    assert!(n as usize <= MAX_TYPE_CLASS_QUBITS, "multinomial limited to N <= 64");
    let mut left = n;
    let mut acc: u128 = 1;
    for &k in &counts[..3] {
        acc *= binomial(left, k);
        left -= k;
    }
    acc
}

fn check_qubits(n: usize) -> Result<()> {
    if !(1..=MAX_TYPE_CLASS_QUBITS).contains(&n) {
        return Err(Error::QubitsOutOfRange { n, min: 1, max: MAX_TYPE_CLASS_QUBITS });
    }
    Ok(())
}

/// Type classes on the support of `p` (classes using a zero-probability symbol
/// are omitted), in a fixed enumeration order.
pub fn type_classes(p: &ProbVec4, n: usize) -> Result<Vec<TypeClass>> {
    check_qubits(n)?;
    let n = n as u32;
    let lg = p.log2_table();
    let allowed = |x: usize, k: u32| k == 0 || p.0[x] > 0.0;
    let mut out = Vec::new();
    for k0 in 0..=n {
        for k1 in 0..=n - k0 {
            for k2 in 0..=n - k0 - k1 {
                let counts = [k0, k1, k2, n - k0 - k1 - k2];
                if (0..4).all(|x| allowed(x, counts[x])) {
                    out.push(TypeClass {
                        counts,
                        multiplicity: multinomial(&counts),
                        log2_prob: log2_prob_of_counts(&counts, &lg),
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Type classes sorted by per-sequence probability, largest first.
pub fn sorted_type_classes(p: &ProbVec4, n: usize) -> Result<Vec<TypeClass>> {
    let mut classes = type_classes(p, n)?;
    classes.sort_by(|a, b| b.log2_prob.total_cmp(&a.log2_prob).then_with(|| a.counts.cmp(&b.counts)));
    Ok(classes)
}

/// Mass outside the typical set: `Σ q_m` over support sequences with
/// `|-(1/N) log2 q_m - H(p)| >= ε`.
pub fn exact_tail(p: &ProbVec4, n: usize, epsilon: f64) -> Result<f64> {
    let h = entropy(p);
    Ok(type_classes(p, n)?.iter().filter(|c| (-c.log2_prob / n as f64 - h).abs() >= epsilon).map(TypeClass::mass).sum())
}

/// Sum of the `K` largest values of `q_m` over all `4^N` sequences.
pub fn top_k_sum(p: &ProbVec4, n: usize, k: &BigUint) -> Result<f64> {
    check_qubits(n)?;
    let total = BigUint::from(1u8) << (2 * n);
    if *k > total {
        return Err(Error::KOutOfRange { k: k.to_string(), n });
    }
    // Only K = 4^64 exceeds u128, and it already covers every sequence.
    let mut remaining = k.to_u128().unwrap_or(u128::MAX);
    let mut sum = 0.0;
    for class in sorted_type_classes(p, n)? {
        if remaining == 0 {
            break;
        }
        let take = class.multiplicity.min(remaining);
        sum += take as f64 * class.log2_prob.exp2();
        remaining -= take;
    }
    Ok(sum)
}

/// Upper bound on the LOCC success probability: the top-`2^N` mass.
pub fn gamma_upper_bound(p: &ProbVec4, n: usize) -> Result<f64> {
    top_k_sum(p, n, &(BigUint::from(1u8) << n))
}

/// Region labels of the `(s, t)` phase diagram with `p = (s, t, 1 - s - t, 0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PhaseLabel {
    /// On the triangle boundary: at most two Bell states, perfectly distinguishable.
    BoundaryPerfect,
    /// `H > 1`: the LOCC success probability vanishes as `N → ∞`.
    ConvergesToZero,
    /// `H < 1` in the interior: success probability tends to one.
    ConvergesToOne,
    /// `|H - 1|` within the critical tolerance.
    Critical,
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::BoundaryPerfect => "BOUNDARY_PERFECT",
            Self::ConvergesToZero => "CONVERGES_TO_ZERO",
            Self::ConvergesToOne => "CONVERGES_TO_ONE",
            Self::Critical => "CRITICAL",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub s: f64,
    pub t: f64,
    pub entropy: f64,
    pub separable: bool,
    pub label: PhaseLabel,
}

pub fn classify_phase(s: f64, t: f64) -> Result<Phase> {
    classify_phase_with_tolerance(s, t, DEFAULT_CRITICAL_TOLERANCE)
}

pub fn classify_phase_with_tolerance(s: f64, t: f64, critical_tol: f64) -> Result<Phase> {
    const EDGE: f64 = 1e-12;
    if !(s >= -EDGE && t >= -EDGE && s + t <= 1.0 + EDGE) {
        return Err(Error::OutOfSimplex { s, t });
    }
    let (s, t) = (s.max(0.0), t.max(0.0));
    let p = ProbVec4::new([s, t, (1.0 - s - t).max(0.0), 0.0])
        .or_else(|_| ProbVec4::new([s / (s + t), t / (s + t), 0.0, 0.0]))?;
    let h = entropy(&p);
    let on_boundary = s <= EDGE || t <= EDGE || 1.0 - s - t <= EDGE;
    let label = if on_boundary {
        PhaseLabel::BoundaryPerfect
    } else if (h - 1.0).abs() <= critical_tol {
        PhaseLabel::Critical
    } else if h > 1.0 {
        PhaseLabel::ConvergesToZero
    } else {
        PhaseLabel::ConvergesToOne
    };
    Ok(Phase { s, t, entropy: h, separable: is_separable(&p), label })
}

/// Checks `Σ λ_k a_k <= max_{|X| = K̃} Σ_{k∈X} λ_k` for `a_k ∈ [0, 1]`,
/// `Σ a_k <= K̃ <= K`.
pub fn check_satprob_lemma(a: &[f64], lambda: &[f64], k_tilde: usize) -> Result<bool> {
    if a.len() != lambda.len() {
        return Err(Error::LengthMismatch { expected: a.len(), actual: lambda.len() });
    }
    if a.iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::Precondition("every a_k must lie in [0, 1]".into()));
    }
    if lambda.iter().any(|x| x.is_nan() || *x < 0.0) || (lambda.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("lambda must be a probability vector".into()));
    }
    if k_tilde > a.len() || a.iter().sum::<f64>() > k_tilde as f64 + 1e-12 {
        return Err(Error::Precondition(format!("need sum(a) <= K~ <= K, got K~ = {k_tilde}")));
    }
    let lhs: f64 = a.iter().zip(lambda).map(|(x, l)| x * l).sum();
    let mut sorted = lambda.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let rhs: f64 = sorted[..k_tilde].iter().sum();
    Ok(lhs <= rhs + 1e-12)
}
