//! The stabilizer-measurement one-way LOCC protocol and its success probability.
//!
//! Alice measures in a stabilizer basis of a self-dual code `C`; Bob then sees
//! his half of the state shifted by the syndrome `G P m` and guesses the most
//! likely error in that coset (the coset leader). The protocol identifies `m`
//! iff `m` is the leader of `m + C`, so
//!
//! ```text
//! η = Σ_{a ∈ F₂^N} max { q_m : G P m = a }.
//! ```
//!
//! Ties among equally likely coset members go to the lexicographically
//! smallest label (bit 0 first); the same rule is used by every path here.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{
    self, aep_tail_bound, entropy, gamma1_single, gamma_upper_bound, log2_prob_of_counts, symbol_counts, ProbVec4,
    TailParams,
};
use crate::error::{Error, Result};
use crate::gf2::{lex_cmp_word, swap_pairs_word, BitString};
use crate::rng::{self, domain, StreamRng, CHUNK};
use crate::symplectic::SelfDualCode;

/// Largest `N` for the word-packed coset engine.
pub const ENGINE_MAX_QUBITS: usize = 32;
/// Largest `N` for [`eta_exact`] (sweeps all `4^N` labels).
pub const EXACT_MAX_QUBITS: usize = 12;
/// Largest `N` for which a full syndrome → leader table is built.
pub const TABLE_MAX_QUBITS: usize = 14;
/// Largest `N` for [`eta_mc`].
pub const MC_MAX_QUBITS: usize = 26;
/// Most codewords kept by [`CosetEngine::with_codeword_list`].
pub const CODEWORD_LIST_BUDGET: usize = 1 << 21;
/// Per-qubit absolute tolerance on `log2 q` used to detect ties.
pub const TIE_TOLERANCE_PER_QUBIT: f64 = 1e-12;

/// Samples Pauli labels `m ~ q = p^{⊗N}` as packed words.
#[derive(Clone, Debug)]
pub struct PauliSampler {
    n: usize,
    cdf: [f64; 4],
    last: usize,
    p: [f64; 4],
}

impl PauliSampler {
    pub fn new(p: &ProbVec4, n: usize) -> Self {
        let p = p.as_array();
        let mut cdf = [0.0; 4];
        let mut acc = 0.0;
        for x in 0..4 {
            acc += p[x];
            cdf[x] = acc;
        }
        let last = (0..4).rev().find(|&x| p[x] > 0.0).unwrap_or(0);
        Self { n, cdf, last, p }
    }

    #[inline]
    pub fn symbol<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        (0..4).find(|&x| self.p[x] > 0.0 && u < self.cdf[x]).unwrap_or(self.last)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let mut w = 0u64;
        for q in 0..self.n {
            w |= symbol_bits(q, self.symbol(rng));
        }
        w
    }
}

/// Packed bits of Bell label `symbol` (= 2z + x) on qubit `q`.
#[inline]
fn symbol_bits(q: usize, symbol: usize) -> u64 {
    let z = (symbol >> 1) as u64;
    let x = (symbol & 1) as u64;
    (z << (2 * q)) | (x << (2 * q + 1))
}

/// A code and a distribution prepared for fast coset queries on packed words.
#[derive(Clone, Debug)]
pub struct CosetEngine {
    n: usize,
    gens: Vec<u64>,
    /// Syndrome of each unit vector `e_j`, `j < 2N`.
    columns: Vec<u64>,
    /// `pure_errors[i]` has syndrome `e_i`.
    pure_errors: Vec<u64>,
    log2_p: [f64; 4],
    tol: f64,
    /// Type-class `log2 q`, descending, with cumulative sequence counts.
    class_log2: Vec<f64>,
    class_cumulative: Vec<u128>,
    /// Support symbols ordered by decreasing probability.
    symbol_order: Vec<usize>,
    /// `contrib[q][x]`: syndrome of symbol `x` placed on qubit `q`.
    contrib: Vec<[u64; 4]>,
    low_weight: Option<LowWeightCodewords>,
}

/// Nonzero codewords of weight at most `max_weight`, sorted by weight.
#[derive(Clone, Debug)]
struct LowWeightCodewords {
    words: Vec<u64>,
    /// `offsets[w]`: number of listed codewords of weight `< w`.
    offsets: Vec<usize>,
    max_weight: usize,
}

#[inline]
fn pauli_weight(w: u64) -> usize {
    ((w | w >> 1) & crate::gf2::Z_MASK).count_ones() as usize
}

impl CosetEngine {
    pub fn new(code: &SelfDualCode, p: &ProbVec4) -> Result<Self> {
        let n = code.n_qubits();
        if n > ENGINE_MAX_QUBITS {
            return Err(Error::QubitsOutOfRange { n, min: 1, max: ENGINE_MAX_QUBITS });
        }
        let gens = code.generator_words().expect("N <= 32 fits one word");
        let syndrome_of = |w: u64| -> u64 {
            let sw = swap_pairs_word(w);
            gens.iter().enumerate().fold(0u64, |acc, (i, &g)| acc | (((g & sw).count_ones() & 1) as u64) << i)
        };
        let columns: Vec<u64> = (0..2 * n).map(|j| syndrome_of(1u64 << j)).collect();

        let gp = code.generators().swap_pairs();
        let pure_errors = (0..n)
            .map(|i| {
                let x = gp.solve(&BitString::unit(n, i))?.expect("G P has full row rank");
                Ok(x.as_word().expect("one word"))
            })
            .collect::<Result<Vec<u64>>>()?;

        let classes = ensemble::sorted_type_classes(p, n)?;
        let mut acc = 0u128;
        let class_cumulative = classes
            .iter()
            .map(|c| {
                acc = acc.saturating_add(c.multiplicity);
                acc
            })
            .collect();
        let class_log2 = classes.iter().map(|c| c.log2_prob).collect();

        let log2_p = p.log2_table();
        let mut symbol_order: Vec<usize> = p.support().collect();
        symbol_order.sort_by(|&a, &b| log2_p[b].total_cmp(&log2_p[a]).then(a.cmp(&b)));
        let contrib = (0..n)
            .map(|q| {
                let mut row = [0u64; 4];
                for (x, slot) in row.iter_mut().enumerate() {
                    *slot = syndrome_of(symbol_bits(q, x));
                }
                row
            })
            .collect();

        Ok(Self {
            n,
            gens,
            columns,
            pure_errors,
            log2_p,
            tol: TIE_TOLERANCE_PER_QUBIT * n as f64,
            class_log2,
            class_cumulative,
            symbol_order,
            contrib,
            low_weight: None,
        })
    }

    /// Adds a list of all low-weight codewords, found with one sweep over
    /// `C`, for use by [`Self::is_leader`].
    pub fn with_codeword_list(mut self, budget: usize) -> Self {
        let n = self.n;
        let mut histogram = vec![0usize; n + 1];
        self.for_each_codeword(|c| histogram[pauli_weight(c)] += 1);
        let mut max_weight = 0;
        let mut total = 0;
        for (w, &h) in histogram.iter().enumerate().skip(1) {
            if total + h > budget {
                break;
            }
            total += h;
            max_weight = w;
        }
        let mut offsets = vec![0usize; max_weight + 2];
        for w in 1..=max_weight {
            offsets[w + 1] = offsets[w] + histogram[w];
        }
        let mut fill = offsets.clone();
        let mut words = vec![0u64; total];
        self.for_each_codeword(|c| {
            let w = pauli_weight(c);
            if w <= max_weight {
                words[fill[w]] = c;
                fill[w] += 1;
            }
        });
        self.low_weight = Some(LowWeightCodewords { words, offsets, max_weight });
        self
    }

    fn for_each_codeword(&self, mut f: impl FnMut(u64)) {
        let mut c = 0u64;
        for i in 1u64..1 << self.n {
            c ^= self.gens[i.trailing_zeros() as usize];
            f(c);
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn syndrome(&self, w: u64) -> u64 {
        let mut s = 0u64;
        let mut rest = w;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            s ^= self.columns[j];
            rest &= rest - 1;
        }
        s
    }

    #[inline]
    pub fn log2_q(&self, w: u64) -> f64 {
        log2_prob_of_counts(&symbol_counts(w, self.n), &self.log2_p)
    }

    /// Whether label `a` (with `log2 q = la`) is preferred over `b` by the decoder.
    #[inline]
    pub fn beats(&self, a: u64, la: f64, b: u64, lb: f64) -> bool {
        la > lb + self.tol || (la >= lb - self.tol && lex_cmp_word(a, b).is_lt())
    }

    /// Some label with syndrome `a`.
    pub fn coset_representative(&self, a: u64) -> u64 {
        let mut w = 0u64;
        for (i, &d) in self.pure_errors.iter().enumerate() {
            if a >> i & 1 == 1 {
                w ^= d;
            }
        }
        w
    }

    /// The coset leader of syndrome `a`, by Gray-code traversal of `m₀ + C`.
    pub fn leader_of(&self, a: u64) -> (u64, f64) {
        let mut cur = self.coset_representative(a);
        let mut best = (cur, self.log2_q(cur));
        for i in 1u64..1 << self.n {
            cur ^= self.gens[i.trailing_zeros() as usize];
            let l = self.log2_q(cur);
            if self.beats(cur, l, best.0, best.1) {
                best = (cur, l);
            }
        }
        best
    }

    /// Leader test by walking all `2^N` members of `m + C`.
    pub fn is_leader_gray(&self, m: u64) -> bool {
        let lm = self.log2_q(m);
        let mut cur = m;
        for i in 1u64..1 << self.n {
            cur ^= self.gens[i.trailing_zeros() as usize];
            if self.beats(cur, self.log2_q(cur), m, lm) {
                return false;
            }
        }
        true
    }

    /// Number of labels whose probability could tie or exceed `log2 q = lm`.
    pub fn candidates_at_least(&self, lm: f64) -> u128 {
        let floor = lm - self.tol - 1e-9;
        let k = self.class_log2.partition_point(|&l| l >= floor);
        if k == 0 {
            0
        } else {
            self.class_cumulative[k - 1]
        }
    }

    /// Leader test by enumerating only the labels at least as likely as `m`
    /// and checking which share its syndrome.
    pub fn is_leader_candidates(&self, m: u64) -> bool {
        let lm = self.log2_q(m);
        let search = CandidateSearch {
            engine: self,
            m,
            lm,
            target: self.syndrome(m),
            floor: lm - self.tol - 1e-9,
            best_symbol: self.symbol_order.first().map_or(0.0, |&x| self.log2_p[x]),
        };
        !search.any_beats(0, 0.0, 0, 0)
    }

    /// Largest Pauli weight of a codeword `c` with `q_{m+c} >= q_m`: each
    /// qubit in the support of `c` changes `log2 q` by at most the best
    /// change available from the symbol of `m` there.
    pub fn max_beating_weight(&self, m: u64) -> usize {
        let counts = symbol_counts(m, self.n);
        let mut gains: Vec<(f64, u32)> = (0..4)
            .filter(|&x| counts[x] > 0)
            .map(|x| {
                let best = self.symbol_order.iter().filter(|&&y| y != x).map(|&y| self.log2_p[y]).next();
                (best.map_or(f64::NEG_INFINITY, |b| b - self.log2_p[x]), counts[x])
            })
            .collect();
        if gains.iter().any(|g| g.0.is_nan() || g.0 == f64::INFINITY) {
            return self.n;
        }
        gains.sort_by(|a, b| b.0.total_cmp(&a.0));
        let floor = -self.tol - 1e-9;
        let (mut sum, mut weight) = (0.0, 0usize);
        for (g, k) in gains {
            if g >= 0.0 {
                sum += g * k as f64;
                weight += k as usize;
                continue;
            }
            let room = ((sum - floor) / -g).floor();
            let take = (room.max(0.0) as usize).min(k as usize);
            sum += g * take as f64;
            weight += take;
            if take < k as usize {
                break;
            }
        }
        weight
    }

    /// Leader test against the low-weight codeword list; `None` when the
    /// list is absent or too short to decide.
    pub fn is_leader_listed(&self, m: u64) -> Option<bool> {
        let list = self.low_weight.as_ref()?;
        let w = self.max_beating_weight(m);
        if w > list.max_weight {
            return None;
        }
        let lm = self.log2_q(m);
        let end = list.offsets[w + 1];
        Some(!list.words[..end].iter().any(|&c| {
            let other = m ^ c;
            self.beats(other, self.log2_q(other), m, lm)
        }))
    }

    /// Leader test using whichever enumeration is smallest.
    pub fn is_leader(&self, m: u64) -> bool {
        if let Some(leader) = self.is_leader_listed(m) {
            return leader;
        }
        let coset = 1u128 << self.n;
        if self.candidates_at_least(self.log2_q(m)).saturating_mul(4) < coset {
            self.is_leader_candidates(m)
        } else {
            self.is_leader_gray(m)
        }
    }
}

struct CandidateSearch<'a> {
    engine: &'a CosetEngine,
    m: u64,
    lm: f64,
    target: u64,
    floor: f64,
    best_symbol: f64,
}

impl CandidateSearch<'_> {
    fn any_beats(&self, q: usize, partial: f64, syn: u64, word: u64) -> bool {
        let e = self.engine;
        if q == e.n {
            return syn == self.target && word != self.m && e.beats(word, e.log2_q(word), self.m, self.lm);
        }
        let rest = (e.n - q - 1) as f64 * self.best_symbol;
        for &x in &e.symbol_order {
            let l = partial + e.log2_p[x];
            if l + rest < self.floor {
                break;
            }
            if self.any_beats(q + 1, l, syn ^ e.contrib[q][x], word | symbol_bits(q, x)) {
                return true;
            }
        }
        false
    }
}

/// Full syndrome → coset-leader table, built by sweeping all `4^N` labels.
#[derive(Clone, Debug)]
pub struct LeaderTable {
    leaders: Vec<u64>,
    log2_q: Vec<f64>,
}

impl LeaderTable {
    pub fn build(engine: &CosetEngine) -> Result<Self> {
        let n = engine.n;
        if n > TABLE_MAX_QUBITS {
            return Err(Error::QubitsOutOfRange { n, min: 1, max: TABLE_MAX_QUBITS });
        }
        let mut leaders = vec![0u64; 1 << n];
        let mut log2_q = vec![f64::NEG_INFINITY; 1 << n];
        let mut seen = vec![false; 1 << n];
        let (mut w, mut syn) = (0u64, 0u64);
        for i in 0u64..1 << (2 * n) {
            if i > 0 {
                let j = i.trailing_zeros() as usize;
                w ^= 1 << j;
                syn ^= engine.columns[j];
            }
            let l = engine.log2_q(w);
            let s = syn as usize;
            if !seen[s] || engine.beats(w, l, leaders[s], log2_q[s]) {
                seen[s] = true;
                leaders[s] = w;
                log2_q[s] = l;
            }
        }
        Ok(Self { leaders, log2_q })
    }

    pub fn leader(&self, syndrome: u64) -> u64 {
        self.leaders[syndrome as usize]
    }

    /// `Σ_a q_{leader(a)}`, accumulated in syndrome order.
    pub fn success_probability(&self) -> f64 {
        self.log2_q.iter().map(|l| l.exp2()).sum()
    }
}

fn engine_for(code: &SelfDualCode, p: &ProbVec4) -> Result<CosetEngine> {
    CosetEngine::new(code, p)
}

/// `argmax { q_m : G P m = a }`, ties to the lexicographically smallest label.
pub fn coset_leader(code: &SelfDualCode, a: &BitString, p: &ProbVec4) -> Result<BitString> {
    let n = code.n_qubits();
    if a.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: a.len() });
    }
    let engine = engine_for(code, p)?;
    let (leader, _) = engine.leader_of(a.as_word().expect("N <= 32"));
    Ok(BitString::from_word(leader, 2 * n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// Success probability `η` of the protocol for one code.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecoderResult {
    pub code: SelfDualCode,
    pub eta: f64,
    pub method: Method,
    /// Zero for exact evaluation.
    pub stderr: f64,
    pub n_samples: u64,
    pub seed: Option<u64>,
}

impl DecoderResult {
    /// Normal-approximation 95% interval `η ± 1.96·stderr`.
    pub fn confidence_interval(&self) -> (f64, f64) {
        (self.eta - 1.96 * self.stderr, self.eta + 1.96 * self.stderr)
    }
}

/// Exact `η` by sweeping all `4^N` labels; `N <= 12`.
pub fn eta_exact(code: &SelfDualCode, p: &ProbVec4) -> Result<DecoderResult> {
    let n = code.n_qubits();
    if n > EXACT_MAX_QUBITS {
        return Err(Error::QubitsOutOfRange { n, min: 1, max: EXACT_MAX_QUBITS });
    }
    let table = LeaderTable::build(&engine_for(code, p)?)?;
    Ok(DecoderResult {
        code: code.clone(),
        eta: table.success_probability().min(1.0),
        method: Method::Exact,
        stderr: 0.0,
        n_samples: 0,
        seed: None,
    })
}

/// Counts successes of `trial` over `n` draws split into fixed chunks, one
/// random stream per chunk, so the total is independent of the thread count.
fn chunked_count<F>(n: u64, seed: u64, domain: u64, trial: F) -> u64
where
    F: Fn(&mut StreamRng) -> bool + Sync,
{
    let chunks = n.div_ceil(CHUNK as u64);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, domain, c);
            let len = (n - c * CHUNK as u64).min(CHUNK as u64);
            (0..len).filter(|_| trial(&mut r)).count() as u64
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum()
}

fn binomial_stderr(rate: f64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        (rate * (1.0 - rate) / n as f64).sqrt()
    }
}

/// Monte-Carlo estimate of `η`: draw `m ~ q` and count how often `m` is the
/// leader of its coset.
pub fn eta_mc(code: &SelfDualCode, p: &ProbVec4, n_samples: u64, seed: u64) -> Result<DecoderResult> {
    let n = code.n_qubits();
    if n > MC_MAX_QUBITS {
        return Err(Error::QubitsOutOfRange { n, min: 1, max: MC_MAX_QUBITS });
    }
    if n_samples == 0 {
        return Err(Error::Precondition("eta_mc needs at least one sample".into()));
    }
    let engine = engine_for(code, p)?.with_codeword_list(CODEWORD_LIST_BUDGET);
    let sampler = PauliSampler::new(p, n);
    let wins = chunked_count(n_samples, seed, domain::MC_SAMPLES, |r| engine.is_leader(sampler.sample(r)));
    let eta = wins as f64 / n_samples as f64;
    Ok(DecoderResult {
        code: code.clone(),
        eta,
        method: Method::MonteCarlo,
        stderr: binomial_stderr(eta, n_samples),
        n_samples,
        seed: Some(seed),
    })
}

/// Evaluation budget for [`code_search`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub trials: usize,
    /// Monte-Carlo samples per candidate when `N > 12`.
    pub screen_samples: u64,
    /// Fresh samples for re-scoring the winning candidate when `N > 12`.
    pub final_samples: u64,
}

impl SearchBudget {
    pub fn new(trials: usize) -> Self {
        Self { trials, screen_samples: 200, final_samples: 2000 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchResult {
    /// The winning code, scored exactly or on fresh samples.
    pub best: DecoderResult,
    pub best_trial: usize,
    /// Per-trial screening scores in trial order.
    pub trial_scores: Vec<f64>,
    pub trial_stderrs: Vec<f64>,
}

impl SearchResult {
    pub fn mean_score(&self) -> f64 {
        self.trial_scores.iter().sum::<f64>() / self.trial_scores.len() as f64
    }

    /// Standard error of the mean screening score, combining code-to-code
    /// spread and the per-code sampling error.
    pub fn mean_score_stderr(&self) -> f64 {
        let k = self.trial_scores.len() as f64;
        let mean = self.mean_score();
        let spread =
            if k > 1.0 { self.trial_scores.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0) } else { 0.0 };
        let sampling = self.trial_stderrs.iter().map(|s| s * s).sum::<f64>() / (k * k);
        (spread / k + sampling).sqrt()
    }
}

/// Random-coding search: sample `trials` codes uniformly, keep the best.
///
/// Candidates are scored with [`eta_exact`] for `N <= 12` and with
/// [`eta_mc`] otherwise; a Monte-Carlo winner is then re-scored on an
/// independent stream so its reported estimate is unbiased.
pub fn code_search(p: &ProbVec4, n: usize, budget: SearchBudget, seed: u64) -> Result<SearchResult> {
    if budget.trials == 0 {
        return Err(Error::Precondition("code_search needs at least one trial".into()));
    }
    let exact = n <= EXACT_MAX_QUBITS;
    let scored = (0..budget.trials)
        .into_par_iter()
        .map(|t| {
            let code = SelfDualCode::sample_uniform(n, &mut rng::stream(seed, domain::CODE_SAMPLE, t as u64))?;
            if exact {
                eta_exact(&code, p)
            } else {
                eta_mc(&code, p, budget.screen_samples, rng::child_seed(seed, domain::SEARCH_SCREEN, t as u64))
            }
        })
        .collect::<Result<Vec<DecoderResult>>>()?;

    let best_trial = scored.iter().enumerate().fold(0, |best, (i, r)| if r.eta > scored[best].eta { i } else { best });
    let trial_scores = scored.iter().map(|r| r.eta).collect();
    let trial_stderrs = scored.iter().map(|r| r.stderr).collect();
    let best = if exact {
        scored[best_trial].clone()
    } else {
        eta_mc(&scored[best_trial].code, p, budget.final_samples, rng::child_seed(seed, domain::SEARCH_FINAL, 0))?
    };
    Ok(SearchResult { best, best_trial, trial_scores, trial_stderrs })
}

/// Expected-failure bound for a uniformly random code:
/// `2^{N(H + ε - 1)} + 2 exp(-2 ε² N / Δ²)`.
pub fn failure_bound(p: &ProbVec4, n: usize, epsilon: f64) -> Result<f64> {
    let params = TailParams::new(p, epsilon)?;
    Ok((n as f64 * (entropy(p) + epsilon - 1.0)).exp2() + aep_tail_bound(&params, n))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameOptions {
    /// Also draw Alice's outcome `a` uniformly and log it. The win predicate
    /// does not depend on it.
    pub sample_alice_outcome: bool,
}

/// Empirical result of the repeated discrimination game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSimulation {
    pub trials: u64,
    pub wins: u64,
    pub win_rate: f64,
    pub stderr: f64,
    pub seed: u64,
}

/// Plays `trials` rounds of the `N`-fold game: the referee draws `m ~ q`,
/// Bob reads the syndrome, guesses its coset leader, and wins iff the guess
/// equals `m`.
pub fn game_simulate(
    p: &ProbVec4,
    code: &SelfDualCode,
    trials: u64,
    seed: u64,
    options: GameOptions,
) -> Result<GameSimulation> {
    let n = code.n_qubits();
    if trials == 0 {
        return Err(Error::Precondition("game_simulate needs at least one trial".into()));
    }
    let engine = engine_for(code, p)?;
    let (engine, table) = if n <= TABLE_MAX_QUBITS {
        let table = LeaderTable::build(&engine)?;
        (engine, Some(table))
    } else {
        (engine.with_codeword_list(CODEWORD_LIST_BUDGET), None)
    };
    let sampler = PauliSampler::new(p, n);
    let wins = chunked_count(trials, seed, domain::GAME, |r| {
        let m = sampler.sample(r);
        if options.sample_alice_outcome {
            let a: u64 = r.random::<u64>() & ((1u64 << n) - 1);
            log::trace!("alice outcome {a:#x}");
        }
        match &table {
            Some(t) => t.leader(engine.syndrome(m)) == m,
            None => engine.is_leader(m),
        }
    });
    let win_rate = wins as f64 / trials as f64;
    Ok(GameSimulation { trials, wins, win_rate, stderr: binomial_stderr(win_rate, trials), seed })
}

/// Single-round versus repeated-game winning probabilities.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameReport {
    pub p: ProbVec4,
    pub n: usize,
    /// `χ⁽¹⁾ = γ⁽¹⁾(p)`.
    pub gamma1: f64,
    /// Lower bound on `χ⁽ᴺ⁾` from the best code found.
    pub eta_best: f64,
    pub eta_stderr: f64,
    pub eta_method: Method,
    pub eta_ci95: (f64, f64),
    /// Mean screening score over all sampled codes.
    pub eta_mean: f64,
    pub eta_mean_stderr: f64,
    /// Upper bound on `χ⁽ᴺ⁾` (top-`2^N` mass).
    pub upper_bound: f64,
    pub counterexample_flag: bool,
    pub best_code: SelfDualCode,
    pub search: SearchBudget,
    pub seed: u64,
}

pub fn chi_report(p: &ProbVec4, n: usize, budget: SearchBudget, seed: u64) -> Result<GameReport> {
    let gamma1 = gamma1_single(p);
    let search = code_search(p, n, budget, seed)?;
    let (eta_mean, eta_mean_stderr) = (search.mean_score(), search.mean_score_stderr());
    let best = search.best;
    Ok(GameReport {
        p: *p,
        n,
        gamma1,
        eta_best: best.eta,
        eta_stderr: best.stderr,
        eta_method: best.method,
        eta_ci95: best.confidence_interval(),
        eta_mean,
        eta_mean_stderr,
        upper_bound: gamma_upper_bound(p, n)?,
        counterexample_flag: best.eta > gamma1 && gamma1 < 1.0 - 1e-9,
        best_code: best.code,
        search: budget,
        seed,
    })
}
