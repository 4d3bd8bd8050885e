//! Symplectic self-dual subspaces `C = C^⊥ ⊂ F₂^{2N}`: construction, uniform
//! sampling, counting and syndromes.
//!
//! A code is given by an `N × 2N` generator matrix `G` whose rows `s(1)…s(N)`
//! are independent and pairwise symplectic-orthogonal. The stabilizer generators
//! are `g_n = σ_{s(n)}`. The syndrome of a Pauli label `m` is `G P m`, whose
//! `i`-th bit is `s(i) ⊙ m`; it vanishes exactly on `C`.

use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{symplectic_product, BitString, Gf2Matrix};

/// Largest `N` accepted by [`enumerate_all`].
pub const ENUMERATE_MAX_QUBITS: usize = 3;

/// A stabilizer code whose stabilizer group is a symplectic self-dual subspace.
///
/// Equality and hashing use the reduced row echelon form of `G`, so two codes
/// built from different bases of the same subspace compare equal.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(into = "CodeFile", try_from = "CodeFile")]
pub struct SelfDualCode {
    n_qubits: usize,
    generators: Gf2Matrix,
    canonical: Gf2Matrix,
}

impl SelfDualCode {
    /// Validates `generators` as a self-dual basis on `n_qubits` qubits.
    pub fn new(n_qubits: usize, generators: Gf2Matrix) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::QubitsOutOfRange { n: 0, min: 1, max: usize::MAX });
        }
        if generators.n_cols() != 2 * n_qubits {
            return Err(Error::LengthMismatch { expected: 2 * n_qubits, actual: generators.n_cols() });
        }
        if generators.n_rows() != n_qubits {
            return Err(Error::WrongGeneratorCount { expected: n_qubits, actual: generators.n_rows() });
        }
        let rows = generators.rows();
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                if symplectic_product(&rows[i], &rows[j])? {
                    return Err(Error::NotSelfDual(format!("generators {i} and {j} anticommute")));
                }
            }
        }
        let canonical = generators.echelon().matrix;
        if canonical.n_rows() != n_qubits {
            return Err(Error::NotSelfDual(format!("generators have rank {} < {n_qubits}", canonical.n_rows())));
        }
        Ok(Self { n_qubits, generators, canonical })
    }

    pub fn from_rows(rows: Vec<BitString>) -> Result<Self> {
        let n = rows.len();
        Self::new(n, Gf2Matrix::new(rows, 2 * n)?)
    }

    /// Runs the incremental construction with the given choices, requiring each
    /// `s(n+1)` to lie in `C_n^⊥ \ C_n`.
    pub fn build_incremental(choices: &[BitString]) -> Result<Self> {
        let Some(first) = choices.first() else {
            return Err(Error::WrongGeneratorCount { expected: 1, actual: 0 });
        };
        if first.len() % 2 != 0 || first.is_empty() {
            return Err(Error::Precondition(format!("choices must have even positive length, got {}", first.len())));
        }
        let n_qubits = first.len() / 2;
        let mut span = Gf2Matrix::new(vec![], 2 * n_qubits)?;
        for (index, s) in choices.iter().enumerate() {
            if s.len() != 2 * n_qubits {
                return Err(Error::LengthMismatch { expected: 2 * n_qubits, actual: s.len() });
            }
            for prev in span.rows() {
                if symplectic_product(prev, s)? {
                    return Err(Error::ChoiceNotInDual { index });
                }
            }
            if span.row_space_contains(s)? {
                return Err(Error::ChoiceAlreadyInSpan { index });
            }
            let mut rows = span.into_rows();
            rows.push(s.clone());
            span = Gf2Matrix::new(rows, 2 * n_qubits)?;
        }
        if span.n_rows() != n_qubits {
            return Err(Error::WrongGeneratorCount { expected: n_qubits, actual: span.n_rows() });
        }
        Self::new(n_qubits, span)
    }

    /// Draws a code uniformly from all self-dual subspaces of `F₂^{2N}`.
    ///
    /// Each step draws `s(n+1)` uniformly from `C_n^⊥` (a random combination of
    /// a kernel basis of `G_n P`) and rejects draws that fall in `C_n`. Every
    /// ordered basis is then equally likely, and every subspace has the same
    /// number of ordered bases.
    pub fn sample_uniform<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::QubitsOutOfRange { n: 0, min: 1, max: usize::MAX });
        }
        let width = 2 * n_qubits;
        let mut rows: Vec<BitString> = Vec::with_capacity(n_qubits);
        while rows.len() < n_qubits {
            let current = Gf2Matrix::new(rows.clone(), width)?;
            let dual = current.swap_pairs().kernel_basis();
            let choice = loop {
                let mut v = BitString::zeros(width);
                for b in dual.rows() {
                    if rng.random::<bool>() {
                        v.xor_assign(b)?;
                    }
                }
                if !current.row_space_contains(&v)? {
                    break v;
                }
            };
            rows.push(choice);
        }
        Self::new(n_qubits, Gf2Matrix::new(rows, width)?)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// The generator matrix `G` in the basis it was built with.
    pub fn generators(&self) -> &Gf2Matrix {
        &self.generators
    }

    /// Reduced row echelon form of `G`, the code's canonical identity.
    pub fn canonical(&self) -> &Gf2Matrix {
        &self.canonical
    }

    /// The same code re-expressed in its canonical basis.
    pub fn to_canonical_basis(&self) -> Self {
        Self { n_qubits: self.n_qubits, generators: self.canonical.clone(), canonical: self.canonical.clone() }
    }

    /// `G P m`.
    pub fn syndrome(&self, m: &BitString) -> Result<BitString> {
        if m.len() != 2 * self.n_qubits {
            return Err(Error::LengthMismatch { expected: 2 * self.n_qubits, actual: m.len() });
        }
        let mut out = BitString::zeros(self.n_qubits);
        for (i, s) in self.generators.rows().iter().enumerate() {
            if symplectic_product(s, m)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Membership in `C`, via a zero syndrome (`ker(GP) = C^⊥ = C`).
    pub fn contains(&self, c: &BitString) -> Result<bool> {
        Ok(self.syndrome(c)?.is_zero())
    }

    /// Generator rows packed into single words; requires `N <= 32`.
    pub fn generator_words(&self) -> Option<Vec<u64>> {
        self.generators.rows().iter().map(BitString::as_word).collect()
    }

    pub fn to_file(&self) -> CodeFile {
        CodeFile { n_qubits: self.n_qubits, generators: self.canonical.rows().iter().map(BitString::to_hex).collect() }
    }

    pub fn from_file(file: &CodeFile) -> Result<Self> {
        let rows =
            file.generators.iter().map(|h| BitString::from_hex(h, 2 * file.n_qubits)).collect::<Result<Vec<_>>>()?;
        Self::new(file.n_qubits, Gf2Matrix::new(rows, 2 * file.n_qubits)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("code file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: CodeFile = serde_json::from_str(text).map_err(|e| Error::CodeFile(e.to_string()))?;
        Self::from_file(&file)
    }
}

impl PartialEq for SelfDualCode {
    fn eq(&self, other: &Self) -> bool {
        self.canonical == other.canonical
    }
}

impl Eq for SelfDualCode {}

impl Hash for SelfDualCode {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical.hash(state);
    }
}

impl PartialOrd for SelfDualCode {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SelfDualCode {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.canonical.rows().cmp(other.canonical.rows())
    }
}

impl From<SelfDualCode> for CodeFile {
    fn from(code: SelfDualCode) -> Self {
        code.to_file()
    }
}

impl TryFrom<CodeFile> for SelfDualCode {
    type Error = Error;
    fn try_from(file: CodeFile) -> Result<Self> {
        Self::from_file(&file)
    }
}

/// On-disk code format: `{"n_qubits": N, "generators": [hex row, ...]}` with
/// rows in canonical (RREF) order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeFile {
    pub n_qubits: usize,
    pub generators: Vec<String>,
}

fn pow2(k: usize) -> BigUint {
    BigUint::one() << k
}

/// Number of symplectic self-dual subspaces of `F₂^{2N}`:
/// `Π_{n<N} (2^{2N-n} - 2^n) / Π_{n<N} (2^N - 2^n)`.
pub fn count_self_dual(n_qubits: usize) -> BigUint {
    assert!(n_qubits >= 1, "count_self_dual needs N >= 1");
    ordered_basis_ratio(n_qubits, 0)
}

/// Number of self-dual subspaces containing a fixed nonzero vector:
/// the same ratio with both products starting at `n = 1`.
pub fn count_containing(n_qubits: usize) -> BigUint {
    assert!(n_qubits >= 1, "count_containing needs N >= 1");
    ordered_basis_ratio(n_qubits, 1)
}

fn ordered_basis_ratio(n: usize, start: usize) -> BigUint {
    let mut families = BigUint::one();
    let mut bases = BigUint::one();
    for k in start..n {
        families *= pow2(2 * n - k) - pow2(k);
        bases *= pow2(n) - pow2(k);
    }
    debug_assert!((&families % &bases).is_zero());
    families / bases
}

/// `|Ω_c| / |Ω|` as an exact rational.
pub fn containment_ratio(n_qubits: usize) -> BigRational {
    BigRational::new(count_containing(n_qubits).into(), count_self_dual(n_qubits).into())
}

/// Every self-dual subspace for `N <= 3`, sorted by canonical form.
///
/// Brute force over all `N`-subsets of nonzero vectors, independent of the
/// incremental construction.
pub fn enumerate_all(n_qubits: usize) -> Result<Vec<SelfDualCode>> {
    if !(1..=ENUMERATE_MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::QubitsOutOfRange { n: n_qubits, min: 1, max: ENUMERATE_MAX_QUBITS });
    }
    let width = 2 * n_qubits;
    let vectors: Vec<BitString> = (1u64..1 << width).map(|w| BitString::from_word(w, width)).collect();
    let mut found = BTreeSet::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n_qubits);
    fn recurse(
        start: usize,
        n: usize,
        vectors: &[BitString],
        chosen: &mut Vec<usize>,
        found: &mut BTreeSet<SelfDualCode>,
    ) {
        if chosen.len() == n {
            let rows: Vec<BitString> = chosen.iter().map(|&i| vectors[i].clone()).collect();
            if let Ok(code) = SelfDualCode::from_rows(rows) {
                found.insert(code.to_canonical_basis());
            }
            return;
        }
        for i in start..vectors.len() {
            let commutes =
                chosen.iter().all(|&j| !symplectic_product(&vectors[i], &vectors[j]).expect("equal lengths"));
            if commutes {
                chosen.push(i);
                recurse(i + 1, n, vectors, chosen, found);
                chosen.pop();
            }
        }
    }
    recurse(0, n_qubits, &vectors, &mut chosen, &mut found);
    Ok(found.into_iter().collect())
}
