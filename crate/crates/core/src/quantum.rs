//! Dense state-vector checks of the classical reduction for a few qubits.
//!
//! Qubit `n` is tensor factor `n`, with factor 0 the most significant bit of
//! the amplitude index. Bipartite states put all of Alice's qubits before
//! Bob's. States are compared through `|⟨φ|ψ⟩|`, never amplitude-wise.

use num_complex::Complex64;

use crate::discriminator::{CosetEngine, LeaderTable};
use crate::ensemble::{log2_prob_of_counts, symbol_counts, ProbVec4};
use crate::error::{Error, Result};
use crate::gf2::BitString;
use crate::symplectic::SelfDualCode;

/// Largest `N` for [`stabilizer_state`].
pub const STATE_MAX_QUBITS: usize = 6;
/// Largest `N` for the exhaustive checks over all `(a, m)`.
pub const CHECK_MAX_QUBITS: usize = 4;
pub const TOLERANCE: f64 = 1e-9;
const RESTART_NORM: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    amplitudes: Vec<Complex64>,
    n_qubits: usize,
}

impl DenseState {
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self { amplitudes, n_qubits }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::Precondition(format!("{len} amplitudes is not a power of two")));
        }
        Ok(Self { amplitudes, n_qubits: len.trailing_zeros() as usize })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Entry-wise complex conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        Self { amplitudes: self.amplitudes.iter().map(|a| a.conj()).collect(), n_qubits: self.n_qubits }
    }

    /// `|⟨self|other⟩|`, insensitive to global phase.
    pub fn fidelity_amplitude(&self, other: &Self) -> f64 {
        self.inner(other).norm()
    }
}

/// Bit flip mask, phase-flip mask and number of `Y` factors of a Pauli label,
/// in amplitude-index coordinates.
fn pauli_masks(m: u64, n: usize) -> (usize, usize, u32) {
    let (mut xmask, mut zmask, mut ys) = (0usize, 0usize, 0u32);
    for q in 0..n {
        let bit = 1usize << (n - 1 - q);
        let z = m >> (2 * q) & 1 == 1;
        let x = m >> (2 * q + 1) & 1 == 1;
        if x {
            xmask |= bit;
        }
        if z {
            zmask |= bit;
        }
        if x && z {
            ys += 1;
        }
    }
    (xmask, zmask, ys)
}

fn apply_pauli_word(m: u64, psi: &DenseState) -> DenseState {
    let (xmask, zmask, ys) = pauli_masks(m, psi.n_qubits);
    let i_pow =
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, -1.0)]
            [(ys % 4) as usize];
    let mut out = vec![Complex64::new(0.0, 0.0); psi.amplitudes.len()];
    for (j, &amp) in psi.amplitudes.iter().enumerate() {
        let sign = if (j & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        out[j ^ xmask] = amp * i_pow * sign;
    }
    DenseState { amplitudes: out, n_qubits: psi.n_qubits }
}

/// `σ_m |ψ⟩` with `σ₀₀ = I`, `σ₀₁ = X`, `σ₁₀ = Z`, `σ₁₁ = Y` and
/// `Y|x⟩ = (-1)^x i |1-x⟩`.
pub fn apply_pauli(m: &BitString, psi: &DenseState) -> Result<DenseState> {
    let n = psi.n_qubits;
    if m.len() != 2 * n {
        return Err(Error::LengthMismatch { expected: 2 * n, actual: m.len() });
    }
    Ok(apply_pauli_word(m.as_word().expect("N <= 6"), psi))
}

fn check_state_size(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        return Err(Error::QubitsOutOfRange { n, min: 1, max });
    }
    Ok(())
}

fn stabilizer_state_words(gens: &[u64], a: u64, n: usize) -> DenseState {
    for seed in 0..1usize << n {
        let mut psi = DenseState::basis(n, seed);
        for (i, &g) in gens.iter().enumerate() {
            let sign = if a >> i & 1 == 1 { -1.0 } else { 1.0 };
            let flipped = apply_pauli_word(g, &psi);
            for (x, y) in psi.amplitudes.iter_mut().zip(&flipped.amplitudes) {
                *x = (*x + y * sign) * 0.5;
            }
        }
        if psi.norm() >= RESTART_NORM {
            return psi.normalized();
        }
    }
    unreachable!("the stabilized subspace is one-dimensional")
}

/// The state `|ψ_a⟩` with `g_n |ψ_a⟩ = (-1)^{a_n} |ψ_a⟩` for every generator.
pub fn stabilizer_state(code: &SelfDualCode, a: &BitString) -> Result<DenseState> {
    let n = code.n_qubits();
    check_state_size(n, STATE_MAX_QUBITS)?;
    if a.len() != n {
        return Err(Error::LengthMismatch { expected: n, actual: a.len() });
    }
    let gens = code.generator_words().expect("N <= 6");
    Ok(stabilizer_state_words(&gens, a.as_word().expect("N <= 6"), n))
}

/// All `2^N` stabilizer states, indexed by syndrome word.
fn stabilizer_basis(code: &SelfDualCode) -> Vec<DenseState> {
    let n = code.n_qubits();
    let gens = code.generator_words().expect("N <= 6");
    (0..1u64 << n).map(|a| stabilizer_state_words(&gens, a, n)).collect()
}

/// `|⟨ψ_{a + GPm}| σ_m |ψ_a⟩| = 1` for every `a` and `m`.
pub fn verify_lemma1(code: &SelfDualCode) -> Result<bool> {
    let n = code.n_qubits();
    check_state_size(n, CHECK_MAX_QUBITS)?;
    let basis = stabilizer_basis(code);
    let engine = CosetEngine::new(code, &ProbVec4::uniform())?;
    for (a, psi) in basis.iter().enumerate() {
        for m in 0u64..1 << (2 * n) {
            let target = &basis[a ^ engine.syndrome(m) as usize];
            if (target.fidelity_amplitude(&apply_pauli_word(m, psi)) - 1.0).abs() > TOLERANCE {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(I ⊗ σ_m) |Φ₀₀⟩^{⊗N}` with Alice's qubits first.
fn bell_pair_state(m: u64, n: usize) -> Vec<Complex64> {
    let dim = 1usize << n;
    let amp = Complex64::new((-(n as f64) / 2.0).exp2(), 0.0);
    let mut out = vec![Complex64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        let bob = apply_pauli_word(m, &DenseState::basis(n, i));
        for (j, b) in bob.amplitudes.iter().enumerate() {
            out[i * dim + j] = amp * b;
        }
    }
    out
}

/// Projecting Alice onto `|φ_a⟩ = |ψ_a⟩*` leaves Bob with
/// `2^{-N/2} σ_m |ψ_a⟩` up to phase, for every `a` and `m`; averaged over
/// `q = p^{⊗N}`, each outcome `a` then occurs with probability `2^{-N}`.
pub fn bell_reduction_check(code: &SelfDualCode, p: &ProbVec4) -> Result<bool> {
    let n = code.n_qubits();
    check_state_size(n, CHECK_MAX_QUBITS)?;
    let dim = 1usize << n;
    let scale = (-(n as f64) / 2.0).exp2();
    let basis = stabilizer_basis(code);
    let alice: Vec<DenseState> = basis.iter().map(DenseState::conj).collect();
    let log2_p = p.log2_table();
    let mut outcome_prob = vec![0.0f64; dim];
    for m in 0u64..1 << (2 * n) {
        let joint = bell_pair_state(m, n);
        let q = log2_prob_of_counts(&symbol_counts(m, n), &log2_p).exp2();
        for (a, phi) in alice.iter().enumerate() {
            let residual: Vec<Complex64> =
                (0..dim).map(|j| (0..dim).map(|i| phi.amplitudes[i].conj() * joint[i * dim + j]).sum()).collect();
            let residual = DenseState { amplitudes: residual, n_qubits: n };
            let norm = residual.norm();
            if (norm - scale).abs() > TOLERANCE {
                return Ok(false);
            }
            let expected = apply_pauli_word(m, &basis[a]);
            if (expected.fidelity_amplitude(&residual) - scale).abs() > TOLERANCE {
                return Ok(false);
            }
            outcome_prob[a] += q * norm * norm;
        }
    }
    let uniform = 1.0 / dim as f64;
    Ok(outcome_prob.iter().all(|&pa| (pa - uniform).abs() <= TOLERANCE))
}

/// Success probability of Bob measuring in `{|ψ_a⟩}` and guessing the coset
/// leader, computed from dense amplitudes.
pub fn optimal_success_quantum(code: &SelfDualCode, p: &ProbVec4) -> Result<f64> {
    let n = code.n_qubits();
    check_state_size(n, CHECK_MAX_QUBITS)?;
    let basis = stabilizer_basis(code);
    let engine = CosetEngine::new(code, p)?;
    let table = LeaderTable::build(&engine)?;
    let mut total = 0.0;
    for m in 0u64..1 << (2 * n) {
        let syn = engine.syndrome(m);
        if table.leader(syn) != m {
            continue;
        }
        let q = engine.log2_q(m).exp2();
        let overlap = basis[syn as usize].inner(&apply_pauli_word(m, &basis[0])).norm_sqr();
        total += q * overlap;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminator::eta_exact;
    use crate::rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    fn bell_code() -> SelfDualCode {
        SelfDualCode::from_rows(vec![BitString::from_bits(&[1, 0, 1, 0]), BitString::from_bits(&[0, 1, 0, 1])]).unwrap()
    }

    fn z_code() -> SelfDualCode {
        SelfDualCode::from_rows(vec![BitString::from_bits(&[1, 0])]).unwrap()
    }

    fn random_p(r: &mut rng::StreamRng) -> ProbVec4 {
        use rand::Rng;
        let w: [f64; 4] = std::array::from_fn(|_| r.random::<f64>() + 1e-3);
        let s: f64 = w.iter().sum();
        let mut v = w.map(|x| x / s);
        v[3] = 1.0 - v[0] - v[1] - v[2];
        ProbVec4::new(v).unwrap()
    }

    #[test]
    fn apply_pauli_examples() {
        let zero = DenseState::basis(1, 0);
        assert_eq!(apply_pauli(&BitString::zeros(2), &zero).unwrap(), zero);
        let x = apply_pauli(&BitString::from_bits(&[0, 1]), &zero).unwrap();
        assert!(close(x.amplitudes(), &[c(0.0, 0.0), c(1.0, 0.0)]));
        let y = apply_pauli(&BitString::from_bits(&[1, 1]), &zero).unwrap();
        assert!(close(y.amplitudes(), &[c(0.0, 0.0), c(0.0, 1.0)]));
        let y1 = apply_pauli(&BitString::from_bits(&[1, 1]), &DenseState::basis(1, 1)).unwrap();
        assert!(close(y1.amplitudes(), &[c(0.0, -1.0), c(0.0, 0.0)]));
        assert!(apply_pauli(&BitString::zeros(4), &zero).is_err());
    }

    #[test]
    fn apply_pauli_qubit_order() {
        // X on qubit 0 flips the most significant amplitude bit.
        let psi = apply_pauli(&BitString::from_bits(&[0, 1, 0, 0]), &DenseState::basis(2, 0)).unwrap();
        assert_eq!(psi.amplitudes()[2], c(1.0, 0.0));
    }

    #[test]
    fn pauli_is_norm_preserving_involution() {
        let mut r = rng::stream(31, 0, 0);
        use rand::Rng;
        let psi =
            DenseState::from_amplitudes((0..8).map(|_| c(r.random(), r.random())).collect()).unwrap().normalized();
        for m in 0u64..64 {
            let once = apply_pauli_word(m, &psi);
            assert!((once.norm() - 1.0).abs() < 1e-12);
            let twice = apply_pauli_word(m, &once);
            assert!((twice.inner(&psi).norm() - 1.0).abs() < 1e-12);
            assert!((twice.inner(&psi).im).abs() < 1e-12);
        }
    }

    #[test]
    fn stabilizer_state_examples() {
        let z0 = stabilizer_state(&z_code(), &BitString::zeros(1)).unwrap();
        assert!((z0.fidelity_amplitude(&DenseState::basis(1, 0)) - 1.0).abs() < 1e-12);
        let phi = stabilizer_state(&bell_code(), &BitString::zeros(2)).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = DenseState::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        assert!((phi.fidelity_amplitude(&expected) - 1.0).abs() < 1e-12);
        let other = stabilizer_state(&bell_code(), &BitString::from_bits(&[1, 0])).unwrap();
        assert!(phi.inner(&other).norm() < 1e-9);
        let big = SelfDualCode::sample_uniform(7, &mut rng::stream(1, 0, 0)).unwrap();
        assert!(stabilizer_state(&big, &BitString::zeros(7)).is_err());
    }

    #[test]
    fn stabilizer_states_are_eigenstates_and_orthonormal() {
        let mut r = rng::stream(32, 0, 0);
        for n in 1..=STATE_MAX_QUBITS {
            let code = SelfDualCode::sample_uniform(n, &mut r).unwrap();
            let gens = code.generator_words().unwrap();
            let basis = stabilizer_basis(&code);
            for (a, psi) in basis.iter().enumerate() {
                assert!((psi.norm() - 1.0).abs() < 1e-9);
                for (i, &g) in gens.iter().enumerate() {
                    let sign = if a >> i & 1 == 1 { -1.0 } else { 1.0 };
                    let gpsi = apply_pauli_word(g, psi);
                    assert!(gpsi.amplitudes().iter().zip(psi.amplitudes()).all(|(x, y)| (x - y * sign).norm() < 1e-9));
                }
                if n <= CHECK_MAX_QUBITS {
                    for (b, phi) in basis.iter().enumerate() {
                        let expected = if a == b { 1.0 } else { 0.0 };
                        assert!((psi.inner(phi).norm() - expected).abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn paulis_permute_stabilizer_states() {
        assert!(verify_lemma1(&z_code()).unwrap());
        assert!(verify_lemma1(&bell_code()).unwrap());
        let mut r = rng::stream(33, 0, 0);
        for n in 1..=CHECK_MAX_QUBITS {
            for _ in 0..20 {
                assert!(verify_lemma1(&SelfDualCode::sample_uniform(n, &mut r).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn stabilizer_acts_trivially_up_to_phase() {
        let code = bell_code();
        let basis = stabilizer_basis(&code);
        for g in code.generator_words().unwrap() {
            for psi in &basis {
                assert!((psi.fidelity_amplitude(&apply_pauli_word(g, psi)) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bell_reduction_examples() {
        let joint = bell_pair_state(0, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(&joint, &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]));
        let p = ProbVec4::new([0.7, 0.1, 0.1, 0.1]).unwrap();
        assert!(bell_reduction_check(&z_code(), &p).unwrap());
        let mut r = rng::stream(34, 0, 0);
        for n in 1..=3 {
            let code = SelfDualCode::sample_uniform(n, &mut r).unwrap();
            assert!(bell_reduction_check(&code, &random_p(&mut r)).unwrap());
        }
    }

    #[test]
    fn optimal_success_examples() {
        let p = ProbVec4::new([0.7, 0.1, 0.1, 0.1]).unwrap();
        assert!((optimal_success_quantum(&z_code(), &p).unwrap() - 0.8).abs() < 1e-12);
        assert!((optimal_success_quantum(&bell_code(), &ProbVec4::uniform()).unwrap() - 0.25).abs() < 1e-12);
        let certain = ProbVec4::new([1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((optimal_success_quantum(&bell_code(), &certain).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quantum_success_matches_classical() {
        let mut r = rng::stream(35, 0, 0);
        for n in 1..=CHECK_MAX_QUBITS {
            for _ in 0..20 {
                let code = SelfDualCode::sample_uniform(n, &mut r).unwrap();
                let p = random_p(&mut r);
                let quantum = optimal_success_quantum(&code, &p).unwrap();
                assert!((quantum - eta_exact(&code, &p).unwrap().eta).abs() < 1e-9);
            }
        }
    }
}
