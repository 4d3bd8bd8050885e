//! Packed-bit linear algebra over GF(2) and the symplectic form on F₂^{2N}.
//!
//! Bits are packed little-endian into `u64` words: bit `i` lives in word
//! `i / 64` at position `i % 64`. A Pauli label on `N` qubits is a string of
//! `2N` bits where qubit `n` owns the adjacent pair `(2n, 2n + 1)` as
//! `(Z-bit, X-bit)`. With that layout the pair-swap matrix `P` is a local
//! exchange of neighbouring bits, and the symplectic product is
//! `u ⊙ v = uᵀ P v`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Mask selecting the even (Z) bit of every qubit pair in a word.
pub const Z_MASK: u64 = 0x5555_5555_5555_5555;
/// Mask selecting the odd (X) bit of every qubit pair in a word.
pub const X_MASK: u64 = 0xAAAA_AAAA_AAAA_AAAA;

/// Applies the pair-swap `P` to a single packed word.
#[inline]
pub fn swap_pairs_word(w: u64) -> u64 {
    ((w & Z_MASK) << 1) | ((w & X_MASK) >> 1)
}

/// Symplectic product of two single-word Pauli labels.
#[inline]
pub fn symplectic_word(u: u64, v: u64) -> bool {
    (u & swap_pairs_word(v)).count_ones() & 1 == 1
}

/// Lexicographic order on bit strings read from bit 0 upwards, with 0 < 1.
#[inline]
pub fn lex_cmp_word(a: u64, b: u64) -> Ordering {
    let d = a ^ b;
    if d == 0 {
        Ordering::Equal
    } else if a & (d & d.wrapping_neg()) == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    /// Unit vector with bit `i` set.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    /// Builds a bit string from a slice of 0/1 values, bit 0 first.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            assert!(b <= 1, "bit values must be 0 or 1");
            v.set(i, b == 1);
        }
        v
    }

    /// Builds a bit string of length `len <= 64` from the low bits of `word`.
    pub fn from_word(word: u64, len: usize) -> Self {
        assert!(len <= 64, "from_word supports at most 64 bits");
        let word = if len == 64 { word } else { word & ((1u64 << len) - 1) };
        Self { words: if len == 0 { vec![] } else { vec![word] }, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The single packed word, if the string fits in one.
    pub fn as_word(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, &w)| w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    fn check_len(&self, other: &Self) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch { expected: self.len, actual: other.len });
        }
        Ok(())
    }

    /// XOR-assigns `other` into `self`.
    pub fn xor_assign(&mut self, other: &Self) -> Result<()> {
        self.check_len(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Standard inner product `Σ uᵢ vᵢ mod 2`.
    pub fn dot(&self, other: &Self) -> Result<bool> {
        self.check_len(other)?;
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        Ok(ones & 1 == 1)
    }

    /// `P · self`: swaps the two bits of every qubit pair.
    pub fn swap_pairs(&self) -> Self {
        assert!(self.len.is_multiple_of(2), "pair swap needs an even length");
        Self { words: self.words.iter().map(|&w| swap_pairs_word(w)).collect(), len: self.len }
    }

    /// Lowercase hex of the integer `Σ bitᵢ 2ⁱ`, using `ceil(len / 4)` digits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let mut nib = 0u32;
                for k in 0..4 {
                    let i = 4 * d + k;
                    if i < self.len && self.get(i) {
                        nib |= 1 << k;
                    }
                }
                char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    /// Parses the hex form produced by [`BitString::to_hex`].
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex_trim = hex.strip_prefix("0x").unwrap_or(hex);
        if hex_trim.is_empty() {
            return Err(Error::InvalidHex(hex.to_string()));
        }
        let mut v = Self::zeros(len);
        for (d, c) in hex_trim.chars().rev().enumerate() {
            let nib =
                c.to_digit(16).filter(|_| !c.is_ascii_uppercase()).ok_or_else(|| Error::InvalidHex(hex.to_string()))?;
            for k in 0..4 {
                if nib >> k & 1 == 1 {
                    let i = 4 * d + k;
                    if i >= len {
                        return Err(Error::HexOverflow { hex: hex.to_string(), len });
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order, bit 0 first. Shorter strings sort first.
impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            for (a, b) in self.words.iter().zip(&other.words) {
                match lex_cmp_word(*a, *b) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

/// Symplectic product `uᵀ P v = Σₙ (u_Z(n) v_X(n) + u_X(n) v_Z(n)) mod 2`.
pub fn symplectic_product(u: &BitString, v: &BitString) -> Result<bool> {
    u.check_len(v)?;
    if !u.len.is_multiple_of(2) {
        return Err(Error::Precondition(format!("symplectic product needs an even length, got {}", u.len)));
    }
    let ones: u32 = u.words.iter().zip(&v.words).map(|(&a, &b)| (a & swap_pairs_word(b)).count_ones()).sum();
    Ok(ones & 1 == 1)
}

/// A dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Gf2Matrix {
    rows: Vec<BitString>,
    n_cols: usize,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    /// Nonzero rows of the reduced matrix, in pivot order.
    pub matrix: Gf2Matrix,
    pub pivots: Vec<usize>,
}

impl Gf2Matrix {
    pub fn new(rows: Vec<BitString>, n_cols: usize) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::RaggedRows);
        }
        Ok(Self { rows, n_cols })
    }

    /// Builds a matrix from rows, taking the width from the first row.
    pub fn from_rows(rows: Vec<BitString>) -> Result<Self> {
        let n_cols = rows.first().map_or(0, BitString::len);
        Self::new(rows, n_cols)
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self { rows: vec![BitString::zeros(n_cols); n_rows], n_cols }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: (0..n).map(|i| BitString::unit(n, i)).collect(), n_cols: n }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[BitString] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitString {
        &self.rows[i]
    }

    pub fn into_rows(self) -> Vec<BitString> {
        self.rows
    }

    /// `M · P`: the pair swap applied to every row.
    pub fn swap_pairs(&self) -> Self {
        Self { rows: self.rows.iter().map(BitString::swap_pairs).collect(), n_cols: self.n_cols }
    }

    /// Reduced row echelon form by Gauss–Jordan elimination; the pivot of each
    /// step is the lowest-index remaining row with a bit in the current column.
    pub fn echelon(&self) -> Echelon {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.n_cols {
            if r == rows.len() {
                break;
            }
            let Some(p) = (r..rows.len()).find(|&i| rows[i].get(col)) else {
                continue;
            };
            rows.swap(r, p);
            let pivot_row = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    for (a, b) in row.words.iter_mut().zip(&pivot_row.words) {
                        *a ^= b;
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        rows.truncate(r);
        Echelon { matrix: Self { rows, n_cols: self.n_cols }, pivots }
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{x : M x = 0}`, one vector per free column.
    pub fn kernel_basis(&self) -> Gf2Matrix {
        let Echelon { matrix, pivots } = self.echelon();
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let basis = (0..self.n_cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = BitString::unit(self.n_cols, free);
                for (row, &p) in matrix.rows.iter().zip(&pivots) {
                    if row.get(free) {
                        x.set(p, true);
                    }
                }
                x
            })
            .collect();
        Gf2Matrix { rows: basis, n_cols: self.n_cols }
    }

    pub fn mat_vec(&self, x: &BitString) -> Result<BitString> {
        if x.len() != self.n_cols {
            return Err(Error::LengthMismatch { expected: self.n_cols, actual: x.len() });
        }
        let mut out = BitString::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            if row.dot(x)? {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    /// Some solution of `M x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &BitString) -> Result<Option<BitString>> {
        if b.len() != self.rows.len() {
            return Err(Error::LengthMismatch { expected: self.rows.len(), actual: b.len() });
        }
        // Eliminate on [M | b] with b appended as an extra column.
        let augmented: Vec<BitString> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = BitString::zeros(self.n_cols + 1);
                for c in 0..self.n_cols {
                    if row.get(c) {
                        r.set(c, true);
                    }
                }
                r.set(self.n_cols, b.get(i));
                r
            })
            .collect();
        let Echelon { matrix, pivots } = Gf2Matrix { rows: augmented, n_cols: self.n_cols + 1 }.echelon();
        if pivots.last() == Some(&self.n_cols) {
            return Ok(None);
        }
        let mut x = BitString::zeros(self.n_cols);
        for (row, &p) in matrix.rows.iter().zip(&pivots) {
            if row.get(self.n_cols) {
                x.set(p, true);
            }
        }
        Ok(Some(x))
    }

    /// Whether `v` lies in the row space.
    pub fn row_space_contains(&self, v: &BitString) -> Result<bool> {
        if v.len() != self.n_cols {
            return Err(Error::LengthMismatch { expected: self.n_cols, actual: v.len() });
        }
        let mut rows = self.rows.clone();
        rows.push(v.clone());
        Ok(Gf2Matrix { rows, n_cols: self.n_cols }.rank() == self.rank())
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bs(bits: &[u8]) -> BitString {
        BitString::from_bits(bits)
    }

    #[test]
    fn symplectic_examples() {
        assert!(symplectic_product(&bs(&[1, 0]), &bs(&[0, 1])).unwrap());
        assert!(!symplectic_product(&bs(&[1, 1, 0, 0]), &bs(&[0, 0, 1, 1])).unwrap());
        let u = bs(&[1, 1, 0, 1, 1, 0]);
        assert!(!symplectic_product(&u, &u).unwrap());
    }

    #[test]
    fn symplectic_length_mismatch() {
        let err = symplectic_product(&bs(&[1, 0]), &bs(&[1, 0, 0, 0])).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 2, actual: 4 });
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Gf2Matrix::identity(5).rank(), 5);
        assert_eq!(Gf2Matrix::zeros(3, 4).rank(), 0);
        let m = Gf2Matrix::from_rows(vec![bs(&[1, 1, 0, 0]), bs(&[1, 1, 0, 0])]).unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(Gf2Matrix::identity(4).kernel_basis().n_rows(), 0);
        assert_eq!(Gf2Matrix::zeros(2, 4).kernel_basis().n_rows(), 4);
        let m = Gf2Matrix::from_rows(vec![bs(&[1, 1, 0, 0])]).unwrap();
        let k = m.kernel_basis();
        assert_eq!(k.n_rows(), 3);
        assert_eq!(k.rank(), 3);
        for r in k.rows() {
            assert_eq!(r.get(0), r.get(1));
        }
    }

    #[test]
    fn mat_vec_examples() {
        let x = bs(&[1, 1, 1, 0]);
        assert_eq!(Gf2Matrix::identity(4).mat_vec(&x).unwrap(), x);
        assert!(Gf2Matrix::zeros(3, 4).mat_vec(&x).unwrap().is_zero());
        let m = Gf2Matrix::from_rows(vec![bs(&[1, 0, 1, 0]), bs(&[0, 1, 0, 1])]).unwrap();
        assert_eq!(m.mat_vec(&x).unwrap(), bs(&[0, 1]));
        assert!(m.mat_vec(&bs(&[1, 0])).is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert_eq!(Gf2Matrix::from_rows(vec![bs(&[1, 0]), bs(&[1])]), Err(Error::RaggedRows));
    }

    #[test]
    fn hex_format() {
        assert_eq!(bs(&[1, 0]).to_hex(), "1");
        assert_eq!(bs(&[0, 1]).to_hex(), "2");
        assert_eq!(bs(&[0, 0, 0, 0, 1, 0, 1]).to_hex(), "50");
        assert_eq!(BitString::from_hex("50", 7).unwrap(), bs(&[0, 0, 0, 0, 1, 0, 1]));
        assert!(matches!(BitString::from_hex("80", 7), Err(Error::HexOverflow { .. })));
        assert!(matches!(BitString::from_hex("zz", 8), Err(Error::InvalidHex(_))));
        assert!(matches!(BitString::from_hex("AB", 8), Err(Error::InvalidHex(_))));
    }

    #[test]
    fn lex_order_reads_bit_zero_first() {
        // (1,0) vs (0,1): bit 0 decides.
        assert!(bs(&[0, 1]) < bs(&[1, 0]));
        assert_eq!(lex_cmp_word(0b10, 0b01), Ordering::Less);
        assert_eq!(lex_cmp_word(0b11, 0b11), Ordering::Equal);
    }

    #[test]
    fn solve_finds_solution_or_reports_inconsistency() {
        let m = Gf2Matrix::from_rows(vec![bs(&[1, 1, 0]), bs(&[0, 1, 1])]).unwrap();
        let b = bs(&[1, 0]);
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.mat_vec(&x).unwrap(), b);
        let singular = Gf2Matrix::from_rows(vec![bs(&[1, 1]), bs(&[1, 1])]).unwrap();
        assert_eq!(singular.solve(&bs(&[1, 0])).unwrap(), None);
    }

    fn arb_bits(len: usize) -> impl Strategy<Value = BitString> {
        proptest::collection::vec(0u8..2, len).prop_map(|v| BitString::from_bits(&v))
    }

    fn arb_matrix() -> impl Strategy<Value = Gf2Matrix> {
        (1usize..8, 1usize..9).prop_flat_map(|(r, half)| {
            proptest::collection::vec(arb_bits(2 * half), r).prop_map(|rows| Gf2Matrix::from_rows(rows).unwrap())
        })
    }

    proptest! {
        #[test]
        fn symplectic_is_symmetric_alternating_bilinear(
            (u, v, w) in (1usize..40).prop_flat_map(|n| (arb_bits(2 * n), arb_bits(2 * n), arb_bits(2 * n)))
        ) {
            prop_assert_eq!(symplectic_product(&u, &v).unwrap(), symplectic_product(&v, &u).unwrap());
            prop_assert!(!symplectic_product(&u, &u).unwrap());
            let uw = u.xor(&w).unwrap();
            prop_assert_eq!(
                symplectic_product(&uw, &v).unwrap(),
                symplectic_product(&u, &v).unwrap() ^ symplectic_product(&w, &v).unwrap()
            );
        }

        #[test]
        fn rank_invariant_under_pair_swap(m in arb_matrix()) {
            prop_assert_eq!(m.rank(), m.swap_pairs().rank());
        }

        #[test]
        fn kernel_is_annihilated_and_has_full_dimension(m in arb_matrix()) {
            let k = m.kernel_basis();
            for r in k.rows() {
                prop_assert!(m.mat_vec(r).unwrap().is_zero());
            }
            prop_assert_eq!(k.rank(), m.n_cols() - m.rank());
            prop_assert_eq!(k.n_rows(), m.n_cols() - m.rank());
        }

        #[test]
        fn hex_round_trip(v in (1usize..130).prop_flat_map(arb_bits)) {
            prop_assert_eq!(BitString::from_hex(&v.to_hex(), v.len()).unwrap(), v);
        }
    }
}
