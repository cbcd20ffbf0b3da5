//! Fixed-length bit vectors over GF(2).

use std::fmt;
use std::str::FromStr;

use crate::binpoly::BinPolynomial;
use crate::{Error, Result};

const WORD_BITS: usize = 64;

/// A bit vector of fixed length. Position 0 is the leftmost character of the
/// textual form and doubles as the coefficient of `x^0` when the vector is
/// read as a polynomial, so `"101"` means `1 + x^2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    /// All-zero vector of the given length.
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    /// Vector with ones exactly at `positions`.
    pub fn from_support(len: usize, positions: &[usize]) -> Result<Self> {
        let mut v = BitVector::zeros(len);
        for &p in positions {
            if p >= len {
                return Err(Error::LengthMismatch { expected: len, got: p + 1 });
            }
            v.set(p, true);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {} out of range {}", i, self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        let cur = self.get(i);
        self.set(i, !cur);
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Positions of the ones, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                out.push(wi * WORD_BITS + bits.trailing_zeros() as usize);
                bits &= bits - 1;
            }
        }
        out
    }

    /// In-place XOR with a vector of the same length.
    pub fn xor_with(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_with(other);
        out
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() % 2 == 1
    }

    /// Read the vector as a polynomial, dropping trailing zeros.
    pub fn to_poly(&self) -> BinPolynomial {
        BinPolynomial::from_words(&self.words)
    }

    /// Write a polynomial into a vector of length `len`. Fails if the degree
    /// does not fit.
    pub fn from_poly(p: &BinPolynomial, len: usize) -> Result<Self> {
        if let Some(d) = p.degree() {
            if d >= len {
                return Err(Error::LengthMismatch { expected: len, got: d + 1 });
            }
        }
        let mut v = BitVector::zeros(len);
        for e in p.exponents() {
            v.set(e, true);
        }
        Ok(v)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self)
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Parse("empty bit-string".into()));
        }
        let mut v = BitVector::zeros(s.len());
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse(format!(
                        "bit-string may contain only 0 and 1, found {:?}",
                        other
                    )))
                }
            }
        }
        Ok(v)
    }
}
