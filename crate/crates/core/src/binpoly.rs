//! Polynomials over GF(2) with coefficients packed 64 to a machine word.
//!
//! Addition is XOR, so every element is its own negative and subtraction
//! never appears. Two textual forms are understood: the sum form `1+x^2+x^4`
//! and the coefficient bit-string `10101` (position i holds the coefficient
//! of `x^i`); both print back ascending.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

/// A polynomial over GF(2). The all-zero value is the zero polynomial.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BinPolynomial {
    /// Bit `e` of the packed words is the coefficient of `x^e`. No trailing
    /// zero words are kept, so equality is plain word equality.
    words: Vec<u64>,
}

impl BinPolynomial {
    pub fn zero() -> Self {
        BinPolynomial { words: Vec::new() }
    }

    pub fn one() -> Self {
        BinPolynomial { words: vec![1] }
    }

    /// The single term `x^e`.
    pub fn monomial(e: usize) -> Self {
        let mut p = BinPolynomial::zero();
        p.toggle(e);
        p
    }

    /// Sum of `x^e` over the given exponents. Repeated exponents cancel in
    /// pairs, as addition over GF(2) dictates.
    pub fn from_exponents(exponents: &[usize]) -> Self {
        let mut p = BinPolynomial::zero();
        for &e in exponents {
            p.toggle(e);
        }
        p
    }

    pub(crate) fn from_words(words: &[u64]) -> Self {
        let mut p = BinPolynomial { words: words.to_vec() };
        p.trim();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.words.len() == 1 && self.words[0] == 1
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let last = *self.words.last()?;
        Some((self.words.len() - 1) * WORD_BITS + (WORD_BITS - 1 - last.leading_zeros() as usize))
    }

    /// Lowest exponent with a nonzero coefficient, or `None` for zero.
    pub fn ord(&self) -> Option<usize> {
        for (i, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(i * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn coefficient(&self, e: usize) -> bool {
        match self.words.get(e / WORD_BITS) {
            Some(w) => w >> (e % WORD_BITS) & 1 == 1,
            None => false,
        }
    }

    /// Exponents with nonzero coefficients, ascending.
    pub fn exponents(&self) -> Vec<usize> {
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

    /// Number of nonzero coefficients.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Multiply by `x^k`.
    pub fn shifted(&self, k: usize) -> Self {
        let mut out = BinPolynomial::zero();
        out.xor_shifted(self, k);
        out
    }

    /// Quotient and remainder of division by `divisor`, with
    /// `deg r < deg divisor`. Division by zero is rejected.
    pub fn divmod(&self, divisor: &Self) -> Result<(Self, Self)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = BinPolynomial::zero();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let shift = rd - dd;
            rem.xor_shifted_clone(divisor, shift);
            quot.toggle(shift);
        }
        Ok((quot, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Result<Self> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Whether `divisor` divides this polynomial exactly.
    pub fn divisible_by(&self, divisor: &Self) -> Result<bool> {
        Ok(self.rem(divisor)?.is_zero())
    }

    /// Greatest common divisor. `gcd(a, 0) = a`; both arguments zero gives
    /// zero.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let mut a = a.clone();
        let mut b = b.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a
    }

    /// Least common multiple of two nonzero polynomials.
    pub fn lcm(a: &Self, b: &Self) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = Self::gcd(a, b);
        let (q, _) = a.divmod(&g)?;
        Ok(&q * b)
    }

    /// Replace `x` by `x^t`, scaling every exponent by `t`. Requires `t >= 1`.
    pub fn substitute_power(&self, t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("substitution power must be at least 1".into()));
        }
        let scaled: Vec<usize> = self.exponents().iter().map(|e| e * t).collect();
        Ok(BinPolynomial::from_exponents(&scaled))
    }

    /// Raise to the power `2^j` by squaring `j` times. Over GF(2) this agrees
    /// with [`substitute_power`](Self::substitute_power) at `t = 2^j`, and the
    /// two routes are kept independent so tests can cross-check them.
    pub fn frobenius_power(&self, j: usize) -> Self {
        let mut out = self.clone();
        for _ in 0..j {
            out = &out * &out;
        }
        out
    }

    fn toggle(&mut self, e: usize) {
        let wi = e / WORD_BITS;
        if wi >= self.words.len() {
            self.words.resize(wi + 1, 0);
        }
        self.words[wi] ^= 1u64 << (e % WORD_BITS);
        self.trim();
    }

    /// XOR `other * x^k` into `self`.
    fn xor_shifted(&mut self, other: &Self, k: usize) {
        let wshift = k / WORD_BITS;
        let bshift = k % WORD_BITS;
        let needed = other.words.len() + wshift + 1;
        if self.words.len() < needed {
            self.words.resize(needed, 0);
        }
        for (i, &w) in other.words.iter().enumerate() {
            self.words[i + wshift] ^= w << bshift;
            if bshift > 0 {
                self.words[i + wshift + 1] ^= w >> (WORD_BITS - bshift);
            }
        }
        self.trim();
    }

    /// Same as `xor_shifted` but usable when `other` aliases `self`.
    fn xor_shifted_clone(&mut self, other: &Self, k: usize) {
        let copy = other.clone();
        self.xor_shifted(&copy, k);
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl Add for &BinPolynomial {
    type Output = BinPolynomial;

    fn add(self, rhs: &BinPolynomial) -> BinPolynomial {
        let mut out = self.clone();
        out.xor_shifted(rhs, 0);
        out
    }
}

impl Mul for &BinPolynomial {
    type Output = BinPolynomial;

    fn mul(self, rhs: &BinPolynomial) -> BinPolynomial {
        let mut out = BinPolynomial::zero();
        for e in rhs.exponents() {
            out.xor_shifted(self, e);
        }
        out
    }
}

impl fmt::Display for BinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for e in self.exponents() {
            if !first {
                f.write_str("+")?;
            }
            first = false;
            match e {
                0 => f.write_str("1")?,
                1 => f.write_str("x")?,
                _ => write!(f, "x^{}", e)?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPolynomial({})", self)
    }
}

impl FromStr for BinPolynomial {
    type Err = Error;

    /// Accepts both textual forms. A string made only of `0` and `1` is read
    /// as a coefficient bit-string; anything else is read as a sum of terms
    /// `1`, `x`, `x^k`. The two readings agree on `"0"` and `"1"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        if s.bytes().all(|b| b == b'0' || b == b'1') {
            let exps: Vec<usize> = s
                .bytes()
                .enumerate()
                .filter(|(_, b)| *b == b'1')
                .map(|(i, _)| i)
                .collect();
            return Ok(BinPolynomial::from_exponents(&exps));
        }
        let mut seen = Vec::new();
        for term in s.split('+') {
            let term = term.trim();
            let e = match term {
                "" => return Err(Error::Parse(format!("empty term in {:?}", s))),
                "1" => 0,
                "x" => 1,
                _ => {
                    let rest = term
                        .strip_prefix("x^")
                        .ok_or_else(|| Error::Parse(format!("bad term {:?}", term)))?;
                    rest.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad exponent in {:?}", term)))?
                }
            };
            if seen.contains(&e) {
                return Err(Error::Parse(format!("exponent {} repeats", e)));
            }
            seen.push(e);
        }
        Ok(BinPolynomial::from_exponents(&seen))
    }
}
