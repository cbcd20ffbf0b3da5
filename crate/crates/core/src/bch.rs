//! BCH codes over GF(2).
//!
//! A code of length `n = 2^s - 1` is fixed by choosing a root offset `c` and
//! a designed distance `delta`: the generator is the least common multiple of
//! the minimal polynomials of `zeta^c, ..., zeta^(c+delta-2)`, which forces
//! those powers of zeta to be roots of every codeword.

use crate::binpoly::BinPolynomial;
use crate::bits::BitVector;
use crate::chain::ChainCode;
use crate::code::CyclicCode;
use crate::gf2m::{build_field, FieldTables, PrimitivePolynomial};
use crate::{Error, Result};

/// A binary BCH code together with the field it was built over.
#[derive(Clone)]
pub struct BchCode {
    field: FieldTables,
    offset: usize,
    delta: usize,
    generator: BinPolynomial,
    dimension: usize,
}

impl BchCode {
    /// Build the code for `GF(2^s)` with root offset `c >= 1` and designed
    /// distance `2 <= delta <= n`. `prim` picks the field's primitive
    /// polynomial; `None` uses the stock one for `s`.
    pub fn new(s: usize, c: usize, delta: usize, prim: Option<PrimitivePolynomial>) -> Result<Self> {
        let prim = match prim {
            Some(p) => p,
            None => PrimitivePolynomial::default_for(s)?,
        };
        let field = build_field(s, prim)?;
        let n = field.order();
        if c < 1 {
            return Err(Error::OffsetOutOfRange);
        }
        if !(2..=n).contains(&delta) {
            return Err(Error::DeltaOutOfRange { delta, n });
        }
        let mut generator = BinPolynomial::one();
        for i in c..=c + delta - 2 {
            let m = field.minimal_polynomial(i);
            generator = BinPolynomial::lcm(&generator, &m)?;
        }
        let r = generator.degree().expect("generator is nonzero");
        if r >= n {
            return Err(Error::DegenerateCode);
        }
        let modulus = &BinPolynomial::monomial(n) + &BinPolynomial::one();
        assert!(
            modulus.divisible_by(&generator)?,
            "generator must divide x^n - 1"
        );
        Ok(BchCode {
            field,
            offset: c,
            delta,
            generator,
            dimension: n - r,
        })
    }

    /// Block length `n = 2^s - 1`.
    pub fn n(&self) -> usize {
        self.field.order()
    }

    /// Message length.
    pub fn k(&self) -> usize {
        self.dimension
    }

    /// Number of check positions, the generator's degree.
    pub fn r(&self) -> usize {
        self.n() - self.dimension
    }

    pub fn designed_distance(&self) -> usize {
        self.delta
    }

    pub fn root_offset(&self) -> usize {
        self.offset
    }

    pub fn field(&self) -> &FieldTables {
        &self.field
    }

    /// Errors a bounded-distance decoder is expected to fix per word.
    pub fn correction_capability(&self) -> usize {
        (self.delta - 1) / 2
    }

    /// Derive the level-`j` long code seeded by this one.
    pub fn derive(&self, level: usize) -> Result<ChainCode> {
        ChainCode::derive(self, level)
    }

    /// Encode so the message occupies the top `k` positions unchanged: the
    /// message is shifted up by `r` and the remainder modulo the generator
    /// fills the low check positions.
    pub fn encode_systematic(&self, message: &BitVector) -> Result<BitVector> {
        if message.len() != self.dimension {
            return Err(Error::LengthMismatch {
                expected: self.dimension,
                got: message.len(),
            });
        }
        let shifted = message.to_poly().shifted(self.r());
        let check = shifted.rem(&self.generator)?;
        BitVector::from_poly(&(&shifted + &check), self.n())
    }

    /// Membership test: a word is in the code exactly when the generator
    /// divides it.
    pub fn is_codeword(&self, word: &BitVector) -> Result<bool> {
        if word.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: word.len(),
            });
        }
        word.to_poly().divisible_by(&self.generator)
    }

    /// The message read back out of a systematic codeword's top positions.
    pub fn extract_message(&self, word: &BitVector) -> Result<BitVector> {
        if word.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: word.len(),
            });
        }
        let mut message = BitVector::zeros(self.dimension);
        for i in 0..self.dimension {
            message.set(i, word.get(self.r() + i));
        }
        Ok(message)
    }
}

impl CyclicCode for BchCode {
    fn length(&self) -> usize {
        self.n()
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn generator(&self) -> &BinPolynomial {
        &self.generator
    }
}

impl std::fmt::Debug for BchCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "BchCode(({}, {}), g = {})",
            self.n(),
            self.dimension,
            self.generator
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{minimum_distance, DISTANCE_ENUMERATION_CAP};

    fn poly(s: &str) -> BinPolynomial {
        s.parse().unwrap()
    }

    fn bits(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn triple_repetition_code() {
        let code = BchCode::new(2, 1, 3, None).unwrap();
        assert_eq!((code.n(), code.k(), code.r()), (3, 1, 2));
        assert_eq!(code.generator(), &poly("1+x+x^2"));
        assert_eq!(code.encode_systematic(&bits("1")).unwrap(), bits("111"));
        assert_eq!(code.encode_systematic(&bits("0")).unwrap(), bits("000"));
        assert!(code.is_codeword(&bits("111")).unwrap());
        assert!(!code.is_codeword(&bits("101")).unwrap());
    }

    #[test]
    fn hamming_7_4() {
        let code = BchCode::new(3, 1, 2, None).unwrap();
        assert_eq!((code.n(), code.k()), (7, 4));
        assert_eq!(code.generator(), &poly("1+x+x^3"));
        // systematic: message 1000 -> check bits are x^3 mod g = 1+x
        assert_eq!(code.encode_systematic(&bits("1000")).unwrap(), bits("1101000"));
        assert_eq!(
            minimum_distance(&code, DISTANCE_ENUMERATION_CAP),
            Some(3)
        );
    }

    #[test]
    fn two_coset_generator_for_15_7() {
        let code = BchCode::new(4, 1, 5, None).unwrap();
        assert_eq!((code.n(), code.k(), code.r()), (15, 7, 8));
        // lcm of the cosets of 1 and 3
        assert_eq!(code.generator(), &poly("1+x^4+x^6+x^7+x^8"));
        let direct = &poly("1+x+x^4") * &poly("1+x+x^2+x^3+x^4");
        assert_eq!(code.generator(), &direct);
        assert_eq!(
            minimum_distance(&code, DISTANCE_ENUMERATION_CAP),
            Some(5)
        );
    }

    #[test]
    fn three_coset_generator_for_15_5() {
        let code = BchCode::new(4, 1, 7, None).unwrap();
        assert_eq!((code.n(), code.k(), code.r()), (15, 5, 10));
        assert_eq!(
            minimum_distance(&code, DISTANCE_ENUMERATION_CAP),
            Some(7)
        );
    }

    #[test]
    fn designed_distance_lower_bounds_true_distance() {
        for (s, delta) in [(3, 2), (3, 3), (3, 4), (4, 3), (4, 5), (4, 7)] {
            let code = BchCode::new(s, 1, delta, None).unwrap();
            let d = minimum_distance(&code, DISTANCE_ENUMERATION_CAP).unwrap();
            assert!(
                d >= delta,
                "({}, {}) reached only distance {} for delta {}",
                code.n(),
                code.k(),
                d,
                delta
            );
        }
    }

    #[test]
    fn systematic_positions_carry_the_message() {
        let code = BchCode::new(4, 1, 5, None).unwrap();
        for m in 0..1u32 << 7 {
            let mut message = BitVector::zeros(7);
            for i in 0..7 {
                message.set(i, m >> i & 1 == 1);
            }
            let word = code.encode_systematic(&message).unwrap();
            assert!(code.is_codeword(&word).unwrap());
            assert_eq!(code.extract_message(&word).unwrap(), message);
        }
    }

    #[test]
    fn codewords_close_under_addition_and_cyclic_shift() {
        let code = BchCode::new(3, 1, 3, None).unwrap();
        let n = code.n();
        let modulus = &BinPolynomial::monomial(n) + &BinPolynomial::one();
        let words: Vec<BitVector> = (0..1u32 << code.k())
            .map(|m| {
                let mut message = BitVector::zeros(code.k());
                for i in 0..code.k() {
                    message.set(i, m >> i & 1 == 1);
                }
                code.encode_systematic(&message).unwrap()
            })
            .collect();
        for a in &words {
            let rotated = (&a.to_poly().shifted(1)).rem(&modulus).unwrap();
            let rotated = BitVector::from_poly(&rotated, n).unwrap();
            assert!(code.is_codeword(&rotated).unwrap());
            for b in &words {
                assert!(code.is_codeword(&a.xor(b)).unwrap());
            }
        }
    }

    #[test]
    fn offsets_past_one_are_allowed() {
        // the coset of 2 is the coset of 1, so the same code comes back
        let shifted = BchCode::new(3, 2, 2, None).unwrap();
        let plain = BchCode::new(3, 1, 2, None).unwrap();
        assert_eq!(shifted.generator(), plain.generator());
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            BchCode::new(2, 0, 3, None),
            Err(Error::OffsetOutOfRange)
        ));
        assert!(matches!(
            BchCode::new(2, 1, 1, None),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert!(matches!(
            BchCode::new(2, 1, 4, None),
            Err(Error::DeltaOutOfRange { .. })
        ));
        // wrapping the root run through zeta^0 pulls in x+1 and eats the
        // last message position
        assert!(matches!(
            BchCode::new(2, 2, 3, None),
            Err(Error::DegenerateCode)
        ));
        assert!(matches!(
            BchCode::new(1, 1, 2, None),
            Err(Error::FieldDegreeOutOfRange(1))
        ));
    }

    #[test]
    fn length_checks_on_encode_and_membership() {
        let code = BchCode::new(2, 1, 3, None).unwrap();
        assert!(matches!(
            code.encode_systematic(&bits("10")),
            Err(Error::LengthMismatch { expected: 1, got: 2 })
        ));
        assert!(matches!(
            code.is_codeword(&bits("1111")),
            Err(Error::LengthMismatch { expected: 3, got: 4 })
        ));
    }
}
