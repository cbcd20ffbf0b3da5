//! Long cyclic codes derived from a BCH seed, one per level.
//!
//! Level `j` substitutes `y^(2^j)` into the seed generator `g`, giving
//! `G_j = g(y^(2^j))` of degree `2^j * r` inside a block of length
//! `N_j = 2^(j-1) * (n+1) * n`. Doubling the block while doubling the
//! generator keeps the rate fixed from level 1 on, and a seed codeword can be
//! planted into any level by spreading its positions over the `2^j` grid.

use num_rational::Ratio;

use crate::bch::BchCode;
use crate::binpoly::BinPolynomial;
use crate::bits::BitVector;
use crate::code::CyclicCode;
use crate::{Error, Result};

/// Exact code rate.
pub type Rate = Ratio<u64>;

/// Default ceiling on derived block lengths; anything longer refuses matrix
/// and table work anyway.
pub const DERIVED_LENGTH_BOUND: usize = 1 << 20;

/// Blocks up to this length get the generator's divisibility re-checked by
/// actual division at construction time.
const DIRECT_DIVISIBILITY_LIMIT: usize = 1 << 13;

/// One level of the derived family, still a plain cyclic code.
#[derive(Clone)]
pub struct ChainCode {
    seed: BchCode,
    level: usize,
    length: usize,
    dimension: usize,
    generator: BinPolynomial,
}

impl ChainCode {
    /// Derive level `j >= 1` under the default length ceiling.
    pub fn derive(seed: &BchCode, level: usize) -> Result<Self> {
        Self::derive_with_bound(seed, level, Some(DERIVED_LENGTH_BOUND))
    }

    /// Derive with an explicit ceiling, or none at all for construction-only
    /// use where no matrices or tables will ever be built.
    pub fn derive_with_bound(seed: &BchCode, level: usize, bound: Option<usize>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter(
                "derivation starts at level 1; level 0 is the seed itself".into(),
            ));
        }
        if level > 48 {
            return Err(Error::InvalidParameter(format!(
                "level {} is past any usable block length",
                level
            )));
        }
        let n = seed.n() as u128;
        let wide_length = (1u128 << (level - 1)) * (n + 1) * n;
        let effective_bound = bound.unwrap_or(usize::MAX);
        if wide_length > effective_bound as u128 {
            return Err(Error::LengthBound {
                length: wide_length.min(usize::MAX as u128) as usize,
                bound: effective_bound,
            });
        }
        let length = wide_length as usize;
        let generator = seed.generator().substitute_power(1usize << level)?;
        let degree = generator.degree().expect("seed generator is nonzero");
        debug_assert_eq!(degree, (1 << level) * seed.r());
        // Divisibility of y^N - 1 by the derived generator is inherited from
        // the seed: g divides y^n - 1, n divides N / 2^level, and
        // substitution preserves divisibility. The direct division is still
        // run where it is cheap enough to serve as a cross-check.
        if length <= DIRECT_DIVISIBILITY_LIMIT {
            let modulus = &BinPolynomial::monomial(length) + &BinPolynomial::one();
            assert!(
                modulus.divisible_by(&generator)?,
                "derived generator must divide y^N - 1"
            );
        }
        Ok(ChainCode {
            seed: seed.clone(),
            level,
            length,
            dimension: length - degree,
            generator,
        })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn seed(&self) -> &BchCode {
        &self.seed
    }

    /// Spacing of the embedded grid, `2^level`.
    pub fn stride(&self) -> usize {
        1 << self.level
    }

    /// Exact rate `K / N`.
    pub fn rate(&self) -> Rate {
        Ratio::new(self.dimension as u64, self.length as u64)
    }
}

impl CyclicCode for ChainCode {
    fn length(&self) -> usize {
        self.length
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn generator(&self) -> &BinPolynomial {
        &self.generator
    }
}

impl std::fmt::Debug for ChainCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ChainCode(level {}, ({}, {}), G = {})",
            self.level, self.length, self.dimension, self.generator
        )
    }
}

/// Exact rates `[R_0, R_1, ..., R_jmax]` for a seed and its levels. Pure
/// integer arithmetic; no codes are constructed, so any reasonable depth is
/// cheap. Levels 1 and up all reduce to the same value.
pub fn rate_table(seed: &BchCode, j_max: usize) -> Result<Vec<Rate>> {
    if j_max > 64 {
        return Err(Error::InvalidParameter(format!(
            "rate table depth {} is past any usable level",
            j_max
        )));
    }
    let n = seed.n() as u128;
    let r = seed.r() as u128;
    let mut out = vec![Ratio::new(seed.k() as u64, seed.n() as u64)];
    for j in 1..=j_max {
        let length = (1u128 << (j - 1)) * (n + 1) * n;
        let dimension = length - (1u128 << j) * r;
        let reduced = Ratio::new(dimension, length);
        out.push(Ratio::new(
            u64::try_from(*reduced.numer()).expect("reduced rate fits"),
            u64::try_from(*reduced.denom()).expect("reduced rate fits"),
        ));
    }
    Ok(out)
}

/// Plant a seed-length word into level `j`: position `i` moves to
/// `i * 2^j`, everything else stays zero. Codewords of the seed land on
/// codewords of the level.
pub fn embed_bch(word: &BitVector, target: &ChainCode) -> Result<BitVector> {
    let n = target.seed.n();
    if word.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: word.len(),
        });
    }
    let mut out = BitVector::zeros(target.length);
    for p in word.support() {
        out.set(p << target.level, true);
    }
    Ok(out)
}

/// Undo [`embed_bch`]: collapse the grid back to seed length. Any support off
/// the grid, either misaligned or past `2^j * (n-1)`, is an error naming the
/// offending position.
pub fn project_bch(word: &BitVector, source: &ChainCode) -> Result<BitVector> {
    if word.len() != source.length {
        return Err(Error::LengthMismatch {
            expected: source.length,
            got: word.len(),
        });
    }
    let n = source.seed.n();
    let stride = source.stride();
    let mut out = BitVector::zeros(n);
    for p in word.support() {
        if p % stride != 0 || p / stride >= n {
            return Err(Error::NonEmbeddedSupport(p));
        }
        out.set(p / stride, true);
    }
    Ok(out)
}

/// Climb one level: a word of `C^j` doubles every position to land in
/// `C^(j+1)`. The target is the destination level, so its level must be at
/// least 2 and the input must have half its length.
pub fn chain_embed(word: &BitVector, target: &ChainCode) -> Result<BitVector> {
    if target.level < 2 {
        return Err(Error::InvalidParameter(
            "a chain step needs a target at level 2 or higher".into(),
        ));
    }
    let expected = target.length / 2;
    if word.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: word.len(),
        });
    }
    let mut out = BitVector::zeros(target.length);
    for p in word.support() {
        out.set(p * 2, true);
    }
    Ok(out)
}
