//! The shared shape of a binary cyclic code, plus brute-force distance.

use crate::binpoly::BinPolynomial;
use crate::bits::BitVector;

/// What every cyclic code here exposes: block length, dimension, and the
/// generator polynomial whose multiples make up the code.
pub trait CyclicCode {
    fn length(&self) -> usize;
    fn dimension(&self) -> usize;
    fn generator(&self) -> &BinPolynomial;

    /// Number of check positions.
    fn redundancy(&self) -> usize {
        self.length() - self.dimension()
    }
}

/// Default ceiling on exhaustive codeword enumeration.
pub const DISTANCE_ENUMERATION_CAP: u64 = 1 << 20;

/// Minimum distance by enumerating all nonzero codewords, or `None` when
/// 2^dimension exceeds `cap` and the sweep is not attempted. For a linear
/// code the minimum distance equals the minimum nonzero weight, and the
/// enumeration walks messages in Gray-code order so each step flips in a
/// single shifted copy of the generator.
pub fn minimum_distance(code: &dyn CyclicCode, cap: u64) -> Option<usize> {
    let k = code.dimension();
    if k >= 63 || 1u64 << k > cap {
        return None;
    }
    let rows: Vec<BitVector> = (0..k)
        .map(|i| {
            BitVector::from_poly(&code.generator().shifted(i), code.length())
                .expect("shifted generator fits the block length")
        })
        .collect();
    let mut word = BitVector::zeros(code.length());
    let mut best = usize::MAX;
    for m in 1u64..1 << k {
        word.xor_with(&rows[m.trailing_zeros() as usize]);
        best = best.min(word.weight());
    }
    Some(best)
}
