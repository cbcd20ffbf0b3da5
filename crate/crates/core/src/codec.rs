//! Matrices and table-driven syndrome decoding for cyclic codes.
//!
//! The generator matrix stacks shifted copies of the generator polynomial;
//! the parity-check matrix stacks shifted copies of the reciprocal of the
//! check polynomial `h = (y^N - 1) / G`. Decoding looks the syndrome up in a
//! table of coset leaders built lightest-pattern-first, so the correction
//! applied is always a minimum-weight explanation of the syndrome.

use std::collections::HashMap;

use crate::binpoly::BinPolynomial;
use crate::bits::BitVector;
use crate::chain::{embed_bch, project_bch, ChainCode};
use crate::code::CyclicCode;
use crate::{Error, Result};

/// Tables over more than this many check bits are refused unless forced.
pub const TABLE_REDUNDANCY_GUARD: usize = 24;

/// The K-by-N generator matrix of a cyclic code: row `i` is the generator
/// shifted up by `i` positions.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    length: usize,
    rows: Vec<BitVector>,
}

impl GeneratorMatrix {
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Row rank over GF(2).
    pub fn rank(&self) -> usize {
        row_rank(self.rows.clone())
    }

    /// Whether every row is orthogonal to every row of `h`.
    pub fn orthogonal_to(&self, h: &ParityCheckMatrix) -> bool {
        self.rows
            .iter()
            .all(|g| h.rows.iter().all(|r| !g.dot(r)))
    }
}

/// The (N-K)-by-N parity-check matrix: row `i` is the reciprocal check
/// polynomial shifted up by `i` positions.
#[derive(Clone, Debug)]
pub struct ParityCheckMatrix {
    length: usize,
    rows: Vec<BitVector>,
}

impl ParityCheckMatrix {
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Number of check bits, N - K.
    pub fn redundancy(&self) -> usize {
        self.rows.len()
    }

    pub fn rank(&self) -> usize {
        row_rank(self.rows.clone())
    }

    /// Syndrome of a word: bit `i` is the inner product with row `i`, so the
    /// textual form reads row 0 first.
    pub fn syndrome(&self, word: &BitVector) -> Result<BitVector> {
        if word.len() != self.length {
            return Err(Error::LengthMismatch {
                expected: self.length,
                got: word.len(),
            });
        }
        let mut s = BitVector::zeros(self.rows.len());
        for (i, row) in self.rows.iter().enumerate() {
            s.set(i, row.dot(word));
        }
        Ok(s)
    }
}

/// Stack shifted generators into the K-by-N generator matrix.
pub fn generator_matrix(code: &dyn CyclicCode) -> GeneratorMatrix {
    let rows = (0..code.dimension())
        .map(|i| {
            BitVector::from_poly(&code.generator().shifted(i), code.length())
                .expect("shifted generator fits the block")
        })
        .collect();
    GeneratorMatrix {
        length: code.length(),
        rows,
    }
}

/// The check polynomial `h = (y^N - 1) / G`. The division must be exact; a
/// remainder means the code descriptor is corrupt.
pub fn check_polynomial(code: &dyn CyclicCode) -> Result<BinPolynomial> {
    let modulus = &BinPolynomial::monomial(code.length()) + &BinPolynomial::one();
    let (q, r) = modulus.divmod(code.generator())?;
    if !r.is_zero() {
        return Err(Error::InexactCheckDivision);
    }
    Ok(q)
}

/// Build the parity-check matrix from the reciprocal of the check
/// polynomial: coefficient `j` of the reciprocal is coefficient `K - j` of
/// `h`, and row `i` shifts it up by `i`.
pub fn parity_check_matrix(code: &dyn CyclicCode) -> Result<ParityCheckMatrix> {
    let h = check_polynomial(code)?;
    let k = code.dimension();
    debug_assert_eq!(h.degree(), Some(k));
    let reciprocal_exps: Vec<usize> = h.exponents().iter().map(|&e| k - e).collect();
    let reciprocal = BinPolynomial::from_exponents(&reciprocal_exps);
    let rows = (0..code.redundancy())
        .map(|i| {
            BitVector::from_poly(&reciprocal.shifted(i), code.length())
                .expect("shifted reciprocal fits the block")
        })
        .collect();
    Ok(ParityCheckMatrix {
        length: code.length(),
        rows,
    })
}

fn row_rank(mut rows: Vec<BitVector>) -> usize {
    let mut rank = 0;
    let width = match rows.first() {
        Some(r) => r.len(),
        None => return 0,
    };
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].get(col)) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row.get(col) {
                row.xor_with(&pivot_row);
            }
        }
        rank += 1;
    }
    rank
}

/// Coset leaders keyed by syndrome. Patterns are enumerated weight by weight
/// and, within a weight, in ascending position order, so the first pattern to
/// claim a syndrome is the lightest one with the lowest positions.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    redundancy: usize,
    max_weight: usize,
    complete: bool,
    leaders: HashMap<u64, BitVector>,
}

impl SyndromeTable {
    /// Enumerate error patterns up to `max_weight` ones. Refuses more than
    /// [`TABLE_REDUNDANCY_GUARD`] check bits.
    pub fn build(h: &ParityCheckMatrix, max_weight: usize) -> Result<Self> {
        if h.redundancy() > TABLE_REDUNDANCY_GUARD {
            return Err(Error::TableTooLarge(h.redundancy()));
        }
        Self::build_forced(h, max_weight)
    }

    /// Same as [`build`](Self::build) without the memory guard. The caller
    /// owns the consequences.
    pub fn build_forced(h: &ParityCheckMatrix, max_weight: usize) -> Result<Self> {
        let m = h.redundancy();
        if m >= 63 {
            return Err(Error::TableTooLarge(m));
        }
        let n = h.length();
        let columns: Vec<u64> = (0..n)
            .map(|p| {
                let mut key = 0u64;
                for (i, row) in h.rows().iter().enumerate() {
                    if row.get(p) {
                        key |= 1 << i;
                    }
                }
                key
            })
            .collect();
        let target = 1u64 << m;
        let mut leaders = HashMap::new();
        leaders.insert(0u64, BitVector::zeros(n));
        let max_weight = max_weight.min(n);
        'sweep: for w in 1..=max_weight {
            if leaders.len() as u64 == target {
                break;
            }
            let mut idx: Vec<usize> = (0..w).collect();
            loop {
                let key = idx.iter().fold(0u64, |acc, &p| acc ^ columns[p]);
                if !leaders.contains_key(&key) {
                    let pattern = BitVector::from_support(n, &idx)?;
                    leaders.insert(key, pattern);
                    if leaders.len() as u64 == target {
                        break 'sweep;
                    }
                }
                // advance to the next combination in lexicographic order
                let mut i = w;
                loop {
                    if i == 0 {
                        continue 'sweep;
                    }
                    i -= 1;
                    if idx[i] != i + n - w {
                        idx[i] += 1;
                        for j in i + 1..w {
                            idx[j] = idx[j - 1] + 1;
                        }
                        break;
                    }
                }
            }
        }
        let complete = leaders.len() as u64 == target;
        Ok(SyndromeTable {
            redundancy: m,
            max_weight,
            complete,
            leaders,
        })
    }

    pub fn len(&self) -> usize {
        self.leaders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaders.is_empty()
    }

    /// Whether every syndrome has a stored leader.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn max_weight(&self) -> usize {
        self.max_weight
    }

    pub fn redundancy(&self) -> usize {
        self.redundancy
    }

    pub fn leader(&self, syndrome: &BitVector) -> Option<&BitVector> {
        self.leaders.get(&syndrome_key(syndrome))
    }

    /// Leaders sorted by weight, then by syndrome value, handy for listing.
    pub fn entries(&self) -> Vec<(BitVector, &BitVector)> {
        let mut items: Vec<(u64, &BitVector)> =
            self.leaders.iter().map(|(k, v)| (*k, v)).collect();
        items.sort_by_key(|(key, leader)| (leader.weight(), leader.support(), *key));
        items
            .into_iter()
            .map(|(key, leader)| (key_to_syndrome(key, self.redundancy), leader))
            .collect()
    }
}

fn syndrome_key(s: &BitVector) -> u64 {
    s.support().iter().fold(0u64, |acc, &i| acc | 1 << i)
}

fn key_to_syndrome(key: u64, m: usize) -> BitVector {
    let mut s = BitVector::zeros(m);
    for i in 0..m {
        if key >> i & 1 == 1 {
            s.set(i, true);
        }
    }
    s
}

/// Correct a received word by subtracting the stored leader for its
/// syndrome. A syndrome with no leader reports [`Error::UnknownSyndrome`].
pub fn syndrome_decode(
    received: &BitVector,
    h: &ParityCheckMatrix,
    table: &SyndromeTable,
) -> Result<BitVector> {
    let syndrome = h.syndrome(received)?;
    let leader = table
        .leader(&syndrome)
        .ok_or_else(|| Error::UnknownSyndrome(syndrome.to_string()))?;
    Ok(received.xor(leader))
}

/// A parity-check matrix bundled with its syndrome table.
#[derive(Clone, Debug)]
pub struct SyndromeDecoder {
    h: ParityCheckMatrix,
    table: SyndromeTable,
}

impl SyndromeDecoder {
    /// Build with a complete table: enumeration keeps widening until every
    /// syndrome has a leader.
    pub fn build(code: &dyn CyclicCode) -> Result<Self> {
        Self::with_max_weight(code, code.length())
    }

    /// Build with a bounded enumeration; the table may stay incomplete.
    pub fn with_max_weight(code: &dyn CyclicCode, max_weight: usize) -> Result<Self> {
        let h = parity_check_matrix(code)?;
        let table = SyndromeTable::build(&h, max_weight)?;
        Ok(SyndromeDecoder { h, table })
    }

    /// Pair a matrix with a table built separately, as when the size guard
    /// had to be bypassed for a bounded table over a long block.
    pub fn from_parts(h: ParityCheckMatrix, table: SyndromeTable) -> Self {
        SyndromeDecoder { h, table }
    }

    pub fn parity_check(&self) -> &ParityCheckMatrix {
        &self.h
    }

    pub fn table(&self) -> &SyndromeTable {
        &self.table
    }

    pub fn syndrome(&self, word: &BitVector) -> Result<BitVector> {
        self.h.syndrome(word)
    }

    pub fn decode(&self, received: &BitVector) -> Result<BitVector> {
        syndrome_decode(received, &self.h, &self.table)
    }
}

/// Decoder for seed-length words carried inside a derived code: lift, correct
/// there, project back.
#[derive(Clone, Debug)]
pub struct ChainDecoder {
    chain: ChainCode,
    inner: SyndromeDecoder,
}

impl ChainDecoder {
    pub fn new(chain: &ChainCode) -> Result<Self> {
        Ok(ChainDecoder {
            chain: chain.clone(),
            inner: SyndromeDecoder::build(chain)?,
        })
    }

    pub fn with_max_weight(chain: &ChainCode, max_weight: usize) -> Result<Self> {
        Ok(ChainDecoder {
            chain: chain.clone(),
            inner: SyndromeDecoder::with_max_weight(chain, max_weight)?,
        })
    }

    /// Bounded table without the size guard, for levels whose redundancy is
    /// past the guard but whose low-weight table is still small.
    pub fn with_forced_table(chain: &ChainCode, max_weight: usize) -> Result<Self> {
        let h = parity_check_matrix(chain)?;
        let table = SyndromeTable::build_forced(&h, max_weight)?;
        Ok(ChainDecoder {
            chain: chain.clone(),
            inner: SyndromeDecoder::from_parts(h, table),
        })
    }

    pub fn chain(&self) -> &ChainCode {
        &self.chain
    }

    pub fn decoder(&self) -> &SyndromeDecoder {
        &self.inner
    }

    /// Correct a full-length word of the derived code.
    pub fn decode_word(&self, received: &BitVector) -> Result<BitVector> {
        self.inner.decode(received)
    }

    /// The full pipeline for a seed-length received word: embed onto the
    /// grid, syndrome-decode in the derived code, project back down.
    pub fn decode_via_chain(&self, received: &BitVector) -> Result<BitVector> {
        let lifted = embed_bch(received, &self.chain)?;
        self.correct_and_project(&lifted)
    }

    /// Same tail for a word received at full derived length, as when the
    /// noise hits after the lift: correct, then project down.
    pub fn correct_and_project(&self, received: &BitVector) -> Result<BitVector> {
        let corrected = self.inner.decode(received)?;
        project_bch(&corrected, &self.chain)
    }
}

/// Free-function form of [`ChainDecoder::decode_via_chain`].
pub fn decode_via_chain(received: &BitVector, decoder: &ChainDecoder) -> Result<BitVector> {
    decoder.decode_via_chain(received)
}

/// Systematic encoding for any cyclic code: the message rides the top K
/// positions, the generator remainder fills the low R positions.
pub fn encode_systematic(code: &dyn CyclicCode, message: &BitVector) -> Result<BitVector> {
    if message.len() != code.dimension() {
        return Err(Error::LengthMismatch {
            expected: code.dimension(),
            got: message.len(),
        });
    }
    let shifted = message.to_poly().shifted(code.redundancy());
    let parity = shifted.rem(code.generator())?;
    BitVector::from_poly(&(&shifted + &parity), code.length())
}

/// Read the message back out of the top K positions of a systematic word.
pub fn extract_message(code: &dyn CyclicCode, word: &BitVector) -> Result<BitVector> {
    if word.len() != code.length() {
        return Err(Error::LengthMismatch {
            expected: code.length(),
            got: word.len(),
        });
    }
    let r = code.redundancy();
    let mut message = BitVector::zeros(code.dimension());
    for i in 0..code.dimension() {
        message.set(i, word.get(r + i));
    }
    Ok(message)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bch::BchCode;

    fn bits(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn level1_of_3_1() -> ChainCode {
        ChainCode::derive(&BchCode::new(2, 1, 3, None).unwrap(), 1).unwrap()
    }

    #[test]
    fn generator_matrix_rows_are_shifts() {
        let g = generator_matrix(&level1_of_3_1());
        assert_eq!(g.dimension(), 8);
        assert_eq!(g.rows()[0], bits("101010000000"));
        assert_eq!(g.rows()[1], bits("010101000000"));
        assert_eq!(g.rows()[7], bits("000000010101"));
        assert_eq!(g.rank(), 8);
    }

    #[test]
    fn check_polynomial_of_the_12_8_code() {
        let h = check_polynomial(&level1_of_3_1()).unwrap();
        assert_eq!(h.to_string(), "1+x^2+x^6+x^8");
    }

    #[test]
    fn parity_check_rows_are_shifted_reciprocals() {
        let h = parity_check_matrix(&level1_of_3_1()).unwrap();
        assert_eq!(h.redundancy(), 4);
        assert_eq!(h.rows()[0], bits("101000101000"));
        assert_eq!(h.rows()[1], bits("010100010100"));
        assert_eq!(h.rows()[2], bits("001010001010"));
        assert_eq!(h.rows()[3], bits("000101000101"));
        assert_eq!(h.rank(), 4);
    }

    #[test]
    fn generator_and_parity_check_are_orthogonal() {
        for code in [
            BchCode::new(2, 1, 3, None).unwrap(),
            BchCode::new(3, 1, 3, None).unwrap(),
            BchCode::new(4, 1, 5, None).unwrap(),
        ] {
            let g = generator_matrix(&code);
            let h = parity_check_matrix(&code).unwrap();
            assert!(g.orthogonal_to(&h));
            assert_eq!(h.rank(), code.redundancy());
            for level in 1..=2 {
                let chain = ChainCode::derive(&code, level).unwrap();
                let g = generator_matrix(&chain);
                let h = parity_check_matrix(&chain).unwrap();
                assert!(g.orthogonal_to(&h), "level {}", level);
                assert_eq!(h.rank(), chain.redundancy());
            }
        }
    }

    #[test]
    fn the_sixteen_leaders_of_the_12_8_code() {
        let expected: [(&str, &str); 16] = [
            ("000000000000", "0000"),
            ("100000000000", "1000"),
            ("010000000000", "0100"),
            ("001000000000", "1010"),
            ("000100000000", "0101"),
            ("000010000000", "0010"),
            ("000001000000", "0001"),
            ("110000000000", "1100"),
            ("100100000000", "1101"),
            ("100001000000", "1001"),
            ("011000000000", "1110"),
            ("010010000000", "0110"),
            ("001100000000", "1111"),
            ("001001000000", "1011"),
            ("000110000000", "0111"),
            ("000011000000", "0011"),
        ];
        let h = parity_check_matrix(&level1_of_3_1()).unwrap();
        let table = SyndromeTable::build(&h, 12).unwrap();
        assert_eq!(table.len(), 16);
        assert!(table.is_complete());
        for (leader, syndrome) in expected {
            let leader = bits(leader);
            let syndrome = bits(syndrome);
            assert_eq!(h.syndrome(&leader).unwrap(), syndrome, "leader {}", leader);
            assert_eq!(table.leader(&syndrome), Some(&leader), "syndrome {}", syndrome);
        }
    }

    #[test]
    fn positions_zero_and_six_share_a_syndrome() {
        // the parity-check columns repeat with period six, so the stored
        // leader for that shared syndrome is the lower position
        let h = parity_check_matrix(&level1_of_3_1()).unwrap();
        let s0 = h.syndrome(&bits("100000000000")).unwrap();
        let s6 = h.syndrome(&bits("000000100000")).unwrap();
        assert_eq!(s0, s6);
        let table = SyndromeTable::build(&h, 12).unwrap();
        assert_eq!(table.leader(&s6), Some(&bits("100000000000")));
    }

    #[test]
    fn walkthrough_of_a_single_error_correction() {
        let chain = level1_of_3_1();
        let decoder = ChainDecoder::new(&chain).unwrap();
        let received = bits("101");
        let lifted = embed_bch(&received, &chain).unwrap();
        assert_eq!(lifted, bits("100010000000"));
        let syndrome = decoder.decoder().syndrome(&lifted).unwrap();
        assert_eq!(syndrome, bits("1010"));
        let corrected = decoder.decode_word(&lifted).unwrap();
        assert_eq!(corrected, bits("101010000000"));
        assert_eq!(decoder.decode_via_chain(&received).unwrap(), bits("111"));
    }

    #[test]
    fn every_single_bit_error_on_the_planted_grid_is_corrected() {
        let seed = BchCode::new(2, 1, 3, None).unwrap();
        for level in 1..=2 {
            let chain = seed.derive(level).unwrap();
            let decoder = ChainDecoder::new(&chain).unwrap();
            for word in ["000", "111"] {
                let word = bits(word);
                for position in 0..3 {
                    let mut corrupted = word.clone();
                    corrupted.flip(position);
                    assert_eq!(
                        decoder.decode_via_chain(&corrupted).unwrap(),
                        word,
                        "level {} word {} position {}",
                        level,
                        word,
                        position
                    );
                }
            }
        }
    }

    #[test]
    fn high_position_noise_is_detected_not_repaired() {
        // the parity-check columns of the 12-bit code repeat with period six,
        // so a flip at position 6..11 pulls in the leader six places below;
        // the leftover support is off the planted grid and projection
        // refuses instead of delivering junk
        let chain = level1_of_3_1();
        let decoder = ChainDecoder::new(&chain).unwrap();
        let codeword = bits("101010000000");
        for position in 0..12 {
            let mut noisy = codeword.clone();
            noisy.flip(position);
            let result = decoder.correct_and_project(&noisy);
            if position < 6 {
                assert_eq!(result.unwrap(), bits("111"), "position {}", position);
            } else {
                assert!(
                    matches!(result, Err(Error::NonEmbeddedSupport(_))),
                    "position {} gave {:?}",
                    position,
                    result
                );
            }
        }
    }

    #[test]
    fn incomplete_tables_report_unknown_syndromes() {
        let chain = level1_of_3_1();
        let h = parity_check_matrix(&chain).unwrap();
        let narrow = SyndromeTable::build(&h, 1).unwrap();
        assert_eq!(narrow.len(), 7);
        assert!(!narrow.is_complete());
        let codeword = bits("101010000000");
        let mut received = codeword.clone();
        received.flip(0);
        received.flip(1);
        assert!(matches!(
            syndrome_decode(&received, &h, &narrow),
            Err(Error::UnknownSyndrome(_))
        ));
        // the same received word passes with the full table
        let full = SyndromeTable::build(&h, 12).unwrap();
        syndrome_decode(&received, &h, &full).unwrap();
    }

    #[test]
    fn redundancy_guard_refuses_oversized_tables() {
        let seed = BchCode::new(2, 1, 3, None).unwrap();
        let level4 = seed.derive(4).unwrap();
        let h = parity_check_matrix(&level4).unwrap();
        assert_eq!(h.redundancy(), 32);
        assert!(matches!(
            SyndromeTable::build(&h, 2),
            Err(Error::TableTooLarge(32))
        ));
        // forcing skips the guard; a zero-weight sweep stays tiny
        let forced = SyndromeTable::build_forced(&h, 0).unwrap();
        assert_eq!(forced.len(), 1);
        assert!(!forced.is_complete());
    }

    #[test]
    fn generic_systematic_encoding_matches_the_seed_encoder() {
        let seed = BchCode::new(3, 1, 3, None).unwrap();
        for value in 0u32..16 {
            let mut message = BitVector::zeros(4);
            for bit in 0..4 {
                message.set(bit, value >> bit & 1 == 1);
            }
            let direct = seed.encode_systematic(&message).unwrap();
            let generic = encode_systematic(&seed, &message).unwrap();
            assert_eq!(direct, generic);
            assert_eq!(extract_message(&seed, &generic).unwrap(), message);
        }
    }

    #[test]
    fn chain_words_round_trip_through_systematic_coding() {
        let chain = level1_of_3_1();
        let mut message = BitVector::zeros(8);
        for bit in [0, 3, 5, 7] {
            message.set(bit, true);
        }
        let word = encode_systematic(&chain, &message).unwrap();
        assert_eq!(word.len(), 12);
        assert!(word.to_poly().divisible_by(chain.generator()).unwrap());
        assert_eq!(extract_message(&chain, &word).unwrap(), message);
    }

    #[test]
    fn noise_after_the_lift_is_corrected_in_place() {
        let chain = level1_of_3_1();
        let decoder = ChainDecoder::new(&chain).unwrap();
        let mut lifted = bits("101010000000");
        lifted.flip(2);
        assert_eq!(
            decoder.correct_and_project(&lifted).unwrap(),
            bits("111")
        );
    }

    #[test]
    fn entries_list_lightest_leaders_first() {
        let h = parity_check_matrix(&level1_of_3_1()).unwrap();
        let table = SyndromeTable::build(&h, 12).unwrap();
        let entries = table.entries();
        assert_eq!(entries.len(), 16);
        assert!(entries[0].1.is_zero());
        let weights: Vec<usize> = entries.iter().map(|(_, l)| l.weight()).collect();
        let mut sorted = weights.clone();
        sorted.sort_unstable();
        assert_eq!(weights, sorted);
    }
}
