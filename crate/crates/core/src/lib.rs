//! Chains of binary cyclic codes grown from BCH seeds.
//!
//! A seed BCH code of length `n = 2^s - 1` is stretched into a family of
//! longer cyclic codes `C^1, C^2, ...` by substituting `y^(2^j)` for the
//! generator's variable, which doubles the length at every level while the
//! rate stays put from level 1 on. Short codewords ride along unchanged: an
//! embedding spreads the seed word over a power-of-two grid of positions, and
//! a projection pulls it back after syndrome decoding in the long code.
//!
//! The crate covers the full path from field arithmetic to a slot-based
//! spectrum-sharing simulator:
//!
//! * [`gf2m`]: `GF(2^s)` log/antilog tables over a primitive polynomial
//! * [`binpoly`]: polynomials over `GF(2)` with packed coefficients
//! * [`bch`]: narrow- and wide-sense BCH construction and systematic encoding
//! * [`chain`]: derived long codes, rate tables, embedding and projection
//! * [`codec`]: generator/parity-check matrices and syndrome decoding
//! * [`bandwidth`]: occupied-bandwidth arithmetic over exact rationals
//! * [`interweave`]: a time-slotted simulator of opportunistic channel reuse

pub mod bandwidth;
pub mod bch;
pub mod binpoly;
pub mod bits;
pub mod chain;
pub mod code;
pub mod codec;
pub mod gf2m;
pub mod interweave;

pub use bch::BchCode;
pub use binpoly::BinPolynomial;
pub use bits::BitVector;
pub use chain::ChainCode;
pub use code::CyclicCode;

use thiserror::Error;

/// Everything that can go wrong while building or using the codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("operation needs a nonzero polynomial")]
    ZeroPolynomial,
    #[error("{0}")]
    NotPrimitive(String),
    #[error("field degree {0} outside the supported range 2..=16")]
    FieldDegreeOutOfRange(usize),
    #[error("designed distance {delta} outside 2..={n}")]
    DeltaOutOfRange { delta: usize, n: usize },
    #[error("root offset must be at least 1")]
    OffsetOutOfRange,
    #[error("generator spans the whole length, no message positions left")]
    DegenerateCode,
    #[error("expected a bit-vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("derived length {length} exceeds the safety bound {bound}")]
    LengthBound { length: usize, bound: usize },
    #[error("support at position {0} is off the embedded grid")]
    NonEmbeddedSupport(usize),
    #[error("no stored leader for syndrome {0}")]
    UnknownSyndrome(String),
    #[error("a table over {0} check bits exceeds the memory guard of 24")]
    TableTooLarge(usize),
    #[error("internal: check-polynomial division left a remainder")]
    InexactCheckDivision,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
