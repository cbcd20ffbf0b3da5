//! Arithmetic in GF(2^s) through log/antilog tables.
//!
//! The field is built as GF(2)[x] modulo a primitive polynomial p(x) of
//! degree s, so the residue of x, written zeta, generates the whole
//! multiplicative group. Elements are s-bit values; bit i is the coefficient
//! of x^i. Table sizes stay modest for the supported range s = 2..=16.

use crate::binpoly::BinPolynomial;
use crate::{Error, Result};

pub const MIN_FIELD_DEGREE: usize = 2;
pub const MAX_FIELD_DEGREE: usize = 16;

/// One stock primitive polynomial per supported degree.
const DEFAULT_PRIMITIVE: [(usize, u32); 15] = [
    (2, 0x7),       // 1+x+x^2
    (3, 0xB),       // 1+x+x^3
    (4, 0x13),      // 1+x+x^4
    (5, 0x25),      // 1+x^2+x^5
    (6, 0x43),      // 1+x+x^6
    (7, 0x89),      // 1+x^3+x^7
    (8, 0x11D),     // 1+x^2+x^3+x^4+x^8
    (9, 0x211),     // 1+x^4+x^9
    (10, 0x409),    // 1+x^3+x^10
    (11, 0x805),    // 1+x^2+x^11
    (12, 0x1053),   // 1+x+x^4+x^6+x^12
    (13, 0x201B),   // 1+x+x^3+x^4+x^13
    (14, 0x4443),   // 1+x+x^6+x^10+x^14
    (15, 0x8003),   // 1+x+x^15
    (16, 0x1100B),  // 1+x+x^3+x^12+x^16
];

/// A degree-s polynomial verified primitive over GF(2): the residue of x
/// modulo it has multiplicative order exactly 2^s - 1.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimitivePolynomial {
    poly: BinPolynomial,
    degree: usize,
}

impl PrimitivePolynomial {
    /// Validate and adopt a candidate. Rejects polynomials outside the
    /// supported degree range, with a zero constant term, or whose residue
    /// cycle closes early (which catches both reducible and irreducible but
    /// imprimitive candidates).
    pub fn new(poly: BinPolynomial) -> Result<Self> {
        let degree = poly.degree().unwrap_or(0);
        if !(MIN_FIELD_DEGREE..=MAX_FIELD_DEGREE).contains(&degree) {
            return Err(Error::FieldDegreeOutOfRange(degree));
        }
        if !poly.coefficient(0) {
            return Err(Error::NotPrimitive(format!(
                "{} has a zero constant term",
                poly
            )));
        }
        let candidate = PrimitivePolynomial { poly, degree };
        candidate.check_cycle()?;
        Ok(candidate)
    }

    /// The stock polynomial for degree `s`.
    pub fn default_for(s: usize) -> Result<Self> {
        let (_, bits) = DEFAULT_PRIMITIVE
            .iter()
            .find(|(deg, _)| *deg == s)
            .ok_or(Error::FieldDegreeOutOfRange(s))?;
        let exps: Vec<usize> = (0..32).filter(|i| bits >> i & 1 == 1).collect();
        Self::new(BinPolynomial::from_exponents(&exps))
    }

    pub fn poly(&self) -> &BinPolynomial {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Walk the powers of x modulo the candidate. Primitivity holds exactly
    /// when the walk first returns to 1 after 2^s - 1 steps.
    fn check_cycle(&self) -> Result<()> {
        let order = (1usize << self.degree) - 1;
        let mut value = mul_mod_bits(1, 2, &self.poly, self.degree);
        let mut steps = 1usize;
        while value != 1 {
            if steps > order {
                // unreachable for a unit, kept as a hard stop
                break;
            }
            value = mul_mod_bits(value, 2, &self.poly, self.degree);
            steps += 1;
        }
        if steps != order {
            return Err(Error::NotPrimitive(format!(
                "{} generates a cycle of length {} instead of {}",
                self.poly, steps, order
            )));
        }
        Ok(())
    }
}

impl std::fmt::Debug for PrimitivePolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrimitivePolynomial({})", self.poly)
    }
}

/// An element of GF(2^s), stored as its s coefficient bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Multiply two packed field elements modulo `p` by shift-and-reduce.
fn mul_mod_bits(a: u32, b: u32, p: &BinPolynomial, degree: usize) -> u32 {
    let p_bits: u32 = p
        .exponents()
        .iter()
        .fold(0, |acc, &e| acc | 1 << e);
    let mut acc = 0u32;
    let mut a = a;
    let mut b = b;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> degree & 1 == 1 {
            a ^= p_bits;
        }
    }
    acc
}

/// Log/antilog tables for one field, the workhorse of all GF(2^s) arithmetic.
#[derive(Clone)]
pub struct FieldTables {
    s: usize,
    prim: PrimitivePolynomial,
    /// `antilog[e]` is zeta^e, for e in 0..2^s-1.
    antilog: Vec<u16>,
    /// `log[v]` is the exponent of the nonzero element v; `log[0]` is unused.
    log: Vec<u32>,
}

/// Build the tables for GF(2^s) over the given primitive polynomial.
pub fn build_field(s: usize, prim: PrimitivePolynomial) -> Result<FieldTables> {
    if prim.degree() != s {
        return Err(Error::InvalidParameter(format!(
            "field degree {} does not match polynomial degree {}",
            s,
            prim.degree()
        )));
    }
    let order = (1usize << s) - 1;
    let mut antilog = vec![0u16; order];
    let mut log = vec![u32::MAX; 1 << s];
    let mut value = 1u32;
    for (e, slot) in antilog.iter_mut().enumerate() {
        if log[value as usize] != u32::MAX {
            // a repeat before the table fills means the cycle closed early
            return Err(Error::NotPrimitive(format!(
                "{} repeats zeta^{} before covering all {} nonzero elements",
                prim.poly(),
                e,
                order
            )));
        }
        *slot = value as u16;
        log[value as usize] = e as u32;
        value = mul_mod_bits(value, 2, prim.poly(), s);
    }
    if value != 1 {
        return Err(Error::NotPrimitive(format!(
            "{} does not close its cycle at zeta^{}",
            prim.poly(),
            order
        )));
    }
    Ok(FieldTables { s, prim, antilog, log })
}

impl FieldTables {
    /// Convenience constructor over the stock polynomial for `s`.
    pub fn with_default_polynomial(s: usize) -> Result<Self> {
        build_field(s, PrimitivePolynomial::default_for(s)?)
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Size of the multiplicative group, 2^s - 1.
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    pub fn primitive_polynomial(&self) -> &PrimitivePolynomial {
        &self.prim
    }

    /// zeta^e for any exponent, reduced modulo the group order.
    pub fn zeta_power(&self, e: usize) -> FieldElement {
        FieldElement(self.antilog[e % self.order()])
    }

    /// Discrete log of a nonzero element.
    pub fn log(&self, a: FieldElement) -> Option<usize> {
        if a.is_zero() {
            return None;
        }
        Some(self.log[a.0 as usize] as usize)
    }

    /// Field addition is coefficient-wise XOR; no tables involved.
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    /// Table-driven product: log both factors, add exponents mod 2^s - 1,
    /// antilog back. Zero short-circuits.
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let e = (self.log[a.0 as usize] as usize + self.log[b.0 as usize] as usize) % self.order();
        FieldElement(self.antilog[e])
    }

    /// The 2-cyclotomic coset of `i` modulo 2^s - 1, starting at its smallest
    /// member reached from `i`.
    pub fn cyclotomic_coset(&self, i: usize) -> Vec<usize> {
        let n = self.order();
        let start = i % n;
        let mut coset = vec![start];
        let mut e = start * 2 % n;
        while e != start {
            coset.push(e);
            e = e * 2 % n;
        }
        coset
    }

    /// Minimal polynomial of zeta^i over GF(2): the product of (x - zeta^e)
    /// over the 2-cyclotomic coset of i. The conjugate product always lands
    /// back in GF(2), which is asserted before conversion.
    pub fn minimal_polynomial(&self, i: usize) -> BinPolynomial {
        let coset = self.cyclotomic_coset(i);
        // coefficients live in the big field while the product accumulates
        let mut coeffs: Vec<FieldElement> = vec![FieldElement::ONE];
        for &e in &coset {
            let root = self.zeta_power(e);
            let mut next = vec![FieldElement::ZERO; coeffs.len() + 1];
            for (k, &c) in coeffs.iter().enumerate() {
                // multiply by (x + root): shift up, add root * c
                next[k + 1] = self.add(next[k + 1], c);
                next[k] = self.add(next[k], self.mul(root, c));
            }
            coeffs = next;
        }
        let exps: Vec<usize> = coeffs
            .iter()
            .enumerate()
            .filter_map(|(k, &c)| {
                assert!(
                    c.is_zero() || c == FieldElement::ONE,
                    "conjugate product left the base field at x^{}",
                    k
                );
                (c == FieldElement::ONE).then_some(k)
            })
            .collect();
        BinPolynomial::from_exponents(&exps)
    }
}

impl std::fmt::Debug for FieldTables {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "FieldTables(GF(2^{}) over {})", self.s, self.prim.poly())
    }
}
