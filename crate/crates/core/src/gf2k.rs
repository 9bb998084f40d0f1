//! Arithmetic in the binary extension fields GF(2^k).
//!
//! Elements are bit-vectors of polynomial coefficients over GF(2), lowest bit
//! the constant term. A [`FieldSpec`] fixes the extension degree and the
//! irreducible modulus; all arithmetic goes through it so that elements stay
//! plain `Copy` values.

use std::fmt;

use thiserror::Error;

/// Largest extension degree accepted by [`FieldSpec::new`].
pub const MAX_DEGREE: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("extension degree {0} is outside 1..={MAX_DEGREE}")]
    DegreeOutOfRange(u32),
    #[error("modulus {modulus} has degree {found}, expected {expected}")]
    WrongDegree {
        modulus: String,
        expected: u32,
        found: u32,
    },
    #[error("modulus {0} is reducible over GF(2)")]
    Reducible(String),
    #[error("modulus {0} has no constant term")]
    NoConstantTerm(String),
    #[error("element 0x{bits:x} does not fit in GF(2^{degree})")]
    ElementOutOfRange { bits: u32, degree: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// An element of GF(2^k), stored as its coefficient bit-vector.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps raw bits without checking them against a field; use
    /// [`FieldSpec::element`] for validated construction.
    pub const fn from_bits(bits: u16) -> Self {
        FieldElement(bits)
    }

    pub const fn bits(self) -> u16 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:x}", self.0)
    }
}

/// The field GF(2^k) = GF(2)[x] / (modulus).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    degree: u32,
    modulus: u32,
}

impl FieldSpec {
    /// Builds GF(2^k). Without an explicit modulus the smallest irreducible
    /// polynomial of degree `k` with nonzero constant term is used.
    pub fn new(degree: u32, modulus: Option<u32>) -> Result<Self, FieldError> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(FieldError::DegreeOutOfRange(degree));
        }
        let modulus = match modulus {
            Some(m) => {
                let found = poly_degree(m as u64);
                if m == 0 || found != degree {
                    return Err(FieldError::WrongDegree {
                        modulus: poly_to_string(m as u64),
                        expected: degree,
                        found: if m == 0 { 0 } else { found },
                    });
                }
                if m & 1 == 0 {
                    return Err(FieldError::NoConstantTerm(poly_to_string(m as u64)));
                }
                if !is_irreducible(m as u64) {
                    return Err(FieldError::Reducible(poly_to_string(m as u64)));
                }
                m
            }
            None => default_modulus(degree),
        };
        Ok(FieldSpec { degree, modulus })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of field elements, 2^k.
    pub fn order(&self) -> u32 {
        1 << self.degree
    }

    pub fn modulus_string(&self) -> String {
        poly_to_string(self.modulus as u64)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as u32) < self.order()
    }

    pub fn element(&self, bits: u32) -> Result<FieldElement, FieldError> {
        if bits < self.order() {
            Ok(FieldElement(bits as u16))
        } else {
            Err(FieldError::ElementOutOfRange {
                bits,
                degree: self.degree,
            })
        }
    }

    /// Parses `"0x3"`, `"3"` (hex without prefix) into a validated element.
    pub fn parse_element(&self, text: &str) -> Result<FieldElement, FieldError> {
        let t = text.trim();
        let digits = t
            .strip_prefix("0x")
            .or_else(|| t.strip_prefix("0X"))
            .unwrap_or(t);
        let bits =
            u32::from_str_radix(digits, 16).map_err(|_| FieldError::Parse(text.to_string()))?;
        self.element(bits)
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    /// Carry-less product reduced modulo the field polynomial.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let top = 1u32 << self.degree;
        let mut acc = 0u32;
        let mut x = a.0 as u32;
        let mut y = b.0 as u32;
        while y != 0 {
            if y & 1 != 0 {
                acc ^= x;
            }
            y >>= 1;
            x <<= 1;
            if x & top != 0 {
                x ^= self.modulus;
            }
        }
        FieldElement(acc as u16)
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by the extended Euclidean algorithm on GF(2)[x].
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        // Invariant: s0 * a ≡ r0 and s1 * a ≡ r1 (mod modulus).
        let (mut r0, mut r1) = (self.modulus as u64, a.0 as u64);
        let (mut s0, mut s1) = (0u64, 1u64);
        while r1 != 1 {
            let shift = poly_degree(r0) - poly_degree(r1);
            r0 ^= r1 << shift;
            s0 ^= s1 << shift;
            if poly_degree(r0) < poly_degree(r1) {
                std::mem::swap(&mut r0, &mut r1);
                std::mem::swap(&mut s0, &mut s1);
            }
        }
        Ok(FieldElement(poly_rem(s1, self.modulus as u64) as u16))
    }

    /// All 2^k elements in ascending bit order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.order()).map(|b| FieldElement(b as u16))
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {}", self.degree, self.modulus_string())
    }
}

fn default_modulus(degree: u32) -> u32 {
    let lo = (1u32 << degree) | 1;
    let hi = 1u32 << (degree + 1);
    (lo..hi)
        .step_by(2)
        .find(|&p| is_irreducible(p as u64))
        .expect("an irreducible polynomial exists in every degree")
}

/// Degree of a nonzero polynomial; 0 for the zero polynomial.
pub fn poly_degree(p: u64) -> u32 {
    if p == 0 {
        0
    } else {
        63 - p.leading_zeros()
    }
}

/// Remainder of `a` divided by nonzero `b` in GF(2)[x].
pub fn poly_rem(mut a: u64, b: u64) -> u64 {
    assert!(b != 0, "division by the zero polynomial");
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// True iff `poly` (degree ≥ 1) has no factor of degree between 1 and
/// deg/2. Decided by trial division.
pub fn is_irreducible(poly: u64) -> bool {
    let d = poly_degree(poly);
    if poly == 0 || d == 0 {
        return false;
    }
    let half = d / 2;
    // candidates: every polynomial of degree 1..=half
    (2u64..(1u64 << (half + 1))).all(|cand| poly_rem(poly, cand) != 0)
}

/// Renders a GF(2) polynomial as e.g. `x^3+x+1`.
pub fn poly_to_string(p: u64) -> String {
    if p == 0 {
        return "0".to_string();
    }
    let mut terms = Vec::new();
    for i in (0..=poly_degree(p)).rev() {
        if p >> i & 1 == 1 {
            terms.push(match i {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            });
        }
    }
    terms.join("+")
}

/// Parses `x^3+x+1` (spaces allowed) back into a bit-vector.
pub fn parse_poly(text: &str) -> Result<u64, FieldError> {
    let err = || FieldError::Parse(text.to_string());
    let mut p = 0u64;
    for term in text.split('+').map(str::trim) {
        let exp = match term {
            "1" => 0,
            "x" => 1,
            t => t
                .strip_prefix("x^")
                .and_then(|e| e.parse::<u32>().ok())
                .filter(|&e| e < 64)
                .ok_or_else(err)?,
        };
        p ^= 1 << exp;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(b: u16) -> FieldElement {
        FieldElement::from_bits(b)
    }

    #[test]
    fn default_moduli() {
        assert_eq!(FieldSpec::new(1, None).unwrap().modulus(), 0b11);
        assert_eq!(FieldSpec::new(2, None).unwrap().modulus(), 0b111);
        assert_eq!(FieldSpec::new(3, None).unwrap().modulus(), 0b1011);
        assert_eq!(FieldSpec::new(4, None).unwrap().modulus(), 0b10011);
        assert_eq!(FieldSpec::new(2, None).unwrap().modulus_string(), "x^2+x+1");
    }

    #[test]
    fn explicit_modulus_validation() {
        assert!(FieldSpec::new(3, Some(0b1101)).is_ok());
        assert!(matches!(
            FieldSpec::new(2, Some(0b101)),
            Err(FieldError::Reducible(_))
        ));
        assert!(matches!(
            FieldSpec::new(3, Some(0b111)),
            Err(FieldError::WrongDegree { .. })
        ));
        assert!(matches!(
            FieldSpec::new(1, Some(0b10)),
            Err(FieldError::NoConstantTerm(_))
        ));
        assert!(matches!(
            FieldSpec::new(0, None),
            Err(FieldError::DegreeOutOfRange(0))
        ));
        assert!(matches!(
            FieldSpec::new(17, None),
            Err(FieldError::DegreeOutOfRange(17))
        ));
    }

    #[test]
    fn small_field_identities() {
        let f2 = FieldSpec::new(1, None).unwrap();
        assert_eq!(f2.add(fe(1), fe(1)), fe(0));
        let f4 = FieldSpec::new(2, None).unwrap();
        assert_eq!(f4.add(fe(0b10), fe(0b11)), fe(1));
        assert_eq!(f4.mul(fe(0b10), fe(0b11)), fe(1));
        assert_eq!(f4.inv(fe(0b10)).unwrap(), fe(0b11));
        assert_eq!(f4.inv(fe(1)).unwrap(), fe(1));
        assert_eq!(f4.inv(fe(0)), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn x_fourth_in_gf8() {
        // long division: x^4 = x * (x^3 + x + 1) + (x^2 + x)
        assert_eq!(poly_rem(0b10000, 0b1011), 0b110);
        let f8 = FieldSpec::new(3, Some(0b1011)).unwrap();
        assert_eq!(f8.mul(fe(0b100), fe(0b100)), fe(0b110));
    }

    #[test]
    fn irreducibility() {
        assert!(!is_irreducible(0b101));
        assert!(is_irreducible(0b111));
        assert!(is_irreducible(0b10011));
        assert!(is_irreducible(0b1101));
        assert!(!is_irreducible(0b10101)); // (x^2+x+1)^2
                                           // count of irreducibles of degree 4 over GF(2) is 3
        assert_eq!((16u64..32).filter(|&p| is_irreducible(p)).count(), 3);
    }

    #[test]
    fn enumeration_order() {
        let f = FieldSpec::new(3, None).unwrap();
        let v: Vec<u16> = f.elements().map(FieldElement::bits).collect();
        assert_eq!(v, (0..8).collect::<Vec<_>>());
        assert_eq!(
            FieldSpec::new(1, None)
                .unwrap()
                .elements()
                .collect::<Vec<_>>(),
            vec![fe(0), fe(1)]
        );
    }

    #[test]
    fn poly_strings_round_trip() {
        for p in [1u64, 2, 3, 0b1011, 0b10011, 1 << 16 | 0b101101] {
            assert_eq!(parse_poly(&poly_to_string(p)).unwrap(), p);
        }
        assert!(parse_poly("x^2+y").is_err());
    }

    #[test]
    fn element_parsing() {
        let f4 = FieldSpec::new(2, None).unwrap();
        assert_eq!(f4.parse_element("0x3").unwrap(), fe(3));
        assert_eq!(f4.parse_element("2").unwrap(), fe(2));
        assert!(f4.parse_element("0x4").is_err());
        assert!(f4.parse_element("zz").is_err());
        assert_eq!(fe(3).to_string(), "0x3");
    }
}
