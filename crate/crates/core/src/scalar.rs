//! Exact rational scalars.
//!
//! The ground field is Q throughout: the sign-laden identities of the
//! coderivation calculus must hold exactly, so floating point is never used.
//! `BigRational` keeps fractions reduced with a positive denominator, which
//! is exactly the canonical form the report serializer needs.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn from_int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn from_frac(num: i64, den: i64) -> Scalar {
    Scalar::new(BigInt::from(num), BigInt::from(den))
}

pub fn half() -> Scalar {
    from_frac(1, 2)
}

/// Parse an exact rational written as `p` or `p/q`.
pub fn parse(text: &str) -> Option<Scalar> {
    let text = text.trim();
    match text.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().ok()?;
            let den: BigInt = den.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Scalar::new(num, den))
        }
        None => {
            let num: BigInt = text.parse().ok()?;
            Some(Scalar::from_integer(num))
        }
    }
}

/// Canonical rendering: lowest terms, positive denominator, `p/q` with the
/// `/q` omitted for integers.
pub fn render(s: &Scalar) -> String {
    if s.denom().is_one() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}

/// Rendering with an explicit leading sign, used when writing polynomials.
pub fn render_signed(s: &Scalar) -> String {
    if s.is_negative() {
        format!("- {}", render(&(-s)))
    } else {
        format!("+ {}", render(s))
    }
}
