//! Scalar abstraction for the exact kernel.
//!
//! Every predicate and solver in this crate is written against [`Scalar`], a
//! totally ordered exact field. The shipped instantiation is
//! [`Rat`](crate::Rat) (arbitrary-precision rationals); fixed-width rationals
//! such as `Ratio<i64>` also satisfy the bounds and are handy in small tests.
//! Floating-point types do not qualify: they lack `Ord` and exact arithmetic,
//! and nothing here ever rounds.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed, Zero};

use crate::error::Error;

/// An exact, totally ordered field scalar.
///
/// `canonicalize_direction` may rescale a vector by any positive factor into
/// a preferred small form; the default keeps it unchanged.
pub trait Scalar:
    Num
    + Signed
    + Ord
    + Clone
    + Hash
    + Debug
    + Display
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("exact scalar must represent small integers")
    }

    /// Exact sign: -1, 0 or +1.
    fn sign(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Rescale a direction vector by a positive factor into a canonical
    /// small form, returning `true` when the result is a complete normal
    /// form for the positive-multiple equivalence class. The default leaves
    /// the vector unchanged and returns `false`.
    fn canonicalize_direction(_coords: &mut [Self]) -> bool {
        false
    }

    /// Nearest value with denominator dividing `2^bits`, when the type can
    /// express one; the default keeps the value unchanged. Callers must
    /// re-verify whatever property they need of the rounded value.
    fn dyadic_round(&self, _bits: u32) -> Self {
        self.clone()
    }

    /// Rough size of the representation in bits; used only to decide whether
    /// simplifying a value is worth the effort.
    fn complexity(&self) -> u64 {
        0
    }
}

impl Scalar for BigRational {
    fn dyadic_round(&self, bits: u32) -> Self {
        let scale = BigInt::one() << bits;
        let half = self.denom() / BigInt::from(2);
        let num = (self.numer() * &scale + half) / self.denom();
        BigRational::new(num, scale)
    }

    fn canonicalize_direction(coords: &mut [Self]) -> bool {
        // Clear denominators and divide by the content so coordinates become
        // a primitive integer vector: the unique representative of the
        // positive-multiple class, and the cheapest form for later products.
        let mut lcm = BigInt::one();
        for c in coords.iter() {
            lcm = lcm.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        for c in coords.iter() {
            let scaled = c.numer() * (&lcm / c.denom());
            gcd = gcd.gcd(&scaled);
        }
        if gcd.is_zero() || lcm.is_zero() {
            return false;
        }
        for c in coords.iter_mut() {
            let scaled = c.numer() * (&lcm / c.denom());
            *c = BigRational::from_integer(&scaled / &gcd);
        }
        true
    }

    fn complexity(&self) -> u64 {
        self.numer().bits().max(self.denom().bits())
    }
}

impl Scalar for Ratio<i64> {}
impl Scalar for Ratio<i128> {}

/// Parse a rational from the `p/q` (or plain `p`) wire form.
pub fn parse_rat(s: &str) -> Result<BigRational, Error> {
    BigRational::from_str(s.trim()).map_err(|e| Error::ParseRational(s.to_string(), e.to_string()))
}

/// Format a rational as `p/q`, or `p` when the denominator is one.
pub fn rat_to_string(r: &BigRational) -> String {
    r.to_string()
}

/// Integer-valued rational.
pub fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `p/q` as a rational; `q` must be nonzero.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-3/4", "0", "17", "-2"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(rat_to_string(&r), s);
        }
        // Non-reduced input normalizes.
        assert_eq!(rat_to_string(&parse_rat("6/8").unwrap()), "3/4");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("abc").is_err());
    }

    #[test]
    fn denominator_stays_positive() {
        let r = rat(1, -2);
        assert_eq!(rat_to_string(&r), "-1/2");
        assert!(r.denom() > &BigInt::from(0));
    }

    #[test]
    fn canonicalize_direction_gives_primitive_integers() {
        let mut v = vec![rat(1, 2), rat(-3, 4), rat_int(0)];
        Scalar::canonicalize_direction(&mut v);
        assert_eq!(v, vec![rat_int(2), rat_int(-3), rat_int(0)]);
    }

    proptest! {
        // Arithmetic round-trip: (a+b)-b = a and (a*b)/b = a exactly.
        #[test]
        fn arithmetic_round_trip(ap in -1000i64..1000, aq in 1i64..100,
                                 bp in -1000i64..1000, bq in 1i64..100) {
            let a = rat(ap, aq);
            let b = rat(bp, bq);
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a);
            }
        }
    }
}
