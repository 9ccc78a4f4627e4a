//! Exact scalar arithmetic.
//!
//! Three layers of numbers appear in the engine:
//!
//! - [`Frac`], a small copyable rational over `i64`, used for all grading
//!   bookkeeping: conformal weights, degrees above a module bottom, mode
//!   indices in (1/T)ℤ, and the exponents of residue products.
//! - [`Rat`] (= `BigRational`), arbitrary-precision rationals, used for
//!   binomial coefficients and anywhere values grow.
//! - [`Cyc`], elements of the cyclotomic field ℚ(ζ_n), used for every
//!   linear-algebra coefficient so that phases like e^{-j₁πi/T} stay exact.

pub mod cyclotomic;

pub use cyclotomic::Cyc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

/// Arbitrary-precision rational number, always in lowest terms with
/// positive denominator (maintained by `num_rational`).
pub type Rat = BigRational;

/// Shorthand for a big rational from machine integers.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integer as a big rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// A small exact fraction over `i64`, kept in lowest terms with positive
/// denominator. `Copy` and hashable, so it can serve as a map key for
/// memoization and as a grading label.
///
/// All values appearing in practice are elements of (1/T)ℤ for the small
/// automorphism order T of a scenario; arithmetic panics on overflow,
/// which cannot be reached at desk-scale weight caps.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Frac {
    num: i64,
    den: i64,
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };
    pub const ONE: Frac = Frac { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Frac {
        assert!(den != 0, "zero denominator");
        let g = num.gcd(&den);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        Frac { num, den }
    }

    pub fn int(n: i64) -> Frac {
        Frac { num: n, den: 1 }
    }

    /// One half, the generic twisted mode offset for order-2 twists.
    pub fn half(n: i64) -> Frac {
        Frac::new(n, 2)
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Floor as an integer.
    pub fn floor(&self) -> i64 {
        num_integer::Integer::div_floor(&self.num, &self.den)
    }

    /// True when `self` lies in `r/t + ℤ`.
    pub fn in_class(&self, r: i64, t: i64) -> bool {
        // self - r/t integral  <=>  t*num - r*den ≡ 0 mod t*den
        let lhs = self.num * t - r * self.den;
        lhs % (t * self.den) == 0
    }

    pub fn to_rat(&self) -> Rat {
        rat(self.num, self.den)
    }
}

impl Add for Frac {
    type Output = Frac;
    fn add(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Sub for Frac {
    type Output = Frac;
    fn sub(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.den - rhs.num * self.den, self.den * rhs.den)
    }
}

impl Mul for Frac {
    type Output = Frac;
    fn mul(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Div for Frac {
    type Output = Frac;
    fn div(self, rhs: Frac) -> Frac {
        assert!(rhs.num != 0, "division by zero");
        Frac::new(self.num * rhs.den, self.den * rhs.num)
    }
}

impl Neg for Frac {
    type Output = Frac;
    fn neg(self) -> Frac {
        Frac {
            num: -self.num,
            den: self.den,
        }
    }
}

impl AddAssign for Frac {
    fn add_assign(&mut self, rhs: Frac) {
        *self = *self + rhs;
    }
}

impl Add<i64> for Frac {
    type Output = Frac;
    fn add(self, rhs: i64) -> Frac {
        self + Frac::int(rhs)
    }
}

impl Sub<i64> for Frac {
    type Output = Frac;
    fn sub(self, rhs: i64) -> Frac {
        self - Frac::int(rhs)
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, other: &Frac) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frac {
    fn cmp(&self, other: &Frac) -> std::cmp::Ordering {
        // dens positive, so cross-multiplication preserves order
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Generalized binomial coefficient α(α−1)···(α−i+1)/i! for rational α.
///
/// `binomial(alpha, 0) = 1` (empty product); integral α smaller than `i`
/// gives 0 through the vanishing factor.
pub fn binomial(alpha: &Rat, i: u64) -> Rat {
    let mut acc = Rat::one();
    let mut factor = alpha.clone();
    for k in 0..i {
        if factor.is_zero() {
            return Rat::zero();
        }
        acc *= &factor;
        acc /= rat_int((k + 1) as i64);
        factor -= Rat::one();
    }
    acc
}

/// Binomial with a `Frac` top argument.
pub fn binomial_frac(alpha: Frac, i: u64) -> Rat {
    binomial(&alpha.to_rat(), i)
}

/// The phase constant e^{sign·j₁·πi/T} = ζ_{2T}^{sign·j₁} as an exact
/// cyclotomic number, following the branch convention (−1)^α = e^{iπα}.
pub fn phase(j1: u32, t: u32, sign: i32) -> Cyc {
    assert!(j1 < t, "phase exponent {} out of range for T = {}", j1, t);
    assert!(sign == 1 || sign == -1);
    Cyc::zeta_pow(2 * t, sign as i64 * j1 as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(&rat(1, 2), 2), rat(-1, 8));
        assert_eq!(binomial(&rat(7, 3), 0), Rat::one());
        assert_eq!(binomial(&rat(-5, 4), 0), Rat::one());
        assert_eq!(binomial(&rat_int(3), 5), Rat::zero());
        assert_eq!(binomial(&rat_int(5), 2), rat_int(10));
        assert_eq!(binomial(&rat_int(-1), 3), rat_int(-1));
    }

    #[test]
    fn frac_basics() {
        assert_eq!(Frac::new(2, 4), Frac::half(1));
        assert_eq!(Frac::new(-3, -6), Frac::half(1));
        assert_eq!(Frac::new(3, -2), Frac::new(-3, 2));
        assert_eq!(Frac::new(7, 2).floor(), 3);
        assert_eq!(Frac::new(-7, 2).floor(), -4);
        assert!(Frac::half(3).in_class(1, 2));
        assert!(!Frac::half(3).in_class(0, 2));
        assert!(Frac::int(4).in_class(0, 2));
        assert!(Frac::int(4).in_class(2, 2));
    }

    #[test]
    fn phase_examples() {
        // e^{0} = 1
        assert_eq!(phase(0, 3, 1), Cyc::one(6));
        // e^{-πi/2} = -i in Q(ζ₄)
        let minus_i = Cyc::zeta_pow(4, -1);
        assert_eq!(phase(1, 2, -1), minus_i);
        assert!(phase(1, 2, -1).mul(&Cyc::zeta_pow(4, 1)).is_one());
    }

    #[test]
    fn phase_inverse_pairs() {
        for t in [2u32, 3, 4, 5] {
            for j1 in 0..t {
                let p = phase(j1, t, 1).mul(&phase(j1, t, -1));
                assert!(p.is_one(), "phase({j1},{t},±1) not inverse");
            }
        }
    }

    proptest! {
        #[test]
        fn pascal_recurrence(num in -40i64..40, den in 1i64..6, i in 1u64..8) {
            let alpha = rat(num, den);
            let lhs = binomial(&alpha, i);
            let am1 = &alpha - Rat::one();
            let rhs = binomial(&am1, i) + binomial(&am1, i - 1);
            prop_assert_eq!(lhs, rhs);
        }
    }
}
