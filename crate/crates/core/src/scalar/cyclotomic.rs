//! The cyclotomic field ℚ(ζ_n), represented on the power basis
//! {1, ζ, …, ζ^{φ(n)−1}} reduced modulo the n-th cyclotomic polynomial
//! Φ_n. The canonical reduced form is unique, so equality is
//! coordinate-wise and every ring identity holds exactly.
//!
//! The field order n is carried by each element; elements of different
//! orders never meet in one computation (a scenario fixes n = 2T once).

use super::Rat;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

/// Per-order context: φ(n) and the reduction rows expressing ζ^k over the
/// power basis for 0 ≤ k < n.
struct Ctx {
    phi: usize,
    /// power[k] = coordinates of ζ_n^k over {1, ζ, …, ζ^{φ−1}}.
    power: Vec<Vec<Rat>>,
}

static CONTEXTS: Lazy<Mutex<HashMap<u32, Arc<Ctx>>>> = Lazy::new(|| Mutex::new(HashMap::new()));

/// Integer polynomial helpers on dense coefficient vectors (index = degree).
fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

/// Exact division of integer polynomials; panics if not divisible
/// (cyclotomic factors always divide exactly).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    poly_trim(&mut rem);
    let mut den = den.to_vec();
    poly_trim(&mut den);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut quot = vec![BigInt::zero(); rem.len().saturating_sub(dd)];
    while rem.len() > dd {
        let rd = rem.len() - 1;
        let q = &rem[rd] / &lead;
        assert_eq!(&q * &lead, rem[rd], "non-exact polynomial division");
        quot[rd - dd] = q.clone();
        for i in 0..=dd {
            let t = &den[i] * &q;
            rem[rd - dd + i] -= t;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    assert!(rem.is_empty(), "non-exact polynomial division");
    quot
}

/// Φ_n computed by dividing x^n − 1 by the proper cyclotomic factors.
fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    if n == 1 {
        return vec![BigInt::from(-1), BigInt::from(1)];
    }
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::from(1);
    let mut result = num;
    for d in 1..n {
        if n % d == 0 {
            result = poly_div_exact(&result, &cyclotomic_poly(d));
        }
    }
    result
}

fn ctx(n: u32) -> Arc<Ctx> {
    assert!(n >= 1, "cyclotomic order must be positive");
    let mut map = CONTEXTS.lock().unwrap();
    if let Some(c) = map.get(&n) {
        return c.clone();
    }
    let min_poly = cyclotomic_poly(n);
    let phi = min_poly.len() - 1;
    // Build ζ^k rows iteratively: ζ^{k+1} = shift(ζ^k), reducing the top
    // coordinate through ζ^φ = −(Φ_n − x^φ).
    let top: Vec<Rat> = (0..phi)
        .map(|i| -Rat::from_integer(min_poly[i].clone()))
        .collect();
    let mut power: Vec<Vec<Rat>> = Vec::with_capacity(n as usize);
    let mut row = vec![Rat::zero(); phi];
    row[0] = Rat::one();
    power.push(row.clone());
    for _ in 1..n {
        let overflow = row[phi - 1].clone();
        for i in (1..phi).rev() {
            row[i] = row[i - 1].clone();
        }
        row[0] = Rat::zero();
        if !overflow.is_zero() {
            for i in 0..phi {
                let t = &top[i] * &overflow;
                row[i] += t;
            }
        }
        power.push(row.clone());
    }
    let c = Arc::new(Ctx { phi, power });
    map.insert(n, c.clone());
    c
}

/// An element of ℚ(ζ_n) in canonical power-basis coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct Cyc {
    order: u32,
    coeffs: Vec<Rat>,
}

impl Cyc {
    pub fn zero(order: u32) -> Cyc {
        let phi = ctx(order).phi;
        Cyc {
            order,
            coeffs: vec![Rat::zero(); phi],
        }
    }

    pub fn one(order: u32) -> Cyc {
        Cyc::from_rat(order, Rat::one())
    }

    pub fn from_rat(order: u32, r: Rat) -> Cyc {
        let mut z = Cyc::zero(order);
        z.coeffs[0] = r;
        z
    }

    pub fn from_int(order: u32, n: i64) -> Cyc {
        Cyc::from_rat(order, Rat::from_integer(BigInt::from(n)))
    }

    /// ζ_n^k for any integer k (negative exponents wrap around).
    pub fn zeta_pow(order: u32, k: i64) -> Cyc {
        let c = ctx(order);
        let k = k.rem_euclid(order as i64) as usize;
        Cyc {
            order,
            coeffs: c.power[k].clone(),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Some(r) when the element is rational.
    pub fn as_rat(&self) -> Option<Rat> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check_order(&self, other: &Cyc) {
        assert_eq!(
            self.order, other.order,
            "mixed cyclotomic orders {} and {}",
            self.order, other.order
        );
    }

    pub fn add(&self, other: &Cyc) -> Cyc {
        self.check_order(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Cyc {
            order: self.order,
            coeffs,
        }
    }

    pub fn sub(&self, other: &Cyc) -> Cyc {
        self.check_order(other);
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Cyc {
            order: self.order,
            coeffs,
        }
    }

    pub fn neg(&self) -> Cyc {
        Cyc {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &Cyc) -> Cyc {
        self.check_order(other);
        let c = ctx(self.order);
        let phi = c.phi;
        // Convolve, then push coordinates ≥ φ back through the power rows.
        // For even n the product degree 2φ−2 stays below n.
        let mut conv = vec![Rat::zero(); 2 * phi - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let t = a * b;
                conv[i + j] += t;
            }
        }
        let mut coeffs = conv[..phi].to_vec();
        for (k, extra) in conv.iter().enumerate().skip(phi) {
            if extra.is_zero() {
                continue;
            }
            let row = &c.power[k % self.order as usize];
            for i in 0..phi {
                if !row[i].is_zero() {
                    let t = &row[i] * extra;
                    coeffs[i] += t;
                }
            }
        }
        Cyc {
            order: self.order,
            coeffs,
        }
    }

    pub fn scale(&self, r: &Rat) -> Cyc {
        Cyc {
            order: self.order,
            coeffs: self.coeffs.iter().map(|a| a * r).collect(),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in
    /// ℚ[x] against Φ_n. Panics on zero.
    pub fn inv(&self) -> Cyc {
        assert!(!self.is_zero(), "division by zero in cyclotomic field");
        let c = ctx(self.order);
        let modulus: Vec<Rat> = cyclotomic_poly(self.order)
            .into_iter()
            .map(Rat::from_integer)
            .collect();
        let mut elem = self.coeffs.clone();
        trim_rat(&mut elem);
        // Invariants: r0 ≡ s0·elem (mod Φ), r1 ≡ s1·elem (mod Φ).
        let mut r0 = modulus;
        let mut r1 = elem;
        let mut s0: Vec<Rat> = vec![];
        let mut s1: Vec<Rat> = vec![Rat::one()];
        while r1.len() > 1 {
            let (q, r) = rat_poly_divmod(&r0, &r1);
            let s_new = rat_poly_sub(&s0, &rat_poly_mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s_new;
            assert!(
                !r1.is_empty(),
                "element shares a factor with the cyclotomic modulus"
            );
        }
        // r1 is a nonzero constant: inverse = s1 / r1 reduced mod Φ.
        let scale = r1[0].recip();
        let mut coeffs = vec![Rat::zero(); c.phi];
        for (k, v) in s1.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let v = v * &scale;
            let row = &c.power[k % self.order as usize];
            for i in 0..c.phi {
                if !row[i].is_zero() {
                    let t = &row[i] * &v;
                    coeffs[i] += t;
                }
            }
        }
        Cyc {
            order: self.order,
            coeffs,
        }
    }

    pub fn div(&self, other: &Cyc) -> Cyc {
        self.mul(&other.inv())
    }
}

fn trim_rat(p: &mut Vec<Rat>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn rat_poly_divmod(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut rem = num.to_vec();
    trim_rat(&mut rem);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    if rem.len() <= dd {
        return (vec![], rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - dd];
    while rem.len() > dd {
        let rd = rem.len() - 1;
        let q = &rem[rd] / &lead;
        quot[rd - dd] = q.clone();
        for i in 0..=dd {
            let t = &den[i] * &q;
            rem[rd - dd + i] -= t;
        }
        trim_rat(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    (quot, rem)
}

fn rat_poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            let t = x * y;
            out[i + j] += t;
        }
    }
    trim_rat(&mut out);
    out
}

fn rat_poly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim_rat(&mut out);
    out
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc[{}](", self.order)?;
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if k == 0 {
                write!(f, "{}", c)?;
            } else {
                write!(f, "{}·ζ^{}", c, k)?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    #[test]
    fn small_cyclotomic_polys() {
        let to_i64 = |p: Vec<BigInt>| -> Vec<i64> {
            p.into_iter().map(|c| i64::try_from(c).unwrap()).collect()
        };
        assert_eq!(to_i64(cyclotomic_poly(4)), vec![1, 0, 1]); // x²+1
        assert_eq!(to_i64(cyclotomic_poly(6)), vec![1, -1, 1]); // x²-x+1
        assert_eq!(to_i64(cyclotomic_poly(8)), vec![1, 0, 0, 0, 1]); // x⁴+1
        assert_eq!(to_i64(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn gaussian_arithmetic() {
        // (1+i)(1−i) = 2 in Q(ζ₄)
        let i = Cyc::zeta_pow(4, 1);
        let one = Cyc::one(4);
        let p = one.add(&i).mul(&one.sub(&i));
        assert_eq!(p, Cyc::from_int(4, 2));
        // ζ₄ / ζ₄ = 1
        assert!(i.div(&i).is_one());
        // i² = −1
        assert_eq!(i.mul(&i), Cyc::from_int(4, -1));
    }

    #[test]
    fn multiplicative_identity() {
        let x = Cyc::zeta_pow(6, 1).add(&Cyc::from_rat(6, rat(3, 7)));
        assert_eq!(x.mul(&Cyc::one(6)), x);
    }

    #[test]
    fn zeta_primitive_order() {
        for n in [2u32, 4, 6, 10, 12] {
            let z = Cyc::zeta_pow(n, 1);
            let mut acc = Cyc::one(n);
            for k in 1..n {
                acc = acc.mul(&z);
                assert_eq!(acc, Cyc::zeta_pow(n, k as i64));
                assert!(!acc.is_one(), "zeta_{n} had order {k}");
            }
            assert!(acc.mul(&z).is_one());
        }
    }

    fn arb_cyc(order: u32) -> impl Strategy<Value = Cyc> {
        let phi = ctx(order).phi;
        proptest::collection::vec((-6i64..6, 1i64..4), phi).prop_map(move |cs| {
            let mut z = Cyc::zero(order);
            for (k, (n, d)) in cs.into_iter().enumerate() {
                z.coeffs[k] = rat(n, d);
            }
            z
        })
    }

    proptest! {
        #[test]
        fn field_axioms_q_zeta4(a in arb_cyc(4), b in arb_cyc(4), c in arb_cyc(4)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            if !a.is_zero() {
                prop_assert!(a.mul(&a.inv()).is_one());
            }
        }

        #[test]
        fn field_axioms_q_zeta6(a in arb_cyc(6), b in arb_cyc(6), c in arb_cyc(6)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            if !b.is_zero() {
                prop_assert_eq!(a.div(&b).mul(&b), a);
            }
        }
    }
}
