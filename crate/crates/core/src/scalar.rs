//! Exact arithmetic in the localization `Z_(p)`.
//!
//! A [`PLocal`] is a reduced rational number. Addition, negation and
//! multiplication never introduce a factor of `p` into a denominator, so those
//! operators are available without a prime. Anything that could leave the
//! ring (division, construction from an arbitrary fraction) goes through a
//! [`PrimeContext`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u64),
    #[error("{value} is not {p}-local")]
    NotPLocal { value: String, p: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse scalar `{0}`")]
    Parse(String),
}

/// p-adic valuation; `Infinite` is the valuation of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of `Z_(p)`, stored in lowest terms with positive denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PLocal(BigRational);

impl PLocal {
    pub fn zero() -> Self {
        PLocal(BigRational::zero())
    }

    pub fn one() -> Self {
        PLocal(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        PLocal(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        PLocal(BigRational::from_integer(n))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    /// Small integer value, if this is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if self.0.is_integer() {
            self.0.numer().to_i64()
        } else {
            None
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = PLocal::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `(-1)^e`.
    pub fn sign(e: u64) -> Self {
        if e.is_multiple_of(2) {
            PLocal::one()
        } else {
            -PLocal::one()
        }
    }
}

impl Default for PLocal {
    fn default() -> Self {
        PLocal::zero()
    }
}

impl fmt::Display for PLocal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for PLocal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for PLocal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl PartialOrd for PLocal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PLocal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<&PLocal> for &PLocal {
            type Output = PLocal;
            fn $m(self, rhs: &PLocal) -> PLocal {
                PLocal($tr::$m(&self.0, &rhs.0))
            }
        }
        impl $tr<PLocal> for PLocal {
            type Output = PLocal;
            fn $m(self, rhs: PLocal) -> PLocal {
                PLocal($tr::$m(self.0, rhs.0))
            }
        }
        impl $tr<&PLocal> for PLocal {
            type Output = PLocal;
            fn $m(self, rhs: &PLocal) -> PLocal {
                PLocal($tr::$m(self.0, &rhs.0))
            }
        }
        impl $atr<&PLocal> for PLocal {
            fn $am(&mut self, rhs: &PLocal) {
                $atr::$am(&mut self.0, &rhs.0)
            }
        }
        impl $atr<PLocal> for PLocal {
            fn $am(&mut self, rhs: PLocal) {
                $atr::$am(&mut self.0, rhs.0)
            }
        }
    };
}

binop!(Add, add, AddAssign, add_assign);
binop!(Sub, sub, SubAssign, sub_assign);
binop!(Mul, mul, MulAssign, mul_assign);

impl Neg for PLocal {
    type Output = PLocal;
    fn neg(self) -> PLocal {
        PLocal(-self.0)
    }
}

impl Neg for &PLocal {
    type Output = PLocal;
    fn neg(self) -> PLocal {
        PLocal(-&self.0)
    }
}

impl From<i64> for PLocal {
    fn from(n: i64) -> Self {
        PLocal::from_int(n)
    }
}

/// The prime `p` fixing the ground ring `Z_(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeContext {
    p: u64,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeContext {
    /// Rejects 2: the constructions here need 1/2 in the ground ring.
    pub fn new(p: u64) -> Result<Self, ScalarError> {
        if p < 3 || !is_prime(p) || p > u32::MAX as u64 {
            return Err(ScalarError::InvalidPrime(p));
        }
        Ok(PrimeContext { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    fn p_big(&self) -> BigInt {
        BigInt::from(self.p)
    }

    pub fn is_local(&self, a: &PLocal) -> bool {
        !(a.denom() % self.p_big()).is_zero()
    }

    /// Builds `num/den`, failing if the reduced denominator is divisible by `p`.
    pub fn scalar(&self, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<PLocal, ScalarError> {
        let den = den.into();
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        self.check(PLocal(BigRational::new(num.into(), den)))
    }

    pub fn check(&self, a: PLocal) -> Result<PLocal, ScalarError> {
        if self.is_local(&a) {
            Ok(a)
        } else {
            Err(ScalarError::NotPLocal {
                value: a.to_string(),
                p: self.p,
            })
        }
    }

    pub fn divide_exact(&self, a: &PLocal, b: &PLocal) -> Result<PLocal, ScalarError> {
        if b.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        self.check(PLocal(&a.0 / &b.0))
    }

    /// Parses `n`, `-n` or `n/d`.
    pub fn parse(&self, s: &str) -> Result<PLocal, ScalarError> {
        let s = s.trim();
        let bad = || ScalarError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
                let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
                if d.is_negative() {
                    return Err(bad());
                }
                self.scalar(n, d)
            }
            None => Ok(PLocal::from_bigint(BigInt::from_str(s).map_err(|_| bad())?)),
        }
    }

    pub fn valuation(&self, a: &PLocal) -> Valuation {
        if a.is_zero() {
            return Valuation::Infinite;
        }
        let p = self.p_big();
        let mut n = a.numer().abs();
        let mut v = 0;
        loop {
            let (q, r) = n.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            n = q;
            v += 1;
        }
        Valuation::Finite(v)
    }

    /// Finite valuation, or `None` for zero.
    pub fn val(&self, a: &PLocal) -> Option<u32> {
        self.valuation(a).finite()
    }

    pub fn is_unit(&self, a: &PLocal) -> bool {
        self.valuation(a) == Valuation::Finite(0)
    }

    pub fn p_power(&self, k: u32) -> PLocal {
        PLocal::from_bigint(num_traits::pow(self.p_big(), k as usize))
    }

    /// The ring map `Z_(p) -> F_p`, returned as a residue in `0..p`.
    pub fn reduce_mod_p(&self, a: &PLocal) -> u64 {
        let p = self.p_big();
        let n = a.numer().mod_floor(&p);
        let d = a.denom().mod_floor(&p);
        let n = n.to_u64().expect("residue fits");
        let d = d.to_u64().expect("residue fits");
        mulmod(n, inv_mod(d, self.p), self.p)
    }

    /// Lifts a residue to the integer representative in `0..p`.
    pub fn lift(&self, r: u64) -> PLocal {
        PLocal::from_bigint(BigInt::from(r % self.p))
    }

    pub fn factorial(k: u32) -> PLocal {
        let mut acc = BigInt::one();
        for i in 2..=k {
            acc *= BigInt::from(i);
        }
        PLocal::from_bigint(acc)
    }

    pub fn binomial(n: u32, k: u32) -> PLocal {
        if k > n {
            return PLocal::zero();
        }
        let mut acc = BigInt::one();
        for i in 0..k {
            acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        PLocal::from_bigint(acc)
    }
}

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Inverse of a nonzero residue modulo the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(!a.is_multiple_of(p), "residue {a} not invertible mod {p}");
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(result, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ctx(p: u64) -> PrimeContext {
        PrimeContext::new(p).unwrap()
    }

    #[test]
    fn rejects_two_and_composites() {
        assert_eq!(PrimeContext::new(2), Err(ScalarError::InvalidPrime(2)));
        assert!(PrimeContext::new(9).is_err());
        assert!(PrimeContext::new(1).is_err());
        assert!(PrimeContext::new(7).is_ok());
    }

    #[test]
    fn ring_op_examples() {
        let c = ctx(3);
        let half = c.scalar(1, 2).unwrap();
        assert_eq!(&half + &half, PLocal::one());
        assert_eq!(
            c.divide_exact(&PLocal::from_int(3), &PLocal::from_int(2)).unwrap(),
            c.scalar(3, 2).unwrap()
        );
        assert!(matches!(
            c.divide_exact(&PLocal::one(), &PLocal::from_int(3)),
            Err(ScalarError::NotPLocal { .. })
        ));
        assert_eq!(
            c.divide_exact(&PLocal::one(), &PLocal::zero()),
            Err(ScalarError::DivisionByZero)
        );
        assert!(c.scalar(1, 6).is_err());
    }

    #[test]
    fn canonical_zero() {
        let c = ctx(5);
        let z = c.scalar(0, 7).unwrap();
        assert_eq!(z, PLocal::zero());
        assert_eq!(z.denom(), &BigInt::one());
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn valuation_examples() {
        let c3 = ctx(3);
        assert_eq!(c3.valuation(&c3.scalar(9, 2).unwrap()), Valuation::Finite(2));
        assert_eq!(c3.valuation(&PLocal::zero()), Valuation::Infinite);
        assert_eq!(c3.valuation(&c3.scalar(5, 7).unwrap()), Valuation::Finite(0));
    }

    #[test]
    fn reduction_examples() {
        let c3 = ctx(3);
        assert_eq!(c3.reduce_mod_p(&c3.scalar(3, 2).unwrap()), 0);
        // brute-force inverse of 2 modulo 3
        let inv2 = (0..3u64).find(|x| (2 * x) % 3 == 1).unwrap();
        assert_eq!(c3.reduce_mod_p(&c3.scalar(1, 2).unwrap()), inv2);
        assert_eq!(ctx(5).reduce_mod_p(&PLocal::from_int(7)), 2);
        assert_eq!(ctx(5).reduce_mod_p(&PLocal::from_int(-1)), 4);
    }

    #[test]
    fn display_and_parse() {
        let c = ctx(3);
        assert_eq!(c.scalar(-3, 2).unwrap().to_string(), "-3/2");
        assert_eq!(c.parse("-3/2").unwrap(), c.scalar(-3, 2).unwrap());
        assert_eq!(c.parse(" 12 ").unwrap(), PLocal::from_int(12));
        assert!(c.parse("1/3").is_err());
        assert!(c.parse("x").is_err());
        assert!(c.parse("1/-2").is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(PrimeContext::binomial(5, 2), PLocal::from_int(10));
        assert_eq!(PrimeContext::binomial(3, 4), PLocal::zero());
        assert_eq!(PrimeContext::factorial(5), PLocal::from_int(120));
    }

    fn local(p: u64) -> impl Strategy<Value = PLocal> {
        (-60i64..60, 1i64..40).prop_filter_map("p-local", move |(n, d)| {
            ctx(p).scalar(n, d).ok()
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in local(3), b in local(3), c in local(3)) {
            prop_assert_eq!((&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!((&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &a * &b + &a * &c);
            prop_assert!(ctx(3).is_local(&(&a * &b)));
            prop_assert!(ctx(3).is_local(&(&a - &b)));
        }

        #[test]
        fn valuation_is_discrete(a in local(5), b in local(5)) {
            let c = ctx(5);
            let (va, vb) = (c.valuation(&a), c.valuation(&b));
            let vs = c.valuation(&(&a + &b));
            prop_assert!(vs >= va.min(vb));
            if va != vb {
                prop_assert_eq!(vs, va.min(vb));
            }
            let vm = c.valuation(&(&a * &b));
            match (va, vb) {
                (Valuation::Finite(x), Valuation::Finite(y)) => prop_assert_eq!(vm, Valuation::Finite(x + y)),
                _ => prop_assert_eq!(vm, Valuation::Infinite),
            }
        }

        #[test]
        fn reduction_is_a_ring_map(a in local(7), b in local(7)) {
            let c = ctx(7);
            let p = c.p();
            prop_assert_eq!(c.reduce_mod_p(&(&a * &b)), mulmod(c.reduce_mod_p(&a), c.reduce_mod_p(&b), p));
            prop_assert_eq!(c.reduce_mod_p(&(&a + &b)), (c.reduce_mod_p(&a) + c.reduce_mod_p(&b)) % p);
            prop_assert_eq!(c.reduce_mod_p(&a) == 0, c.valuation(&a) > Valuation::Finite(0));
        }
    }
}
