use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Int, Rat, Result};

/// Default relative precision (bits) of 2-adic computations.
pub const DEFAULT_PREC: u32 = 192;

/// An element of `Q₂` known to finite precision: `2^val · unit` with `unit`
/// odd and known modulo `2^prec`.
///
/// A value whose known digits are all zero is stored with `unit = 0`,
/// `prec = 0`, and `val` equal to the number of known zero digits.
#[derive(Clone, PartialEq, Eq)]
pub struct Z2Elem {
    val: i64,
    unit: BigUint,
    prec: u32,
}

fn mask(bits: u32) -> BigUint {
    (BigUint::one() << bits) - BigUint::one()
}

/// Reduce a signed integer into `[0, 2^bits)`.
fn reduce(n: &BigInt, bits: u32) -> BigUint {
    let m = BigInt::one() << bits;
    n.mod_floor(&m).to_biguint().unwrap()
}

/// Inverse of an odd `u` modulo `2^bits`, by Newton iteration.
pub(crate) fn inv_mod_pow2(u: &BigUint, bits: u32) -> BigUint {
    debug_assert!(u.bit(0));
    let mut y = BigUint::one();
    let mut k = 1u32;
    let two = BigUint::from(2u8);
    while k < bits {
        k = (2 * k).min(bits);
        let m = mask(k);
        let uy = (u * &y) & &m;
        // y <- y (2 - u y) mod 2^k
        let t = ((&two + (BigUint::one() << k)) - uy) & &m;
        y = (&y * t) & &m;
    }
    y & mask(bits)
}

impl Z2Elem {
    /// The value `0` known modulo `2^abs_prec`.
    pub fn zero(abs_prec: i64) -> Self {
        Z2Elem { val: abs_prec, unit: BigUint::zero(), prec: 0 }
    }

    /// An integer, known to `prec` bits of relative precision.
    pub fn from_int(n: &Int, prec: u32) -> Self {
        if n.is_zero() {
            return Self::zero(prec as i64);
        }
        let v = n.trailing_zeros().unwrap();
        let u = n >> v;
        Z2Elem { val: v as i64, unit: reduce(&u, prec), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    /// A rational number, known to `prec` bits of relative precision.
    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        if r.is_zero() {
            return Self::zero(prec as i64);
        }
        let n = Self::from_int(r.numer(), prec);
        let d = Self::from_int(r.denom(), prec);
        n.div(&d)
    }

    /// Build from raw parts; `unit` is reduced modulo `2^prec` and must be odd.
    pub fn from_parts(val: i64, unit: &Int, prec: u32) -> Self {
        let u = reduce(unit, prec);
        assert!(prec == 0 || u.bit(0), "unit part must be odd");
        Z2Elem { val, unit: u, prec }
    }

    pub fn one(prec: u32) -> Self {
        Z2Elem { val: 0, unit: BigUint::one(), prec }
    }

    /// True when every known digit is zero.
    pub fn is_zero(&self) -> bool {
        self.prec == 0
    }

    /// Valuation, or `None` when the value is zero to the known precision.
    pub fn ord(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Relative precision in bits.
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Absolute precision: the value is known modulo `2^abs_prec`.
    pub fn abs_prec(&self) -> i64 {
        self.val + self.prec as i64
    }

    /// Odd part, as an integer in `[0, 2^prec)`.
    pub fn unit_part(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.unit.clone())
    }

    /// Representative in `[0, 2^k)` of an integral value, for `k <= abs_prec`.
    pub fn residue(&self, k: u32) -> Result<u64> {
        if self.abs_prec() < k as i64 {
            return Err(Error::PrecisionExhausted);
        }
        if self.is_zero() || self.val >= k as i64 {
            return Ok(0);
        }
        if self.val < 0 {
            return Err(Error::InvalidInput("residue of a non-integral 2-adic number".into()));
        }
        let x = (&self.unit << self.val as usize) & mask(k);
        Ok(x.to_u64().expect("residue wider than 64 bits"))
    }

    /// Integer representative of an integral value, in `[0, 2^abs_prec)`.
    pub fn to_int(&self) -> Result<BigInt> {
        if self.is_zero() {
            return Ok(BigInt::zero());
        }
        if self.val < 0 {
            return Err(Error::InvalidInput("not a 2-adic integer".into()));
        }
        Ok(BigInt::from_biguint(Sign::Plus, &self.unit << self.val as usize))
    }

    /// Same value with relative precision lowered to at most `prec`.
    pub fn truncate(&self, prec: u32) -> Self {
        if prec >= self.prec {
            return self.clone();
        }
        if prec == 0 {
            return Self::zero(self.val);
        }
        Z2Elem { val: self.val, unit: &self.unit & mask(prec), prec }
    }

    /// Same value known only modulo `2^abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if self.is_zero() {
            return Self::zero(self.val.min(abs));
        }
        if abs <= self.val {
            return Self::zero(abs);
        }
        self.truncate((abs - self.val).min(self.prec as i64) as u32)
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let m = BigUint::one() << self.prec;
        Z2Elem { val: self.val, unit: (&m - &self.unit) & mask(self.prec), prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Self {
        let abs = self.abs_prec().min(other.abs_prec());
        if self.is_zero() {
            return other.truncate_abs(abs);
        }
        if other.is_zero() {
            return self.truncate_abs(abs);
        }
        let m = self.val.min(other.val);
        if abs <= m {
            return Self::zero(abs);
        }
        let width = (abs - m) as u32;
        let a = &self.unit << (self.val - m) as usize;
        let b = &other.unit << (other.val - m) as usize;
        let s = (a + b) & mask(width);
        if s.is_zero() {
            return Self::zero(abs);
        }
        let t = s.trailing_zeros().unwrap();
        Z2Elem { val: m + t as i64, unit: s >> t as usize, prec: width - t as u32 }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Self::zero(self.val + other.val),
            (true, false) => Self::zero(self.val + other.val),
            (false, true) => Self::zero(self.val + other.val),
            (false, false) => {
                let p = self.prec.min(other.prec);
                Z2Elem { val: self.val + other.val, unit: (&self.unit * &other.unit) & mask(p), prec: p }
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted);
        }
        Ok(Z2Elem { val: -self.val, unit: inv_mod_pow2(&self.unit, self.prec), prec: self.prec })
    }

    /// Division; panics on a divisor that is zero to the known precision.
    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv().expect("division by a 2-adic zero"))
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        Z2Elem { val: self.val + k, unit: self.unit.clone(), prec: self.prec }
    }

    /// Divide by a nonzero integer.
    pub fn div_int(&self, n: &BigInt) -> Self {
        let t = n.trailing_zeros().expect("division by zero") as i64;
        let odd: BigInt = n >> t;
        let r = self.shl(-t);
        if r.is_zero() {
            return r;
        }
        let inv = inv_mod_pow2(&reduce(&odd, r.prec), r.prec);
        Z2Elem { val: r.val, unit: (&r.unit * inv) & mask(r.prec), prec: r.prec }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// `self^e` for `e >= 0`.
    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut r = Self::one(self.prec.max(1));
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.square();
            e >>= 1;
        }
        r
    }

    /// True when `self ≡ other` modulo `2^k` (both must be known that far).
    pub fn congruent(&self, other: &Self, k: i64) -> Result<bool> {
        let d = self.sub(other);
        if d.abs_prec() < k {
            return Err(Error::PrecisionExhausted);
        }
        Ok(d.is_zero() || d.val >= k)
    }
}

impl fmt::Debug for Z2Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "O(2^{})", self.val)
        } else {
            write!(f, "2^{} * {} + O(2^{})", self.val, self.unit, self.abs_prec())
        }
    }
}

/// Square root in `Z₂` of a unit `a ≡ 1 (mod 8)`, normalised by `s ≡ 1 (mod 4)`.
///
/// Elements `4^k · a` are accepted as well. If `a` is known to `p` bits the root is
/// known to `p - 1` bits; the returned representative still satisfies
/// `s² ≡ a (mod 2^p)`.
pub fn hensel_sqrt(a: &Z2Elem) -> Result<Z2Elem> {
    let v = a.ord().ok_or(Error::PrecisionExhausted)?;
    if v % 2 != 0 {
        return Err(Error::NoSquareRoot("odd valuation".into()));
    }
    if a.prec < 3 {
        return Err(Error::PrecisionExhausted);
    }
    if (&a.unit & BigUint::from(7u8)) != BigUint::one() {
        return Err(Error::NoSquareRoot("unit part is not 1 mod 8".into()));
    }
    let p = a.prec;
    let mut s = BigUint::one();
    for j in 3..p {
        let m = mask(j + 1);
        if ((&s * &s) & &m) != (&a.unit & &m) {
            s += BigUint::one() << (j - 1);
        }
    }
    Ok(Z2Elem { val: v / 2, unit: s & mask(p), prec: p - 1 })
}

/// Square root of `a` in `Q₂` if it exists (any sign; the hensel-normalised root).
pub fn sqrt_q2(a: &Z2Elem) -> Result<Option<Z2Elem>> {
    match hensel_sqrt(a) {
        Ok(s) => Ok(Some(s)),
        Err(Error::NoSquareRoot(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: i64) -> Z2Elem {
        Z2Elem::from_i64(n, 64)
    }

    #[test]
    fn ring_operations_match_integers() {
        for a in -40i64..40 {
            for b in -40i64..40 {
                let s = z(a).add(&z(b));
                assert!(s.congruent(&z(a + b), 60).unwrap(), "{a}+{b}");
                let p = z(a).mul(&z(b));
                if a * b != 0 {
                    assert_eq!(p.ord(), Some((a * b).trailing_zeros() as i64));
                    assert!(p.congruent(&z(a * b), 60).unwrap());
                }
            }
        }
    }

    #[test]
    fn inverse_and_rationals() {
        let r = Z2Elem::from_rat(&Rat::new(BigInt::from(3), BigInt::from(4)), 64);
        assert_eq!(r.ord(), Some(-2));
        let back = r.mul(&z(4));
        assert!(back.congruent(&z(3), 60).unwrap());
        let u = z(7).inv().unwrap();
        assert!(u.mul(&z(7)).congruent(&z(1), 64).unwrap());
    }

    #[test]
    fn precision_shrinks_under_cancellation() {
        let a = Z2Elem::from_i64(1 + (1 << 20), 32);
        let b = Z2Elem::from_i64(1, 32);
        let d = a.sub(&b);
        assert_eq!(d.ord(), Some(20));
        assert_eq!(d.abs_prec(), 32);
    }

    #[test]
    fn hensel_examples() {
        let s = hensel_sqrt(&Z2Elem::from_i64(-7, 5)).unwrap();
        assert_eq!(s.prec(), 4);
        assert_eq!(s.residue(4).unwrap(), 5);
        assert_eq!((s.unit_part() * s.unit_part() + 7) % 32, BigInt::zero());
        let s = hensel_sqrt(&Z2Elem::from_i64(-31, 64)).unwrap();
        assert_eq!(s.residue(3).unwrap(), 1);
        assert!(s.square().congruent(&z(-31), 63).unwrap());
        let s = hensel_sqrt(&Z2Elem::from_i64(-7, 64)).unwrap();
        assert_eq!(s.residue(6).unwrap(), 53);
        assert!(matches!(hensel_sqrt(&z(3)), Err(Error::NoSquareRoot(_))));
        assert!(matches!(hensel_sqrt(&z(2)), Err(Error::NoSquareRoot(_))));
    }
}
