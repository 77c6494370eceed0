use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::z2::Z2Elem;
use crate::{Error, Result};

/// The quadratic extensions of `Q₂` that occur as completions.
///
/// `Unramified` is `Q₂(ζ)` with `ζ² + ζ + 1 = 0`; `Ramified(d)` is `Q₂(√d)`
/// with `d ∈ {3, -1, 2, -2, 6, -6}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Unramified,
    Ramified(i8),
}

impl Flavor {
    pub fn ramified(d: i8) -> Self {
        assert!(matches!(d, 3 | -1 | 2 | -2 | 6 | -6), "no ramified flavor for d = {d}");
        Flavor::Ramified(d)
    }

    /// Ramification index over `Q₂`.
    pub fn e(self) -> i64 {
        match self {
            Flavor::Unramified => 1,
            Flavor::Ramified(_) => 2,
        }
    }

    /// `ord_w` of the generator `g` (`ζ` or `√d`).
    fn ord_gen(self) -> i64 {
        match self {
            Flavor::Ramified(d) if d % 2 == 0 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Unramified => write!(f, "Q2(zeta3)"),
            Flavor::Ramified(d) => write!(f, "Q2(sqrt({d}))"),
        }
    }
}

/// Arithmetic shared by `Q₂` and its quadratic extensions, enough for logarithms.
pub trait LocalField: Clone + fmt::Debug {
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div_int(&self, n: &BigInt) -> Self;
    /// Normalised valuation; `Err(PrecisionExhausted)` when it cannot be decided.
    fn ord_w(&self) -> Result<i64>;
    /// The value is known modulo `𝔪^abs_prec_w`.
    fn abs_prec_w(&self) -> i64;
    fn ram_index(&self) -> i64;
    /// Number of elements of the residue field minus one.
    fn residue_units(&self) -> u64;
    fn is_zero_to_prec(&self) -> bool;
}

impl LocalField for Z2Elem {
    fn one_like(&self) -> Self {
        Z2Elem::one(self.prec().max(1))
    }
    fn add(&self, other: &Self) -> Self {
        Z2Elem::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Z2Elem::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Z2Elem::mul(self, other)
    }
    fn div_int(&self, n: &BigInt) -> Self {
        Z2Elem::div_int(self, n)
    }
    fn ord_w(&self) -> Result<i64> {
        self.ord().ok_or(Error::PrecisionExhausted)
    }
    fn abs_prec_w(&self) -> i64 {
        self.abs_prec()
    }
    fn ram_index(&self) -> i64 {
        1
    }
    fn residue_units(&self) -> u64 {
        1
    }
    fn is_zero_to_prec(&self) -> bool {
        self.is_zero()
    }
}

/// An element `a + b·g` of a quadratic extension of `Q₂`.
#[derive(Clone, PartialEq, Eq)]
pub struct LocalQuad {
    flavor: Flavor,
    a: Z2Elem,
    b: Z2Elem,
}

impl LocalQuad {
    pub fn new(flavor: Flavor, a: Z2Elem, b: Z2Elem) -> Self {
        LocalQuad { flavor, a, b }
    }

    /// Image of an element of `Q₂`.
    pub fn from_base(flavor: Flavor, a: Z2Elem) -> Self {
        let b = Z2Elem::zero(a.abs_prec().max(a.prec() as i64));
        LocalQuad { flavor, a, b }
    }

    pub fn one(flavor: Flavor, prec: u32) -> Self {
        LocalQuad { flavor, a: Z2Elem::one(prec), b: Z2Elem::zero(prec as i64) }
    }

    /// The generator `g` (`ζ`, or `√d`).
    pub fn gen(flavor: Flavor, prec: u32) -> Self {
        LocalQuad { flavor, a: Z2Elem::zero(prec as i64), b: Z2Elem::one(prec) }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Coordinates `(a, b)` with respect to `1, g`.
    pub fn coords(&self) -> (&Z2Elem, &Z2Elem) {
        (&self.a, &self.b)
    }

    fn same(&self, other: &Self) {
        assert_eq!(self.flavor, other.flavor, "mixed local field flavors");
    }

    pub fn neg(&self) -> Self {
        LocalQuad { flavor: self.flavor, a: self.a.neg(), b: self.b.neg() }
    }

    /// Galois conjugate.
    pub fn conj(&self) -> Self {
        match self.flavor {
            Flavor::Ramified(_) => LocalQuad { flavor: self.flavor, a: self.a.clone(), b: self.b.neg() },
            // conj(a + bζ) = a + bζ² = (a - b) - bζ
            Flavor::Unramified => LocalQuad { flavor: self.flavor, a: self.a.sub(&self.b), b: self.b.neg() },
        }
    }

    pub fn norm(&self) -> Z2Elem {
        match self.flavor {
            Flavor::Ramified(d) => {
                let b2 = self.b.square();
                self.a.square().sub(&b2.mul(&Z2Elem::from_i64(d as i64, b2.prec().max(1))))
            }
            Flavor::Unramified => self.a.square().sub(&self.a.mul(&self.b)).add(&self.b.square()),
        }
    }

    pub fn trace(&self) -> Z2Elem {
        match self.flavor {
            Flavor::Ramified(_) => self.a.add(&self.a),
            Flavor::Unramified => self.a.add(&self.a).sub(&self.b),
        }
    }

    pub fn scale(&self, c: &Z2Elem) -> Self {
        LocalQuad { flavor: self.flavor, a: self.a.mul(c), b: self.b.mul(c) }
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm().inv()?;
        Ok(self.conj().scale(&n))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(LocalField::mul(self, &other.inv()?))
    }

    pub fn square(&self) -> Self {
        LocalField::mul(self, self)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let prec = self.a.prec().max(self.b.prec()).max(1);
        let mut r = LocalQuad::one(self.flavor, prec);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = LocalField::mul(&r, &base);
            }
            base = base.square();
            e >>= 1;
        }
        r
    }

    /// Normalised valuation `ord_w` (a uniformizer has valuation 1).
    pub fn ord(&self) -> Result<i64> {
        match self.flavor {
            // totally ramified: ord_w(x) = ord_2(N(x))
            Flavor::Ramified(_) => self.norm().ord().ok_or(Error::PrecisionExhausted),
            Flavor::Unramified => match (self.a.ord(), self.b.ord()) {
                (None, None) => Err(Error::PrecisionExhausted),
                (Some(x), None) if x < self.b.abs_prec() => Ok(x),
                (None, Some(y)) if y < self.a.abs_prec() => Ok(y),
                (Some(x), Some(y)) => Ok(x.min(y)),
                _ => Err(Error::PrecisionExhausted),
            },
        }
    }
}

impl LocalField for LocalQuad {
    fn one_like(&self) -> Self {
        LocalQuad::one(self.flavor, self.a.prec().max(self.b.prec()).max(1))
    }
    fn add(&self, other: &Self) -> Self {
        self.same(other);
        LocalQuad { flavor: self.flavor, a: self.a.add(&other.a), b: self.b.add(&other.b) }
    }
    fn sub(&self, other: &Self) -> Self {
        self.same(other);
        LocalQuad { flavor: self.flavor, a: self.a.sub(&other.a), b: self.b.sub(&other.b) }
    }
    fn mul(&self, other: &Self) -> Self {
        self.same(other);
        let ac = self.a.mul(&other.a);
        let bd = self.b.mul(&other.b);
        let ad_bc = self.a.mul(&other.b).add(&self.b.mul(&other.a));
        match self.flavor {
            Flavor::Ramified(d) => {
                let dd = Z2Elem::from_i64(d as i64, bd.prec().max(1));
                LocalQuad { flavor: self.flavor, a: ac.add(&bd.mul(&dd)), b: ad_bc }
            }
            // ζ² = -1 - ζ
            Flavor::Unramified => LocalQuad { flavor: self.flavor, a: ac.sub(&bd), b: ad_bc.sub(&bd) },
        }
    }
    fn div_int(&self, n: &BigInt) -> Self {
        LocalQuad { flavor: self.flavor, a: self.a.div_int(n), b: self.b.div_int(n) }
    }
    fn ord_w(&self) -> Result<i64> {
        self.ord()
    }
    fn abs_prec_w(&self) -> i64 {
        let e = self.flavor.e();
        (e * self.a.abs_prec()).min(e * self.b.abs_prec() + self.flavor.ord_gen())
    }
    fn ram_index(&self) -> i64 {
        self.flavor.e()
    }
    fn residue_units(&self) -> u64 {
        match self.flavor {
            Flavor::Unramified => 3,
            Flavor::Ramified(_) => 1,
        }
    }
    fn is_zero_to_prec(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl fmt::Debug for LocalQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] ({:?}) + ({:?})*g", self.flavor, self.a, self.b)
    }
}

/// The 2-adic logarithm of a principal unit (`u ≡ 1 mod 𝔪`).
///
/// `u` is squared `k` times until `u^(2^k) ≡ 1 (mod 𝔪⁵)`, where the series has
/// strictly increasing term valuations, and the result is divided by `2^k`.
pub fn log_2adic<T: LocalField>(u: &T) -> Result<T> {
    let mut u = u.clone();
    let one = u.one_like();
    let mut x = u.sub(&one);
    if x.is_zero_to_prec() {
        return Ok(x);
    }
    let mut v = x.ord_w()?;
    if v < 1 {
        return Err(Error::NotPrincipalUnit);
    }
    let mut k = 0u32;
    while v < 5 {
        u = u.mul(&u);
        k += 1;
        x = u.sub(&one);
        if x.is_zero_to_prec() {
            return Ok(x);
        }
        v = x.ord_w()?;
    }
    let e = u.ram_index();
    let target = x.abs_prec_w();
    let mut sum = x.clone();
    let mut power = x.clone();
    let mut n: i64 = 1;
    loop {
        n += 1;
        let lower = n * v - e * (63 - (n as u64).leading_zeros() as i64);
        if lower > target {
            break;
        }
        power = power.mul(&x);
        let term = power.div_int(&BigInt::from(n));
        sum = if n % 2 == 0 { sum.sub(&term) } else { sum.add(&term) };
    }
    Ok(sum.div_int(&(BigInt::one() << k)))
}

/// Logarithm of an arbitrary unit: raised first to the order of the residue
/// field's unit group, which is odd, so the valuation of the result is unchanged.
pub fn log_unit<T: LocalField>(u: &T) -> Result<T> {
    let m = u.residue_units();
    if m == 1 {
        return log_2adic(u);
    }
    let mut p = u.clone();
    for _ in 1..m {
        p = p.mul(u);
    }
    Ok(log_2adic(&p)?.div_int(&BigInt::from(m)))
}
