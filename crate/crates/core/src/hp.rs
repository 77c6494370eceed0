//! Fixed-point ball arithmetic.
//!
//! A [`Ball`] is an interval `[(mid - rad)/2^prec, (mid + rad)/2^prec]` with
//! integer `mid` and `rad`. Every operation returns a ball that contains the
//! exact result for every choice of inputs inside the argument balls.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Int, Rat};

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;

/// Largest supported precision; bounded by the stored digits of Euler's constant.
pub const MAX_PREC: u32 = 320;

const GUARD: u32 = 24;

const EULER_GAMMA: &str = "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495146314472498070824809605040144865428362241739976449235362535003337429373377376739427925952582470949160087352039481656708532331517766115286211995015079847937450857057400299213547861466940296043254215190587755352";

#[derive(Clone, PartialEq, Eq)]
pub struct Ball {
    mid: Int,
    rad: Int,
    prec: u32,
}

/// Ceiling division of a nonnegative integer by `2^k`.
fn shr_ceil(x: &Int, k: u32) -> Int {
    let (q, r) = x.div_mod_floor(&(Int::one() << k));
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

fn ceil_div(a: &Int, b: &Int) -> Int {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

impl Ball {
    pub fn zero(prec: u32) -> Self {
        Ball { mid: Int::zero(), rad: Int::zero(), prec }
    }

    pub fn from_int(n: &Int, prec: u32) -> Self {
        Ball { mid: n << prec, rad: Int::zero(), prec }
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Self::from_int(&BigInt::from(n), prec)
    }

    pub fn from_rat(r: &Rat, prec: u32) -> Self {
        let n = r.numer() << prec;
        let (q, rem) = n.div_mod_floor(r.denom());
        let rad = if rem.is_zero() { Int::zero() } else { Int::one() };
        Ball { mid: q, rad, prec }
    }

    /// Exact value of a finite `f64`.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        let r = Rat::from_float(x).expect("finite f64");
        Self::from_rat(&r, prec)
    }

    /// Value with an added absolute error `err`.
    pub fn with_error(mut self, err: &Ball) -> Self {
        let e = err.abs_upper_scaled(self.prec);
        self.rad += e;
        self
    }

    /// Parse a decimal constant; the ball covers the truncation of the string.
    fn from_decimal(s: &str, prec: u32) -> Self {
        let (ip, fp) = s.split_once('.').unwrap_or((s, ""));
        let digits: Int = format!("{ip}{fp}").parse().unwrap();
        let den = BigInt::from(10u8).pow(fp.len() as u32);
        let b = Self::from_rat(&Rat::new(digits, den.clone()), prec);
        let rad = ceil_div(&(Int::one() << prec), &den);
        Ball { rad: b.rad + rad, ..b }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn mid_f64(&self) -> f64 {
        scaled_to_f64(&self.mid, self.prec)
    }

    pub fn rad_f64(&self) -> f64 {
        scaled_to_f64(&self.rad, self.prec)
    }

    /// Lower and upper endpoints as `f64` (rounded to nearest, for display).
    pub fn bounds_f64(&self) -> (f64, f64) {
        (scaled_to_f64(&(&self.mid - &self.rad), self.prec), scaled_to_f64(&(&self.mid + &self.rad), self.prec))
    }

    /// True when `|x| <= k · 2^-prec` for every point of the ball.
    fn below_ulps(&self, k: u32) -> bool {
        self.mid.abs() + &self.rad <= Int::from(k)
    }

    /// Upper bound on `|x|` as a scaled integer at precision `p`.
    fn abs_upper_scaled(&self, p: u32) -> Int {
        let v = self.mid.abs() + &self.rad;
        if p >= self.prec {
            v << (p - self.prec)
        } else {
            shr_ceil(&v, self.prec - p)
        }
    }

    /// Change precision, widening the radius to keep containment.
    pub fn set_prec(&self, p: u32) -> Self {
        if p >= self.prec {
            let k = p - self.prec;
            return Ball { mid: &self.mid << k, rad: &self.rad << k, prec: p };
        }
        let k = self.prec - p;
        let mid = self.mid.div_floor(&(Int::one() << k));
        let rad = shr_ceil(&self.rad, k) + 1;
        Ball { mid, rad, prec: p }
    }

    pub fn is_positive(&self) -> bool {
        self.mid > self.rad
    }

    pub fn is_negative(&self) -> bool {
        -&self.mid > self.rad
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_positive() && !self.is_negative()
    }

    /// True when every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &Ball) -> bool {
        self.sub(other).is_negative()
    }

    pub fn certainly_gt(&self, other: &Ball) -> bool {
        self.sub(other).is_positive()
    }

    /// True when the balls intersect.
    pub fn overlaps(&self, other: &Ball) -> bool {
        self.sub(other).contains_zero()
    }

    fn align(&self, other: &Ball) -> (Ball, Ball) {
        let p = self.prec.max(other.prec);
        (self.set_prec(p), other.set_prec(p))
    }

    pub fn neg(&self) -> Self {
        Ball { mid: -&self.mid, rad: self.rad.clone(), prec: self.prec }
    }

    pub fn abs(&self) -> Self {
        if self.contains_zero() {
            let hi = self.mid.abs() + &self.rad;
            // [0, hi]
            let mid = &hi >> 1u32;
            let rad = &hi - &mid;
            Ball { mid, rad, prec: self.prec }
        } else {
            Ball { mid: self.mid.abs(), rad: self.rad.clone(), prec: self.prec }
        }
    }

    pub fn add(&self, other: &Ball) -> Self {
        let (a, b) = self.align(other);
        Ball { mid: a.mid + b.mid, rad: a.rad + b.rad, prec: a.prec }
    }

    pub fn sub(&self, other: &Ball) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Ball) -> Self {
        let (a, b) = self.align(other);
        let p = a.prec;
        let prod = &a.mid * &b.mid;
        let mid = prod.div_floor(&(Int::one() << p));
        let err = a.mid.abs() * &b.rad + b.mid.abs() * &a.rad + &a.rad * &b.rad;
        let rad = shr_ceil(&err, p) + 1;
        Ball { mid, rad, prec: p }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn mul_int(&self, n: &Int) -> Self {
        Ball { mid: &self.mid * n, rad: &self.rad * n.abs(), prec: self.prec }
    }

    pub fn mul_i64(&self, n: i64) -> Self {
        self.mul_int(&BigInt::from(n))
    }

    /// Divide by a nonzero integer.
    pub fn div_int(&self, n: &Int) -> Self {
        assert!(!n.is_zero(), "division by zero");
        let mid = self.mid.div_floor(n);
        let rad = ceil_div(&self.rad, &n.abs()) + 1;
        Ball { mid, rad, prec: self.prec }
    }

    pub fn div_i64(&self, n: i64) -> Self {
        self.div_int(&BigInt::from(n))
    }

    /// Multiply by `2^k` (k may be negative).
    pub fn mul_pow2(&self, k: i64) -> Self {
        if k >= 0 {
            Ball { mid: &self.mid << k as usize, rad: &self.rad << k as usize, prec: self.prec }
        } else {
            let s = (-k) as u32;
            Ball { mid: self.mid.div_floor(&(Int::one() << s)), rad: shr_ceil(&self.rad, s) + 1, prec: self.prec }
        }
    }

    /// Quotient; `None` if the divisor ball contains zero.
    pub fn div(&self, other: &Ball) -> Option<Self> {
        if other.contains_zero() {
            return None;
        }
        let (a, b) = self.align(other);
        let p = a.prec;
        let bm = b.mid.abs();
        let mid_num = &a.mid << p;
        let mid = mid_num.div_floor(&b.mid);
        // |x/y - a/b| <= (r|b| + s|a|) / (|b|(|b| - s)), in scaled units times 2^p
        let err_num = (&a.rad * &bm + &b.rad * a.mid.abs()) << p;
        let err_den = &bm * (&bm - &b.rad);
        let rad = ceil_div(&err_num, &err_den) + 1;
        Some(Ball { mid, rad, prec: p })
    }

    pub fn recip(&self) -> Option<Self> {
        Ball::from_i64(1, self.prec).div(self)
    }

    /// Square root of a ball contained in `(0, ∞)`; `None` otherwise.
    pub fn sqrt(&self) -> Option<Self> {
        if !self.is_positive() {
            return None;
        }
        let p = self.prec;
        let mid = (&self.mid << p).sqrt();
        let lo = &self.mid - &self.rad;
        let den = (&lo << p).sqrt();
        if den.is_zero() {
            return None;
        }
        // |√x - √a| <= r / √(a - r), scaled
        let rad = ceil_div(&(&self.rad << p), &den) + 2;
        Some(Ball { mid, rad, prec: p })
    }

    /// Integer power.
    pub fn powi(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Ball::from_i64(1, self.prec);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// `e^x`.
    pub fn exp(&self) -> Self {
        let p = self.prec;
        let wp = p + GUARD;
        let x = self.set_prec(wp);
        // halve until |x| < 1/2
        let bound: Int = x.abs_upper_scaled(0) + 1u32;
        let m = bound.bits() as u32 + 1;
        let y = x.mul_pow2(-(m as i64));
        let mut sum = Ball::from_i64(1, wp);
        let mut term = Ball::from_i64(1, wp);
        let mut k = 1i64;
        loop {
            term = term.mul(&y).div_i64(k);
            sum = sum.add(&term);
            k += 1;
            if term.below_ulps(16) {
                break;
            }
        }
        // |y| < 1/2: the remainder after the last term is below twice that term
        sum = sum.with_error(&term.abs().mul_i64(2));
        for _ in 0..m {
            sum = sum.square();
        }
        sum.set_prec(p)
    }

    /// Natural logarithm of a positive ball.
    pub fn ln(&self) -> Option<Self> {
        if !self.is_positive() {
            return None;
        }
        let p = self.prec;
        let wp = p + GUARD;
        let x = self.set_prec(wp);
        // x = 2^k m with m in [1, 2)
        let k = x.mid.bits() as i64 - 1 - wp as i64;
        let m = x.mul_pow2(-k);
        let t = m.sub(&Ball::from_i64(1, wp)).div(&m.add(&Ball::from_i64(1, wp)))?;
        let lnm = atanh_series(&t).mul_i64(2);
        let l2 = ln2(wp);
        Some(lnm.add(&l2.mul_i64(k)).set_prec(p))
    }

    /// Smallest ball containing both arguments.
    pub fn hull(&self, other: &Ball) -> Self {
        let (a, b) = self.align(other);
        let lo = (&a.mid - &a.rad).min(&b.mid - &b.rad);
        let hi = (&a.mid + &a.rad).max(&b.mid + &b.rad);
        let mid = (&lo + &hi).div_floor(&Int::from(2));
        let rad = &hi - &mid;
        Ball { mid, rad, prec: a.prec }
    }

    /// Compare the midpoint against a plain `f64` (for diagnostics only).
    pub fn approx_eq(&self, x: f64, tol: f64) -> bool {
        (self.mid_f64() - x).abs() <= tol
    }
}

fn scaled_to_f64(n: &Int, prec: u32) -> f64 {
    let bits = n.bits() as i64;
    if bits <= 1000 {
        n.to_f64().unwrap() * (2f64).powi(-(prec as i32))
    } else {
        let sh = (bits - 64) as u32;
        (n >> sh).to_f64().unwrap() * (2f64).powi(sh as i32 - prec as i32)
    }
}

/// `atanh(t) = Σ t^(2k+1)/(2k+1)` for `|t| <= 1/3`.
fn atanh_series(t: &Ball) -> Ball {
    let t2 = t.square();
    let mut pow = t.clone();
    let mut sum = t.clone();
    let mut k = 1i64;
    loop {
        pow = pow.mul(&t2);
        let term = pow.div_i64(2 * k + 1);
        sum = sum.add(&term);
        k += 1;
        if pow.below_ulps(16) {
            break;
        }
    }
    // geometric tail with ratio t² <= 1/9
    sum.with_error(&pow.abs().mul_i64(2))
}

/// `ln 2 = 2 atanh(1/3)`.
pub fn ln2(prec: u32) -> Ball {
    let t = Ball::from_rat(&Rat::new(BigInt::one(), BigInt::from(3)), prec + GUARD);
    atanh_series(&t).mul_i64(2).set_prec(prec)
}

/// `arctan(1/n)` for an integer `n >= 2`.
fn atan_inv(n: i64, prec: u32) -> Ball {
    let x = Ball::from_rat(&Rat::new(BigInt::one(), BigInt::from(n)), prec);
    let x2 = x.square();
    let mut pow = x.clone();
    let mut sum = x;
    let mut k = 1i64;
    loop {
        pow = pow.mul(&x2).neg();
        sum = sum.add(&pow.div_i64(2 * k + 1));
        k += 1;
        if pow.below_ulps(16) {
            break;
        }
    }
    sum.with_error(&pow.abs())
}

/// `π` by Machin's formula.
pub fn pi(prec: u32) -> Ball {
    let wp = prec + GUARD;
    let a = atan_inv(5, wp).mul_i64(16);
    let b = atan_inv(239, wp).mul_i64(4);
    a.sub(&b).set_prec(prec)
}

/// Euler's constant `γ`.
pub fn euler_gamma(prec: u32) -> Ball {
    assert!(prec <= MAX_PREC, "precision above {MAX_PREC} bits not supported");
    Ball::from_decimal(EULER_GAMMA, prec)
}

impl fmt::Debug for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} ± {:.3e}", self.mid_f64(), self.rad_f64())
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12}", self.mid_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contains(b: &Ball, x: f64, slack: f64) -> bool {
        let (lo, hi) = b.bounds_f64();
        lo - slack <= x && x <= hi + slack
    }

    #[test]
    fn constants() {
        let p = pi(128);
        assert!(contains(&p, std::f64::consts::PI, 1e-15));
        assert!(p.rad_f64() < 1e-30);
        let l = ln2(128);
        assert!(contains(&l, std::f64::consts::LN_2, 1e-15));
        assert!(euler_gamma(128).approx_eq(0.5772156649015329, 1e-15));
    }

    #[test]
    fn exp_ln_roundtrip() {
        for x in [-20.0, -1.5, -0.1, 0.0, 0.3, 1.0, 7.25, 40.0] {
            let b = Ball::from_f64(x, 128);
            let e = b.exp();
            assert!(contains(&e, x.exp(), 1e-12 * x.exp()), "x={x}");
            let back = e.ln().unwrap();
            assert!(back.overlaps(&b), "x={x}");
            assert!(back.rad_f64() < 1e-25);
        }
    }

    #[test]
    fn field_ops() {
        let a = Ball::from_rat(&Rat::new(BigInt::from(1), BigInt::from(3)), 96);
        let b = a.mul_i64(3);
        assert!(b.overlaps(&Ball::from_i64(1, 96)));
        let c = Ball::from_i64(2, 96).sqrt().unwrap();
        assert!(c.square().overlaps(&Ball::from_i64(2, 96)));
        let d = Ball::from_i64(7, 96).div(&Ball::from_i64(-3, 96)).unwrap();
        assert!(d.mul_i64(-3).overlaps(&Ball::from_i64(7, 96)));
        assert!(Ball::zero(64).recip().is_none());
        assert!(Ball::from_i64(-1, 64).sqrt().is_none());
    }

    #[test]
    fn precision_change_keeps_containment() {
        let a = Ball::from_rat(&Rat::new(BigInt::from(22), BigInt::from(7)), 200);
        let b = a.set_prec(40);
        assert!(b.overlaps(&a));
        assert!(b.set_prec(200).overlaps(&a));
    }
}
