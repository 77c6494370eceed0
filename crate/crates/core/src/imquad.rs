//! Positive definite binary quadratic forms and class groups of imaginary
//! quadratic orders, specialised to `Q(√-q)` and `Q(√-2q)`.
//!
//! Discriminants in scope satisfy `|D| < 2^40`, so forms use machine integers
//! with 128-bit intermediates.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::arith::cornacchia;
use crate::padic2::{sqrt_minus_q, KPrime, Residue16, Z2Elem};
use crate::{Error, Int, Result};

/// The form `a x² + b x y + c y²`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Form { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The principal form of discriminant `d`.
    pub fn identity(d: i64) -> Self {
        assert!(d < 0 && d.rem_euclid(4) <= 1, "bad discriminant {d}");
        let b = d.rem_euclid(2);
        Form { a: 1, b, c: (b * b - d) / 4 }
    }

    pub fn inverse(&self) -> Self {
        Form { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.b).gcd(&self.c) == 1
    }

    /// `|b| <= a <= c`, with `b >= 0` when `|b| = a` or `a = c`.
    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && !(self.b < 0 && (self.b == -self.a || self.a == self.c))
    }

    /// The unique reduced form equivalent to `self`.
    pub fn reduce(&self) -> Self {
        assert!(self.a > 0 && self.disc() < 0, "reduce expects a positive definite form");
        let d = self.disc() as i128;
        let (mut a, mut b) = (self.a as i128, self.b as i128);
        let mut c;
        loop {
            // b into (-a, a]
            let mut r = b.rem_euclid(2 * a);
            if r > a {
                r -= 2 * a;
            }
            b = r;
            c = (b * b - d) / (4 * a);
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        Form { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// Gauss composition, followed by reduction.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.disc(), other.disc(), "composition of forms of different discriminants");
        let (f1, f2) = if self.a > other.a { (other, self) } else { (self, other) };
        let (a1, b1, _c1) = (f1.a as i128, f1.b as i128, f1.c as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, d) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let e = a2.extended_gcd(&a1);
            (e.x, e.gcd)
        };
        let (x2, y2, d1) = if s % d == 0 {
            (0, -1, d)
        } else {
            let e = s.extended_gcd(&d);
            (e.x, -e.y, e.gcd)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (c2 * d1 + r * (b2 + v2 * r)) / v1;
        let f = Form { a: a3 as i64, b: b3 as i64, c: c3 as i64 };
        debug_assert_eq!(f.disc(), self.disc());
        f.reduce()
    }

    pub fn square(&self) -> Self {
        self.compose(self)
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut r = Form::identity(self.disc());
        let mut base = *self;
        while n > 0 {
            if n & 1 == 1 {
                r = r.compose(&base);
            }
            base = base.square();
            n >>= 1;
        }
        r
    }

    /// Order of the class of `self`, found by repeated composition up to `bound`.
    pub fn order(&self, bound: u64) -> Option<u64> {
        let id = Form::identity(self.disc());
        let f = self.reduce();
        let mut g = f;
        for k in 1..=bound {
            if g == id {
                return Some(k);
            }
            g = g.compose(&f);
        }
        None
    }
}

/// All reduced primitive forms of discriminant `d < 0`.
pub fn reduced_forms(d: i64) -> Vec<Form> {
    assert!(d < 0 && d.rem_euclid(4) <= 1, "bad discriminant {d}");
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            let f = Form { a, b, c };
            if f.is_primitive() {
                out.push(f);
            }
        }
        a += 1;
    }
    out
}

/// Class number `h(d)` of primitive forms of discriminant `d < 0`.
pub fn class_number(d: i64) -> u64 {
    reduced_forms(d).len() as u64
}

/// The 2-Sylow subgroup of a class group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwoSylow {
    pub h: u64,
    /// Order of the 2-Sylow subgroup.
    pub order: u64,
    /// Number of cyclic factors (log₂ of the number of elements of order ≤ 2).
    pub rank: u32,
    /// Largest order of an element.
    pub exponent: u64,
}

impl TwoSylow {
    pub fn cyclic(&self) -> bool {
        self.exponent == self.order
    }
}

/// Structure of the 2-Sylow subgroup of the class group of discriminant `d`,
/// from the orders of the 2-parts of all classes.
pub fn two_sylow(d: i64) -> TwoSylow {
    let forms = reduced_forms(d);
    let h = forms.len() as u64;
    let order = 1u64 << h.trailing_zeros();
    let odd = h / order;
    let id = Form::identity(d);
    let mut exponent = 1;
    let mut involutions = 0u64;
    for f in &forms {
        if f.square() == id {
            involutions += 1;
        }
        let mut g = f.pow(odd);
        let mut k = 1;
        while g != id {
            g = g.square();
            k *= 2;
        }
        exponent = exponent.max(k);
    }
    TwoSylow { h, order, rank: involutions.trailing_zeros(), exponent }
}

/// Order `t` of the class of a prime of `Q(√-q)` above 2; odd since `h(-q)` is odd.
pub fn order_of_prime2_class(q: u64) -> Result<u64> {
    Residue16::of(q)?;
    let d = -(q as i64);
    let f = Form::new(2, 1, (1 + q as i64) / 8).reduce();
    let h = class_number(d);
    let t = f.order(h).ok_or_else(|| Error::Inconsistent(format!("prime above 2 has no order dividing h = {h}")))?;
    if t % 2 == 0 || h % t != 0 {
        return Err(Error::Inconsistent(format!("order {t} of the prime above 2 for q = {q}, h = {h}")));
    }
    Ok(t)
}

/// A generator `π = (u + v√-q)/2` of `𝔭^t`, with `u² + q v² = 2^(t+2)` and `u, v` odd.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiGenerator {
    pub t: u64,
    pub u: Int,
    pub v: Int,
}

pub fn generator_pi(q: u64) -> Result<PiGenerator> {
    let t = order_of_prime2_class(q)?;
    let m = BigInt::one() << (t + 2);
    let (u, v) = cornacchia(&BigInt::from(q), &m)
        .ok_or_else(|| Error::Inconsistent(format!("no element of norm 2^{t} for q = {q}")))?;
    if u.is_even() || v.is_even() {
        return Err(Error::Inconsistent("imprimitive representation of 2^(t+2)".into()));
    }
    Ok(PiGenerator { t, u, v })
}

/// Outcome of the congruence check on `π` at the prime where it is a unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorK1 {
    pub pi: PiGenerator,
    /// The prime of `K` at which `π` is a unit. `PStar` means `π` generates `𝔭^t`.
    pub unit_at: KPrime,
    /// `π mod 8` under that embedding.
    pub residue_mod8: u64,
    pub holds: bool,
}

/// `π ≡ ±3 (mod 8)` when `q ≡ 7 (mod 16)` and `π ≡ ±1 (mod 8)` when `q ≡ 15 (mod 16)`,
/// evaluated under the embedding making `π` a unit. Both orientations of `π` are
/// accepted: conjugation swaps `𝔭` and `𝔭*` and leaves the unit value unchanged.
pub fn check_cor_k1(q: u64, prec: u32) -> Result<CorK1> {
    let residue = Residue16::of(q)?;
    let pi = generator_pi(q)?;
    let s = sqrt_minus_q(q, prec)?;
    let u = Z2Elem::from_int(&pi.u, prec);
    let v = Z2Elem::from_int(&pi.v, prec);
    let two = BigInt::from(2);
    let at_pstar = u.add(&v.mul(&s)).div_int(&two);
    let at_p = u.sub(&v.mul(&s)).div_int(&two);
    let (unit_at, unit, other) = match (at_pstar.ord(), at_p.ord()) {
        (Some(0), _) => (KPrime::PStar, at_pstar, at_p),
        (_, Some(0)) => (KPrime::P, at_p, at_pstar),
        _ => return Err(Error::Inconsistent("π is a unit at neither prime above 2".into())),
    };
    let vo = other.ord().ok_or(Error::PrecisionExhausted)?;
    if vo != pi.t as i64 {
        return Err(Error::Inconsistent(format!("π has valuation {vo} != t = {}", pi.t)));
    }
    let r = unit.residue(3)?;
    let holds = match residue {
        Residue16::Seven => r == 3 || r == 5,
        Residue16::Fifteen => r == 1 || r == 7,
    };
    Ok(CorK1 { pi, unit_at, residue_mod8: r, holds })
}

/// Result of the 2-part check on the class group of `Q(√-2q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Hasse {
    pub sylow: TwoSylow,
    pub holds: bool,
}

/// The 2-Sylow subgroup of `Cl(Q(√-2q))` (discriminant `-8q`) is cyclic, of order
/// exactly 4 when `q ≡ 7 (mod 16)` and at least 8 when `q ≡ 15 (mod 16)`.
pub fn hasse_check(q: u64) -> Result<Hasse> {
    let residue = Residue16::of(q)?;
    let sylow = two_sylow(-8 * q as i64);
    let size_ok = match residue {
        Residue16::Seven => sylow.order == 4,
        Residue16::Fifteen => sylow.order >= 8,
    };
    Ok(Hasse { sylow, holds: size_ok && sylow.cyclic() && sylow.rank == 1 })
}

/// `π` as the pair `(u, v)` in `(u + v√-q)/2`: its norm `(u² + q v²)/4`.
pub fn pi_norm(q: u64, pi: &PiGenerator) -> Int {
    (&pi.u * &pi.u + BigInt::from(q) * &pi.v * &pi.v) / 4
}
