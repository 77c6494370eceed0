//! 2-adic arithmetic: `Q₂` to finite precision, its quadratic extensions,
//! logarithms, Hilbert symbols, and the factorization of `x⁴ + q` over `Q₂`.

mod hilbert;
mod local;
mod z2;

pub use hilbert::{hilbert2, hilbert_inf, hilbert_odd};
pub use local::{log_2adic, log_unit, Flavor, LocalField, LocalQuad};
pub use z2::{hensel_sqrt, sqrt_q2, Z2Elem, DEFAULT_PREC};

use num_bigint::BigInt;

use crate::{Error, Result};

/// Residue class of `q` modulo 16.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Residue16 {
    Seven,
    Fifteen,
}

impl Residue16 {
    pub fn of(q: u64) -> Result<Self> {
        match q % 16 {
            7 => Ok(Residue16::Seven),
            15 => Ok(Residue16::Fifteen),
            _ => Err(Error::InvalidInput(format!("q = {q} is not 7 mod 8"))),
        }
    }
}

/// The two primes of `K = Q(√-q)` above 2.
///
/// `P` is the one that ramifies in `F = K(⁴√-q)`; under the embedding of `K`
/// into `Q₂` that it defines, `√-q ↦ -s` where `s` is the square root of `-q`
/// with `s ≡ 1 (mod 4)`. `PStar` corresponds to `√-q ↦ s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KPrime {
    P,
    PStar,
}

impl KPrime {
    pub fn other(self) -> Self {
        match self {
            KPrime::P => KPrime::PStar,
            KPrime::PStar => KPrime::P,
        }
    }
}

/// `s = √-q ∈ Z₂` with `s ≡ 1 (mod 4)`.
pub fn sqrt_minus_q(q: u64, prec: u32) -> Result<Z2Elem> {
    hensel_sqrt(&Z2Elem::from_int(&-BigInt::from(q), prec))
}

/// An irreducible factor of `x⁴ + q` over `Q₂`.
#[derive(Clone, Debug)]
pub enum LocalFactor {
    /// `x - root`.
    Linear { root: Z2Elem },
    /// `x² - c`, generating the field of the given flavor.
    Quadratic { c: Z2Elem, flavor: Flavor },
}

/// Factorization of `x⁴ + q = (x² - s)(x² + s)` over `Q₂`, the first factor
/// lying over `𝔭*` and the second over `𝔭`.
#[derive(Clone, Debug)]
pub struct SplittingPattern {
    pub q: u64,
    pub residue: Residue16,
    pub s: Z2Elem,
    pub over_p: Vec<LocalFactor>,
    pub over_pstar: Vec<LocalFactor>,
}

impl SplittingPattern {
    pub fn factors(&self) -> impl Iterator<Item = &LocalFactor> {
        self.over_p.iter().chain(self.over_pstar.iter())
    }

    /// The ramified flavor of the completion above `𝔭`.
    pub fn ramified_flavor(&self) -> Flavor {
        match self.residue {
            Residue16::Seven => Flavor::ramified(3),
            Residue16::Fifteen => Flavor::ramified(-1),
        }
    }
}

/// Quadratic factor data `x² - c` over `Q₂`: splits, or generates `Q₂(√d)` / `Q₂(ζ)`.
fn classify(c: &Z2Elem) -> Result<Vec<LocalFactor>> {
    let r = c.residue(3)?;
    Ok(match r {
        1 => {
            let t = hensel_sqrt(c)?;
            vec![LocalFactor::Linear { root: t.clone() }, LocalFactor::Linear { root: t.neg() }]
        }
        3 => vec![LocalFactor::Quadratic { c: c.clone(), flavor: Flavor::ramified(3) }],
        7 => vec![LocalFactor::Quadratic { c: c.clone(), flavor: Flavor::ramified(-1) }],
        5 => vec![LocalFactor::Quadratic { c: c.clone(), flavor: Flavor::Unramified }],
        _ => return Err(Error::InvalidInput("even constant term".into())),
    })
}

/// The splitting of `x⁴ + q` over `Q₂`.
///
/// `q ≡ 7 (mod 16)`: two quadratic factors, `Q₂(√3)` over `𝔭` and `Q₂(√-3) = Q₂(ζ)` over `𝔭*`.
/// `q ≡ 15 (mod 16)`: `Q₂(√-1)` over `𝔭` and two linear factors over `𝔭*`.
pub fn splitting_pattern(q: u64, prec: u32) -> Result<SplittingPattern> {
    let residue = Residue16::of(q)?;
    let s = sqrt_minus_q(q, prec)?;
    let over_pstar = classify(&s)?;
    let over_p = classify(&s.neg())?;
    let pat = SplittingPattern { q, residue, s, over_p, over_pstar };
    let ok = match residue {
        Residue16::Seven => matches!(
            (&pat.over_p[..], &pat.over_pstar[..]),
            ([LocalFactor::Quadratic { flavor: Flavor::Ramified(3), .. }], [LocalFactor::Quadratic { flavor: Flavor::Unramified, .. }])
        ),
        Residue16::Fifteen => matches!(
            (&pat.over_p[..], &pat.over_pstar[..]),
            ([LocalFactor::Quadratic { flavor: Flavor::Ramified(-1), .. }], [LocalFactor::Linear { .. }, LocalFactor::Linear { .. }])
        ),
    };
    if !ok {
        return Err(Error::Inconsistent(format!("unexpected splitting of x^4 + {q} over Q2")));
    }
    Ok(pat)
}

/// `√c` in a quadratic field of the given flavor, if it exists there.
pub fn sqrt_in(flavor: Flavor, c: &Z2Elem) -> Result<Option<LocalQuad>> {
    if let Some(t) = sqrt_q2(c)? {
        return Ok(Some(LocalQuad::from_base(flavor, t)));
    }
    let prec = c.prec().max(1);
    let (d, g) = match flavor {
        Flavor::Ramified(d) => (Z2Elem::from_i64(d as i64, prec), LocalQuad::gen(flavor, prec)),
        // √-3 = 1 + 2ζ
        Flavor::Unramified => (
            Z2Elem::from_i64(-3, prec),
            LocalQuad::new(flavor, Z2Elem::one(prec), Z2Elem::from_i64(2, prec)),
        ),
    };
    match sqrt_q2(&c.div(&d))? {
        Some(t) => Ok(Some(g.scale(&t))),
        None => Ok(None),
    }
}

fn residual_ok<T: LocalField>(r: &T, q: u64, prec: u32, e: i64) -> bool {
    let r2 = r.mul(r);
    let val = r2.mul(&r2).add(&q_like(r, q));
    val.is_zero_to_prec() || val.ord_w().map(|v| v >= e * (prec as i64 - 4)).unwrap_or(false)
}

fn q_like<T: LocalField>(r: &T, q: u64) -> T {
    let one = r.one_like();
    let mut acc = r.one_like().sub(&one);
    let mut base = one;
    let mut k = q;
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.add(&base);
        }
        base = base.add(&base);
        k >>= 1;
    }
    acc
}

/// Roots of `x⁴ + q` in the quadratic field of the given flavor.
pub fn local_roots_quartic(q: u64, flavor: Flavor, prec: u32) -> Result<Vec<LocalQuad>> {
    let s = sqrt_minus_q(q, prec)?;
    let mut out = Vec::new();
    for c in [s.clone(), s.neg()] {
        if let Some(r) = sqrt_in(flavor, &c)? {
            out.push(r.neg());
            out.push(r);
        }
    }
    for r in &out {
        if !residual_ok(r, q, prec, flavor.e()) {
            return Err(Error::Inconsistent(format!("root of x^4 + {q} fails residual check")));
        }
    }
    Ok(out)
}

/// Roots of `x⁴ + q` in `Z₂`.
pub fn rational_roots_quartic(q: u64, prec: u32) -> Result<Vec<Z2Elem>> {
    let s = sqrt_minus_q(q, prec)?;
    let mut out = Vec::new();
    for c in [s.clone(), s.neg()] {
        if let Some(t) = sqrt_q2(&c)? {
            out.push(t.clone());
            out.push(t.neg());
        }
    }
    for r in &out {
        if !residual_ok(r, q, prec, 1) {
            return Err(Error::Inconsistent(format!("root of x^4 + {q} fails residual check")));
        }
    }
    Ok(out)
}

/// Number of primes above `𝔮 = (√-q)` in the `Z₂`-extension `K_∞/K` unramified
/// outside `𝔭`: `2^(k-2)` with
/// `k = max(ord₂(s - 1), ord₂(s + 1))`, `s = √-q`. Equals `2^(ord₂(q+1) - 3)`.
pub fn primes_above_q_count(q: u64, prec: u32) -> Result<u64> {
    let s = sqrt_minus_q(q, prec)?;
    let one = Z2Elem::one(prec);
    let a = s.sub(&one).ord().ok_or(Error::PrecisionExhausted)?;
    let b = s.add(&one).ord().ok_or(Error::PrecisionExhausted)?;
    let k = a.max(b);
    if k + 4 >= prec as i64 {
        return Err(Error::PrecisionExhausted);
    }
    if k < 2 {
        return Err(Error::Inconsistent(format!("k = {k} < 2 for q = {q}")));
    }
    Ok(1u64 << (k - 2))
}
