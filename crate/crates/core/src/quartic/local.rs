//! The unit of `F` in the completions of `F` above 2.
//!
//! Over `Q₂`, `x⁴ + q = (x² - s)(x² + s)` with `s = √-q ≡ 1 (mod 4)`. The
//! places where `α² ↦ -s` lie over `𝔭`, those where `α² ↦ s` over `𝔭*`. Each
//! quadratic factor gives one place (its two roots are conjugate over `Q₂`),
//! each linear factor gives its own place.

use num_bigint::BigInt;

use super::{QuarticElem, QuarticField};
use crate::padic2::{
    log_unit, sqrt_in, sqrt_minus_q, sqrt_q2, splitting_pattern, Flavor, KPrime, LocalField, LocalQuad, Residue16, Z2Elem,
};
use crate::{Error, Int, Result};

/// Splitting type of a place of `F` over its prime of `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Ramified,
    Inert,
    Split,
}

/// A place of `F` above 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalPlace {
    pub over: KPrime,
    pub kind: PlaceKind,
    /// `e` and `f` over `Q₂` (equal to those over `K`, since 2 splits in `K`).
    pub e: u32,
    pub f: u32,
    /// Completion, `None` for `Q₂` itself.
    pub flavor: Option<Flavor>,
}

#[derive(Clone, Debug)]
pub struct RamificationReport {
    pub q: u64,
    pub residue: Residue16,
    pub places: Vec<LocalPlace>,
}

impl RamificationReport {
    pub fn over(&self, p: KPrime) -> impl Iterator<Item = &LocalPlace> {
        self.places.iter().filter(move |w| w.over == p)
    }

    /// `Σ e·f` over the places above `p`, which must be 2.
    pub fn local_degree(&self, p: KPrime) -> u32 {
        self.over(p).map(|w| w.e * w.f).sum()
    }
}

fn place_for(over: KPrime, c: &Z2Elem) -> Result<Vec<LocalPlace>> {
    let r = c.residue(3)?;
    Ok(match r {
        1 => vec![LocalPlace { over, kind: PlaceKind::Split, e: 1, f: 1, flavor: None }; 2],
        5 => vec![LocalPlace { over, kind: PlaceKind::Inert, e: 1, f: 2, flavor: Some(Flavor::Unramified) }],
        3 => vec![LocalPlace { over, kind: PlaceKind::Ramified, e: 2, f: 1, flavor: Some(Flavor::ramified(3)) }],
        7 => vec![LocalPlace { over, kind: PlaceKind::Ramified, e: 2, f: 1, flavor: Some(Flavor::ramified(-1)) }],
        _ => return Err(Error::Inconsistent("even square root of -q".into())),
    })
}

/// The places of `F` above `𝔭` and `𝔭*`.
pub fn ramification_data(q: u64) -> Result<RamificationReport> {
    let pat = splitting_pattern(q, 64)?;
    let mut places = place_for(KPrime::P, &pat.s.neg())?;
    places.extend(place_for(KPrime::PStar, &pat.s)?);
    let rep = RamificationReport { q, residue: pat.residue, places };
    if rep.local_degree(KPrime::P) != 2 || rep.local_degree(KPrime::PStar) != 2 {
        return Err(Error::Inconsistent(format!("local degrees above 2 do not add up for q = {q}")));
    }
    Ok(rep)
}

/// Evidence that `O_F^×` has rank 1 and torsion `{±1}`.
#[derive(Clone, Debug)]
pub struct TorsionCert {
    pub rank: u32,
    pub torsion_order: u32,
    /// Completion above 2 without `√-1`, which excludes `ζ₄, ζ₈, ζ₁₂`.
    pub no_i_at: Flavor,
    /// Completion above 2 without `√-3`, which excludes `ζ₃, ζ₆`.
    pub no_sqrt_m3_at: Flavor,
    /// `d_F ≠ 125`, so `F ≠ Q(ζ₅)`; this excludes `ζ₅, ζ₁₀`.
    pub disc_not_125: bool,
}

/// Rank by the signature (no real places: `x⁴ + q > 0` on `R`, so two complex
/// places and rank `0 + 2 - 1 = 1`); torsion by local obstructions.
///
/// A root of unity of order `n` in `F` has `φ(n) | 4`, so
/// `n ∈ {1, 2, 3, 4, 5, 6, 8, 10, 12}`.
pub fn unit_rank_and_torsion(field: &QuarticField) -> Result<TorsionCert> {
    let q = field.q;
    let rep = ramification_data(q)?;
    let prec = 64;
    let flavors: Vec<Flavor> = rep.places.iter().filter_map(|w| w.flavor).collect();
    let has_rational_place = rep.places.iter().any(|w| w.flavor.is_none());
    let lacks = |d: i64| -> Result<Option<Flavor>> {
        let c = Z2Elem::from_i64(d, prec);
        for f in &flavors {
            if sqrt_in(*f, &c)?.is_none() {
                return Ok(Some(*f));
            }
        }
        if has_rational_place && sqrt_q2(&c)?.is_none() {
            // Q₂ itself; reported with the flavor of the other place
            return Ok(flavors.first().copied());
        }
        Ok(None)
    };
    let no_i = lacks(-1)?.ok_or_else(|| Error::Inconsistent("√-1 found in every completion above 2".into()))?;
    let no_m3 = lacks(-3)?.ok_or_else(|| Error::Inconsistent("√-3 found in every completion above 2".into()))?;
    let disc_not_125 = field.disc != BigInt::from(125);
    if !disc_not_125 {
        return Err(Error::Inconsistent("F could be Q(ζ₅)".into()));
    }
    Ok(TorsionCert { rank: 1, torsion_order: 2, no_i_at: no_i, no_sqrt_m3_at: no_m3, disc_not_125 })
}

/// `ord` of `log η` at every place above 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValuationReport {
    pub q: u64,
    pub residue: Residue16,
    /// At the ramified place `w` above `𝔭`.
    pub ord_w: i64,
    /// At the places above `𝔭*`: one (inert) or two (split).
    pub ord_wstar: Vec<i64>,
    /// 2-adic precision in bits that produced the report.
    pub prec: u32,
}

/// `x(r)` for a root `r` of `x⁴ + q` in a quadratic extension of `Q₂`.
fn eval_quad(x: &QuarticElem, r: &LocalQuad, prec: u32) -> LocalQuad {
    let fl = r.flavor();
    let mut v = LocalQuad::from_base(fl, Z2Elem::from_int(&x.num()[3], prec));
    for k in (0..3).rev() {
        v = LocalField::mul(&v, r);
        v = LocalField::add(&v, &LocalQuad::from_base(fl, Z2Elem::from_int(&x.num()[k], prec)));
    }
    v.div_int(x.den())
}

fn eval_z2(x: &QuarticElem, r: &Z2Elem, prec: u32) -> Z2Elem {
    let mut v = Z2Elem::from_int(&x.num()[3], prec);
    for k in (0..3).rev() {
        v = v.mul(r).add(&Z2Elem::from_int(&x.num()[k], prec));
    }
    v.div_int(x.den())
}

/// Result of one log evaluation: the valuation and how far it sits below the
/// precision of the computed logarithm.
fn log_ord<T: LocalField>(u: &T) -> Result<(i64, i64)> {
    let l = log_unit(u)?;
    let v = l.ord_w()?;
    Ok((v, l.abs_prec_w() - v))
}

/// Valuations at the places where `α² ↦ c`.
fn side(eta: &QuarticElem, c: &Z2Elem, prec: u32) -> Result<(Vec<i64>, i64)> {
    let mut out = Vec::new();
    let mut margin = i64::MAX;
    if let Some(t) = sqrt_q2(c)? {
        for r in [t.clone(), t.neg()] {
            let u = eval_z2(eta, &r, prec);
            if u.ord() != Some(0) {
                return Err(Error::Inconsistent("unit is not a local unit".into()));
            }
            let (v, m) = log_ord(&u)?;
            out.push(v);
            margin = margin.min(m);
        }
        return Ok((out, margin));
    }
    let flavor = match c.residue(3)? {
        5 => Flavor::Unramified,
        3 => Flavor::ramified(3),
        7 => Flavor::ramified(-1),
        _ => return Err(Error::Inconsistent("unexpected quadratic factor".into())),
    };
    let r = sqrt_in(flavor, c)?.ok_or_else(|| Error::Inconsistent("missing local root".into()))?;
    let u = eval_quad(eta, &r, prec);
    if u.ord()? != 0 {
        return Err(Error::Inconsistent("unit is not a local unit".into()));
    }
    let (v, m) = log_ord(&u)?;
    Ok((vec![v], m))
}

/// Valuations at the places with `α² ↦ -root` and `α² ↦ root`, `root² = -q`.
fn valuations_with_root(eta: &QuarticElem, root: &Z2Elem, prec: u32) -> Result<((Vec<i64>, Vec<i64>), i64)> {
    let (a, ma) = side(eta, &root.neg(), prec)?;
    let (b, mb) = side(eta, root, prec)?;
    Ok(((a, b), ma.min(mb)))
}

const RETRY_MARGIN: i64 = 8;

fn with_retry<T>(prec: u32, mut f: impl FnMut(u32) -> Result<(T, i64)>) -> Result<(T, u32)> {
    let mut p = prec;
    for _ in 0..4 {
        match f(p) {
            Ok((t, margin)) if margin >= RETRY_MARGIN => return Ok((t, p)),
            Ok(_) | Err(Error::PrecisionExhausted) => p *= 2,
            Err(e) => return Err(e),
        }
    }
    Err(Error::PrecisionExhausted)
}

/// `ord_v(log_v η)` at every place `v` of `F` above 2, normalized so a
/// uniformizer of `F_v` has valuation 1.
///
/// Units that are not principal at `v` are handled inside the logarithm by
/// raising to an odd power (the residue field unit group order) and to powers
/// of 2, with the corresponding factors divided back out; the valuation of
/// `log η` is unchanged by odd powers of `η`.
pub fn ord_log_eta(eta: &QuarticElem, prec: u32) -> Result<ValuationReport> {
    let q = eta.q();
    let residue = Residue16::of(q)?;
    let ((w, wstar), p) = with_retry(prec, |p| {
        let s = sqrt_minus_q(q, p)?;
        valuations_with_root(eta, &s, p)
    })?;
    if w.len() != 1 {
        return Err(Error::Inconsistent("expected one place above 𝔭".into()));
    }
    Ok(ValuationReport { q, residue, ord_w: w[0], ord_wstar: wstar, prec: p })
}

/// Valuations of `F` and of the mirror field `F' = K(√-β)` at `𝔭` and `𝔭*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MirrorReport {
    pub q: u64,
    /// `(F at 𝔭, F at 𝔭*)`.
    pub original: (Vec<i64>, Vec<i64>),
    /// `(F' at 𝔭, F' at 𝔭*)`.
    pub mirror: (Vec<i64>, Vec<i64>),
    /// Mirror of the mirror.
    pub double: (Vec<i64>, Vec<i64>),
    /// `F' at 𝔭* = F at 𝔭` and `F' at 𝔭 = F at 𝔭*`.
    pub swapped_equal: bool,
    pub involution: bool,
}

/// Recompute the local valuations with the two 2-adic square roots of `-q`
/// exchanged. In `F'`, `α'² = -β`; choosing `-s` in place of `s` realizes the
/// conjugation of `K`, which carries the data of `F` at `𝔭*` to the data of
/// `F'` at `𝔭` and vice versa.
pub fn mirror_check(eta: &QuarticElem, prec: u32) -> Result<MirrorReport> {
    let q = eta.q();
    let ((original, mirror, double), _) = with_retry(prec, |p| {
        let s = sqrt_minus_q(q, p)?;
        let (orig, m1) = valuations_with_root(eta, &s, p)?;
        // F': α'² = -β ↦ s at 𝔭 and -s at 𝔭*, i.e. the root -s in the F-routine
        let (mir, m2) = valuations_with_root(eta, &s.neg(), p)?;
        let (dbl, m3) = valuations_with_root(eta, &s.neg().neg(), p)?;
        Ok(((orig, mir, dbl), m1.min(m2).min(m3)))
    })?;
    let swapped_equal = mirror.1 == original.0 && mirror.0 == original.1;
    let involution = double == original;
    Ok(MirrorReport { q, original, mirror, double, swapped_equal, involution })
}

/// `η` and `log η` at the places above `𝔭*`.
#[derive(Clone, Debug)]
pub enum StarLogs {
    /// `q ≡ 7 (mod 16)`: one inert place, `F_{w*} = Q₂(ζ)`.
    Inert { unit: LocalQuad, log: LocalQuad },
    /// `q ≡ 15 (mod 16)`: two places with completion `Q₂`, at `α ↦ ±t`.
    Split { units: [Z2Elem; 2], logs: [Z2Elem; 2] },
}

/// `η` and its logarithm at the places above `𝔭*`.
pub fn star_logs(eta: &QuarticElem, prec: u32) -> Result<StarLogs> {
    let s = sqrt_minus_q(eta.q(), prec)?;
    if let Some(t) = sqrt_q2(&s)? {
        let u = [eval_z2(eta, &t, prec), eval_z2(eta, &t.neg(), prec)];
        let l = [log_unit(&u[0])?, log_unit(&u[1])?];
        return Ok(StarLogs::Split { units: u, logs: l });
    }
    let r = sqrt_in(Flavor::Unramified, &s)?.ok_or_else(|| Error::Inconsistent("𝔭* is neither inert nor split".into()))?;
    let u = eval_quad(eta, &r, prec);
    let l = log_unit(&u)?;
    Ok(StarLogs::Inert { unit: u, log: l })
}

/// Product of `|η|_v` over the places above 2, as the sum of `ord_v(η)`.
pub fn ord_eta_above_two(eta: &QuarticElem, prec: u32) -> Result<i64> {
    let s = sqrt_minus_q(eta.q(), prec)?;
    let mut total = 0;
    for c in [s.neg(), s] {
        if let Some(t) = sqrt_q2(&c)? {
            for r in [t.clone(), t.neg()] {
                total += eval_z2(eta, &r, prec).ord().ok_or(Error::PrecisionExhausted)?;
            }
        } else {
            let fl = match c.residue(3)? {
                5 => Flavor::Unramified,
                3 => Flavor::ramified(3),
                _ => Flavor::ramified(-1),
            };
            let r = sqrt_in(fl, &c)?.ok_or(Error::PrecisionExhausted)?;
            let u = eval_quad(eta, &r, prec);
            total += u.ord()?;
        }
    }
    Ok(total)
}

/// Local norm of `η` at the place where `α² ↦ c` (a quadratic factor).
pub fn local_norm(eta: &QuarticElem, c: &Z2Elem, prec: u32) -> Result<Int> {
    let fl = match c.residue(3)? {
        5 => Flavor::Unramified,
        3 => Flavor::ramified(3),
        7 => Flavor::ramified(-1),
        _ => return Err(Error::InvalidInput("linear factor".into())),
    };
    let r = sqrt_in(fl, c)?.ok_or(Error::PrecisionExhausted)?;
    eval_quad(eta, &r, prec).norm().to_int()
}
