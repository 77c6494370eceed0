//! Fundamental units of `F`.
//!
//! The main route walks the chain of relative minima of `O_F`: starting from
//! the lattice `O_F` (in which `1` is a minimum), each step finds the next
//! minimum `φ` (the element with `|φ|₂ < 1` and the smallest `|φ|₁ > 1`) and
//! rescales the lattice by `φ⁻¹`. The lattice returns to `O_F` for the first
//! time after the product of the steps is a fundamental unit.
//!
//! The second route, used for small `q`, enumerates all elements of bounded
//! `T₂`-norm. In unit rank 1 with two complex places `T₂(u) = 4 cosh(2 log|u|₁)`
//! for a unit, so the unit of smallest regulator among those enumerated is
//! fundamental.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{QuarticElem, QuarticField};
use crate::hp::Ball;
use crate::lattice::{hnf, lll, short_vectors};
use crate::{arith, Error, Int, Rat, Result};

/// How a unit was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitMethod {
    ChainOfMinima,
    T2Enumeration,
    /// Both routes ran and returned the same unit up to sign and inversion.
    Both,
}

/// A unit of `F` with the evidence that it is fundamental.
#[derive(Clone, Debug)]
pub struct UnitCert {
    pub unit: QuarticElem,
    /// `log|u|₁`.
    pub regulator: Ball,
    /// The unit is proven fundamental (chain walk completed with every
    /// comparison separated, or the `T₂` enumeration covered it).
    pub certified: bool,
    pub method: UnitMethod,
    /// Steps in the chain of minima.
    pub steps: usize,
    /// `T₂` radius of the enumeration, when that route ran.
    pub enumeration_radius: Option<f64>,
    /// A prime `p ≡ 1 (mod 4)` at which the unit is a quadratic nonresidue,
    /// which proves that it is an odd power of a fundamental unit.
    pub odd_index_prime: Option<u64>,
    /// Comparisons in the walk that needed ball arithmetic.
    pub ball_resolutions: usize,
}

/// Result of the chain walk.
#[derive(Clone, Debug)]
pub struct Walk {
    /// Product of the steps; `|·|₁ > 1`.
    pub unit: QuarticElem,
    /// `log|unit|₁`, summed over the steps.
    pub regulator: Ball,
    pub steps: usize,
    pub ball_resolutions: usize,
}

const TOL: f64 = 1e-9;
const ENUM_LIMIT: usize = 20_000;
const REG_PREC: u32 = 192;

fn omega_embeddings(field: &QuarticField, rows: &[[Int; 4]], n: &Int) -> Vec<(Complex64, Complex64)> {
    rows.iter()
        .map(|r| {
            let e = field.from_omega(r).scale(&Rat::new(Int::one(), n.clone()));
            (e.embed_f64(1), e.embed_f64(2))
        })
        .collect()
}

/// Candidate neighbour with its float absolute values.
struct Cand {
    coeffs: [i64; 4],
    a1: f64,
    a2: f64,
}

fn elem_of(field: &QuarticField, a: &[[Int; 4]], n: &Int, c: &[i64; 4]) -> (QuarticElem, [Int; 4]) {
    let gamma: [Int; 4] = std::array::from_fn(|k| (0..4).fold(Int::zero(), |s, j| s + &a[j][k] * c[j]));
    let phi = field.from_omega(&gamma).scale(&Rat::new(Int::one(), n.clone()));
    (phi, gamma)
}

/// Choose the neighbour among the candidates, resolving close calls in ball arithmetic.
fn choose(field: &QuarticField, a: &[[Int; 4]], n: &Int, cands: &[Cand], resolutions: &mut usize) -> Result<Option<[i64; 4]>> {
    let mut clear: Vec<&Cand> = Vec::new();
    let mut unclear: Vec<&Cand> = Vec::new();
    for c in cands {
        if c.a2 >= 1.0 + TOL || c.a1 <= 1.0 - TOL {
            continue;
        }
        if c.a2 < 1.0 - TOL && c.a1 > 1.0 + TOL {
            clear.push(c);
        } else {
            unclear.push(c);
        }
    }
    clear.sort_by(|x, y| x.a1.total_cmp(&y.a1));
    let tie = clear.len() >= 2 && clear[1].a1 - clear[0].a1 <= TOL * clear[0].a1;
    let undercut = clear.first().is_none_or(|b| unclear.iter().any(|u| u.a1 <= b.a1 * (1.0 + TOL)));
    if !tie && !(undercut && !unclear.is_empty()) {
        return Ok(clear.first().map(|c| c.coeffs));
    }
    *resolutions += 1;
    let near: Vec<&Cand> = match clear.first() {
        Some(b) => clear.iter().chain(unclear.iter()).filter(|c| c.a1 <= b.a1 * (1.0 + 1e-6)).copied().collect(),
        None => unclear,
    };
    let mut prec = 256;
    while prec <= 2048 {
        let one = Ball::from_i64(1, prec);
        let mut qualified: Vec<(Ball, [i64; 4])> = Vec::new();
        let mut undecided = false;
        for c in &near {
            let (phi, _) = elem_of(field, a, n, &c.coeffs);
            if phi.is_one() || phi.neg().is_one() {
                continue;
            }
            let b1 = phi.abs2_ball(1, prec);
            let b2 = phi.abs2_ball(2, prec);
            let in2 = b2.certainly_lt(&one);
            let out2 = b2.certainly_gt(&one) || !b2.overlaps(&one) && !in2;
            let in1 = b1.certainly_gt(&one);
            let out1 = b1.certainly_lt(&one);
            if out2 || out1 {
                continue;
            }
            if in1 && in2 {
                qualified.push((b1, c.coeffs));
            } else {
                undecided = true;
            }
        }
        if !undecided {
            if qualified.is_empty() {
                return Ok(None);
            }
            let mut best = 0;
            for i in 1..qualified.len() {
                if qualified[i].0.certainly_lt(&qualified[best].0) {
                    best = i;
                }
            }
            let separated = (0..qualified.len()).all(|i| i == best || qualified[best].0.certainly_lt(&qualified[i].0));
            if separated {
                return Ok(Some(qualified[best].1));
            }
        }
        prec *= 2;
    }
    Err(Error::Inconsistent("neighbour minimum could not be separated at 2048 bits".into()))
}

/// Walk the chain of relative minima of `O_F` until it returns to `O_F`.
pub fn walk_minima(field: &QuarticField, max_steps: usize) -> Result<Walk> {
    let q = field.q;
    let ident: Vec<[Int; 4]> = (0..4).map(|i| std::array::from_fn(|j| Int::from((i == j) as u8))).collect();
    let mut a = ident.clone();
    let mut n = Int::one();
    let mut theta = QuarticElem::one(q);
    let sqrt_disc = field.disc.to_f64().unwrap().sqrt();
    let mut resolutions = 0;
    let mut regulator = Ball::zero(REG_PREC);
    for step in 1..=max_steps {
        let det_a = (0..4).fold(Int::one(), |p, i| p * &a[i][i]).abs().to_f64().unwrap();
        let covol = sqrt_disc / 4.0 * det_a / n.to_f64().unwrap().powi(4);
        let mut x = (4.0 * covol.sqrt() / std::f64::consts::PI).max(1.0) * (1.0 + 1e-6);
        let emb = omega_embeddings(field, &a, &n);
        let mut choice = None;
        for _ in 0..6 {
            let rows: Vec<Vec<f64>> = emb.iter().map(|(z1, z2)| vec![z1.re / x, z1.im / x, z2.re, z2.im]).collect();
            let (red, u) = lll(&rows);
            let ys = short_vectors(&red, 2.0, ENUM_LIMIT)
                .ok_or_else(|| Error::BudgetExceeded("neighbour enumeration".into()))?;
            let cands: Vec<Cand> = ys
                .iter()
                .filter_map(|y| {
                    let coeffs: [i64; 4] = std::array::from_fn(|j| (0..4).map(|i| y[i] * u[i][j]).sum());
                    let z1: Complex64 = (0..4).map(|j| emb[j].0 * coeffs[j] as f64).sum();
                    let z2: Complex64 = (0..4).map(|j| emb[j].1 * coeffs[j] as f64).sum();
                    if z2.norm() > 1.0 + 1e-6 || z1.norm() < 1.0 - 1e-6 {
                        return None;
                    }
                    // recompute from the exact element; the lattice rows can be badly scaled
                    let (phi, _) = elem_of(field, &a, &n, &coeffs);
                    if phi.is_one() || phi.neg().is_one() {
                        return None;
                    }
                    Some(Cand { coeffs, a1: phi.embed_f64(1).norm(), a2: phi.embed_f64(2).norm() })
                })
                .collect();
            choice = choose(field, &a, &n, &cands, &mut resolutions)?;
            if choice.is_some() {
                break;
            }
            x *= 2.0;
        }
        let c = choice.ok_or_else(|| Error::Inconsistent("no neighbour minimum found".into()))?;
        let (phi, gamma) = elem_of(field, &a, &n, &c);
        theta = theta.mul(&phi);
        let step_log = phi.abs2_ball(1, REG_PREC).ln().ok_or_else(|| Error::Inconsistent("zero minimum".into()))?;
        regulator = regulator.add(&step_log.mul_pow2(-1));
        // new lattice φ⁻¹·(A/N) = A·γ̃ / N(γ), with γ̃ = N(γ)/γ
        let g = field.from_omega(&gamma);
        let gt = g.norm_cofactor();
        let ng = g.mul(&gt);
        debug_assert!(ng.den().is_one());
        let ng = ng.num()[0].abs();
        let rows: Vec<Vec<Int>> = a
            .iter()
            .map(|r| {
                let e = field.from_omega(r).mul(&gt);
                field.to_omega_int(&e).expect("ideal product is integral").to_vec()
            })
            .collect();
        let h = hnf(&rows);
        let gg = h.iter().flatten().fold(ng.clone(), |g, c| g.gcd(c));
        a = h.iter().map(|r| std::array::from_fn(|j| &r[j] / &gg)).collect();
        n = ng / gg;
        if n.is_one() && a == ident {
            return Ok(Walk { unit: theta, regulator, steps: step, ball_resolutions: resolutions });
        }
    }
    Err(Error::BudgetExceeded(format!("chain of minima longer than {max_steps} steps")))
}

/// Estimated number of elements of `O_F` with `T₂ <= b`.
fn t2_count_estimate(field: &QuarticField, b: f64) -> f64 {
    // vol{T₂ <= b} = (π²/2)(b/2)² in the coordinates (Re σ₁, Im σ₁, Re σ₂, Im σ₂)
    let covol = field.disc.to_f64().unwrap().sqrt() / 4.0;
    std::f64::consts::PI.powi(2) / 2.0 * (b / 2.0).powi(2) / covol
}

/// The `T₂` route: enumerate `T₂ <= B`, doubling `B` from 8, until a unit
/// other than `±1` appears. Gives up (returns `Ok(None)`) once the expected
/// number of lattice points exceeds `point_budget`.
pub fn t2_fundamental_unit(field: &QuarticField, point_budget: f64) -> Result<Option<(QuarticElem, f64)>> {
    let q = field.q;
    let omegas: Vec<QuarticElem> = (0..4).map(|i| field.omega(i)).collect();
    let s2 = std::f64::consts::SQRT_2;
    let rows: Vec<Vec<f64>> = omegas
        .iter()
        .map(|w| {
            let (z1, z2) = (w.embed_f64(1), w.embed_f64(2));
            vec![s2 * z1.re, s2 * z1.im, s2 * z2.re, s2 * z2.im]
        })
        .collect();
    let (red, u) = lll(&rows);
    let mut b = 8.0;
    loop {
        if t2_count_estimate(field, b) > point_budget {
            return Ok(None);
        }
        let limit = (point_budget as usize).max(1000) * 4;
        let ys = short_vectors(&red, b, limit).ok_or_else(|| Error::BudgetExceeded("T2 enumeration".into()))?;
        let mut best: Option<(f64, QuarticElem)> = None;
        for y in &ys {
            let c: [Int; 4] = std::array::from_fn(|j| BigInt::from((0..4).map(|i| y[i] * u[i][j]).sum::<i64>()));
            let x = field.from_omega(&c);
            let (z1, z2) = (x.embed_f64(1), x.embed_f64(2));
            let nf = (z1.norm_sqr() * z2.norm_sqr()).abs();
            if (nf - 1.0).abs() > 1e-6 {
                continue;
            }
            if !x.norm().abs().is_one() || x.is_one() || x.neg().is_one() {
                continue;
            }
            let r = z1.norm().ln().abs();
            if best.as_ref().is_none_or(|(br, _)| r < *br) {
                best = Some((r, x));
            }
        }
        if let Some((_, x)) = best {
            let _ = q;
            return Ok(Some((x, b)));
        }
        b *= 2.0;
    }
}

/// A prime `p ≡ 1 (mod 4)`, `p < limit`, with a root `r` of `x⁴ + q` mod `p`
/// at which `u(r)` is a quadratic nonresidue. Since `-1` is a square mod `p`,
/// this shows `±u` is not a square in `F`.
pub fn odd_index_witness(u: &QuarticElem, limit: u64) -> Option<u64> {
    let q = u.q();
    for p in arith::primes_in_class(5, limit, 1, 4) {
        if p == q {
            continue;
        }
        let pb = BigInt::from(p);
        if (u.den() % &pb).is_zero() {
            continue;
        }
        let Some(s) = arith::sqrt_mod_prime(&(-BigInt::from(q)).mod_floor(&pb), &pb) else {
            continue;
        };
        for c in [s.clone(), (&pb - &s) % &pb] {
            let Some(r) = arith::sqrt_mod_prime(&c, &pb) else {
                continue;
            };
            let mut v = Int::zero();
            for k in (0..4).rev() {
                v = (v * &r + &u.num()[k]).mod_floor(&pb);
            }
            let dinv = arith::mod_inverse(u.den(), &pb)?;
            v = (v * dinv).mod_floor(&pb);
            if arith::jacobi(&v, &pb) == -1 {
                return Some(p);
            }
        }
    }
    None
}

/// `u` or `u⁻¹`, whichever has `|·|₁ > 1` (for units of moderate size).
#[cfg(test)]
fn orient(u: QuarticElem) -> QuarticElem {
    if u.embed_f64(1).norm() >= 1.0 {
        u
    } else {
        u.inv().expect("unit")
    }
}

fn same_up_to_sign(a: &QuarticElem, b: &QuarticElem) -> bool {
    a == b || *a == b.neg()
}

/// Find and certify a fundamental unit.
///
/// The chain walk always runs; the `T₂` route runs as well when its expected
/// enumeration size is below `t2_point_budget`, and the two must agree.
pub fn find_fundamental_unit(field: &QuarticField, max_steps: usize, t2_point_budget: f64) -> Result<UnitCert> {
    let walk = walk_minima(field, max_steps)?;
    let unit = walk.unit;
    if !unit.norm().abs().is_one() || field.to_omega_int(&unit).is_none() {
        return Err(Error::Inconsistent("chain walk returned a non-unit".into()));
    }
    if unit.is_one() || unit.neg().is_one() {
        return Err(Error::Inconsistent("chain walk returned a root of unity".into()));
    }
    let mut method = UnitMethod::ChainOfMinima;
    let mut radius = None;
    if let Some((t2u, b)) = t2_fundamental_unit(field, t2_point_budget)? {
        let t2inv = t2u.inv().expect("unit");
        if !same_up_to_sign(&t2u, &unit) && !same_up_to_sign(&t2inv, &unit) {
            return Err(Error::Inconsistent(format!("T2 route and chain walk disagree for q = {}", field.q)));
        }
        method = UnitMethod::Both;
        radius = Some(b);
    }
    let regulator = walk.regulator;
    if !regulator.is_positive() {
        return Err(Error::Inconsistent("chain walk regulator is not positive".into()));
    }
    let odd = odd_index_witness(&unit, 100_000);
    Ok(UnitCert {
        unit,
        regulator,
        certified: true,
        method,
        steps: walk.steps,
        enumeration_radius: radius,
        odd_index_prime: odd,
        ball_resolutions: walk.ball_resolutions,
    })
}
