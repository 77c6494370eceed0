//! Rigorous evaluation of the estimates in the simple-zero criterion.
//!
//! With `W = 4q`, the derivative at `s = 1` splits as `U + V`; the criterion
//! holds when a lower bound for `U` exceeds an upper bound for `|V|`. All
//! quantities are balls; a comparison is reported true only when the balls
//! are separated.

use std::sync::OnceLock;

use num_bigint::BigInt;

use crate::hp::{euler_gamma, pi, Ball, DEFAULT_PREC};
use crate::{arith, Error, Result};

const GUARD: u32 = 64;

/// Below this, `E₁` is summed from its power series; above, from its continued fraction.
const SERIES_LIMIT: f64 = 4.0;

/// Terms of the `V` sum with argument above this are bounded, not summed.
pub const V_CUTOFF: i64 = 12;

/// Precision of the individual terms of the truncated `V` sum.
const TERM_PREC: u32 = 40;

/// `U > W (U_A - U_B W^{-1/4} - U_C W^{-1/2})`.
const U_A: (i64, i64) = (5235, 10000);
const U_B: (i64, i64) = (8458, 10000);
const U_C: (i64, i64) = (3951, 10000);
/// `U > U_RATIO · W` for `W >= 28`.
pub const U_RATIO: (i64, i64) = (8107226, 100000000);
/// Bound used for the `y` series.
pub const Y_BOUND: (i64, i64) = (2080, 10000);
/// `|V| < V_RATIO · W`.
pub const V_RATIO: (i64, i64) = (1341663832, 100000000000);

fn rat_ball(r: (i64, i64), prec: u32) -> Ball {
    Ball::from_i64(r.0, prec).div_i64(r.1)
}

/// `E₁(z) = ∫_z^∞ e^{-t}/t dt` for `0 < z <= 4`:
/// `-γ - ln z - Σ_{k>=1} (-z)^k / (k·k!)`.
fn e1_series(z: &Ball, prec: u32) -> Option<Ball> {
    let wp = prec + GUARD;
    let z = z.set_prec(wp);
    let mut term = Ball::from_i64(1, wp);
    let mut sum = Ball::zero(wp);
    let mut k: i64 = 1;
    let tiny = Ball::from_i64(1, wp).mul_pow2(-(prec as i64 + 16));
    loop {
        // term = (-z)^k / k!
        term = term.mul(&z.neg()).div_i64(k);
        let t = term.div_i64(k);
        sum = sum.add(&t);
        k += 1;
        // alternating with decreasing magnitude once k > z: remainder below the next term
        if k as f64 > z.mid_f64() + 2.0 && t.abs().certainly_lt(&tiny) {
            let next = term.mul(&z).div_i64(k).div_i64(k);
            sum = sum.with_error(&next.abs());
            break;
        }
    }
    let r = euler_gamma(wp).neg().sub(&z.ln()?).sub(&sum);
    Some(r.set_prec(prec))
}

/// Convergent of depth `n` of the Stieltjes continued fraction
/// `1/(z + 1/(1 + 1/(z + 2/(1 + 2/(z + ...)))))`, evaluated from the bottom up.
fn s_fraction(z: &Ball, n: i64, one: &Ball) -> Option<Ball> {
    let b = |k: i64| if k % 2 == 1 { z.clone() } else { one.clone() };
    let a = |k: i64| if k == 1 { 1 } else { k / 2 };
    let mut t = b(n);
    for k in (1..n).rev() {
        t = b(k).add(&Ball::from_i64(a(k + 1), t.prec()).div(&t)?);
    }
    t.recip()
}

/// `e^z E₁(z)` for `z > 4`. Consecutive convergents of the S-fraction
/// bracket the value, so their hull contains it.
fn e1_scaled_cf(z: &Ball, prec: u32) -> Option<Ball> {
    let wp = prec + GUARD;
    let z = z.set_prec(wp);
    let one = Ball::from_i64(1, wp);
    let tol = one.mul_pow2(-(prec as i64 + 8));
    // depth needed is about b²/(6z) + b/2 for b = (prec + 8) ln 2 nats
    let b = (prec + 8) as f64 * std::f64::consts::LN_2;
    let mut n = ((b * b / (6.0 * z.mid_f64().max(1.0)) + b / 2.0) as i64).max(8);
    while n <= 1 << 16 {
        let c0 = s_fraction(&z, n, &one)?;
        let c1 = s_fraction(&z, n + 1, &one)?;
        if c0.sub(&c1).abs().certainly_lt(&tol.add(&c0.abs().mul_pow2(-(prec as i64 + 8)))) || c0.sub(&c1).contains_zero() {
            return Some(c0.hull(&c1).set_prec(prec));
        }
        n *= 2;
    }
    None
}

/// `f(z) = z⁻¹ ∫_z^∞ e^{-t} t⁻¹ dt = E₁(z)/z`.
pub fn f_of_z(z: &Ball) -> Result<Ball> {
    if !z.is_positive() {
        return Err(Error::InvalidInput("f(z) needs z > 0".into()));
    }
    let prec = z.prec();
    let e1 = if z.mid_f64() <= SERIES_LIMIT {
        e1_series(z, prec)
    } else {
        e1_scaled_cf(z, prec).map(|s| s.mul(&z.neg().exp()))
    }
    .ok_or_else(|| Error::InvalidInput("f(z) did not converge".into()))?;
    e1.div(z).ok_or_else(|| Error::InvalidInput("f(z) at z = 0".into()))
}

/// `f(z)` with `e^{-z}` supplied by the caller.
fn f_with_exp(z: &Ball, emz: &Ball) -> Result<Ball> {
    if z.mid_f64() <= SERIES_LIMIT {
        return f_of_z(z);
    }
    let s = e1_scaled_cf(z, z.prec()).ok_or_else(|| Error::InvalidInput("f(z) did not converge".into()))?;
    s.mul(emz).div(z).ok_or_else(|| Error::InvalidInput("f(z) at z = 0".into()))
}

/// `e^{-z}/z²`, an upper bound for `f(z)`.
pub fn f_upper(z: &Ball) -> Ball {
    z.neg().exp().div(&z.square()).expect("z > 0")
}

/// Lower bound for `U` as a function of `W`.
#[derive(Clone, Debug)]
pub struct ULower {
    pub value: Ball,
    /// `value > U_RATIO · W`.
    pub exceeds_ratio: bool,
}

pub fn u_lower_bound(w: &Ball) -> Result<ULower> {
    let p = w.prec();
    if w.certainly_lt(&Ball::from_i64(28, p)) {
        return Err(Error::InvalidInput("W < 28".into()));
    }
    let s2 = w.sqrt().ok_or_else(|| Error::InvalidInput("W <= 0".into()))?;
    let s4 = s2.sqrt().unwrap();
    let inner = rat_ball(U_A, p)
        .sub(&rat_ball(U_B, p).div(&s4).unwrap())
        .sub(&rat_ball(U_C, p).div(&s2).unwrap());
    let value = w.mul(&inner);
    let exceeds_ratio = value.certainly_gt(&w.mul(&rat_ball(U_RATIO, p)));
    if !exceeds_ratio {
        return Err(Error::Inconsistent(format!("U lower bound {value} is not above 0.08107226 W")));
    }
    Ok(ULower { value, exceeds_ratio })
}

/// `Σ_{y>Y} e^{-π y²/2} <= r^{Y+1}/(1 - r)`, `r = e^{-π(Y+1)/2}`, since `y² >= (Y+1) y`.
fn y_gauss_tail(big_y: i64, prec: u32) -> Ball {
    let r = pi(prec).mul_i64(big_y + 1).div_i64(2).neg().exp();
    let one = Ball::from_i64(1, prec);
    r.powi((big_y + 1) as u32).div(&one.sub(&r)).unwrap()
}

fn compute_y_series(prec: u32) -> Ball {
    let wp = prec + GUARD;
    let p = pi(wp);
    let mut sum = Ball::zero(wp);
    let mut y = 1i64;
    let tiny = Ball::from_i64(1, wp).mul_pow2(-(prec as i64 + 8));
    loop {
        let t = p.mul_i64(y * y).div_i64(2).neg().exp().div_i64(y.pow(4));
        sum = sum.add(&t);
        let tail = y_gauss_tail(y, wp).div_i64((y + 1).pow(4));
        if tail.certainly_lt(&tiny) {
            // tail is positive: widen upward only
            let up = sum.add(&tail);
            return sum.hull(&up).set_prec(prec);
        }
        y += 1;
    }
}

/// `Σ_{y>=1} y⁻⁴ e^{-π y²/2}`.
pub fn y_series(prec: u32) -> Ball {
    static CACHE: OnceLock<Ball> = OnceLock::new();
    if prec == DEFAULT_PREC {
        return CACHE.get_or_init(|| compute_y_series(DEFAULT_PREC)).clone();
    }
    compute_y_series(prec)
}

/// `Σ_{x>X} x e^{-π x²/(2q)} <= (q/π) e^{-π X²/(2q)} + √(q/π) e^{-1/2}`
/// (integral plus the maximum of the summand).
fn x_gauss_tail(q: i64, big_x: i64, prec: u32) -> Ball {
    let p = pi(prec);
    let qp = Ball::from_i64(q, prec).div(&p).unwrap();
    let e = p.mul_i64(big_x * big_x).div_i64(2 * q).neg().exp();
    let peak = qp.sqrt().unwrap().mul(&Ball::from_i64(-1, prec).div_i64(2).exp());
    qp.mul(&e).add(&peak)
}

/// `Σ_{x>X} x e^{-π x²/(2q)} <= (q/π) e^{-π X²/(2q)}` once `X >= √(q/π)`.
fn x_gauss_tail_decreasing(q: i64, big_x: i64, prec: u32) -> Ball {
    let p = pi(prec);
    let qp = Ball::from_i64(q, prec).div(&p).unwrap();
    qp.mul(&p.mul_i64(big_x * big_x).div_i64(2 * q).neg().exp())
}

/// The Gauss-type sum `Σ_{x>=1} x e^{-π x²/(2q)}`.
#[derive(Clone, Debug)]
pub struct XSum {
    pub value: Ball,
    pub below_q_over_pi: bool,
}

pub fn x_gauss_sum(q: u64, prec: u32) -> Result<XSum> {
    if q < 7 {
        return Err(Error::InvalidInput("q < 7".into()));
    }
    let wp = prec + GUARD;
    let qi = q as i64;
    let p = pi(wp);
    // term(x+1) = term(x) · c · r^x, c = e^{-π/(2q)}, r = e^{-π/q}
    let c = p.div_i64(2 * qi).neg().exp();
    let r = p.div_i64(qi).neg().exp();
    let mut term = c.clone();
    let mut rx = r.clone();
    let mut sum = Ball::zero(wp);
    let x0 = ((q as f64 / std::f64::consts::PI).sqrt().ceil() as i64).max(1);
    let tiny = Ball::from_i64(1, wp).mul_pow2(-(prec as i64 + 8));
    let mut x = 1i64;
    loop {
        sum = sum.add(&term.mul_i64(x));
        if x >= x0 {
            let tail = x_gauss_tail_decreasing(qi, x, wp);
            if tail.certainly_lt(&tiny) {
                sum = sum.hull(&sum.add(&tail));
                break;
            }
        }
        term = term.mul(&c).mul(&rx);
        rx = rx.mul(&r);
        x += 1;
    }
    let value = sum.set_prec(prec);
    let bound = Ball::from_i64(qi, prec).div(&pi(prec)).unwrap();
    let below = value.certainly_lt(&bound);
    if !below {
        return Err(Error::Inconsistent(format!("x-sum {value} is not below q/π for q = {q}")));
    }
    Ok(XSum { value, below_q_over_pi: below })
}

/// Upper bounds for `|V|`.
#[derive(Clone, Debug)]
pub struct VUpper {
    /// `Σ 2x f(π(x² + q y²)/(2q))` over arguments `<= V_CUTOFF`, plus a tail bound.
    pub truncated: Ball,
    /// The tail bound included in `truncated`.
    pub tail: Ball,
    /// `(8/π²) · x_sum · y_sum`.
    pub chain: Ball,
    /// `V_RATIO · W`.
    pub closed: Ball,
}

/// Truncated double sum with cutoff `cutoff` on the argument of `f`.
fn v_truncated(q: u64, cutoff: i64, prec: u32) -> Result<(Ball, Ball)> {
    let wp = prec.min(TERM_PREC) + 16;
    let qi = q as i64;
    let p = pi(wp);
    let two_q = 2 * qi;
    let mut sum = Ball::zero(wp);
    let mut tail = Ball::zero(wp);
    let c = p.div_i64(2 * qi).neg().exp();
    let r = p.div_i64(qi).neg().exp();
    let mut y = 1i64;
    // f(z) < e^{-z}/z² <= e^{-z}/(cutoff - 1)² for the terms left out
    let zc2 = (cutoff - 1) * (cutoff - 1);
    let lim = |x: i64, y: i64| (x * x + qi * y * y) as f64 * std::f64::consts::PI / (2 * qi) as f64;
    loop {
        let ey = p.mul_i64(y * y).div_i64(2).neg().exp();
        if lim(1, y) > cutoff as f64 + 1e-6 {
            // every x for this y and all larger y
            let all_x = x_gauss_tail(qi, 0, wp);
            let ty = y_gauss_tail(y - 1, wp);
            tail = tail.add(&all_x.mul(&ty).mul_i64(2).div_i64(zc2));
            break;
        }
        // e^{-z} = e^{-π x²/(2q)} e^{-π y²/2}, stepped in x as in the x-sum
        let mut ex = c.mul(&ey);
        let mut rx = r.clone();
        let mut x = 1i64;
        while lim(x, y) <= cutoff as f64 - 1e-6 {
            let z = p.mul_i64(x * x + qi * y * y).div_i64(two_q);
            sum = sum.add(&f_with_exp(&z, &ex)?.mul_i64(2 * x));
            ex = ex.mul(&c).mul(&rx);
            rx = rx.mul(&r);
            x += 1;
        }
        // terms at or past the cutoff, x >= x_last + 1
        let last = x - 1;
        let tx = x_gauss_tail(qi, last, wp);
        tail = tail.add(&tx.mul(&ey).mul_i64(2).div_i64(zc2));
        y += 1;
    }
    let total = sum.hull(&sum.add(&tail));
    Ok((total.set_prec(prec), tail.set_prec(prec)))
}

pub fn v_upper_bound(q: u64, prec: u32) -> Result<VUpper> {
    let (truncated, tail) = v_truncated(q, V_CUTOFF, prec)?;
    let p = pi(prec);
    let xs = x_gauss_sum(q, prec)?;
    let ys = y_series(prec);
    let chain = Ball::from_i64(8, prec).div(&p.square()).unwrap().mul(&xs.value).mul(&ys);
    let w = Ball::from_i64(4 * q as i64, prec);
    let closed = rat_ball(V_RATIO, prec).mul(&w);
    if !truncated.certainly_lt(&chain) {
        return Err(Error::Inconsistent(format!("truncated V sum {truncated} not below the chain bound {chain}")));
    }
    Ok(VUpper { truncated, tail, chain, closed })
}

/// Outcome of the simple-zero criterion for one `q`.
#[derive(Clone, Debug)]
pub struct BoundReport {
    pub q: u64,
    pub w: Ball,
    pub u_lower: Ball,
    pub v_upper_truncated: Ball,
    pub v_upper_chain: Ball,
    pub v_upper_closed: Ball,
    /// `u_lower - v_upper_chain`, compared with `(U_RATIO - V_RATIO) W`.
    pub margin: Ball,
    pub verdict: bool,
}

pub fn simple_zero_criterion(q: u64, prec: u32) -> Result<BoundReport> {
    if q % 8 != 7 || !arith::is_prime(&BigInt::from(q)) {
        return Err(Error::InvalidInput(format!("q = {q} is not a prime 7 mod 8")));
    }
    let w = Ball::from_i64(4 * q as i64, prec);
    let u = u_lower_bound(&w)?;
    let v = v_upper_bound(q, prec)?;
    let margin = u.value.sub(&v.chain);
    let verdict = u.value.certainly_gt(&v.truncated) && u.value.certainly_gt(&v.chain) && u.value.certainly_gt(&v.closed);
    Ok(BoundReport {
        q,
        w,
        u_lower: u.value,
        v_upper_truncated: v.truncated,
        v_upper_chain: v.chain,
        v_upper_closed: v.closed,
        margin,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const P: u32 = DEFAULT_PREC;

    fn b(x: f64) -> Ball {
        Ball::from_f64(x, P)
    }

    /// `E₁(z)` by composite Simpson on `∫_0^1 e^{-z/u}/u du` (substituting `t = z/u`).
    fn e1_quadrature(z: f64) -> f64 {
        let n = 200_000;
        let h = 1.0 / n as f64;
        let g = |u: f64| if u == 0.0 { 0.0 } else { (-z / u).exp() / u };
        let mut s = g(0.0) + g(1.0);
        for i in 1..n {
            let u = i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(u);
        }
        s * h / 3.0
    }

    #[test]
    fn f_against_quadrature() {
        let f1 = f_of_z(&b(1.0)).unwrap();
        assert!((f1.mid_f64() - 0.2193839).abs() < 1e-7);
        for z in [0.3, 1.0, 2.5, 3.9, 4.1, 6.0, 12.0] {
            let q = e1_quadrature(z) / z;
            let f = f_of_z(&b(z)).unwrap();
            assert!((f.mid_f64() - q).abs() < 1e-9 * q.max(1e-12) + 1e-14, "z = {z}: {f:?} vs {q}");
            assert!(f.rad_f64() < 1e-30);
        }
    }

    #[test]
    fn series_and_fraction_agree_where_both_converge() {
        for z in [4.5, 5.0, 8.0] {
            let s = e1_series(&b(z), P).unwrap();
            let c = e1_scaled_cf(&b(z), P).unwrap().mul(&b(-z).exp());
            assert!(s.overlaps(&c), "z = {z}");
        }
    }

    #[test]
    fn f_below_simple_bound() {
        for z in [0.5, 1.0, 2.0, 10.0, 30.0] {
            assert!(f_of_z(&b(z)).unwrap().certainly_lt(&f_upper(&b(z))));
        }
        assert!(f_of_z(&b(0.0)).is_err());
        assert!(f_of_z(&b(-1.0)).is_err());
    }

    #[test]
    fn small_z_limit() {
        // z f(z) + γ + ln z = z - z²/4 + ...
        for z in [1e-3, 1e-5] {
            let zb = b(z);
            let r = f_of_z(&zb).unwrap().mul(&zb).add(&euler_gamma(P)).add(&zb.ln().unwrap());
            assert!((r.mid_f64() - z).abs() < z * z);
        }
    }

    #[test]
    fn derivative_identity() {
        // d/dz (z f(z)) = -e^{-z}/z
        let h = Ball::from_i64(1, P).mul_pow2(-40);
        for z in [0.7, 2.0, 3.99, 5.0, 9.0] {
            let zb = b(z);
            let up = zb.add(&h);
            let dn = zb.sub(&h);
            let d = f_of_z(&up).unwrap().mul(&up).sub(&f_of_z(&dn).unwrap().mul(&dn)).div(&h.mul_i64(2)).unwrap();
            let expect = zb.neg().exp().div(&zb).unwrap().neg();
            assert!((d.mid_f64() - expect.mid_f64()).abs() < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn u_bound_examples() {
        let u = u_lower_bound(&b(28.0)).unwrap();
        assert!((u.value.mid_f64() / 28.0 - 0.08115).abs() < 1e-4);
        let u = u_lower_bound(&b(4000.0)).unwrap();
        let r = u.value.mid_f64() / 4000.0;
        // direct evaluation of the bound
        let direct = 0.5235 - 0.8458 * 4000f64.powf(-0.25) - 0.3951 * 4000f64.powf(-0.5);
        assert!((r - direct).abs() < 1e-12);
        assert!(u_lower_bound(&b(27.0)).is_err());
        let mut last = 0.0;
        for w in (28..4000).step_by(97) {
            let v = u_lower_bound(&b(w as f64)).unwrap().value.mid_f64() / w as f64;
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn y_series_value() {
        let y = y_series(P);
        assert!((y.mid_f64() - 0.207997).abs() < 1e-6);
        let (lo, hi) = y.bounds_f64();
        assert!(lo >= 0.2079 && hi < 0.2080);
        let first = pi(P).div_i64(2).neg().exp();
        assert!((first.mid_f64() - 0.20788).abs() < 1e-5);
        assert!(y_gauss_tail(3, P).mid_f64() / 256.0 < 1e-9);
    }

    #[test]
    fn x_sum_examples() {
        let x = x_gauss_sum(7, P).unwrap();
        assert!(x.value.mid_f64() < 7.0 / std::f64::consts::PI);
        let big = x_gauss_sum(9999, P).unwrap().value.mid_f64();
        let ratio = big / (9999.0 / std::f64::consts::PI);
        assert!(ratio < 1.0 && ratio > 0.99, "{ratio}");
        // Euler–Maclaurin: Σ_{x>=1} g(x) = ∫_0^∞ g - g(0)/2 - g'(0)/12 + ... = q/π - 1/12 + O(1/q)
        let em = 9999.0 / std::f64::consts::PI - 1.0 / 12.0;
        assert!((big - em).abs() < 1e-3);
    }

    #[test]
    fn v_bounds_q7_and_q31() {
        for q in [7u64, 31] {
            let v = v_upper_bound(q, P).unwrap();
            assert!(v.truncated.is_positive());
            assert!(v.truncated.certainly_lt(&v.chain));
            assert!(v.chain.certainly_lt(&v.closed));
            let ratio = v.closed.mid_f64() / (4 * q) as f64;
            assert!((ratio - 0.01341663832).abs() < 1e-15);
            // 2·0.2080/π³
            assert!((0.416 / std::f64::consts::PI.powi(3) - 0.01341663832).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_is_stable() {
        let (a, ta) = v_truncated(23, 20, P).unwrap();
        let (b2, _) = v_truncated(23, 40, P).unwrap();
        assert!(a.overlaps(&b2));
        assert!((a.mid_f64() - b2.mid_f64()).abs() <= ta.mid_f64() + ta.rad_f64());
    }

    #[test]
    fn criterion_examples() {
        for q in [7u64, 31, 103] {
            let r = simple_zero_criterion(q, P).unwrap();
            assert!(r.verdict, "q = {q}");
            let w = (4 * q) as f64;
            assert!(r.margin.mid_f64() >= (0.08107226 - 0.01341663832 - 1e-9) * w);
        }
        assert!(simple_zero_criterion(11, P).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn f_is_decreasing(z in 0.05f64..30.0, dz in 0.01f64..2.0) {
            let a = f_of_z(&b(z)).unwrap();
            let c = f_of_z(&b(z + dz)).unwrap();
            prop_assert!(c.certainly_lt(&a));
        }
    }
}
