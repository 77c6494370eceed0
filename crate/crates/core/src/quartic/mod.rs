//! The quartic field `F = Q(α)`, `α⁴ = -q`, for a prime `q ≡ 7 (mod 8)`.
//!
//! `F` contains `K = Q(β)`, `β = α² = √-q`. It is totally complex with unit
//! rank 1 and torsion `{±1}`; [`units`] finds a fundamental unit and [`local`]
//! evaluates it in the completions of `F` above 2.

pub mod local;
pub mod units;

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::hp::Ball;
use crate::lattice::hnf;
use crate::{arith, Error, Int, Rat, Result};

pub use local::{
    local_norm, mirror_check, ord_eta_above_two, ord_log_eta, ramification_data, star_logs, unit_rank_and_torsion,
    LocalPlace,
    MirrorReport, PlaceKind, StarLogs, RamificationReport, TorsionCert, ValuationReport,
};
pub use units::{find_fundamental_unit, odd_index_witness, t2_fundamental_unit, walk_minima, UnitCert, UnitMethod};

/// An element `(c₀ + c₁α + c₂α² + c₃α³) / den` of `F`, in lowest terms with `den > 0`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuarticElem {
    q: u64,
    num: [Int; 4],
    den: Int,
}

impl QuarticElem {
    pub fn new(q: u64, num: [Int; 4], den: Int) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let mut e = QuarticElem { q, num, den };
        e.normalize();
        e
    }

    pub fn from_ints(q: u64, c: [i64; 4]) -> Self {
        Self::new(q, c.map(BigInt::from), Int::one())
    }

    pub fn from_rats(q: u64, c: &[Rat; 4]) -> Self {
        let den = c.iter().fold(Int::one(), |l, r| l.lcm(r.denom()));
        let num = std::array::from_fn(|i| c[i].numer() * (&den / c[i].denom()));
        Self::new(q, num, den)
    }

    pub fn one(q: u64) -> Self {
        Self::from_ints(q, [1, 0, 0, 0])
    }

    pub fn alpha(q: u64) -> Self {
        Self::from_ints(q, [0, 1, 0, 0])
    }

    fn normalize(&mut self) {
        let g = self.num.iter().fold(self.den.clone(), |g, c| g.gcd(c));
        if !g.is_one() && !g.is_zero() {
            for c in self.num.iter_mut() {
                *c /= &g;
            }
            self.den /= &g;
        }
        if self.den.is_negative() {
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
            self.den = -&self.den;
        }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Numerators over the power basis.
    pub fn num(&self) -> &[Int; 4] {
        &self.num
    }

    pub fn den(&self) -> &Int {
        &self.den
    }

    /// Power-basis coordinates.
    pub fn coords(&self) -> [Rat; 4] {
        std::array::from_fn(|i| Rat::new(self.num[i].clone(), self.den.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    fn same(&self, other: &Self) {
        assert_eq!(self.q, other.q, "elements of different fields");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same(other);
        let num = std::array::from_fn(|i| &self.num[i] * &other.den + &other.num[i] * &self.den);
        Self::new(self.q, num, &self.den * &other.den)
    }

    pub fn neg(&self) -> Self {
        QuarticElem { q: self.q, num: self.num.clone().map(|c| -c), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.same(other);
        let mut c: [Int; 7] = Default::default();
        for i in 0..4 {
            if self.num[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                c[i + j] += &self.num[i] * &other.num[j];
            }
        }
        let q = BigInt::from(self.q);
        for k in (4..7).rev() {
            let t = std::mem::take(&mut c[k]);
            c[k - 4] -= &q * t;
        }
        let [c0, c1, c2, c3, ..] = c;
        Self::new(self.q, [c0, c1, c2, c3], &self.den * &other.den)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let num = self.num.clone().map(|c| c * r.numer());
        Self::new(self.q, num, &self.den * r.denom())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(self.q);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Image under the automorphism `α ↦ -α` (the nontrivial element of `Gal(F/K)`).
    pub fn conj_alpha(&self) -> Self {
        let num = [self.num[0].clone(), -&self.num[1], self.num[2].clone(), -&self.num[3]];
        QuarticElem { q: self.q, num, den: self.den.clone() }
    }

    /// Relative norm to `K`, as `(c, d)` meaning `c + dβ`.
    pub fn norm_to_k(&self) -> (Rat, Rat) {
        let p = self.mul(&self.conj_alpha());
        debug_assert!(p.num[1].is_zero() && p.num[3].is_zero());
        (Rat::new(p.num[0].clone(), p.den.clone()), Rat::new(p.num[2].clone(), p.den.clone()))
    }

    /// `N_{F/Q}`: `N(c + dβ) = c² + q d²`.
    pub fn norm(&self) -> Rat {
        let (c, d) = self.norm_to_k();
        &c * &c + &d * &d * Rat::from_integer(BigInt::from(self.q))
    }

    /// `Tr_{F/Q}`; only the constant coefficient contributes.
    pub fn trace(&self) -> Rat {
        Rat::new(&self.num[0] * 4, self.den.clone())
    }

    /// `N(x)/x`, the product of the other three conjugates.
    pub fn norm_cofactor(&self) -> Self {
        let gc = self.conj_alpha();
        let p = self.mul(&gc);
        let pk = QuarticElem { q: self.q, num: [p.num[0].clone(), Int::zero(), -&p.num[2], Int::zero()], den: p.den.clone() };
        gc.mul(&pk)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(self.norm_cofactor().scale(&n.recip()))
    }

    /// Characteristic polynomial `x⁴ + a₁x³ + a₂x² + a₃x + a₄`, as `[1, a₁, a₂, a₃, a₄]`.
    pub fn charpoly(&self) -> [Rat; 5] {
        // multiplication matrix on the power basis, column j = self·α^j
        let mut m: Vec<Vec<Rat>> = vec![vec![Rat::zero(); 4]; 4];
        let mut col = self.clone();
        let alpha = Self::alpha(self.q);
        for j in 0..4 {
            let c = col.coords();
            for i in 0..4 {
                m[i][j] = c[i].clone();
            }
            col = col.mul(&alpha);
        }
        faddeev_leverrier(&m)
    }

    /// True when the characteristic polynomial has integer coefficients.
    pub fn is_integral(&self) -> bool {
        self.charpoly().iter().all(|c| c.is_integer())
    }

    /// Value under the embedding `α ↦ q^{1/4} ζ₈^(2k-1)`, `k ∈ {1, 2}`, in `f64`.
    pub fn embed_f64(&self, k: usize) -> Complex64 {
        let pw = alpha_powers_f64(self.q, k);
        let d = self.den.to_f64().unwrap();
        (0..4).map(|j| pw[j] * (self.num[j].to_f64().unwrap() / d)).sum()
    }

    /// `|σ_k(x)|²` as a ball at precision `prec`.
    pub fn abs2_ball(&self, k: usize, prec: u32) -> Ball {
        let (re, im) = self.embed_ball(k, prec);
        re.square().add(&im.square())
    }

    /// Real and imaginary parts of `σ_k(x)` as balls.
    pub fn embed_ball(&self, k: usize, prec: u32) -> (Ball, Ball) {
        let wp = prec + 16;
        let pw = alpha_powers_ball(self.q, k, wp);
        let mut re = Ball::zero(wp);
        let mut im = Ball::zero(wp);
        for j in 0..4 {
            if self.num[j].is_zero() {
                continue;
            }
            re = re.add(&pw[j].0.mul_int(&self.num[j]));
            im = im.add(&pw[j].1.mul_int(&self.num[j]));
        }
        (re.div_int(&self.den).set_prec(prec), im.div_int(&self.den).set_prec(prec))
    }
}

fn faddeev_leverrier(a: &[Vec<Rat>]) -> [Rat; 5] {
    let n = 4;
    let mut coeffs: [Rat; 5] = std::array::from_fn(|_| Rat::zero());
    coeffs[0] = Rat::one();
    let mut mk: Vec<Vec<Rat>> = vec![vec![Rat::zero(); n]; n];
    let mut ck = Rat::one();
    for k in 1..=n {
        let mut next = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { ck.clone() } else { Rat::zero() };
                for l in 0..n {
                    s += &a[i][l] * &mk[l][j];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = Rat::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &mk[l][i];
            }
        }
        ck = -tr / Rat::from_integer(BigInt::from(k));
        coeffs[k] = ck.clone();
    }
    coeffs
}

/// `σ_k(α)^j`, `j = 0..3`, with `σ_k(α) = q^{1/4} ζ₈^(2k-1)`.
fn alpha_powers_f64(q: u64, k: usize) -> [Complex64; 4] {
    let r = (q as f64).powf(0.25);
    let ang = std::f64::consts::FRAC_PI_4 * (2 * k - 1) as f64;
    let a = Complex64::from_polar(r, ang);
    [Complex64::new(1.0, 0.0), a, a * a, a * a * a]
}

fn alpha_powers_ball(q: u64, k: usize, prec: u32) -> [(Ball, Ball); 4] {
    let qb = Ball::from_int(&BigInt::from(q), prec);
    let r = qb.sqrt().and_then(|s| s.sqrt()).expect("q > 0");
    let h = Ball::from_i64(2, prec).sqrt().unwrap().recip().unwrap();
    // ζ₈ = (1 + i)/√2, ζ₈³ = (-1 + i)/√2
    let (zr, zi) = if k == 1 { (h.clone(), h.clone()) } else { (h.neg(), h.clone()) };
    let a = (r.mul(&zr), r.mul(&zi));
    let cmul = |x: &(Ball, Ball), y: &(Ball, Ball)| (x.0.mul(&y.0).sub(&x.1.mul(&y.1)), x.0.mul(&y.1).add(&x.1.mul(&y.0)));
    let a2 = cmul(&a, &a);
    let a3 = cmul(&a2, &a);
    [(Ball::from_i64(1, prec), Ball::zero(prec)), a, a2, a3]
}

impl fmt::Debug for QuarticElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}a + {}a^2 + {}a^3)/{}", self.num[0], self.num[1], self.num[2], self.num[3], self.den)
    }
}

/// The maximal order of `F`, with an integral basis `ω₀..ω₃`.
#[derive(Clone, Debug)]
pub struct QuarticField {
    pub q: u64,
    /// Rows: power-basis numerators of `ω_i`, over `basis_den`.
    pub basis: [[Int; 4]; 4],
    pub basis_den: Int,
    /// Inverse of the basis matrix: power-basis coordinates to `ω`-coordinates.
    inv: [[Rat; 4]; 4],
    /// Discriminant of the maximal order.
    pub disc: Int,
    /// `[O_F : Z[α]]`.
    pub index: Int,
    /// Outcome of Dedekind's criterion for `Z[α]` at 2.
    pub zalpha_two_maximal: bool,
}

/// Dedekind's criterion at 2 for `f = x⁴ + q`: `f ≡ (x+1)⁴ (mod 2)`, so
/// `Z[α]` is 2-maximal iff `x + 1` does not divide `(f - (x+1)⁴)/2` mod 2.
pub fn dedekind_two_maximal(q: u64) -> bool {
    // (f - (x+1)^4)/2 = (q - 1)/2 - 2x - 3x² - 2x³ ; evaluate at x = 1 mod 2
    let q = q as i64;
    let at_one = (q - 1) / 2 - 2 - 3 - 2;
    at_one.rem_euclid(2) != 0
}

impl QuarticField {
    /// `ω`-coordinates of an element.
    pub fn to_omega(&self, x: &QuarticElem) -> [Rat; 4] {
        let c = x.coords();
        std::array::from_fn(|j| (0..4).fold(Rat::zero(), |s, i| s + &c[i] * &self.inv[i][j]))
    }

    /// `ω`-coordinates of an integral element.
    pub fn to_omega_int(&self, x: &QuarticElem) -> Option<[Int; 4]> {
        let c = self.to_omega(x);
        if c.iter().all(|r| r.is_integer()) {
            Some(c.map(|r| r.to_integer()))
        } else {
            None
        }
    }

    pub fn from_omega(&self, c: &[Int; 4]) -> QuarticElem {
        let num = std::array::from_fn(|k| (0..4).fold(Int::zero(), |s, i| s + &c[i] * &self.basis[i][k]));
        QuarticElem::new(self.q, num, self.basis_den.clone())
    }

    pub fn omega(&self, i: usize) -> QuarticElem {
        QuarticElem::new(self.q, self.basis[i].clone(), self.basis_den.clone())
    }

    /// `|det Tr(ω_i ω_j)|` recomputed from the basis.
    pub fn trace_form_det(&self) -> Rat {
        let mut m: Vec<Vec<Rat>> = vec![vec![Rat::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = self.omega(i).mul(&self.omega(j)).trace();
            }
        }
        det4(&m)
    }
}

fn det4(m: &[Vec<Rat>]) -> Rat {
    let mut a: Vec<Vec<Rat>> = m.to_vec();
    let n = a.len();
    let mut det = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        for r in c + 1..n {
            let f = &a[r][c] / &a[c][c];
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

fn invert4(m: &[[Rat; 4]; 4]) -> [[Rat; 4]; 4] {
    let n = 4;
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = m[i].to_vec();
            row.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).expect("singular basis matrix");
        a.swap(p, c);
        let pv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &pv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pr = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][n + j].clone()))
}

/// The maximal order of `F`.
///
/// Starts from `Z[α]` (maximal away from 2 since `x⁴ + q` is Eisenstein at
/// `q`) and, while some `x ∈ ½O \ O` is integral, replaces `O` by `O[x]`. The
/// loop ends exactly when `O` is 2-maximal. The discriminant is then checked
/// against `index² · disc(x⁴ + q) = disc(O)`, `disc(x⁴ + q) = 256 q³`.
pub fn maximal_order(q: u64) -> Result<QuarticField> {
    if q % 8 != 7 || !arith::is_prime_u64(q) {
        return Err(Error::InvalidInput(format!("q = {q} is not a prime 7 mod 8")));
    }
    let mut rows: Vec<[Int; 4]> = (0..4).map(|i| std::array::from_fn(|j| Int::from((i == j) as u8))).collect();
    let mut den = Int::one();
    loop {
        let basis: Vec<QuarticElem> = rows.iter().map(|r| QuarticElem::new(q, r.clone(), den.clone())).collect();
        let mut grown = false;
        for mask in 1u8..16 {
            let mut x = QuarticElem::new(q, Default::default(), Int::one());
            for (i, b) in basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    x = x.add(b);
                }
            }
            let x = x.scale(&Rat::new(Int::one(), BigInt::from(2)));
            if !x.is_integral() {
                continue;
            }
            // O[x] = O + O·x + O·x² + O·x³
            let mut gens = basis.clone();
            let mut xp = QuarticElem::one(q);
            for _ in 1..4 {
                xp = xp.mul(&x);
                gens.extend(basis.iter().map(|b| b.mul(&xp)));
            }
            let l = gens.iter().fold(Int::one(), |l, g| l.lcm(g.den()));
            let int_rows: Vec<Vec<Int>> =
                gens.iter().map(|g| g.num().iter().map(|c| c * (&l / g.den())).collect()).collect();
            let h = hnf(&int_rows);
            let g = h.iter().flatten().fold(l.clone(), |g, c| g.gcd(c));
            rows = h.iter().map(|r| std::array::from_fn(|j| &r[j] / &g)).collect();
            den = l / g;
            grown = true;
            break;
        }
        if !grown {
            break;
        }
    }
    let basis: [[Int; 4]; 4] = std::array::from_fn(|i| rows[i].clone());
    let m: [[Rat; 4]; 4] = std::array::from_fn(|i| std::array::from_fn(|j| Rat::new(basis[i][j].clone(), den.clone())));
    let inv = invert4(&m);
    let det_b = (0..4).fold(Int::one(), |p, i| p * &basis[i][i]).abs();
    let index = den.pow(4) / &det_b;
    let mut field = QuarticField {
        q,
        basis,
        basis_den: den,
        inv,
        disc: Int::zero(),
        index: index.clone(),
        zalpha_two_maximal: dedekind_two_maximal(q),
    };
    let d = field.trace_form_det();
    if !d.is_integer() {
        return Err(Error::Inconsistent("non-integral discriminant".into()));
    }
    let d = d.to_integer();
    let poly_disc = BigInt::from(256) * BigInt::from(q).pow(3);
    if &d * &index * &index != poly_disc || d != BigInt::from(4) * BigInt::from(q).pow(3) {
        return Err(Error::Inconsistent(format!("discriminant {d} of the maximal order for q = {q}")));
    }
    if field.zalpha_two_maximal != index.is_one() {
        return Err(Error::Inconsistent("Dedekind criterion disagrees with the enlargement loop".into()));
    }
    field.disc = d;
    Ok(field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half(q: u64, c: [i64; 4]) -> QuarticElem {
        QuarticElem::new(q, c.map(BigInt::from), BigInt::from(2))
    }

    #[test]
    fn arithmetic_in_f() {
        let q = 7;
        let a = QuarticElem::alpha(q);
        assert_eq!(a.pow(4), QuarticElem::from_ints(q, [-7, 0, 0, 0]));
        let x = QuarticElem::from_ints(q, [3, -1, 2, 5]);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).is_one());
        assert_eq!(x.norm(), Rat::from_integer(x.charpoly()[4].to_integer()));
        assert_eq!(x.trace(), -x.charpoly()[1].clone());
        assert_eq!(a.charpoly()[4], Rat::from_integer(BigInt::from(7)));
    }

    #[test]
    fn half_integral_candidates() {
        // (1 + α²)/2 has minimal polynomial x² - x + (1+q)/4 squared
        for (q, c) in [(7u64, 2i64), (23, 6)] {
            let x = half(q, [1, 0, 1, 0]);
            assert!(x.is_integral());
            let x2 = x.mul(&x).sub(&x).add(&QuarticElem::from_ints(q, [c, 0, 0, 0]));
            assert!(x2.is_zero());
        }
    }

    #[test]
    fn maximal_order_index_and_discriminant() {
        for q in [7u64, 23, 31, 47, 71, 79] {
            let f = maximal_order(q).unwrap();
            assert_eq!(f.index, BigInt::from(8));
            assert_eq!(f.disc, BigInt::from(4) * BigInt::from(q).pow(3));
            assert!(!f.zalpha_two_maximal);
            for i in 0..4 {
                assert!(f.omega(i).is_integral());
                let c = f.to_omega_int(&f.omega(i)).unwrap();
                assert_eq!(c.iter().filter(|x| !x.is_zero()).count(), 1);
            }
        }
        assert!(maximal_order(11).is_err());
    }

    #[test]
    fn embeddings_satisfy_the_polynomial() {
        let q = 23;
        let a = QuarticElem::alpha(q);
        for k in [1, 2] {
            let z = a.embed_f64(k);
            assert!((z.powi(4) + q as f64).norm() < 1e-9);
            let (re, im) = a.pow(2).embed_ball(k, 128);
            // α² = √-23 under both embeddings up to sign
            assert!(re.abs().mid_f64() < 1e-30);
            assert!((im.abs().mid_f64() - 23f64.sqrt()).abs() < 1e-12);
        }
    }
}
