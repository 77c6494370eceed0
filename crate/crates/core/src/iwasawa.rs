//! Iwasawa-theoretic bookkeeping: the valuation of the Coates–Wiles index
//! `[M : F_∞]`, the structure of `X*(F)` from the local units at the primes
//! above `𝔭*`, and the right side of Chevalley's ambiguous class formula.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::padic2::{Flavor, LocalQuad, Residue16, Z2Elem};
use crate::quartic::{star_logs, QuarticElem, StarLogs, ValuationReport};
use crate::{Error, Rat, Result};

/// Inputs to the 2-adic valuation of the index formula
///
/// `[M : F_∞] = 2^(e-f+1) · 2 · R_𝔭 · h / (ω · √Δ_𝔭) · Π (1 - N𝔤⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CWInputs {
    pub e: i64,
    pub f: i64,
    /// `ord₂ R_𝔭`, normalized on `K_𝔭 = Q₂`.
    pub ord_r: i64,
    pub ord_h: i64,
    pub ord_omega: i64,
    pub ord_sqrt_disc: i64,
    /// `ord₂(1 - N𝔤⁻¹)` for each prime `𝔤` of `F` above `𝔭`.
    pub local_norm_factors: Vec<i64>,
}

/// `ord₂ [M : F_∞]`.
pub fn cw_valuation(c: &CWInputs) -> i64 {
    1 + (c.e - c.f + 1) + c.ord_r + c.ord_h - c.ord_omega - c.ord_sqrt_disc + c.local_norm_factors.iter().sum::<i64>()
}

/// `ord₂(1 - 1/N)` for a residue field of size `N = 2^k`: `-k`.
fn norm_factor(residue_size_log2: i64) -> i64 {
    -residue_size_log2
}

/// Index inputs for `F` at `𝔭*` from the valuations of `log η`.
///
/// Inert (`q ≡ 7 mod 16`): one place with residue field `F₄`, so the factor
/// is `ord₂(3/4) = -2`. Split: two places with residue field `F₂`, `-1` each,
/// and the regulator is the smaller of the two logarithms (they agree up to sign).
pub fn cw_inputs_f_pstar(v: &ValuationReport) -> CWInputs {
    let (ord_r, factors) = match v.residue {
        Residue16::Seven => (v.ord_wstar[0], vec![norm_factor(2)]),
        Residue16::Fifteen => (*v.ord_wstar.iter().min().unwrap(), vec![norm_factor(1), norm_factor(1)]),
    };
    CWInputs { e: 0, f: 0, ord_r, ord_h: 0, ord_omega: 1, ord_sqrt_disc: 0, local_norm_factors: factors }
}

/// Index inputs for `F` at `𝔭`: one ramified place, `Δ = 12` or `-4`, so `ord √Δ = 1`.
///
/// `log_w η` lies in the `(-1)`-eigenspace of `Gal(F_w/K_𝔭)`, which is
/// `Q₂·α` with `α` a unit, so `ord_w log η` is even and `ord₂ R = ord_w/2`.
pub fn cw_inputs_f_p(v: &ValuationReport) -> Result<CWInputs> {
    if v.ord_w % 2 != 0 {
        return Err(Error::Inconsistent("odd ord_w(log η) at the ramified place".into()));
    }
    Ok(CWInputs { e: 0, f: 0, ord_r: v.ord_w / 2, ord_h: 0, ord_omega: 1, ord_sqrt_disc: 1, local_norm_factors: vec![norm_factor(1)] })
}

/// Index inputs for `D = Q(i, √q)` at `𝔭`, from `ord₂ log ξ`.
pub fn cw_inputs_d_p(ord_log_xi: i64) -> CWInputs {
    CWInputs { e: 0, f: 0, ord_r: ord_log_xi, ord_h: 0, ord_omega: 2, ord_sqrt_disc: 1, local_norm_factors: vec![norm_factor(1)] }
}

/// A finitely generated `Z₂`-module `Z₂^r ⊕ ⊕ Z/d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GalStruct {
    pub free_rank: usize,
    /// Orders of the cyclic torsion factors, ascending, all `> 1`.
    pub elementary_divisors: Vec<BigInt>,
}

impl GalStruct {
    pub fn torsion_order(&self) -> BigInt {
        self.elementary_divisors.iter().product()
    }

    pub fn is_cyclic_torsion(&self) -> bool {
        self.elementary_divisors.len() <= 1
    }

    /// `log₂` of the torsion order.
    pub fn torsion_log2(&self) -> u64 {
        self.elementary_divisors.iter().map(|d| d.bits() - 1).sum()
    }
}

/// Smith normal form over `Z₂` of a matrix whose rows are relations.
///
/// Returns the valuations of the nonzero elementary divisors and the number of
/// columns left without a pivot (the free rank of the cokernel).
fn smith_z2(mut m: Vec<Vec<Z2Elem>>) -> (Vec<i64>, usize) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut divisors = Vec::new();
    let mut k = 0;
    while k < rows.min(cols) {
        let mut best: Option<(usize, usize, i64)> = None;
        for i in k..rows {
            for j in k..cols {
                if let Some(v) = m[i][j].ord() {
                    if best.is_none_or(|(_, _, b)| v < b) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        let piv = m[k][k].clone();
        for i in 0..rows {
            if i != k && !m[i][k].is_zero() {
                let f = m[i][k].div(&piv);
                for j in 0..cols {
                    let t = f.mul(&m[k][j]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        for j in 0..cols {
            if j != k && !m[k][j].is_zero() {
                let f = m[k][j].div(&piv);
                for i in 0..rows {
                    let t = f.mul(&m[i][k]);
                    m[i][j] = m[i][j].sub(&t);
                }
            }
        }
        divisors.push(v);
        k += 1;
    }
    (divisors, cols - k)
}

fn struct_from(divisors: &[i64], free: usize) -> GalStruct {
    let mut d: Vec<BigInt> = divisors.iter().filter(|v| **v > 0).map(|v| BigInt::one() << *v as usize).collect();
    d.sort();
    GalStruct { free_rank: free, elementary_divisors: d }
}

/// `Z₂`-basis of the lattice spanned by the rows (upper triangular).
fn row_basis(mut rows: Vec<[Z2Elem; 2]>) -> Result<[[Z2Elem; 2]; 2]> {
    let mut out: Vec<[Z2Elem; 2]> = Vec::new();
    for col in 0..2 {
        let piv = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).min_by_key(|&i| rows[i][col].ord().unwrap());
        let Some(p) = piv else {
            return Err(Error::PrecisionExhausted);
        };
        let pr = rows.remove(p);
        for r in rows.iter_mut() {
            if !r[col].is_zero() {
                let f = r[col].div(&pr[col]);
                let t0 = f.mul(&pr[0]);
                let t1 = f.mul(&pr[1]);
                *r = [r[0].sub(&t0), r[1].sub(&t1)];
            }
        }
        out.push(pr);
    }
    Ok([out[0].clone(), out[1].clone()])
}

/// Report on `X*(F)` for `q ≡ 7 (mod 16)`.
#[derive(Clone, Debug)]
pub struct InertXStar {
    pub structure: GalStruct,
    /// Valuations of the coordinates of `log η` in the basis of `log U₁`.
    pub coord_ords: [i64; 2],
    /// `ord₂` of the index from the Coates–Wiles valuation.
    pub cw: i64,
}

fn coords(x: &LocalQuad) -> [Z2Elem; 2] {
    let (a, b) = x.coords();
    [a.clone(), b.clone()]
}

/// `X*(F)` when `𝔭*` is inert in `F`.
///
/// `Gal(M*(F)/F) ≅ U₁ / closure⟨-1, η⟩`, and `log` identifies `U₁/{±1}` with
/// the lattice `log U₁ ⊂ Q₂(ζ)`. That lattice is spanned by `log(1 + 2ζ)`
/// together with `log U₂ = 4O`, the latter generated by `log 5` and
/// `log(1 + 4ζ)`. If `log η = 2^m · (primitive vector)`, the quotient is
/// `Z₂ ⊕ Z/2^m`.
pub fn xstar_structure_inert(eta: &QuarticElem, prec: u32) -> Result<InertXStar> {
    let q = eta.q();
    if Residue16::of(q)? != Residue16::Seven {
        return Err(Error::InvalidInput(format!("q = {q} is not 7 mod 16")));
    }
    let mut p = prec;
    for _ in 0..4 {
        match inert_at(eta, p) {
            Err(Error::PrecisionExhausted) => p *= 2,
            r => return r,
        }
    }
    Err(Error::PrecisionExhausted)
}

fn inert_at(eta: &QuarticElem, prec: u32) -> Result<InertXStar> {
    let StarLogs::Inert { log, .. } = star_logs(eta, prec)? else {
        return Err(Error::Inconsistent("𝔭* is not inert".into()));
    };
    let fl = Flavor::Unramified;
    let z = |a: i64, b: i64| LocalQuad::new(fl, Z2Elem::from_i64(a, prec), Z2Elem::from_i64(b, prec));
    let gens = [z(1, 2), z(5, 0), z(1, 4)];
    let mut rows = Vec::new();
    for g in &gens {
        rows.push(coords(&crate::padic2::log_2adic(g)?));
    }
    let b = row_basis(rows)?;
    // solve x·B = log η with B upper triangular
    let v = coords(&log);
    let x0 = v[0].div(&b[0][0]);
    let x1 = v[1].sub(&x0.mul(&b[0][1])).div(&b[1][1]);
    let o0 = x0.ord().ok_or(Error::PrecisionExhausted)?;
    let o1 = x1.ord().ok_or(Error::PrecisionExhausted)?;
    if o0 < 0 || o1 < 0 {
        return Err(Error::Inconsistent("log η is not in the span of log U₁".into()));
    }
    let m = o0.min(o1);
    let margin = x0.abs_prec().min(x1.abs_prec()) - m;
    if margin < 8 {
        return Err(Error::PrecisionExhausted);
    }
    let structure = struct_from(&[m], 1);
    let v = crate::quartic::ord_log_eta(eta, prec)?;
    let cw = cw_valuation(&cw_inputs_f_pstar(&v));
    if structure.torsion_log2() as i64 != cw {
        return Err(Error::Inconsistent(format!("|X*(F)| = 2^{m} but the index formula gives 2^{cw}")));
    }
    Ok(InertXStar { structure, coord_ords: [o0, o1], cw })
}

/// Report on `X*(F)` for `q ≡ 15 (mod 16)`.
#[derive(Clone, Debug)]
pub struct SplitXStar {
    pub structure: GalStruct,
    /// `X*(F) ≅ Z/2 × Z/2^r`.
    pub r: i64,
    pub log_ords: [i64; 2],
    /// `log η` at the two places sums to zero.
    pub logs_opposite: bool,
    pub cw: i64,
}

/// `X*(F)` when `𝔭*` splits in `F`.
///
/// `U₁ = (Z₂^×)²` with `Z₂^× ≅ Z/2 × Z₂` via `u ↦ (u mod 4, log u / 4)`.
/// The quotient by the closure of `⟨-1, η⟩` is the cokernel of the relation
/// matrix with rows `(2,0,0,0)`, `(0,2,0,0)`, `(1,1,0,0)`, `(δ₁,δ₂,c₁,c₂)`.
pub fn xstar_structure_split(eta: &QuarticElem, prec: u32) -> Result<SplitXStar> {
    let q = eta.q();
    if Residue16::of(q)? != Residue16::Fifteen {
        return Err(Error::InvalidInput(format!("q = {q} is not 15 mod 16")));
    }
    let mut p = prec;
    for _ in 0..4 {
        match split_at(eta, p) {
            Err(Error::PrecisionExhausted) => p *= 2,
            r => return r,
        }
    }
    Err(Error::PrecisionExhausted)
}

fn split_at(eta: &QuarticElem, prec: u32) -> Result<SplitXStar> {
    let StarLogs::Split { units, logs } = star_logs(eta, prec)? else {
        return Err(Error::Inconsistent("𝔭* does not split".into()));
    };
    let ords = [logs[0].ord().ok_or(Error::PrecisionExhausted)?, logs[1].ord().ok_or(Error::PrecisionExhausted)?];
    let margin = logs[0].abs_prec().min(logs[1].abs_prec()) - ords[0].max(ords[1]);
    if margin < 8 {
        return Err(Error::PrecisionExhausted);
    }
    let logs_opposite = logs[0].add(&logs[1]).is_zero();
    let delta = |u: &Z2Elem| -> Result<i64> { Ok(if u.residue(2)? == 1 { 0 } else { 1 }) };
    let four = BigInt::from(4);
    let c = [logs[0].div_int(&four), logs[1].div_int(&four)];
    let e = |n: i64| if n == 0 { Z2Elem::zero(prec as i64) } else { Z2Elem::from_i64(n, prec) };
    let m = vec![
        vec![e(2), e(0), e(0), e(0)],
        vec![e(0), e(2), e(0), e(0)],
        vec![e(1), e(1), e(0), e(0)],
        vec![e(delta(&units[0])?), e(delta(&units[1])?), c[0].clone(), c[1].clone()],
    ];
    let (divs, free) = smith_z2(m);
    if free != 1 {
        return Err(Error::PrecisionExhausted);
    }
    let structure = struct_from(&divs, free);
    let n = structure.elementary_divisors.len();
    if n != 2 || structure.elementary_divisors[0] != BigInt::from(2) {
        return Err(Error::Inconsistent(format!("X*(F) is not Z/2 × Z/2^r: {structure:?}")));
    }
    let r = structure.elementary_divisors[1].bits() as i64 - 1;
    let v = ValuationReport { q: eta.q(), residue: Residue16::Fifteen, ord_w: 0, ord_wstar: ords.to_vec(), prec };
    let cw = cw_valuation(&cw_inputs_f_pstar(&v));
    if structure.torsion_log2() as i64 != cw {
        return Err(Error::Inconsistent(format!("|X*(F)| = 2^{} but the index formula gives 2^{cw}", structure.torsion_log2())));
    }
    Ok(SplitXStar { structure, r, log_ords: ords, logs_opposite, cw })
}

/// Right side of Chevalley's formula for a cyclic extension `M'/M`:
/// `h_M · Π_{v ∉ S} e_v · Π_{v ∈ S} e_v f_v / ([M' : M] · [E_M : E_M ∩ N M'^×])`.
pub fn chevalley_rhs(h_m: u64, ramified_e: &[u64], s_terms: &[(u64, u64)], degree: u64, unit_norm_index: u64) -> Result<Rat> {
    if degree == 0 || unit_norm_index == 0 || h_m == 0 {
        return Err(Error::InvalidInput("degree, class number and unit index must be positive".into()));
    }
    let num: BigInt = BigInt::from(h_m)
        * ramified_e.iter().map(|e| BigInt::from(*e)).product::<BigInt>()
        * s_terms.iter().map(|(e, f)| BigInt::from(e * f)).product::<BigInt>();
    let r = Rat::new(num, BigInt::from(degree) * BigInt::from(unit_norm_index));
    if !r.is_integer() {
        return Err(Error::Inconsistent(format!("ambiguous class number {r} is not an integer")));
    }
    if r.is_zero() {
        return Err(Error::Inconsistent("zero ambiguous class number".into()));
    }
    Ok(r)
}
