//! The per-q checks. Each one fills its part of a [`QRecord`] and records every
//! assertion that fails; budget overruns become skips.

use iwacert_core::iwasawa::{
    cw_inputs_d_p, cw_inputs_f_p, cw_inputs_f_pstar, cw_valuation, xstar_structure_inert, xstar_structure_split, GalStruct,
};
use iwacert_core::padic2::{primes_above_q_count, KPrime};
use iwacert_core::quartic::{find_fundamental_unit, maximal_order, mirror_check, ord_log_eta, UnitMethod};
use iwacert_core::{arith, imquad, lseries, realquad, Error, Int};

use crate::cache::{CachedUnit, UnitCache};
use crate::config::{ResidueClass, RunConfig, Suite};
use crate::record::{ClassResult, HasseResult, IwasawaResult, LseriesResult, QRecord, UnitsResult, XDChain};

fn report_error(rec: &mut QRecord, what: &str, e: Error) {
    match e {
        Error::BudgetExceeded(m) => rec.skip(format!("{what}: {m}")),
        e => rec.fail(format!("{what}: {e}")),
    }
}

/// Certified fundamental unit of `F`, from the cache when present.
pub fn fundamental_unit(q: u64, cfg: &RunConfig, cache: Option<&UnitCache>) -> Result<CachedUnit, Error> {
    let field = maximal_order(q)?;
    if let Some(c) = cache.and_then(|c| c.lookup(q)) {
        if c.certified && field.to_omega_int(&c.unit).is_some() {
            return Ok(c);
        }
    }
    let cert = find_fundamental_unit(&field, cfg.unit_steps, cfg.t2_budget)?;
    let method = match cert.method {
        UnitMethod::ChainOfMinima => "chain",
        UnitMethod::T2Enumeration => "t2",
        UnitMethod::Both => "both",
    };
    let u = CachedUnit {
        unit: cert.unit,
        method: method.to_string(),
        steps: cert.steps,
        certified: cert.certified,
        regulator: cert.regulator.to_string(),
        odd_index_prime: cert.odd_index_prime,
    };
    if let Some(c) = cache {
        if let Err(e) = c.store(&u) {
            eprintln!("warning: could not append to {}: {e}", c.path().display());
        }
    }
    Ok(u)
}

fn units(rec: &mut QRecord, u: &CachedUnit, cfg: &RunConfig) -> Result<(), Error> {
    let v = ord_log_eta(&u.unit, cfg.padic_prec)?;
    let m = mirror_check(&u.unit, cfg.padic_prec)?;
    if !u.certified {
        rec.fail("unit is not certified fundamental");
    }
    if u.odd_index_prime.is_none() {
        rec.fail("no prime below 100000 shows the unit is an odd power");
    }
    match rec.class {
        ResidueClass::SevenMod16 => {
            if v.ord_w != 2 || v.ord_wstar != [3] {
                rec.fail(format!("valuations ({}, {:?}) differ from (2, [3])", v.ord_w, v.ord_wstar));
            }
        }
        _ => {
            if v.ord_wstar.len() != 2 || v.ord_wstar.iter().any(|&o| o < 4) {
                rec.fail(format!("ord at the split places {:?} not all >= 4", v.ord_wstar));
            }
            if v.ord_w < 6 {
                rec.fail(format!("ord_w = {} < 6", v.ord_w));
            }
        }
    }
    if !m.swapped_equal {
        rec.fail("mirror field does not swap the valuations");
    }
    if !m.involution {
        rec.fail("mirror of the mirror differs from the original");
    }
    rec.units = Some(UnitsResult {
        method: u.method.clone(),
        steps: u.steps,
        certified: u.certified,
        regulator: u.regulator.clone(),
        odd_index_prime: u.odd_index_prime,
        ord_w: v.ord_w,
        ord_wstar: v.ord_wstar,
        mirror_swapped: m.swapped_equal,
        mirror_involution: m.involution,
    });
    Ok(())
}

/// `2^(ord₂(q+1) - 3)`.
pub fn r_q_formula(q: u64) -> Result<u64, Error> {
    let k = arith::ord2(&Int::from(q + 1))?;
    if k < 3 {
        return Err(Error::InvalidInput(format!("q = {q} is not 7 mod 8")));
    }
    Ok(1u64 << (k - 3))
}

fn classgroups(rec: &mut QRecord, cfg: &RunConfig) -> Result<(), Error> {
    let q = rec.q;
    let h = imquad::class_number(-(q as i64));
    let t = imquad::order_of_prime2_class(q)?;
    let c = imquad::check_cor_k1(q, cfg.padic_prec)?;
    let r_q = primes_above_q_count(q, cfg.padic_prec)?;
    let r_f = r_q_formula(q)?;
    if !c.holds {
        rec.fail(format!("π ≡ {} (mod 8) at its unit place", c.residue_mod8));
    }
    if r_q != r_f {
        rec.fail(format!("r_q = {r_q} from √-q but {r_f} from ord₂(q+1)"));
    }
    let shape_ok = match rec.class {
        ResidueClass::SevenMod16 => r_q == 1,
        _ => r_q >= 2,
    };
    if !shape_ok {
        rec.fail(format!("r_q = {r_q} for q ≡ {} (mod 16)", q % 16));
    }
    rec.classgroups = Some(ClassResult {
        h_minus_q: h,
        t,
        pi_mod8: c.residue_mod8,
        pi_unit_at: match c.unit_at {
            KPrime::P => "p".into(),
            KPrime::PStar => "p*".into(),
        },
        pi_congruence: c.holds,
        r_q,
        r_q_formula: r_f,
    });
    Ok(())
}

fn hasse(rec: &mut QRecord) -> Result<(), Error> {
    let h = imquad::hasse_check(rec.q)?;
    if !h.holds {
        rec.fail(format!("2-part of h(-8q) is {} (cyclic: {})", h.sylow.order, h.sylow.cyclic()));
    }
    rec.hasse = Some(HasseResult { h: h.sylow.h, two_part: h.sylow.order, cyclic: h.sylow.cyclic(), holds: h.holds });
    Ok(())
}

fn describe(s: &GalStruct) -> String {
    if s.elementary_divisors.is_empty() {
        return "0".into();
    }
    s.elementary_divisors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
}

/// The chain through `Q(i, √q)`: trace congruences, both routes for `ord log ε`, the CM identity.
pub fn xd_chain(rec: &mut QRecord, cfg: &RunConfig) -> Result<XDChain, Error> {
    let q = rec.q;
    // fails fast with BudgetExceeded before any large unit is built
    realquad::fundamental_unit_with_budget(q, cfg.pell_bits)?;
    let tr = realquad::trace_tests(q)?;
    let le = realquad::ord_log_epsilon(q, cfg.padic_prec)?;
    let cm = realquad::cm_unit_index(q, cfg.padic_prec)?;
    let cw_d_p = cw_valuation(&cw_inputs_d_p(cm.ord_log_xi));
    if !tr.mod32_ok {
        rec.fail("Tr ε' is not 2(1+q) mod 32");
    }
    if !tr.y2_ok {
        rec.fail("y² is not 1 mod 16");
    }
    if !tr.ord_ok {
        rec.fail(format!("ord₂ Tr ε' = {} does not match the class of q", tr.ord));
    }
    if !cm.identity_holds || !cm.is_unit {
        rec.fail("i (θ/(1+i))² = θ²/2 fails");
    }
    if (cw_d_p == 0) != (rec.class == ResidueClass::SevenMod16) {
        rec.fail(format!("index valuation for Q(i, √q) is {cw_d_p}"));
    }
    Ok(XDChain {
        trace: tr.trace.to_string(),
        trace_ord: tr.ord,
        trace_mod32: tr.mod32_ok,
        y2_mod16: tr.y2_ok,
        ord_matches_class: tr.ord_ok,
        ord_log_eps_trace: le.via_trace,
        ord_log_eps_direct: le.direct,
        cm_identity: cm.identity_holds,
        ord_log_xi: cm.ord_log_xi,
        cw_d_p,
    })
}

fn iwasawa(rec: &mut QRecord, u: Option<&CachedUnit>, cfg: &RunConfig) {
    let xd = match xd_chain(rec, cfg) {
        Ok(x) => Some(x),
        Err(e) => {
            report_error(rec, "Q(i, √q) chain", e);
            None
        }
    };
    let Some(u) = u else {
        rec.skip("X*(F): no fundamental unit");
        return;
    };
    let res = (|| -> Result<IwasawaResult, Error> {
        let v = ord_log_eta(&u.unit, cfg.padic_prec)?;
        let cw_f_pstar = cw_valuation(&cw_inputs_f_pstar(&v));
        let cw_f_p = cw_valuation(&cw_inputs_f_p(&v)?);
        let (structure, order_or_r) = match rec.class {
            ResidueClass::SevenMod16 => {
                let x = xstar_structure_inert(&u.unit, cfg.padic_prec)?;
                let ord = x.structure.torsion_order();
                let ord = i64::try_from(ord).map_err(|_| Error::Inconsistent("|X*(F)| overflows".into()))?;
                (x.structure, ord)
            }
            _ => {
                let x = xstar_structure_split(&u.unit, cfg.padic_prec)?;
                if !x.logs_opposite {
                    rec.fail("log η at the two split places are not opposite");
                }
                (x.structure, x.r)
            }
        };
        let matches = structure.torsion_log2() as i64 == cw_f_pstar;
        match rec.class {
            ResidueClass::SevenMod16 => {
                if !(structure.is_cyclic_torsion() && order_or_r == 4) {
                    rec.fail(format!("X*(F) = {} is not Z/4", describe(&structure)));
                }
                if cw_f_p != 0 {
                    rec.fail(format!("index valuation for X(F) is {cw_f_p}, not 0"));
                }
            }
            _ => {
                if order_or_r < 2 {
                    rec.fail(format!("X*(F) = Z/2 x Z/2^{order_or_r} with r < 2"));
                }
            }
        }
        if structure.free_rank != 1 {
            rec.fail(format!("X*(F) has free rank {}", structure.free_rank));
        }
        if !matches {
            rec.fail("X*(F) order differs from the index formula");
        }
        Ok(IwasawaResult {
            xstar: describe(&structure),
            xstar_order_or_r: order_or_r,
            xstar_free_rank: structure.free_rank,
            cw_f_pstar,
            cw_f_p,
            structure_matches_cw: matches,
            xd: xd.clone(),
        })
    })();
    match res {
        Ok(r) => rec.iwasawa = Some(r),
        Err(e) => report_error(rec, "X*(F)", e),
    }
}

fn lseries(rec: &mut QRecord, cfg: &RunConfig) -> Result<(), Error> {
    let r = lseries::simple_zero_criterion(rec.q, cfg.float_prec)?;
    if !r.verdict {
        rec.fail("U lower bound does not exceed the V upper bound");
    }
    rec.lseries = Some(LseriesResult {
        w: 4 * rec.q,
        u_lower: r.u_lower.to_string(),
        v_truncated: r.v_upper_truncated.to_string(),
        v_chain: r.v_upper_chain.to_string(),
        v_closed: r.v_upper_closed.to_string(),
        verdict: r.verdict,
    });
    Ok(())
}

/// Run the selected suites for one prime `q ≡ 7 (mod 8)`.
pub fn run_q(q: u64, cfg: &RunConfig, cache: Option<&UnitCache>) -> QRecord {
    let mut rec = QRecord::new(q);
    let want = |s: Suite| cfg.suites.contains(&s);
    let unit = if want(Suite::Units) || want(Suite::Iwasawa) {
        match fundamental_unit(q, cfg, cache) {
            Ok(u) => Some(u),
            Err(e) => {
                report_error(&mut rec, "fundamental unit", e);
                None
            }
        }
    } else {
        None
    };
    if want(Suite::Units) {
        if let Some(u) = &unit {
            if let Err(e) = units(&mut rec, u, cfg) {
                report_error(&mut rec, "units", e);
            }
        }
    }
    if want(Suite::Classgroups) {
        if let Err(e) = classgroups(&mut rec, cfg) {
            report_error(&mut rec, "classgroups", e);
        }
    }
    if want(Suite::Hasse) {
        if let Err(e) = hasse(&mut rec) {
            report_error(&mut rec, "hasse", e);
        }
    }
    if want(Suite::Iwasawa) {
        iwasawa(&mut rec, unit.as_ref(), cfg);
    }
    if want(Suite::Lseries) {
        if let Err(e) = lseries(&mut rec, cfg) {
            report_error(&mut rec, "lseries", e);
        }
    }
    rec.settle();
    rec
}
