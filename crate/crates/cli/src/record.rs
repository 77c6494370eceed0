//! Per-q records.

use serde::{Deserialize, Serialize};

use crate::config::ResidueClass;

/// Version of the report layout.
pub const REPORT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitsResult {
    /// `chain`, `t2` or `both`.
    pub method: String,
    pub steps: usize,
    pub certified: bool,
    /// Regulator `log|η|₁` to 12 decimals.
    pub regulator: String,
    pub odd_index_prime: Option<u64>,
    pub ord_w: i64,
    pub ord_wstar: Vec<i64>,
    pub mirror_swapped: bool,
    pub mirror_involution: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassResult {
    pub h_minus_q: u64,
    /// Order of the class of a prime above 2 in `Q(√-q)`.
    pub t: u64,
    pub pi_mod8: u64,
    pub pi_unit_at: String,
    pub pi_congruence: bool,
    /// Primes above `q` in the `Z₂`-extension, from `√-q ∈ Z₂`.
    pub r_q: u64,
    /// The same count from `2^(ord₂(q+1) - 3)`.
    pub r_q_formula: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HasseResult {
    pub h: u64,
    pub two_part: u64,
    pub cyclic: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XDChain {
    /// `Tr(θ²/2)` as a decimal string.
    pub trace: String,
    pub trace_ord: i64,
    pub trace_mod32: bool,
    pub y2_mod16: bool,
    pub ord_matches_class: bool,
    pub ord_log_eps_trace: i64,
    pub ord_log_eps_direct: i64,
    pub cm_identity: bool,
    pub ord_log_xi: i64,
    pub cw_d_p: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IwasawaResult {
    /// Torsion of `X*(F)`, e.g. `Z/4` or `Z/2 x Z/8`.
    pub xstar: String,
    /// `|X*(F)_tors|` when cyclic (`q ≡ 7 mod 16`), `r` in `Z/2 x Z/2^r` otherwise.
    pub xstar_order_or_r: i64,
    pub xstar_free_rank: usize,
    pub cw_f_pstar: i64,
    pub cw_f_p: i64,
    /// Structure and index formula give the same order.
    pub structure_matches_cw: bool,
    pub xd: Option<XDChain>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LseriesResult {
    pub w: u64,
    pub u_lower: String,
    pub v_truncated: String,
    pub v_chain: String,
    pub v_closed: String,
    pub verdict: bool,
}

/// Everything computed for one prime.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QRecord {
    pub q: u64,
    pub class: ResidueClass,
    pub status: Status,
    pub units: Option<UnitsResult>,
    pub classgroups: Option<ClassResult>,
    pub hasse: Option<HasseResult>,
    pub iwasawa: Option<IwasawaResult>,
    pub lseries: Option<LseriesResult>,
    /// Assertions that did not hold.
    pub failures: Vec<String>,
    /// Checks not run, with the reason (budget exceeded, missing prerequisite).
    pub skips: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub millis: Option<u64>,
}

impl QRecord {
    pub fn new(q: u64) -> Self {
        QRecord {
            q,
            class: ResidueClass::of(q),
            status: Status::Pass,
            units: None,
            classgroups: None,
            hasse: None,
            iwasawa: None,
            lseries: None,
            failures: Vec::new(),
            skips: Vec::new(),
            millis: None,
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.failures.push(msg.into());
    }

    pub fn skip(&mut self, msg: impl Into<String>) {
        self.skips.push(msg.into());
    }

    /// Fix the status from the collected failures and skips.
    pub fn settle(&mut self) {
        self.status = if !self.failures.is_empty() {
            Status::Fail
        } else if !self.skips.is_empty() {
            Status::Skip
        } else {
            Status::Pass
        };
    }
}
