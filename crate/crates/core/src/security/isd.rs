//! Work-factor models for information-set decoding.
//!
//! Costs are counted in binary row operations. One Gaussian elimination
//! costs `(n - k)^2 n`; list construction, merging and candidate checks cost
//! one unit per element. Internal parameters are chosen by exhaustive grid
//! search. DOOM speed-ups are applied as a plain divisor on the final cost.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::SchemeParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IsdAlgorithm {
    Prange,
    Stern,
    Bjmm2,
}

impl IsdAlgorithm {
    pub const ALL: [IsdAlgorithm; 3] = [IsdAlgorithm::Prange, IsdAlgorithm::Stern, IsdAlgorithm::Bjmm2];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IsdCostReport {
    pub algorithm: IsdAlgorithm,
    pub n: usize,
    pub k: usize,
    pub w: usize,
    /// Cost of one instance before any DOOM gain.
    pub log2_cost: f64,
    pub doom_divisor_log2: f64,
    /// `log2_cost - doom_divisor_log2`.
    pub log2_work_factor: f64,
    pub internal_params: BTreeMap<String, f64>,
}

/// Largest `p` tried by the Stern grid (per half).
const STERN_MAX_P: usize = 20;
/// Largest window tried by the Stern grid.
const STERN_MAX_L: usize = 200;
/// Largest total `p` tried by the BJMM grid.
const BJMM_MAX_P: usize = 40;
/// Largest overlap tried by the BJMM grid.
const BJMM_MAX_EPS: usize = 16;
/// Largest window tried by the BJMM grid.
const BJMM_MAX_L: usize = 400;

/// `log2 C(n, k)` via log-gamma; `-inf` outside `0 <= k <= n`.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    (ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)) / std::f64::consts::LN_2
}

/// `log2(2^a + 2^b + ...)` without overflow.
fn log2_sum(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + terms.iter().map(|t| (t - m).exp2()).sum::<f64>().log2()
}

fn log2_elimination(n: usize, k: usize) -> f64 {
    let r = (n - k) as f64;
    (r * r * n as f64).log2()
}

struct Best {
    cost: f64,
    params: Vec<(&'static str, f64)>,
}

fn prange(n: usize, k: usize, w: usize) -> Best {
    Best {
        cost: log2_binomial(n, w) - log2_binomial(n - k, w) + log2_elimination(n, k),
        params: vec![],
    }
}

/// Stern with weight `p` on each half of the information set and a window
/// of `l` zero positions. `p = 0` is Prange.
fn stern(n: usize, k: usize, w: usize) -> Best {
    let mut best = prange(n, k, w);
    let ge = log2_elimination(n, k);
    let total = log2_binomial(n, w);
    for p in 1..=STERN_MAX_P.min(w / 2) {
        let (left, right) = (log2_binomial(k / 2, p), log2_binomial(k - k / 2, p));
        for l in 1..=STERN_MAX_L {
            if l + (w - 2 * p) > n - k {
                break;
            }
            let success = left + right + log2_binomial(n - k - l, w - 2 * p) - total;
            let per_iter = log2_sum(&[ge, left, right, left + right - l as f64]);
            let cost = per_iter - success;
            if cost < best.cost {
                best = Best {
                    cost,
                    params: vec![("p", p as f64), ("l", l as f64)],
                };
            }
        }
    }
    best
}

/// Depth-2 BJMM. Weight `p` on the `k + l` positions; level-1 vectors have
/// weight `p/2 + eps` and are merged from base lists of weight `(p/2 + eps)/2`
/// on each half. The level-1 match fixes `log2` of the number of
/// representations, the final match the rest of the window.
fn bjmm2(n: usize, k: usize, w: usize) -> Best {
    let mut best = prange(n, k, w);
    let ge = log2_elimination(n, k);
    let total = log2_binomial(n, w);
    for p in (2..=BJMM_MAX_P.min(w)).step_by(2) {
        for eps in 0..=BJMM_MAX_EPS {
            let p1 = p / 2 + eps;
            if p1 % 2 == 1 {
                continue;
            }
            for l in 1..=BJMM_MAX_L {
                if l + (w - p) > n - k {
                    break;
                }
                let kl = k + l;
                if p1 > kl / 2 || eps > kl - p {
                    continue;
                }
                let l1 = log2_binomial(p, p / 2) + log2_binomial(kl - p, eps);
                if l1 > l as f64 {
                    continue;
                }
                let base = log2_binomial(kl / 2, p1 / 2);
                let level1 = 2.0 * base - l1;
                let last = 2.0 * level1 - (l as f64 - l1);
                let success = log2_binomial(kl, p) + log2_binomial(n - k - l, w - p) - total;
                let cost = log2_sum(&[ge, 2.0 + base, 1.0 + level1, last]) - success;
                if cost < best.cost {
                    best = Best {
                        cost,
                        params: vec![("p", p as f64), ("l", l as f64), ("eps", eps as f64), ("l1", l1)],
                    };
                }
            }
        }
    }
    best
}

pub fn isd_cost(algorithm: IsdAlgorithm, n: usize, k: usize, w: usize) -> Result<IsdCostReport> {
    if k == 0 || k >= n {
        return Err(Error::Parameter(format!("need 0 < k < n, got k = {k}, n = {n}")));
    }
    if w > n - k {
        return Err(Error::Parameter(format!(
            "w = {w} exceeds the redundancy n - k = {}",
            n - k
        )));
    }
    let best = match algorithm {
        IsdAlgorithm::Prange => prange(n, k, w),
        IsdAlgorithm::Stern => stern(n, k, w),
        IsdAlgorithm::Bjmm2 => bjmm2(n, k, w),
    };
    Ok(IsdCostReport {
        algorithm,
        n,
        k,
        w,
        log2_cost: best.cost,
        doom_divisor_log2: 0.0,
        log2_work_factor: best.cost,
        internal_params: best.params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
    })
}

fn with_doom(mut report: IsdCostReport, divisor_log2: f64) -> IsdCostReport {
    report.doom_divisor_log2 = divisor_log2;
    report.log2_work_factor = report.log2_cost - divisor_log2;
    report
}

/// Cheapest search for a weight-`w2` row of the LDPC dual, divided by `r`
/// since any of the `r` rotations of a row will do.
pub fn keyrec_workfactor(params: &SchemeParams) -> Result<IsdCostReport> {
    params.validate()?;
    let mut best: Option<IsdCostReport> = None;
    for alg in IsdAlgorithm::ALL {
        let rep = isd_cost(alg, params.n(), params.k(), params.w2)?;
        if best.as_ref().is_none_or(|b| rep.log2_cost < b.log2_cost) {
            best = Some(rep);
        }
    }
    let best = best.expect("three algorithms");
    Ok(with_doom(best, (params.r as f64).log2()))
}

/// BJMM cost of decoding `t1` errors, divided by `sqrt(r)`.
pub fn msgrec_workfactor(params: &SchemeParams) -> Result<IsdCostReport> {
    params.validate()?;
    let rep = isd_cost(IsdAlgorithm::Bjmm2, params.n(), params.k(), params.t1)?;
    Ok(with_doom(rep, (params.r as f64).log2() / 2.0))
}
