//! Monte-Carlo estimation of decoding failure rates.
//!
//! Trials are split into contiguous ranges, one per worker. Worker `i` draws
//! from [`RandomStream::substream`]`(seed, i)` and the counts are merged in
//! worker order, so a report is a pure function of the seed, the worker count
//! and the inputs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::bitflip::{decode, DecoderConfig, Variant};
use crate::error::{Error, Result};
use crate::qc::{derive_generator, sample_parity_check, QcParams};
use crate::rng::{sample_fixed_weight, RandomStream, SEED_BYTES};

/// Two-sided confidence level of the reported interval.
pub const CONFIDENCE: f64 = 0.95;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DfrReport {
    pub params: QcParams,
    pub t: usize,
    pub variant: Variant,
    pub trials: u64,
    pub failures: u64,
    pub dfr: f64,
    /// 95% Clopper-Pearson interval.
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: String,
    /// Trials where a claimed success had a nonzero syndrome or an
    /// inconsistent error vector. Always zero for a correct decoder.
    #[serde(skip)]
    pub soundness_violations: u64,
}

impl DfrReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[derive(Default, Clone, Copy)]
struct Tally {
    failures: u64,
    unsound: u64,
}

/// One trial on a freshly sampled code: random message, weight-`t` error.
/// A trial fails unless the decoder reports success and returns the planted error.
fn run_trial(rng: &mut RandomStream, params: QcParams, t: usize, cfg: &DecoderConfig) -> Result<Tally> {
    let h = sample_parity_check(rng, params)?;
    let g = derive_generator(&h)?;
    let m = rng.bits(g.k());
    let c = g.encode(&m)?;
    let e = sample_fixed_weight(rng, params.n(), t)?;
    let y = c.xor(&e)?;
    let out = decode(&h, &y, cfg)?;
    let mut tally = Tally::default();
    if out.success {
        let consistent = out.codeword.xor(&out.error_vector)? == y;
        if !consistent || !h.syndrome(&out.codeword)?.is_zero() {
            tally.unsound = 1;
        }
    }
    if !out.success || out.error_vector != e {
        tally.failures = 1;
    }
    Ok(tally)
}

pub fn estimate_dfr(
    params: QcParams,
    t: usize,
    cfg: &DecoderConfig,
    trials: u64,
    seed: &[u8; SEED_BYTES],
    workers: usize,
) -> Result<DfrReport> {
    params.validate()?;
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::Parameter("at least one trial is required".into()));
    }
    if t > params.n() {
        return Err(Error::Parameter(format!("error weight {t} exceeds n = {}", params.n())));
    }
    let workers = workers.clamp(1, trials as usize);
    let ranges: Vec<(usize, u64)> = (0..workers)
        .map(|i| {
            let lo = trials * i as u64 / workers as u64;
            let hi = trials * (i as u64 + 1) / workers as u64;
            (i, hi - lo)
        })
        .collect();
    let tallies: Vec<Result<Tally>> = ranges
        .par_iter()
        .map(|&(i, count)| {
            let mut rng = RandomStream::substream(seed, i as u64);
            let mut acc = Tally::default();
            for _ in 0..count {
                let one = run_trial(&mut rng, params, t, cfg)?;
                acc.failures += one.failures;
                acc.unsound += one.unsound;
            }
            Ok(acc)
        })
        .collect();
    let mut total = Tally::default();
    for tally in tallies {
        let tally = tally?;
        total.failures += tally.failures;
        total.unsound += tally.unsound;
    }
    let (ci_low, ci_high) = clopper_pearson(total.failures, trials, CONFIDENCE);
    Ok(DfrReport {
        params,
        t,
        variant: cfg.variant,
        trials,
        failures: total.failures,
        dfr: total.failures as f64 / trials as f64,
        ci_low,
        ci_high,
        seed: hex_string(seed),
        soundness_violations: total.unsound,
    })
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Exact binomial confidence interval for `failures` out of `trials`.
pub fn clopper_pearson(failures: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && failures <= trials);
    let alpha = 1.0 - confidence;
    let (x, n) = (failures as f64, trials as f64);
    let low = if failures == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, x, n - x + 1.0)
    };
    let high = if failures == trials {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, x + 1.0, n - x)
    };
    (low, high)
}

/// Quantile of Beta(a, b) by bisection on the regularized incomplete beta.
fn beta_quantile(q: f64, a: f64, b: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if beta_reg(a, b, mid) < q {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Largest failure count whose upper confidence bound over `trials` stays at
/// or below `target`, if any.
pub fn max_admissible_failures(trials: u64, target: f64) -> Option<u64> {
    let mut best = None;
    for f in 0..=trials {
        if clopper_pearson(f, trials, CONFIDENCE).1 <= target {
            best = Some(f);
        } else {
            break;
        }
    }
    best
}

/// Trials per thread in one parallel batch of [`select_t_for_dfr`]. Batches
/// only decide how soon a hopeless `t` is abandoned, never the result.
const SELECT_BATCH_PER_THREAD: u64 = 8;
/// Trials used by the doubling probe that finds the upper bracket.
const PROBE_TRIALS: u64 = 32;

/// Counts failures at weight `t`, stopping once `limit` is exceeded. Trial
/// `j` draws from `substream(substream(seed, t), j)`, so counts for a given
/// `t` are shared by every caller using the same seed.
fn failures_at(
    params: QcParams,
    t: usize,
    cfg: &DecoderConfig,
    trials: u64,
    limit: u64,
    seed: &[u8; SEED_BYTES],
) -> Result<u64> {
    let t_seed = RandomStream::derive_seed(seed, t as u64);
    let batch = SELECT_BATCH_PER_THREAD * rayon::current_num_threads() as u64;
    let mut failures = 0;
    let mut start = 0;
    while start < trials && failures <= limit {
        let end = (start + batch).min(trials);
        let batch: Vec<Result<Tally>> = (start..end)
            .into_par_iter()
            .map(|j| run_trial(&mut RandomStream::substream(&t_seed, j), params, t, cfg))
            .collect();
        for tally in batch {
            failures += tally?.failures;
        }
        start = end;
    }
    Ok(failures)
}

/// Largest error weight whose measured failure-rate upper bound is at most
/// `target_dfr`, scanning downwards from an upper bracket.
///
/// The bracket is found by doubling `t` from 1 until a short probe fails on
/// every trial (or `t` reaches `n`).
pub fn select_t_for_dfr(
    params: QcParams,
    target_dfr: f64,
    budget: u64,
    cfg: &DecoderConfig,
    seed: &[u8; SEED_BYTES],
) -> Result<usize> {
    select_t_strided(params, target_dfr, budget, cfg, seed, 1)
}

/// [`select_t_for_dfr`] for long codes: the bracket is first lowered in
/// steps of `stride` to one step above the highest coarse weight that
/// passes, then scanned one weight at a time as usual. With `stride = 1`
/// the two are the same search.
pub fn select_t_strided(
    params: QcParams,
    target_dfr: f64,
    budget: u64,
    cfg: &DecoderConfig,
    seed: &[u8; SEED_BYTES],
    stride: usize,
) -> Result<usize> {
    params.validate()?;
    cfg.validate()?;
    if !(target_dfr > 0.0 && target_dfr <= 1.0) {
        return Err(Error::Parameter(format!("target DFR {target_dfr} outside (0, 1]")));
    }
    if (budget as f64) < 10.0 / target_dfr {
        return Err(Error::Parameter(format!(
            "budget {budget} cannot resolve a failure rate of {target_dfr}"
        )));
    }
    if stride == 0 {
        return Err(Error::Parameter("stride must be positive".into()));
    }
    let n = params.n();
    let probe = PROBE_TRIALS.min(budget);
    let mut bracket = 1;
    while bracket < n && failures_at(params, bracket, cfg, probe, probe, seed)? < probe {
        bracket = (2 * bracket).min(n);
    }
    let limit = max_admissible_failures(budget, target_dfr).ok_or_else(|| {
        Error::Parameter(format!("budget {budget} cannot resolve {target_dfr}"))
    })?;
    if stride > 1 {
        let mut coarse = bracket;
        while coarse > stride && failures_at(params, coarse, cfg, budget, limit, seed)? > limit {
            coarse -= stride;
        }
        bracket = (coarse + stride - 1).min(bracket);
    }
    for t in (1..=bracket).rev() {
        if failures_at(params, t, cfg, budget, limit, seed)? <= limit {
            return Ok(t);
        }
    }
    Err(Error::Selection(format!(
        "no t >= 1 meets DFR {target_dfr} within {budget} trials"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clopper_pearson_known_values() {
        // 0 of 10: upper bound 1 - 0.025^(1/10)
        let (lo, hi) = clopper_pearson(0, 10, 0.95);
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        // symmetric case 10 of 10
        let (lo, hi) = clopper_pearson(10, 10, 0.95);
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        // 5 of 10: [0.187086, 0.812914]
        let (lo, hi) = clopper_pearson(5, 10, 0.95);
        assert!((lo - 0.187086).abs() < 1e-5, "{lo}");
        assert!((hi - 0.812914).abs() < 1e-5, "{hi}");
    }

    #[test]
    fn admissible_failures() {
        assert_eq!(max_admissible_failures(100, 1.0), Some(100));
        assert_eq!(max_admissible_failures(10, 0.01), None);
        let f = max_admissible_failures(10_000, 1e-3).unwrap();
        assert!(clopper_pearson(f, 10_000, CONFIDENCE).1 <= 1e-3);
        assert!(clopper_pearson(f + 1, 10_000, CONFIDENCE).1 > 1e-3);
    }
}
