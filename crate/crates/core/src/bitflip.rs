//! Hard-decision bit-flipping decoders for QC-MDPC and QC-LDPC codes.
//!
//! Both variants work on the syndrome of the received word and maintain an
//! error estimate `e`; every flip of `e` updates the syndrome incrementally.
//! All flips of one iteration are decided from a single unsatisfied-parity
//! count profile and applied together, so decoding is deterministic and
//! commutes with the block-wise cyclic shift of the code.

use serde::{Deserialize, Serialize};

use crate::bitvec::BitVector;
use crate::error::{dim_check, Error, Result};
use crate::qc::QcParityCheck;

pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_TTL_SATURATION: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Variant {
    ClassicBf,
    Backflip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ThresholdRule {
    /// `ceil((column weight + 1) / 2)`, per block.
    Majority,
    /// One threshold per iteration.
    Fixed(Vec<usize>),
    /// Flip every bit whose count is within `delta` of the current maximum.
    MaxUpcDelta(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub variant: Variant,
    pub max_iters: usize,
    pub threshold: ThresholdRule,
    /// Upper bound on a Backflip time-to-live; ignored by the classic decoder.
    pub ttl_saturation: usize,
}

impl DecoderConfig {
    pub fn classic(threshold: ThresholdRule) -> Self {
        DecoderConfig {
            variant: Variant::ClassicBf,
            max_iters: DEFAULT_MAX_ITERS,
            threshold,
            ttl_saturation: DEFAULT_TTL_SATURATION,
        }
    }

    pub fn backflip(threshold: ThresholdRule) -> Self {
        DecoderConfig {
            variant: Variant::Backflip,
            ..Self::classic(threshold)
        }
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be at least 1".into()));
        }
        if self.ttl_saturation == 0 {
            return Err(Error::Parameter("ttl_saturation must be at least 1".into()));
        }
        if let ThresholdRule::Fixed(schedule) = &self.threshold {
            if schedule.len() < self.max_iters {
                return Err(Error::Parameter(format!(
                    "fixed threshold schedule has {} entries for {} iterations",
                    schedule.len(),
                    self.max_iters
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub success: bool,
    /// Meaningful only when `success` holds.
    pub codeword: BitVector,
    pub error_vector: BitVector,
    /// Number of flipping iterations performed.
    pub iterations: usize,
}

/// Syndrome state kept twice over so that every cyclic window is contiguous.
struct SyndromeState<'a> {
    h: &'a QcParityCheck,
    r: usize,
    doubled: Vec<u8>,
    weight: usize,
}

impl<'a> SyndromeState<'a> {
    fn new(h: &'a QcParityCheck, y: &BitVector) -> Result<Self> {
        let s = h.syndrome(y)?;
        let r = h.r();
        let mut doubled = vec![0u8; 2 * r];
        for c in s.iter_ones() {
            doubled[c] = 1;
            doubled[c + r] = 1;
        }
        Ok(SyndromeState {
            h,
            r,
            doubled,
            weight: s.weight(),
        })
    }

    /// Unsatisfied-check counts for every code position.
    fn upc(&self, out: &mut [u16]) {
        let r = self.r;
        for (i, support) in self.h.supports().iter().enumerate() {
            let counts = &mut out[i * r..(i + 1) * r];
            counts.fill(0);
            for &p in support {
                // check (l - p) mod r sits at index l + r - p of the doubled syndrome
                let window = &self.doubled[r - p..2 * r - p];
                for (c, s) in counts.iter_mut().zip(window) {
                    *c += *s as u16;
                }
            }
        }
    }

    fn flip_position(&mut self, j: usize) {
        let r = self.r;
        let (block, l) = (j / r, j % r);
        for &p in &self.h.supports()[block] {
            let c = (l + r - p) % r;
            let v = self.doubled[c] ^ 1;
            self.doubled[c] = v;
            self.doubled[c + r] = v;
            if v == 1 {
                self.weight += 1;
            } else {
                self.weight -= 1;
            }
        }
    }
}

/// Per-position unsatisfied parity-check counts of `y`.
pub fn upc_profile(h: &QcParityCheck, y: &BitVector) -> Result<Vec<usize>> {
    let state = SyndromeState::new(h, y)?;
    let mut counts = vec![0u16; h.n()];
    state.upc(&mut counts);
    Ok(counts.into_iter().map(usize::from).collect())
}

fn majority(col_weight: usize) -> usize {
    (col_weight + 2) / 2
}

/// Thresholds for this iteration, one per block.
fn thresholds(h: &QcParityCheck, rule: &ThresholdRule, iter: usize, upc: &[u16]) -> Vec<usize> {
    let weights = h.block_weights();
    match rule {
        ThresholdRule::Majority => weights.iter().map(|w| majority(*w)).collect(),
        ThresholdRule::Fixed(schedule) => vec![schedule[iter]; weights.len()],
        ThresholdRule::MaxUpcDelta(delta) => {
            let max = upc.iter().copied().max().unwrap_or(0) as usize;
            vec![max.saturating_sub(*delta).max(1); weights.len()]
        }
    }
}

/// Backflip time-to-live of a bit flipped with count `upc` against threshold `theta`.
pub fn ttl(upc: usize, theta: usize, col_weight: usize, saturation: usize) -> usize {
    let excess = upc.saturating_sub(theta);
    saturation.min(1 + excess * saturation / col_weight.max(1))
}

pub fn decode(h: &QcParityCheck, y: &BitVector, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
    dim_check(y.len() == h.n(), || {
        format!("received word of length {} for code length {}", y.len(), h.n())
    })?;
    cfg.validate()?;
    let n = h.n();
    let r = h.r();
    let mut state = SyndromeState::new(h, y)?;
    let mut e = BitVector::zeros(n);
    let mut upc = vec![0u16; n];
    // Iteration at which a Backflip flip is undone; 0 when none is pending.
    let mut expiry = vec![0usize; n];
    let stuck_is_final = matches!(cfg.variant, Variant::ClassicBf)
        && !matches!(cfg.threshold, ThresholdRule::Fixed(_));
    let mut iterations = 0;

    while state.weight != 0 && iterations < cfg.max_iters {
        let iter = iterations;
        iterations += 1;
        state.upc(&mut upc);

        if cfg.variant == Variant::Backflip {
            let mut undone = false;
            for j in 0..n {
                if expiry[j] == iterations {
                    expiry[j] = 0;
                    if e.get(j) && upc[j] > 0 {
                        e.flip(j);
                        state.flip_position(j);
                        undone = true;
                    }
                }
            }
            if undone {
                if state.weight == 0 {
                    break;
                }
                state.upc(&mut upc);
            }
        }

        let theta = thresholds(h, &cfg.threshold, iter, &upc);
        let selected: Vec<usize> = (0..n)
            .filter(|&j| upc[j] as usize >= theta[j / r])
            .collect();
        if selected.is_empty() && stuck_is_final {
            break;
        }
        for &j in &selected {
            e.flip(j);
            state.flip_position(j);
            if cfg.variant == Variant::Backflip {
                if e.get(j) {
                    let cw = h.column_weight(j);
                    expiry[j] = iterations + ttl(upc[j] as usize, theta[j / r], cw, cfg.ttl_saturation);
                } else {
                    expiry[j] = 0;
                }
            }
        }
    }

    let success = state.weight == 0;
    let codeword = y.xor(&e)?;
    Ok(DecodeOutcome {
        success,
        codeword,
        error_vector: e,
        iterations,
    })
}
