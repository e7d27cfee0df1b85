use plotkin_mceliece::bitflip::{decode, DecoderConfig, ThresholdRule};
use plotkin_mceliece::dfr::{estimate_dfr, select_t_for_dfr, select_t_strided};
use plotkin_mceliece::pke::{ldpc_decoder, mdpc_decoder};
use plotkin_mceliece::qc::{derive_generator, sample_parity_check, Flavor, QcParams};
use plotkin_mceliece::rng::{sample_fixed_weight, RandomStream};

fn mdpc523() -> QcParams {
    QcParams::new(2, 523, 30, Flavor::Mdpc).unwrap()
}

fn ldpc523(w: usize) -> QcParams {
    QcParams::new(2, 523, w, Flavor::Ldpc).unwrap()
}

/// Failures out of `trials` on fresh codes, counted by hand rather than
/// through the DFR harness.
fn count_failures(params: QcParams, t: usize, cfg: &DecoderConfig, trials: usize, seed: u8) -> usize {
    let mut rng = RandomStream::from_seed(&[seed; 32]);
    let mut failures = 0;
    for _ in 0..trials {
        let h = sample_parity_check(&mut rng, params).unwrap();
        let g = derive_generator(&h).unwrap();
        let c = g.encode(&rng.bits(g.k())).unwrap();
        let e = sample_fixed_weight(&mut rng, params.n(), t).unwrap();
        let out = decode(&h, &c.xor(&e).unwrap(), cfg).unwrap();
        if !(out.success && out.error_vector == e) {
            failures += 1;
        }
    }
    failures
}

#[test]
fn single_errors_are_always_corrected_at_r523() {
    let mut rng = RandomStream::from_seed(&[1; 32]);
    for _ in 0..5 {
        let h = sample_parity_check(&mut rng, mdpc523()).unwrap();
        let g = derive_generator(&h).unwrap();
        let c = g.encode(&rng.bits(g.k())).unwrap();
        for _ in 0..40 {
            let e = sample_fixed_weight(&mut rng, h.n(), 1).unwrap();
            for cfg in [mdpc_decoder(), DecoderConfig::classic(ThresholdRule::Majority)] {
                let out = decode(&h, &c.xor(&e).unwrap(), &cfg).unwrap();
                assert!(out.success);
                assert_eq!(out.error_vector, e);
            }
        }
    }
}

// Simultaneous flipping at the majority threshold (8 of 15 checks) cannot
// reach 99% success at t = 18: a correct bit sees an unsatisfied check with
// probability about 0.32, so roughly 5% of the 1028 correct bits clear the
// threshold in the first iteration and the error weight grows instead of
// shrinking. The measured counts are pinned as regression baselines.
const MAJORITY_T18_FAILURES: usize = 1000;
const BACKFLIP_T18_FAILURES: usize = 63;
const MAX_UPC_T18_FAILURES: usize = 0;

#[test]
fn t18_baselines_at_r523() {
    let majority = DecoderConfig::classic(ThresholdRule::Majority).with_max_iters(50);
    let backflip = mdpc_decoder().with_max_iters(50);
    let max_upc = DecoderConfig::classic(ThresholdRule::MaxUpcDelta(0)).with_max_iters(50);
    let got = [
        count_failures(mdpc523(), 18, &majority, 1000, 18),
        count_failures(mdpc523(), 18, &backflip, 1000, 18),
        count_failures(mdpc523(), 18, &max_upc, 1000, 18),
    ];
    assert_eq!(got, [MAJORITY_T18_FAILURES, BACKFLIP_T18_FAILURES, MAX_UPC_T18_FAILURES]);
    assert!(got[0] > 10, "majority rule unexpectedly reaches 99% success");
}

#[test]
fn dfr_at_t18_is_below_one_percent_with_max_upc() {
    let cfg = DecoderConfig::classic(ThresholdRule::MaxUpcDelta(0));
    let rep = estimate_dfr(mdpc523(), 18, &cfg, 10_000, &[0x18; 32], 1).unwrap();
    assert!(rep.dfr < 1e-2, "{}", rep.to_json_line());
    assert_eq!(rep.soundness_violations, 0);
}

#[test]
fn dfr_extremes() {
    let p = ldpc523(8);
    let rep = estimate_dfr(p, 0, &ldpc_decoder(), 50, &[2; 32], 2).unwrap();
    assert_eq!((rep.failures, rep.dfr, rep.ci_low), (0, 0.0, 0.0));
    let rep = estimate_dfr(p, p.n(), &ldpc_decoder(), 20, &[2; 32], 1).unwrap();
    assert_eq!(rep.failures, 20);
    assert_eq!(rep.ci_high, 1.0);
    assert!(rep.ci_low <= rep.dfr && rep.dfr <= rep.ci_high);
}

#[test]
fn dfr_report_is_a_pure_function_of_its_inputs() {
    let p = ldpc523(8);
    let a = estimate_dfr(p, 8, &ldpc_decoder(), 300, &[3; 32], 4).unwrap();
    let b = estimate_dfr(p, 8, &ldpc_decoder(), 300, &[3; 32], 4).unwrap();
    assert_eq!(a.to_json_line(), b.to_json_line());
    let line: serde_json::Value = serde_json::from_str(&a.to_json_line()).unwrap();
    for field in ["params", "t", "variant", "trials", "failures", "dfr", "ci_low", "ci_high", "seed"] {
        assert!(line.get(field).is_some(), "missing {field}");
    }
}

#[test]
fn dfr_rejects_bad_inputs() {
    assert!(estimate_dfr(ldpc523(8), 3, &ldpc_decoder(), 0, &[0; 32], 1).is_err());
    assert!(estimate_dfr(ldpc523(8), 2000, &ldpc_decoder(), 5, &[0; 32], 1).is_err());
    assert!(select_t_for_dfr(ldpc523(8), 1e-3, 9_999, &ldpc_decoder(), &[0; 32]).is_err());
    assert!(select_t_for_dfr(ldpc523(8), 0.0, 9_999, &ldpc_decoder(), &[0; 32]).is_err());
}

/// Selected with target 1e-2, budget 1000, seed [0x5e; 32].
const W14_T_AT_1E2: usize = 22;

#[test]
fn selected_weights() {
    let seed = [0x5e; 32];
    let p = ldpc523(14);
    assert_eq!(select_t_for_dfr(p, 1e-2, 1_000, &ldpc_decoder(), &seed).unwrap(), W14_T_AT_1E2);

    let p = ldpc523(8);
    let everything = select_t_for_dfr(p, 1.0, 10, &ldpc_decoder(), &seed).unwrap();
    let loose = select_t_for_dfr(p, 1e-1, 100, &ldpc_decoder(), &seed).unwrap();
    let tight = select_t_for_dfr(p, 1e-3, 10_000, &ldpc_decoder(), &seed).unwrap();
    assert!(everything.is_power_of_two(), "{everything}");
    assert!(everything >= loose && loose >= tight, "{everything} {loose} {tight}");
}

#[test]
fn strided_selection_agrees_with_the_linear_scan() {
    let seed = [0x5e; 32];
    let p = ldpc523(14);
    for stride in [1, 3, 8] {
        let t = select_t_strided(p, 1e-2, 1_000, &ldpc_decoder(), &seed, stride).unwrap();
        assert_eq!(t, W14_T_AT_1E2, "stride {stride}");
    }
    assert!(select_t_strided(p, 1e-2, 1_000, &ldpc_decoder(), &seed, 0).is_err());
}
