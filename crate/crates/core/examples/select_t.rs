//! Re-derives the stored error weights.
//!
//! `cargo run --release --example select_t -- toy` prints the toy weights;
//! `-- presets` prints the LDPC weights of the full-size sets (slow).

use plotkin_mceliece::dfr::{select_t_for_dfr, select_t_strided};
use plotkin_mceliece::params::{PRESETS, T_SELECTION_SEED};
use plotkin_mceliece::pke::{ldpc_decoder, mdpc_decoder};
use plotkin_mceliece::qc::{Flavor, QcParams};

/// Coarse step of the full-size scans.
const PRESET_STRIDE: usize = 16;

fn main() {
    let seed = [T_SELECTION_SEED; 32];
    let mode = std::env::args().nth(1).unwrap_or_else(|| "toy".into());
    let started = std::time::Instant::now();
    match mode.as_str() {
        "toy" => {
            let mdpc = QcParams::new(2, 523, 30, Flavor::Mdpc).unwrap();
            let t1 = select_t_for_dfr(mdpc, 1e-3, 10_000, &mdpc_decoder(), &seed).unwrap();
            println!("toy t1 = {t1} ({:.0?})", started.elapsed());
            let ldpc = QcParams::new(2, 523, 8, Flavor::Ldpc).unwrap();
            let t2 = select_t_for_dfr(ldpc, 1e-3, 10_000, &ldpc_decoder(), &seed).unwrap();
            println!("toy t2 = {t2} ({:.0?})", started.elapsed());
        }
        "w14" => {
            let ldpc = QcParams::new(2, 523, 14, Flavor::Ldpc).unwrap();
            let t = select_t_for_dfr(ldpc, 1e-2, 1_000, &ldpc_decoder(), &seed).unwrap();
            println!("r=523 w=14 t = {t} ({:.0?})", started.elapsed());
        }
        "presets" => {
            let target = 2f64.powi(-7);
            for p in PRESETS.iter().filter(|p| p.security_bits > 0) {
                let ldpc = p.params.ldpc();
                let t = select_t_strided(ldpc, target, 1_280, &ldpc_decoder(), &seed, PRESET_STRIDE).unwrap();
                println!("{} t2 = {t} ({:.0?})", p.name, started.elapsed());
            }
        }
        other => eprintln!("unknown mode {other}"),
    }
}
