//! `pquv`: key management, encryption and the analysis tools.
//!
//! Exit codes: 0 success, 2 bad parameters or malformed input, 3 key
//! generation failure, 4 decryption failure. JSON goes to standard output,
//! diagnostics to standard error.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use plotkin_mceliece::bitflip::{DecoderConfig, ThresholdRule, Variant};
use plotkin_mceliece::bitvec::BitVector;
use plotkin_mceliece::dfr::estimate_dfr;
use plotkin_mceliece::error::Error;
use plotkin_mceliece::params::{kbytes, preset, SchemeParams, PRESETS};
use plotkin_mceliece::pke::{decrypt, encrypt, keygen, ldpc_decoder, mdpc_decoder, DecryptError};
use plotkin_mceliece::qc::{Flavor, QcParams};
use plotkin_mceliece::rng::{RandomStream, SEED_BYTES};
use plotkin_mceliece::security::attack::{demo_params, recover_dual, weak_key_attack_demo};
use plotkin_mceliece::security::isd::{isd_cost, keyrec_workfactor, msgrec_workfactor, IsdAlgorithm};
use plotkin_mceliece::wire;

#[derive(Parser)]
#[command(name = "pquv", version, about = "Plotkin-concatenated QC-MDPC/QC-LDPC McEliece toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair.
    Keygen {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        seed: String,
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "sec")]
        secret: PathBuf,
    },
    /// Encrypt a raw 2k-bit message file.
    Encrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
        #[arg(long)]
        seed: String,
    },
    /// Decrypt a ciphertext file.
    Decrypt {
        #[arg(long = "sec")]
        secret: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "out")]
        output: PathBuf,
    },
    /// Monte-Carlo decoding failure rate of one component code.
    Dfr(DfrArgs),
    /// ISD work factors for a parameter set.
    Estimate {
        #[command(flatten)]
        scheme: SchemeArgs,
    },
    /// Recover the LDPC dual from a toy public key and try to read plaintexts with it.
    AttackDemo {
        #[arg(long, default_value_t = 101)]
        r: usize,
        #[arg(long, default_value_t = 6)]
        w2: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: String,
        #[arg(long, default_value_t = 10_000)]
        max_iterations: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SchemeArgs {
    /// One of cca128, cpa128, cca192, cpa192, cca256, cpa256, toy.
    #[arg(long)]
    preset: Option<String>,
    /// n0,r,w1,w2,t1,t2
    #[arg(long)]
    params: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Mdpc,
    Ldpc,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Classic,
    Backflip,
}

#[derive(Args)]
struct DfrArgs {
    /// n0,r,w of the component code.
    #[arg(long)]
    params: String,
    #[arg(long, value_enum, default_value = "ldpc")]
    flavor: FlavorArg,
    #[arg(long)]
    t: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: String,
    /// Defaults to the scheme's decoder for the chosen flavor.
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// majority, max-upc-delta:D or fixed:T1,T2,...
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

enum Failure {
    Usage(String),
    Generation(String),
    Decryption(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Generation(_) => 3,
            Failure::Decryption(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Generation(m) | Failure::Decryption(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Generation(_) | Error::NotInvertible => Failure::Generation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<wire::ParseError> for Failure {
    fn from(e: wire::ParseError) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn parse_seed(hex_seed: &str) -> CliResult<[u8; SEED_BYTES]> {
    if hex_seed.len() != 2 * SEED_BYTES {
        return Err(usage(format!(
            "seed must be {} hex characters, got {}",
            2 * SEED_BYTES,
            hex_seed.len()
        )));
    }
    let bytes = hex::decode(hex_seed).map_err(|e| usage(format!("seed: {e}")))?;
    Ok(bytes.try_into().expect("length checked"))
}

fn parse_list(s: &str, expected: usize, what: &str) -> CliResult<Vec<usize>> {
    let values = s
        .split(',')
        .map(|v| v.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("{what}: {e}")))?;
    if values.len() != expected {
        return Err(usage(format!("{what}: expected {expected} comma-separated values")));
    }
    Ok(values)
}

fn scheme_params(args: &SchemeArgs) -> CliResult<(Option<&'static str>, SchemeParams)> {
    if let Some(name) = &args.preset {
        let p = preset(name).ok_or_else(|| {
            let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
            usage(format!("unknown preset {name}; choose one of {}", names.join(", ")))
        })?;
        return Ok((Some(p.name), p.params));
    }
    let v = parse_list(args.params.as_deref().unwrap_or_default(), 6, "--params")?;
    Ok((None, SchemeParams::new(v[0], v[1], v[2], v[3], v[4], v[5])?))
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| usage(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.as_file().sync_all().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

/// A closed pipe on standard output is not an error worth reporting.
fn print_line(line: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn print_json(value: &serde_json::Value) {
    print_line(&value.to_string());
}

fn cmd_keygen(scheme: &SchemeArgs, seed: &str, public: &Path, secret: &Path) -> CliResult<()> {
    let (_, params) = scheme_params(scheme)?;
    let seed = parse_seed(seed)?;
    let (pk, sk) = keygen(&params, &mut RandomStream::from_seed(&seed))?;
    let pub_bytes = wire::serialize_public(&pk);
    let sec_bytes = wire::serialize_secret(&sk);
    let payload_bits: usize = pk
        .sg1()
        .blocks()
        .iter()
        .chain(pk.sg2().blocks())
        .map(|b| b.r())
        .sum();
    write_atomic(public, &pub_bytes)?;
    write_atomic(secret, &sec_bytes)?;
    eprintln!(
        "public key: {payload_bits} bits ({:.3} KB), formula 2(n0-1)n0r = {}",
        kbytes(payload_bits),
        params.public_key_bits()
    );
    print_json(&json!({
        "params": params,
        "publicKeyBits": payload_bits,
        "formulaBits": params.public_key_bits(),
        "publicKeyKbytes": kbytes(payload_bits),
        "cca2KeyBits": params.cca2_public_key_bits(),
        "cca2KeyKbytes": kbytes(params.cca2_public_key_bits()),
    }));
    Ok(())
}

fn cmd_encrypt(public: &Path, input: &Path, output: &Path, seed: &str) -> CliResult<()> {
    let seed = parse_seed(seed)?;
    let pk = wire::deserialize_public(&read(public)?)?;
    let p = *pk.params();
    let bits = p.plaintext_bits();
    let raw = read(input)?;
    if raw.len() != bits.div_ceil(8) {
        return Err(usage(format!(
            "message file has {} bytes, expected {} ({bits} bits)",
            raw.len(),
            bits.div_ceil(8)
        )));
    }
    let m = BitVector::from_bytes(&raw, bits).ok_or_else(|| usage("message file has nonzero padding bits"))?;
    let ct = encrypt(&pk, &m, &mut RandomStream::from_seed(&seed))?;
    write_atomic(output, &wire::serialize_ct(&p, &ct))
}

fn cmd_decrypt(secret: &Path, input: &Path, output: &Path) -> CliResult<()> {
    let sk = wire::deserialize_secret(&read(secret)?)?;
    let (p, ct) = wire::deserialize_ct(&read(input)?)?;
    if p != *sk.params() {
        return Err(usage("ciphertext parameters differ from the secret key's"));
    }
    match decrypt(&sk, &ct) {
        Ok(m) => write_atomic(output, &m.to_bytes()),
        Err(DecryptError::DecodingFailure(stage)) => {
            Err(Failure::Decryption(format!("decryption failed: stage={stage}")))
        }
        Err(DecryptError::Invalid(e)) => Err(e.into()),
    }
}

fn parse_threshold(s: &str) -> CliResult<ThresholdRule> {
    if s == "majority" {
        return Ok(ThresholdRule::Majority);
    }
    if let Some(d) = s.strip_prefix("max-upc-delta:") {
        let d = d.parse().map_err(|e| usage(format!("--threshold: {e}")))?;
        return Ok(ThresholdRule::MaxUpcDelta(d));
    }
    if let Some(list) = s.strip_prefix("fixed:") {
        let n = list.split(',').count();
        return Ok(ThresholdRule::Fixed(parse_list(list, n, "--threshold")?));
    }
    Err(usage(format!(
        "--threshold {s}: expected majority, max-upc-delta:D or fixed:T1,T2,..."
    )))
}

fn cmd_dfr(a: &DfrArgs) -> CliResult<()> {
    let v = parse_list(&a.params, 3, "--params")?;
    let flavor = match a.flavor {
        FlavorArg::Mdpc => Flavor::Mdpc,
        FlavorArg::Ldpc => Flavor::Ldpc,
    };
    let params = QcParams::new(v[0], v[1], v[2], flavor)?;
    let mut cfg: DecoderConfig = match flavor {
        Flavor::Mdpc => mdpc_decoder(),
        Flavor::Ldpc => ldpc_decoder(),
    };
    if let Some(variant) = a.variant {
        cfg.variant = match variant {
            VariantArg::Classic => Variant::ClassicBf,
            VariantArg::Backflip => Variant::Backflip,
        };
    }
    if let Some(t) = &a.threshold {
        cfg.threshold = parse_threshold(t)?;
    }
    if let Some(m) = a.max_iters {
        cfg.max_iters = m;
    }
    let seed = parse_seed(&a.seed)?;
    let report = estimate_dfr(params, a.t, &cfg, a.trials, &seed, a.workers)?;
    print_line(&report.to_json_line());
    Ok(())
}

fn cmd_estimate(scheme: &SchemeArgs) -> CliResult<()> {
    let (name, p) = scheme_params(scheme)?;
    let all = |w: usize| -> CliResult<Vec<_>> {
        IsdAlgorithm::ALL
            .iter()
            .map(|&alg| Ok(isd_cost(alg, p.n(), p.k(), w)?))
            .collect()
    };
    print_json(&json!({
        "preset": name,
        "params": p,
        "publicKeyBits": p.public_key_bits(),
        "keyRecovery": keyrec_workfactor(&p)?,
        "messageRecovery": msgrec_workfactor(&p)?,
        "isdOnW2": all(p.w2)?,
        "isdOnT1": all(p.t1)?,
    }));
    Ok(())
}

fn cmd_attack_demo(r: usize, w2: usize, trials: usize, seed: &str, max_iterations: u64, workers: usize) -> CliResult<()> {
    let seed = parse_seed(seed)?;
    let params = demo_params(r, w2)?;
    let (pk, _) = keygen(&params, &mut RandomStream::substream(&seed, 0))?;
    let started = std::time::Instant::now();
    let stern_seed = RandomStream::derive_seed(&seed, 1);
    let Some(dual) = recover_dual(&pk, &stern_seed, max_iterations, workers)? else {
        eprintln!("no dual word of weight <= {w2} within {max_iterations} iterations");
        print_json(&json!({ "params": params, "dualRecovered": false, "attackSucceeded": false }));
        return Ok(());
    };
    eprintln!(
        "dual row of weight {} after {} Stern iterations ({:.2?})",
        dual.row_weight(),
        dual.stern_iterations,
        started.elapsed()
    );
    let mut rng = RandomStream::substream(&seed, 2);
    let n = params.n();
    let mut reports = Vec::with_capacity(trials);
    for _ in 0..trials {
        let m = rng.bits(params.plaintext_bits());
        let ct = encrypt(&pk, &m, &mut rng)?;
        reports.push(weak_key_attack_demo(&pk, &ct, &m, &dual, &mut rng)?);
    }
    let in_window = reports
        .iter()
        .filter(|rep| (4 * n..=6 * n).contains(&(10 * rep.sum_c1_c2.residual_weight)))
        .count();
    let successes = reports.iter().filter(|rep| rep.attack_succeeded).count();
    print_json(&json!({
        "params": params,
        "dualRecovered": true,
        "recoveredRowWeight": dual.row_weight(),
        "dualComplete": dual.complete,
        "dualOrthogonal": dual.orthogonal,
        "sternIterations": dual.stern_iterations,
        "trials": trials,
        "residualInWindow": in_window,
        "attackSuccesses": successes,
        "attackSucceeded": successes > 0,
        "reports": reports,
    }));
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Keygen {
            scheme,
            seed,
            public,
            secret,
        } => cmd_keygen(&scheme, &seed, &public, &secret),
        Command::Encrypt {
            public,
            input,
            output,
            seed,
        } => cmd_encrypt(&public, &input, &output, &seed),
        Command::Decrypt { secret, input, output } => cmd_decrypt(&secret, &input, &output),
        Command::Dfr(args) => cmd_dfr(&args),
        Command::Estimate { scheme } => cmd_estimate(&scheme),
        Command::AttackDemo {
            r,
            w2,
            trials,
            seed,
            max_iterations,
            workers,
        } => cmd_attack_demo(r, w2, trials, &seed, max_iterations, workers),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("pquv: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
