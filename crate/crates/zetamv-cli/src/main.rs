//! Command-line surface tying the library modules into reproducible
//! experiments: zero-cache maintenance, identity suites, constant
//! calibration, and the discrete-vs-main-term comparison sweeps.
//!
//! All outputs are text, every file write is atomic, and each emitted
//! artifact embeds the fully resolved run configuration, so runs are
//! diffable and reproducible. Exit code 0 means every asserted check of the
//! invoked command passed; report-only quantities never affect the exit
//! code.

mod io;

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use zetamv::arith::{self, FactorSieve};
use zetamv::characters::{
    additive_decomposition_check, induced_gauss_sum_check, primitive_decomposition_check,
    CharacterTable,
};
use zetamv::coeffs::{divisor_coefficients, resonator, ResonatorParams};
use zetamv::meanvalue::{
    derive_constants_calibrated, end_to_end_report, gonek_check_battery, m0_direct, m0_main_term,
    shu_sum_check, synthetic_round_trip, CalibrationBudget, MainTermConstants, MeanValueParams,
};
use zetamv::poly::Polynomial;
use zetamv::zeta::{find_zeros, PrecisionConfig, ZeroList};
use zetamv::CoefficientVector;

/// Residual bound for the Mobius / von Mangoldt identity suite.
const ARITH_IDENTITY_TOL: f64 = 1e-9;
/// Residual bound for every character-sum identity.
const CHARACTER_TOL: f64 = 1e-10;
/// Largest modulus driven through the additive and Gauss-sum batteries.
const CHARACTER_K_CAP: u64 = 60;
/// Largest modulus for the primitive-decomposition and induced batteries.
const CHARACTER_PRIMITIVE_K_CAP: u64 = 40;
/// Bound for the synthetic calibration round-trip deviation.
const ROUND_TRIP_TOL: f64 = 1e-3;
/// Relative-error bound for the final point of each restricted prime sum.
const SHU_FINAL_REL_TOL: f64 = 0.05;
/// Largest number of trend inversions tolerated in a decreasing sweep.
const MAX_TREND_INVERSIONS: usize = 1;

#[derive(Parser)]
#[command(
    name = "zetamv",
    about = "Numerical verification of discrete mean values of zeta' over its nontrivial zeros",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute or extend the certified zero cache up to height T.
    Zeros {
        #[arg(long = "T")]
        t: f64,
        /// Cache directory (holds zeros.txt, constants.json, .lock).
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
        /// Target absolute error of zeta evaluations.
        #[arg(long, default_value_t = 1e-12)]
        precision: f64,
    },
    /// Run the arithmetic-function and character identity suites.
    VerifyIdentities {
        /// Scope: arith, characters, or all.
        #[arg(long, default_value = "all")]
        case: String,
        /// Sweep bound (n for arithmetic identities, modulus cap for
        /// characters); 0 is a vacuous pass.
        #[arg(long = "T", default_value_t = 1000.0)]
        t: f64,
    },
    /// Fit the main-term constants against brute-force data and write the
    /// constants file.
    Calibrate {
        /// Output path for the constants file.
        #[arg(long, default_value = "cache/constants.json")]
        out: PathBuf,
        /// Seed for the synthetic round-trip self-check.
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Compare the discrete sum over zeros against the explicit main term
    /// over a T sweep and emit the trend report.
    Compare {
        /// Single endpoint T (ignored when --sweep is given).
        #[arg(long = "T", default_value_t = 2000.0)]
        t: f64,
        #[arg(long, default_value_t = 0.2)]
        theta: f64,
        /// Coefficient family: m1, divisor, or resonator.
        #[arg(long, default_value = "divisor")]
        case: String,
        /// Cache directory with zeros.txt and constants.json.
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
        /// Report output path.
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        /// Comma-separated list of endpoints T.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-12)]
        precision: f64,
    },
    /// Check the restricted prime sums against their main-term brackets.
    ShuCheck {
        /// Largest x of the sweep (the sweep is x = 1e4, 1e5, ..., up to T).
        #[arg(long = "T", default_value_t = 1e6)]
        t: f64,
        /// Optional single pair "h,k" instead of the built-in battery.
        #[arg(long)]
        case: Option<String>,
        /// Cache directory; calibrated constants are used when present.
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
    },
    /// Check the stationary-phase integral lemma on a fixed battery of
    /// (r, T, kappa) triples, both below and above the r = T/2pi cut.
    GonekCheck {
        #[arg(long, default_value_t = 1e-12)]
        precision: f64,
    },
    /// Compare the brute-force arithmetic part against its main term over a
    /// T sweep.
    M0Check {
        /// Coefficient family: m1, divisor, or resonator.
        #[arg(long, default_value = "divisor")]
        case: String,
        /// Comma-separated list of endpoints T.
        #[arg(long, value_delimiter = ',', default_value = "500,1000,2000,4000")]
        sweep: Vec<f64>,
        /// Cache directory; calibrated constants are used when present.
        #[arg(long, default_value = "cache")]
        cache: PathBuf,
    },
}

/// Fully resolved configuration of one run, embedded into every emitted
/// artifact.
#[derive(Serialize)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cache: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    precision: Option<f64>,
}

impl RunConfig {
    fn new(command: &'static str) -> Self {
        RunConfig {
            command,
            t: None,
            theta: None,
            case: None,
            cache: None,
            out: None,
            sweep: None,
            seed: None,
            precision: None,
        }
    }

    fn to_json(&self) -> String {
        serde_json::to_string(self).expect("run config serializes")
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more asserted checks failed");
            ExitCode::FAILURE
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<bool> {
    match command {
        Command::Zeros { t, cache, precision } => cmd_zeros(t, &cache, precision),
        Command::VerifyIdentities { case, t } => cmd_verify_identities(&case, t),
        Command::Calibrate { out, seed } => cmd_calibrate(&out, seed),
        Command::Compare {
            t,
            theta,
            case,
            cache,
            out,
            sweep,
            precision,
        } => cmd_compare(t, theta, &case, &cache, &out, sweep, precision),
        Command::ShuCheck { t, case, cache } => cmd_shu_check(t, case.as_deref(), &cache),
        Command::GonekCheck { precision } => cmd_gonek_check(precision),
        Command::M0Check { case, sweep, cache } => cmd_m0_check(&case, &sweep, &cache),
    }
}

fn precision_config(target_abs_error: f64) -> PrecisionConfig {
    let cfg = PrecisionConfig {
        target_abs_error,
        ..PrecisionConfig::default()
    };
    cfg.validate();
    cfg
}

fn zeros_path(cache: &Path) -> PathBuf {
    cache.join("zeros.txt")
}

fn constants_path(cache: &Path) -> PathBuf {
    cache.join("constants.json")
}

/// Loads the zero cache if present; a malformed file is a hard error naming
/// the offending line.
fn load_zero_cache(path: &Path) -> Result<Option<ZeroList>> {
    if !path.exists() {
        return Ok(None);
    }
    let file =
        fs::File::open(path).with_context(|| format!("opening zero cache {}", path.display()))?;
    let zeros = ZeroList::read_cache(&mut BufReader::new(file))
        .with_context(|| format!("reading zero cache {}", path.display()))?;
    Ok(Some(zeros))
}

/// Returns a certified zero list covering height `t`, computing and caching
/// it when the existing cache is absent or too short.
fn ensure_zeros(t: f64, cache: &Path, cfg: &PrecisionConfig) -> Result<ZeroList> {
    if let Some(zeros) = load_zero_cache(&zeros_path(cache))? {
        if zeros.certified && zeros.t >= t {
            return Ok(zeros);
        }
    }
    let _lock = io::CacheLock::acquire(cache)?;
    let zeros = find_zeros(t, cfg)?;
    let mut text = Vec::new();
    zeros.write_cache(&mut text)?;
    io::atomic_write(&zeros_path(cache), std::str::from_utf8(&text)?)?;
    Ok(zeros)
}

fn cmd_zeros(t: f64, cache: &Path, precision: f64) -> Result<bool> {
    let cfg = precision_config(precision);
    let path = zeros_path(cache);
    if let Some(existing) = load_zero_cache(&path)? {
        if existing.certified && existing.t >= t {
            println!(
                "cache {} already covers T = {t}: {} ordinates up to {:.6}, certified",
                path.display(),
                existing.count_below(t),
                existing.t
            );
            return Ok(true);
        }
    }
    let zeros = ensure_zeros(t, cache, &cfg)?;
    println!(
        "wrote {}: {} ordinates up to T = {:.6}, certified = {}, abs_error <= {:e}",
        path.display(),
        zeros.gammas.len(),
        zeros.t,
        zeros.certified,
        zeros.abs_error
    );
    Ok(true)
}

fn report_check(name: &str, pass: bool, detail: &str) -> bool {
    println!("{} {name} ({detail})", if pass { "PASS" } else { "FAIL" });
    pass
}

fn cmd_verify_identities(case: &str, bound: f64) -> Result<bool> {
    if !matches!(case, "arith" | "characters" | "all") {
        bail!("--case must be arith, characters, or all (got {case})");
    }
    if bound < 0.0 || !bound.is_finite() {
        bail!("--T must be a nonnegative finite bound");
    }
    if bound == 0.0 {
        println!("PASS vacuous (bound 0: nothing to check)");
        return Ok(true);
    }
    let mut all = true;

    if case == "arith" || case == "all" {
        let n_max = bound as u64;
        let sieve = FactorSieve::new(n_max)?;
        let residuals = arith::mobius_identity_residuals(n_max, &sieve)?;
        for (i, r) in residuals.iter().enumerate() {
            all &= report_check(
                &format!("mobius identity {}", i + 1),
                *r < ARITH_IDENTITY_TOL,
                &format!("n <= {n_max}, worst residual {r:.3e}"),
            );
        }
        let mut worst = [0.0f64; 4];
        for n in 1..=n_max {
            let f = sieve.factor(n);
            for (j, w) in worst.iter_mut().enumerate() {
                let closed = arith::phi_j(&f, (j + 1) as u8);
                let brute = arith::phi_j_definitional(&f, (j + 1) as u8);
                *w = w.max((closed - brute).abs());
            }
        }
        for (j, w) in worst.iter().enumerate() {
            all &= report_check(
                &format!("phi_{} closed form", j + 1),
                *w < ARITH_IDENTITY_TOL,
                &format!("n <= {n_max}, worst residual {w:.3e}"),
            );
        }
    }

    if case == "characters" || case == "all" {
        let k_cap = (bound as u64).min(CHARACTER_K_CAP);
        let kp_cap = (bound as u64).min(CHARACTER_PRIMITIVE_K_CAP);

        let mut worst = 0.0f64;
        for k in 1..=k_cap {
            for m in [1u64, 2, 5] {
                worst = worst.max(additive_decomposition_check(m, k)?);
            }
        }
        all &= report_check(
            "additive decomposition",
            worst < CHARACTER_TOL,
            &format!("k <= {k_cap}, worst residual {worst:.3e}"),
        );

        let mut worst = 0.0f64;
        for k in 2..=kp_cap {
            for m in [1u64, 2, 5] {
                worst = worst.max(primitive_decomposition_check(m, k)?);
            }
        }
        all &= report_check(
            "primitive decomposition",
            worst < CHARACTER_TOL,
            &format!("k <= {kp_cap}, worst residual {worst:.3e}"),
        );

        let mut worst = 0.0f64;
        for q in 1..=k_cap {
            let table = CharacterTable::build(q)?;
            for idx in 0..table.len() {
                if table.is_primitive(idx) {
                    let tau = table.gauss_sum(idx);
                    worst = worst.max((tau.norm_sqr() - q as f64).abs());
                }
            }
        }
        all &= report_check(
            "primitive Gauss-sum modulus",
            worst < CHARACTER_TOL,
            &format!("q <= {k_cap}, worst residual {worst:.3e}"),
        );

        let mut worst = 0.0f64;
        for k in 1..=kp_cap {
            let table = CharacterTable::build(k)?;
            for idx in 0..table.len() {
                worst = worst.max(induced_gauss_sum_check(&table, idx)?);
            }
        }
        all &= report_check(
            "induced Gauss sums",
            worst < CHARACTER_TOL,
            &format!("k <= {kp_cap}, worst residual {worst:.3e}"),
        );
    }

    Ok(all)
}

fn cmd_calibrate(out: &Path, seed: u64) -> Result<bool> {
    let outcome = derive_constants_calibrated(&CalibrationBudget::default())?;
    let (_truth, _recovered, max_dev) = synthetic_round_trip(seed)?;

    println!("calibrated constants:");
    for stage in &outcome.stages {
        println!(
            "  stage '{}': condition {:.3e}, rms residual {:.3e}",
            stage.name, stage.condition_number, stage.rms_residual
        );
        for (name, value) in &stage.estimates {
            println!("    {name} = {value:+.9}");
        }
    }
    let round_trip_ok = report_check(
        "synthetic round-trip",
        max_dev < ROUND_TRIP_TOL,
        &format!("seed {seed}, max deviation {max_dev:.3e}"),
    );

    let mut config = RunConfig::new("calibrate");
    config.out = Some(out.display().to_string());
    config.seed = Some(seed);

    let mut value = serde_json::to_value(&outcome.constants)?;
    let stages: Vec<serde_json::Value> = outcome
        .stages
        .iter()
        .map(|s| {
            serde_json::json!({
                "name": s.name,
                "estimates": s
                    .estimates
                    .iter()
                    .map(|(n, v)| (n.clone(), serde_json::json!(v)))
                    .collect::<serde_json::Map<_, _>>(),
                "condition_number": s.condition_number,
                "rms_residual": s.rms_residual,
            })
        })
        .collect();
    value["fit_stages"] = serde_json::Value::Array(stages);
    value["synthetic_round_trip"] = serde_json::json!({
        "seed": seed,
        "max_abs_deviation": max_dev,
    });
    value["run_config"] = serde_json::Value::String(config.to_json());

    let mut text = serde_json::to_string_pretty(&value)?;
    text.push('\n');
    if let Some(dir) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        let _lock = io::CacheLock::acquire(dir)?;
        io::atomic_write(out, &text)?;
    } else {
        io::atomic_write(out, &text)?;
    }
    println!("wrote {}", out.display());
    Ok(round_trip_ok)
}

/// Builds the X = Y coefficient vector for a named family at length `m`.
fn family_coefficients(case: &str, m: u64) -> Result<CoefficientVector> {
    match case {
        "m1" => Ok(CoefficientVector::unit("m1")),
        "divisor" => Ok(divisor_coefficients(m, &Polynomial::constant(1.0))?),
        "resonator" => Ok(resonator(&ResonatorParams::new(m)?)),
        other => bail!("--case must be m1, divisor, or resonator (got {other})"),
    }
}

/// Loads calibrated constants, failing with a pointer at `calibrate` when
/// the file is missing.
fn require_constants(cache: &Path) -> Result<MainTermConstants> {
    let path = constants_path(cache);
    let text = fs::read_to_string(&path).with_context(|| {
        format!(
            "constants file {} not found; run `zetamv calibrate --out {}` first",
            path.display(),
            path.display()
        )
    })?;
    Ok(MainTermConstants::from_text(&text)?)
}

/// Loads calibrated constants when available, otherwise falls back to the
/// closed-form Laurent constants (and says so).
fn constants_or_laurent(cache: &Path) -> Result<MainTermConstants> {
    let path = constants_path(cache);
    if path.exists() {
        let text = fs::read_to_string(&path)?;
        println!("using calibrated constants from {}", path.display());
        Ok(MainTermConstants::from_text(&text)?)
    } else {
        println!("no constants file at {}; using closed-form constants", path.display());
        Ok(MainTermConstants::laurent())
    }
}

fn cmd_compare(
    t: f64,
    theta: f64,
    case: &str,
    cache: &Path,
    out: &Path,
    sweep: Option<Vec<f64>>,
    precision: f64,
) -> Result<bool> {
    let constants = require_constants(cache)?;
    let cfg = precision_config(precision);
    let t_list = sweep.clone().unwrap_or_else(|| vec![t]);
    if t_list.is_empty() {
        bail!("--sweep must name at least one endpoint");
    }
    let t_max = t_list.iter().cloned().fold(0.0f64, f64::max);
    let zeros = ensure_zeros(t_max, cache, &cfg)?;

    let mut params = Vec::new();
    for &ti in &t_list {
        let m = if case == "m1" { 1 } else { ti.powf(theta).floor() as u64 };
        let c = family_coefficients(case, m)?;
        params.push(MeanValueParams::with_explicit_m(
            ti,
            theta,
            m,
            c.clone(),
            c,
            case,
        )?);
    }

    let mut report = end_to_end_report(&params, &constants, &zeros, &cfg, false)?;
    let mut config = RunConfig::new("compare");
    config.t = Some(t);
    config.theta = Some(theta);
    config.case = Some(case.to_string());
    config.cache = Some(cache.display().to_string());
    config.out = Some(out.display().to_string());
    config.sweep = sweep;
    config.precision = Some(precision);
    report.set_meta("run_config", config.to_json());

    io::atomic_write(out, &report.to_json())?;
    print!("{}", report.to_table());
    println!("wrote {}", out.display());

    let finite = report
        .rows
        .iter()
        .all(|r| r.direct_re.is_finite() && r.main_term.is_finite());
    Ok(report_check(
        "comparison rows finite",
        finite,
        &format!("{} rows", report.rows.len()),
    ))
}

/// Counts upward moves in a sequence expected to decrease.
fn trend_inversions(rels: &[f64]) -> usize {
    rels.windows(2).filter(|w| w[1] > w[0]).count()
}

fn cmd_shu_check(t: f64, case: Option<&str>, cache: &Path) -> Result<bool> {
    if t < 1e4 {
        bail!("--T must be at least 1e4 so the sweep has at least one point");
    }
    let constants = constants_or_laurent(cache)?;
    let pairs: Vec<(u64, u64)> = match case {
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').collect();
            if parts.len() != 2 {
                bail!("--case must be \"h,k\" (got {spec})");
            }
            vec![(parts[0].trim().parse()?, parts[1].trim().parse()?)]
        }
        None => vec![(1, 1), (2, 3), (6, 5)],
    };
    let mut xs = Vec::new();
    let mut x = 1e4;
    while x <= t {
        xs.push(x);
        x *= 10.0;
    }

    let mut all = true;
    for (h, k) in pairs {
        let report = shu_sum_check(h, k, &xs, &constants)?;
        print!("{}", report.to_table());
        let rels: Vec<f64> = report.rows.iter().map(|r| r.rel_error).collect();
        let last = *rels.last().expect("nonempty sweep");
        let pass = last < SHU_FINAL_REL_TOL && (rels.len() == 1 || last < rels[0]);
        all &= report_check(
            &format!("restricted prime sum h={h} k={k}"),
            pass,
            &format!("final rel {last:.3e} over {} points", rels.len()),
        );
    }
    Ok(all)
}

fn cmd_gonek_check(precision: f64) -> Result<bool> {
    let cfg = precision_config(precision);
    let checks = gonek_check_battery(&cfg)?;
    let mut all = true;
    for c in &checks {
        let branch = if c.r <= c.t / std::f64::consts::TAU {
            "below"
        } else {
            "above"
        };
        all &= report_check(
            &format!("stationary phase r={} T={} ({branch} cut)", c.r, c.t),
            c.within_envelope,
            &format!("residual {:.3e} <= envelope {:.3e}", c.residual, c.envelope),
        );
    }
    Ok(all)
}

fn cmd_m0_check(case: &str, sweep: &[f64], cache: &Path) -> Result<bool> {
    if sweep.is_empty() {
        bail!("--sweep must name at least one endpoint");
    }
    let constants = constants_or_laurent(cache)?;
    const M: u64 = 8;
    let mut rels = Vec::new();
    for &t in sweep {
        let m = if case == "m1" { 1 } else { M };
        let c = family_coefficients(case, m)?;
        let params = MeanValueParams::with_explicit_m(t, 0.2, m, c.clone(), c, case)?;
        let direct = m0_direct(&params)?.re;
        let main = m0_main_term(&params, &constants)?;
        let rel = (direct - main).abs() / main.abs().max(1e-30);
        println!("T={t:8.0} M={m}: direct = {direct:14.4}, main = {main:14.4}, rel = {rel:.4e}");
        rels.push(rel);
    }
    let inversions = trend_inversions(&rels);
    Ok(report_check(
        &format!("arithmetic part trend ({case})"),
        inversions <= MAX_TREND_INVERSIONS,
        &format!("{inversions} inversions over {} points", rels.len()),
    ))
}
