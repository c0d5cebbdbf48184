//! The `tapaudit` command line.
//!
//! Every subcommand writes its artifacts and a `<subcommand>.manifest.json`
//! into `--out`. Exit codes are stable: 0 success (no violation), 1 audit
//! found a pure-DP violation witness, 2 usage or schema error, 3 not enough
//! data.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::attacks::{
    detect_presence, estimate_suppressed_with, pair_point_to_point, IntervalRule, PairSpec,
    RECOMMENDED_PAIRS,
};
use crate::audit::{audit_pair, check_drop_consistency, default_epsilon_grid};
use crate::distributions::{diff_pdf, fit_scale_mle, DifferenceSample, FitWarning, NoiseScale};
use crate::error::Error;
use crate::mechanism::{read_raw_csv, read_released_csv, write_raw_csv, write_released_csv, ReleaseConfig};
use crate::synth::{derive_releases, generate_raw, scenario_by_name, ScenarioConfig, SCENARIO_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INSUFFICIENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "tapaudit", version, about = "Thresholded Laplace count release and its audits")]
pub struct Cli {
    /// Root seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate raw tap events for a scenario.
    Gen(GenArgs),
    /// Release the time-and-location, time-only and location-only tables.
    Release(ReleaseArgs),
    /// Recover the noise scale from paired point-to-point counts.
    FitNoise(FitNoiseArgs),
    /// Exact (ε, δ) audit of neighbouring counts.
    Audit(AuditArgs),
    /// Estimate a suppressed count from a released total and its components.
    EstimateSuppressed(EstimateArgs),
    /// Decide whether a released value proves presence.
    DetectPresence(DetectArgs),
    /// Check a reported drop percentage against a row count.
    DropCheck(DropArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct ScenarioSource {
    /// Built-in scenario: manly, secret-ferry or night-bus.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Scenario config file (TOML).
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
}

#[derive(Debug, Args, Serialize)]
pub struct MechanismArgs {
    #[arg(long, default_value_t = 1.4)]
    pub scale: f64,
    #[arg(long, default_value_t = 18.0)]
    pub threshold: f64,
    /// Publish zero counts as exact zeros (default).
    #[arg(long, conflicts_with = "perturb_zeros")]
    pub zero_skip: bool,
    /// Perturb zero counts like every other count.
    #[arg(long)]
    pub perturb_zeros: bool,
    /// Publish real values instead of rounding half up.
    #[arg(long)]
    pub no_round: bool,
}

impl MechanismArgs {
    fn config(&self, seed: u64) -> Result<ReleaseConfig, Error> {
        ReleaseConfig::new(
            NoiseScale::new(self.scale)?,
            self.threshold,
            !self.perturb_zeros,
            !self.no_round,
            seed,
        )
    }
}

#[derive(Debug, Args)]
pub struct ReleaseArgs {
    /// Raw events CSV (mode,date,type,time,location,route).
    #[arg(long)]
    pub raw: PathBuf,
    #[command(flatten)]
    pub mechanism: MechanismArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct FitNoiseArgs {
    /// Time-and-location release CSV.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "")]
    pub route: String,
    #[arg(long)]
    pub on_location: String,
    #[arg(long)]
    pub off_location: String,
    #[arg(long, default_value_t = 2)]
    pub duration_bins: u8,
    /// Also pair the reverse direction.
    #[arg(long)]
    pub bidirectional: bool,
    /// The route does not tap passengers off automatically.
    #[arg(long)]
    pub no_auto_tap_off: bool,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub count: u64,
    #[arg(long)]
    pub neighbor: u64,
    #[command(flatten)]
    pub mechanism: MechanismArgs,
    /// Comma-separated ε values; defaults to 21 log-spaced points in [0.01, 10].
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub epsilon_grid: Option<Vec<f64>>,
}

#[derive(Debug, Args, Serialize)]
pub struct EstimateArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub total: f64,
    /// Comma-separated released components covered by the total.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub components: Vec<f64>,
    #[arg(long)]
    pub scale: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "chernoff")]
    pub rule: RuleArg,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleArg {
    Chernoff,
    TailProduct,
}

impl From<RuleArg> for IntervalRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Chernoff => IntervalRule::Chernoff,
            RuleArg::TailProduct => IntervalRule::TailProduct,
        }
    }
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub released: f64,
    #[command(flatten)]
    pub mechanism: MechanismArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct DropArgs {
    #[arg(long)]
    pub percentage: f64,
    #[arg(long)]
    pub rows: u64,
}

/// Written next to every set of outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub subcommand: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub config: serde_json::Value,
    pub inputs: Vec<ArtifactHash>,
    pub outputs: Vec<ArtifactHash>,
}

#[derive(Debug, Serialize)]
pub struct ArtifactHash {
    pub path: String,
    pub sha256: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: msg.into(),
    }
}

struct Run<'a> {
    out: PathBuf,
    args: Vec<String>,
    stdout: &'a mut dyn Write,
    inputs: Vec<ArtifactHash>,
    outputs: Vec<ArtifactHash>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run<'_> {
    fn read_input(&mut self, path: &Path) -> Result<Vec<u8>, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| usage(format!("reading {}: {e}", path.display())))?;
        self.inputs.push(ArtifactHash {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    /// Writes `bytes` to `out/name` via a temporary file and rename.
    fn write_output(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        let path = self.out.join(name);
        write_atomic(&path, bytes)?;
        self.outputs.push(ArtifactHash {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    fn finish(
        mut self,
        subcommand: &str,
        seed: Option<u64>,
        config: serde_json::Value,
    ) -> Result<(), Failure> {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.into(),
            args: std::mem::take(&mut self.args),
            seed,
            config,
            inputs: std::mem::take(&mut self.inputs),
            outputs: std::mem::take(&mut self.outputs),
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        write_atomic(&self.out.join(format!("{subcommand}.manifest.json")), text.as_bytes())?;
        Ok(())
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

fn require_seed(seed: Option<u64>, subcommand: &str) -> Result<u64, Failure> {
    seed.ok_or_else(|| usage(format!("{subcommand} requires --seed")))
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
            } else {
                let _ = stdout.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let recorded: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match dispatch(cli, recorded, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: Cli, args: Vec<String>, stdout: &mut dyn Write) -> Result<i32, Failure> {
    fs::create_dir_all(&cli.out)
        .map_err(|e| usage(format!("creating {}: {e}", cli.out.display())))?;
    let mut run = Run {
        out: cli.out.clone(),
        args,
        stdout,
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    match cli.command {
        Command::Gen(a) => cmd_gen(&mut run, cli.seed, &a).and_then(|cfg| {
            run.finish("gen", cli.seed, cfg)?;
            Ok(EXIT_OK)
        }),
        Command::Release(a) => cmd_release(&mut run, cli.seed, &a).and_then(|cfg| {
            run.finish("release", cli.seed, cfg)?;
            Ok(EXIT_OK)
        }),
        Command::FitNoise(a) => cmd_fit_noise(&mut run, &a).and_then(|(code, cfg)| {
            run.finish("fit-noise", cli.seed, cfg)?;
            Ok(code)
        }),
        Command::Audit(a) => cmd_audit(&mut run, &a).and_then(|(code, cfg)| {
            run.finish("audit", cli.seed, cfg)?;
            Ok(code)
        }),
        Command::EstimateSuppressed(a) => cmd_estimate(&mut run, &a).and_then(|cfg| {
            run.finish("estimate-suppressed", cli.seed, cfg)?;
            Ok(EXIT_OK)
        }),
        Command::DetectPresence(a) => cmd_detect(&mut run, &a).and_then(|cfg| {
            run.finish("detect-presence", cli.seed, cfg)?;
            Ok(EXIT_OK)
        }),
        Command::DropCheck(a) => cmd_drop_check(&mut run, &a).and_then(|cfg| {
            run.finish("drop-check", cli.seed, cfg)?;
            Ok(EXIT_OK)
        }),
    }
}

fn cmd_gen(run: &mut Run, seed: Option<u64>, a: &GenArgs) -> Result<serde_json::Value, Failure> {
    let seed = require_seed(seed, "gen")?;
    let config = match (&a.source.scenario, &a.source.config) {
        (Some(name), _) => scenario_by_name(name).ok_or_else(|| {
            usage(format!(
                "unknown scenario {name:?}; expected one of {}",
                SCENARIO_NAMES.join(", ")
            ))
        })?,
        (None, Some(path)) => {
            let bytes = run.read_input(path)?;
            let text = String::from_utf8(bytes)
                .map_err(|_| usage(format!("{} is not UTF-8", path.display())))?;
            ScenarioConfig::from_toml(&text)?
        }
        (None, None) => return Err(usage("gen needs --scenario or --config")),
    }
    .with_seed(seed);
    let raw = generate_raw(&config)?;
    let mut csv = Vec::new();
    write_raw_csv(&raw, &mut csv)?;
    run.write_output("raw.csv", &csv)?;
    let toml = config.to_toml()?;
    run.write_output("scenario.toml", toml.as_bytes())?;
    let _ = writeln!(run.stdout, "wrote {} events", raw.len());
    Ok(serde_json::to_value(&config).expect("serializable"))
}

fn cmd_release(run: &mut Run, seed: Option<u64>, a: &ReleaseArgs) -> Result<serde_json::Value, Failure> {
    let seed = require_seed(seed, "release")?;
    let config = a.mechanism.config(seed)?;
    let bytes = run.read_input(&a.raw)?;
    let raw = read_raw_csv(bytes.as_slice()).map_err(|e| {
        usage(format!("{}: {e}", a.raw.display()))
    })?;
    let releases = derive_releases(&raw, &config);
    for (name, table) in [
        ("time_loc.csv", &releases.time_loc),
        ("time_only.csv", &releases.time_only),
        ("loc_only.csv", &releases.loc_only),
    ] {
        let mut buf = Vec::new();
        write_released_csv(table, &mut buf)?;
        run.write_output(name, &buf)?;
    }
    let mut ledger = Vec::new();
    releases.ledger.write_csv(&mut ledger)?;
    run.write_output("ledger.csv", &ledger)?;
    let _ = writeln!(
        run.stdout,
        "released {} time-location, {} time-only, {} location-only cells",
        releases.time_loc.entries.len(),
        releases.time_only.entries.len(),
        releases.loc_only.entries.len()
    );
    Ok(serde_json::json!({
        "release": config,
        "fingerprint": config.fingerprint(),
    }))
}

#[derive(Serialize)]
struct FitReport {
    b_hat: f64,
    method: crate::distributions::FitMethod,
    sample_size: usize,
    log_likelihood: Option<f64>,
    stderr_approx: f64,
    skipped_suppressed: usize,
    warnings: Vec<FitWarning>,
}

fn cmd_fit_noise(run: &mut Run, a: &FitNoiseArgs) -> Result<(i32, serde_json::Value), Failure> {
    let spec = PairSpec::new(
        a.route.clone(),
        a.on_location.clone(),
        a.off_location.clone(),
        a.duration_bins,
        !a.no_auto_tap_off,
    )?;
    let bytes = run.read_input(&a.input)?;
    let table = read_released_csv(bytes.as_slice())
        .map_err(|e| usage(format!("{}: {e}", a.input.display())))?;
    let config = serde_json::to_value(a).expect("serializable");

    let mut specs = vec![spec.clone()];
    if a.bidirectional {
        specs.push(spec.reversed());
    }
    let mut values = Vec::new();
    let mut skipped = 0;
    let mut warnings = Vec::new();
    for s in &specs {
        let paired = pair_point_to_point(&table, s)?;
        values.extend(paired.sample.values);
        skipped += paired.skipped_suppressed;
        for w in paired.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    let sample = DifferenceSample::new(values);
    if sample.is_empty() {
        return Err(Failure {
            code: EXIT_INSUFFICIENT,
            message: format!("no usable pairs ({skipped} skipped as suppressed)"),
        });
    }
    if sample.len() < RECOMMENDED_PAIRS {
        warnings.push(FitWarning::LowSample {
            pairs: sample.len(),
            recommended: RECOMMENDED_PAIRS,
        });
    }
    let est = fit_scale_mle(&sample)?;
    let report = FitReport {
        b_hat: est.b_hat,
        method: est.method,
        sample_size: est.sample_size,
        log_likelihood: est.log_likelihood,
        stderr_approx: est.stderr_approx,
        skipped_suppressed: skipped,
        warnings,
    };
    let line = json_line(&report);
    run.write_output("fit_noise.json", line.as_bytes())?;

    let scale = NoiseScale::new(est.b_hat)?;
    let lo = *sample.values.iter().min().expect("non-empty");
    let hi = *sample.values.iter().max().expect("non-empty");
    let n = sample.len() as f64;
    let mut hist = String::from("difference,observed_frequency,model_density\n");
    for u in lo..=hi {
        let count = sample.values.iter().filter(|&&v| v == u).count();
        hist.push_str(&format!(
            "{u},{:?},{:?}\n",
            count as f64 / n,
            diff_pdf(u as f64, scale)
        ));
    }
    run.write_output("difference_histogram.csv", hist.as_bytes())?;
    let _ = run.stdout.write_all(line.as_bytes());
    Ok((EXIT_OK, config))
}

fn parse_grid(grid: &Option<Vec<f64>>) -> Result<Vec<f64>, Failure> {
    match grid {
        None => Ok(default_epsilon_grid()),
        Some(g) if g.is_empty() => Err(usage("epsilon grid is empty")),
        Some(g) => {
            if let Some(bad) = g.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
                return Err(usage(format!("bad epsilon {bad}")));
            }
            Ok(g.clone())
        }
    }
}

fn cmd_audit(run: &mut Run, a: &AuditArgs) -> Result<(i32, serde_json::Value), Failure> {
    let grid = parse_grid(&a.epsilon_grid)?;
    let config = a.mechanism.config(0)?;
    let result = audit_pair(a.count, a.neighbor, &config, &grid)?;
    let witness = result
        .pure_dp_violation_witness
        .map(|w| w.atom.to_string())
        .unwrap_or_default();
    let mut csv = String::from("epsilon,delta,witness_atom\n");
    for &(e, d) in &result.delta_at {
        csv.push_str(&format!("{e:?},{d:e},{witness}\n"));
    }
    run.write_output("audit.csv", csv.as_bytes())?;
    let _ = run.stdout.write_all(csv.as_bytes());
    let code = if result.pure_dp_violation_witness.is_some() {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    };
    let cfg = serde_json::json!({
        "count": a.count,
        "neighbor": a.neighbor,
        "mechanism": a.mechanism,
        "epsilon_grid": grid,
        "max_atom_ratio": if result.max_atom_ratio.is_finite() { Some(result.max_atom_ratio) } else { None },
    });
    Ok((code, cfg))
}

fn cmd_estimate(run: &mut Run, a: &EstimateArgs) -> Result<serde_json::Value, Failure> {
    let scale = NoiseScale::new(a.scale)?;
    let est = estimate_suppressed_with(a.total, &a.components, scale, a.alpha, a.rule.into())?;
    let line = json_line(&est);
    run.write_output("estimate.jsonl", line.as_bytes())?;
    let _ = run.stdout.write_all(line.as_bytes());
    Ok(serde_json::to_value(a).expect("serializable"))
}

fn cmd_detect(run: &mut Run, a: &DetectArgs) -> Result<serde_json::Value, Failure> {
    let config = a.mechanism.config(0)?;
    let verdict = detect_presence(a.released, &config);
    let line = json_line(&verdict);
    run.write_output("presence.jsonl", line.as_bytes())?;
    let _ = run.stdout.write_all(line.as_bytes());
    Ok(serde_json::json!({ "released": a.released, "mechanism": a.mechanism }))
}

fn cmd_drop_check(run: &mut Run, a: &DropArgs) -> Result<serde_json::Value, Failure> {
    let verdict = check_drop_consistency(a.percentage, a.rows)?;
    let line = json_line(&verdict);
    run.write_output("drop_check.jsonl", line.as_bytes())?;
    let _ = run.stdout.write_all(line.as_bytes());
    Ok(serde_json::to_value(a).expect("serializable"))
}
