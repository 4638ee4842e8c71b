//! Command-line front end: argument types, subcommands and the JSON run
//! report. The binary only parses arguments and maps outcomes to exit codes.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bergman::BasisTable;
use crate::certificates::{
    check_conformal_core, check_dilatation, check_example_thresholds, symbol_constants,
    weight_constants, CertificateReport, ConstantsLedger, ExampleFamily, LedgerOptions, MarginGrid,
    Verdict, DEFAULT_DELTA,
};
use crate::error::{Error, Result};
use crate::operators::{
    assemble_k, c_phi_norm_bound, operator_rule, section_lower_bound, spectral_diagnostics,
    OperatorMatrix,
};
use crate::quadrature::{composite_nodes, parse_grid};
use crate::symbols::example3::{first_mode_integral, inner_radius, step_profile_integral};
use crate::symbols::{
    parse_symbol, tune_example3, Example3Profile, RadialProfile, RadialSymbol, Symbol,
};
use crate::weights::Weight;

/// Bumped whenever the report layout changes.
pub const SCHEMA_VERSION: &str = "1.0.0";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qcbergman",
    version,
    about = "Projected composition operators on weighted Bergman spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Evaluate the sufficient invertibility conditions for a symbol.
    Certify(CommonArgs),
    /// Assemble the truncated operator matrix and its spectral diagnostics.
    Assemble(CommonArgs),
    /// Estimate the constants ledger for a weight and optional symbol.
    Constants(CommonArgs),
    /// Reproduce one of the worked examples (1 twist, 2 stretch, 3 cancellation).
    Repro {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        example: u8,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CommonArgs {
    /// `standard:<alpha>` or `exp:<a>:<b>`.
    #[arg(long, default_value = "standard:0")]
    pub weight: String,
    /// `id`, `mobius:<re>,<im>`, `twist:poly:<C>`, `stretch:<a>:<R>`, `example3:auto`.
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 64)]
    pub basis: usize,
    /// `<n_r>x<n_theta>`.
    #[arg(long, default_value = "256x1024")]
    pub grid: String,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long, default_value_t = 10)]
    pub bidegree: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Flat JSON ledger whose entries override the computed ones.
    #[arg(long)]
    pub ledger: Option<PathBuf>,
}

impl Default for CommonArgs {
    fn default() -> Self {
        Self {
            weight: "standard:0".into(),
            symbol: None,
            p: 2.0,
            basis: 64,
            grid: "256x1024".into(),
            delta: DEFAULT_DELTA,
            bidegree: 10,
            out: None,
            format: Format::Json,
            ledger: None,
        }
    }
}

impl CommonArgs {
    fn ledger_options(&self) -> Result<LedgerOptions> {
        let (n_r, n_theta) = parse_grid(&self.grid)?;
        Ok(LedgerOptions {
            p: self.p,
            basis: self.basis,
            n_r,
            n_theta,
            bidegree: self.bidegree,
            delta: self.delta,
        })
    }

    fn weight(&self) -> Result<Weight> {
        self.weight.parse()
    }

    fn symbol(&self) -> Result<Box<dyn Symbol>> {
        let spec = self.symbol.as_deref().ok_or_else(|| Error::Parse {
            input: "--symbol".into(),
            reason: "this command needs --symbol".into(),
        })?;
        parse_symbol(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub weight: String,
    pub symbol: Option<String>,
    pub p: f64,
    pub basis: usize,
    pub grid: String,
    pub delta: f64,
    pub bidegree: usize,
}

impl From<&CommonArgs> for RunConfig {
    fn from(a: &CommonArgs) -> Self {
        Self {
            weight: a.weight.clone(),
            symbol: a.symbol.clone(),
            p: a.p,
            basis: a.basis,
            grid: a.grid.clone(),
            delta: a.delta,
            bidegree: a.bidegree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub command: String,
    pub config: RunConfig,
    /// `null` when the command has no verdict.
    pub passed: Option<bool>,
    pub results: Value,
    pub wall_time_s: f64,
    pub version: String,
}

/// A finished command: its report and, for matrix dumps, the CSV body.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self.report.passed {
            Some(false) => EXIT_FAIL,
            _ => EXIT_PASS,
        }
    }
}

/// Exit code for an error raised while running a command.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. } | Error::Parameter(_) | Error::Domain { .. } => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

pub fn run(command: &Command) -> Result<Outcome> {
    let start = Instant::now();
    let (name, args, (passed, results, csv)) = match command {
        Command::Certify(a) => ("certify", a, cmd_certify(a)?),
        Command::Assemble(a) => ("assemble", a, cmd_assemble(a)?),
        Command::Constants(a) => ("constants", a, cmd_constants(a)?),
        Command::Repro { example, common } => ("repro", common, cmd_repro(*example, common)?),
    };
    let command = match command {
        Command::Repro { example, .. } => format!("repro {example}"),
        _ => name.to_string(),
    };
    Ok(Outcome {
        report: RunReport {
            schema_version: SCHEMA_VERSION.into(),
            command,
            config: args.into(),
            passed,
            results,
            wall_time_s: start.elapsed().as_secs_f64(),
            version: env!("CARGO_PKG_VERSION").into(),
        },
        csv,
    })
}

type CommandResult = Result<(Option<bool>, Value, Option<String>)>;

fn full_ledger(symbol: &dyn Symbol, weight: &Weight, args: &CommonArgs) -> Result<ConstantsLedger> {
    let opts = args.ledger_options()?;
    let mut ledger = weight_constants(weight, &opts)?;
    symbol_constants(symbol, weight, &opts, &mut ledger)?;
    if let Some(path) = &args.ledger {
        ledger.overlay(&ConstantsLedger::load(path)?);
    }
    Ok(ledger)
}

/// Either sufficient condition passing certifies invertibility.
fn certify_symbol(
    symbol: &dyn Symbol,
    weight: &Weight,
    p: f64,
    ledger: &ConstantsLedger,
) -> Result<Vec<CertificateReport>> {
    let grid = MarginGrid::for_symbol(symbol);
    Ok(vec![
        check_dilatation(symbol, weight, ledger, &grid)?,
        check_conformal_core(symbol, weight, p, ledger)?,
    ])
}

fn any_pass(reports: &[CertificateReport]) -> bool {
    reports.iter().any(CertificateReport::passed)
}

pub fn cmd_certify(args: &CommonArgs) -> CommandResult {
    let weight = args.weight()?;
    let symbol = args.symbol()?;
    let ledger = full_ledger(symbol.as_ref(), &weight, args)?;
    let reports = certify_symbol(symbol.as_ref(), &weight, args.p, &ledger)?;
    let passed = any_pass(&reports);
    let results = json!({
        "verdict": if passed { Verdict::Pass } else { Verdict::Fail },
        "certificates": reports,
    });
    Ok((Some(passed), results, None))
}

fn assemble_for(
    symbol: &dyn Symbol,
    weight: &Weight,
    n: usize,
    grid: (usize, usize),
) -> Result<OperatorMatrix> {
    let basis = BasisTable::new(*weight, 2.0, n)?;
    let rule = operator_rule(symbol, weight, grid.0, grid.1)?;
    assemble_k(symbol, &basis, &rule, true)
}

pub fn cmd_assemble(args: &CommonArgs) -> CommandResult {
    let weight = args.weight()?;
    let symbol = args.symbol()?;
    let grid = parse_grid(&args.grid)?;
    let rule = operator_rule(symbol.as_ref(), &weight, grid.0, grid.1)?;
    let basis = BasisTable::new(weight, args.p, args.basis)?;
    let matrix = assemble_k(symbol.as_ref(), &basis, &rule, true)?;
    let spectral = spectral_diagnostics(&matrix)?;
    let norm = c_phi_norm_bound(symbol.as_ref(), &weight, args.p, &rule)?;
    let columns: Vec<f64> = (0..matrix.dim()).map(|m| matrix.column_norm(m)).collect();
    let results = json!({
        "n": matrix.dim(),
        "fast_path": matrix.fast_path,
        "spectral": spectral,
        "column_norms": columns,
        "off_diagonal_mass": matrix.off_diagonal_mass(),
        "norm_bound": norm,
    });
    let csv = (args.format == Format::Csv).then(|| matrix.to_csv());
    Ok((None, results, csv))
}

pub fn cmd_constants(args: &CommonArgs) -> CommandResult {
    let weight = args.weight()?;
    let opts = args.ledger_options()?;
    let mut ledger = weight_constants(&weight, &opts)?;
    let lp = BasisTable::new(weight, 2.0, opts.basis)?.d_lp()?;
    let mut results = json!({
        "littlewood_paley": { "n": opts.basis, "g_last": lp.g_last, "g_half": lp.g_half },
    });
    if let Some(spec) = &args.symbol {
        let symbol = parse_symbol(spec)?;
        symbol_constants(symbol.as_ref(), &weight, &opts, &mut ledger)?;
    }
    if let Some(path) = &args.ledger {
        ledger.overlay(&ConstantsLedger::load(path)?);
    }
    results["ledger"] = to_value(&ledger);
    Ok((None, results, None))
}

pub fn cmd_repro(example: u8, args: &CommonArgs) -> CommandResult {
    match example {
        1 => repro_twist(args),
        2 => repro_stretch(args),
        3 => repro_cancellation(args),
        _ => Err(Error::Parameter(format!(
            "unknown example {example}; expected 1, 2 or 3"
        ))),
    }
}

const SPECTRAL_N: usize = 32;

fn repro_twist(args: &CommonArgs) -> CommandResult {
    let weight = args.weight()?;
    let grid = parse_grid(&args.grid)?;
    let mut rows = Vec::new();
    let (mut best_general, mut best_threshold) = (None::<f64>, None::<f64>);
    let mut identity_passes = false;
    for k in 0..=20 {
        let c = k as f64 / 10.0;
        let symbol = RadialSymbol::twist(c)?;
        let ledger = full_ledger(&symbol, &weight, args)?;
        let general =
            check_dilatation(&symbol, &weight, &ledger, &MarginGrid::for_symbol(&symbol))?;
        let threshold = check_example_thresholds(ExampleFamily::Twist { c }, &weight, &ledger)?;
        let sigma =
            spectral_diagnostics(&assemble_for(&symbol, &weight, SPECTRAL_N, grid)?)?.sigma_min;
        if general.passed() {
            best_general = Some(c);
        }
        if threshold.passed() {
            best_threshold = Some(c);
        }
        if k == 0 {
            identity_passes = general.passed();
        }
        rows.push(json!({
            "c": c,
            "general": general.verdict,
            "general_margin": general.margins.iter().map(|m| m.min_margin).fold(f64::INFINITY, f64::min),
            "threshold": threshold.verdict,
            "c_bound": threshold.details.get("c_bound"),
            "sigma_min": sigma,
        }));
    }
    let results = json!({
        "largest_passing_c": best_general,
        "largest_threshold_c": best_threshold,
        "n": SPECTRAL_N,
        "sweep": rows,
    });
    Ok((Some(identity_passes), results, None))
}

fn repro_stretch(args: &CommonArgs) -> CommandResult {
    const RADIUS: f64 = 0.5;
    let weight = args.weight()?;
    let grid = parse_grid(&args.grid)?;
    let mut rows = Vec::new();
    let mut passing: Vec<f64> = Vec::new();
    let mut identity_passes = false;
    for k in 0..=16 {
        let a = (12 + k) as f64 / 20.0;
        let symbol = RadialSymbol::stretch(a, RADIUS)?;
        let ledger = full_ledger(&symbol, &weight, args)?;
        let general =
            check_dilatation(&symbol, &weight, &ledger, &MarginGrid::for_symbol(&symbol))?;
        let threshold = check_example_thresholds(
            ExampleFamily::Stretch {
                exponent: a,
                radius: RADIUS,
            },
            &weight,
            &ledger,
        )?;
        let sigmas = [16, 32, 64]
            .iter()
            .map(|&n| {
                Ok(spectral_diagnostics(&assemble_for(&symbol, &weight, n, grid)?)?.sigma_min)
            })
            .collect::<Result<Vec<f64>>>()?;
        if general.passed() {
            passing.push(a);
        }
        if (a - 1.0).abs() < 1e-12 {
            identity_passes = general.passed();
        }
        rows.push(json!({
            "a": a,
            "general": general.verdict,
            "threshold": threshold.verdict,
            "threshold_value": threshold.details.get("threshold"),
            "sigma_min_16_32_64": sigmas,
        }));
    }
    let results = json!({
        "radius": RADIUS,
        "passing_range": [
            passing.iter().copied().fold(f64::INFINITY, f64::min),
            passing.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        ],
        "sweep": rows,
    });
    Ok((Some(identity_passes), results, None))
}

/// `∫_0^1 b r² e^{ia} dr` by a uniform composite rule that ignores the
/// profile's own panel layout.
fn uniform_first_mode(profile: &Example3Profile) -> (f64, f64) {
    let edges: Vec<f64> = (0..=4000).map(|k| k as f64 / 4000.0).collect();
    composite_nodes(&edges, 20)
        .into_iter()
        .fold((0.0, 0.0), |(re, im), (r, w)| {
            let m = w * profile.modulus(r) * r * r;
            let a = profile.angle(r);
            (re + m * a.cos(), im + m * a.sin())
        })
}

fn repro_cancellation(args: &CommonArgs) -> CommandResult {
    let weight = args.weight()?;
    let grid = parse_grid(&args.grid)?;
    let r_in = inner_radius();
    let tuning = tune_example3()?;
    let profile = Example3Profile::new(tuning.params)?;
    let (re, im) = first_mode_integral(&profile);
    let (re_u, im_u) = uniform_first_mode(&profile);
    let symbol = RadialSymbol::example3(tuning.params)?;
    let matrix = assemble_for(&symbol, &weight, SPECTRAL_N, grid)?;
    let spectral = spectral_diagnostics(&matrix)?;
    let column = matrix.column_norm(1);
    let basis = BasisTable::new(weight, 2.0, SPECTRAL_N)?;
    let rule = operator_rule(&symbol, &weight, grid.0, grid.1)?;
    let tall = section_lower_bound(&symbol, &basis, SPECTRAL_N / 4, &rule)?;
    let ledger = full_ledger(&symbol, &weight, args)?;
    let reports = certify_symbol(&symbol, &weight, args.p, &ledger)?;
    let residual = re.abs().max(im.abs());
    let reproduced =
        residual <= 1e-8 && column <= 1e-6 && spectral.sigma_min <= 1e-6 && !any_pass(&reports);
    let results = json!({
        "inner_radius": r_in,
        "step_profile_integral": step_profile_integral(r_in),
        "tuning": tuning,
        "first_mode_integral": { "re": re, "im": im },
        "first_mode_integral_uniform": { "re": re_u, "im": im_u },
        "column_1_norm": column,
        "spectral": spectral,
        "tall_section_sigma_min": tall,
        "certificates": reports,
    });
    Ok((Some(reproduced), results, None))
}

/// Writes the report (or CSV body) to `--out` or stdout. With CSV output
/// and `--out`, the JSON report goes next to it with a `.json` extension.
pub fn emit(outcome: &Outcome, out: Option<&PathBuf>) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n";
    match (&outcome.csv, out) {
        (Some(csv), Some(path)) => {
            std::fs::write(path, csv)?;
            std::fs::write(path.with_extension("json"), json)
        }
        (Some(csv), None) => {
            std::io::stdout().write_all(csv.as_bytes())?;
            std::io::stderr().write_all(json.as_bytes())
        }
        (None, Some(path)) => std::fs::write(path, json),
        (None, None) => std::io::stdout().write_all(json.as_bytes()),
    }
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Certify(a) | Command::Assemble(a) | Command::Constants(a) => a,
            Command::Repro { common, .. } => common,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(symbol: Option<&str>) -> CommonArgs {
        CommonArgs {
            symbol: symbol.map(str::to_string),
            basis: 16,
            grid: "64x128".into(),
            ..Default::default()
        }
    }

    #[test]
    fn certify_identity_passes_as_evidence() {
        let out = run(&Command::Certify(small(Some("id")))).unwrap();
        assert_eq!(out.report.passed, Some(true));
        assert_eq!(out.exit_code(), EXIT_PASS);
        assert_eq!(
            out.report.results["certificates"][0]["rigor"],
            "numerical-evidence"
        );
    }

    #[test]
    fn missing_symbol_is_a_usage_error() {
        let err = run(&Command::Certify(small(None))).unwrap_err();
        assert_eq!(error_exit_code(&err), EXIT_USAGE);
        let err = run(&Command::Certify(small(Some("spiral:1")))).unwrap_err();
        assert_eq!(error_exit_code(&err), EXIT_USAGE);
    }

    #[test]
    fn constants_for_identity() {
        let out = run(&Command::Constants(small(Some("id")))).unwrap();
        let l = &out.report.results["ledger"];
        assert_eq!(l["d_P"]["value"], 1.0);
        assert_eq!(l["d_P"]["provenance"], "exact");
        assert!((l["d_phi"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert!((l["d_psi"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(out.report.passed, None);
    }

    #[test]
    fn assemble_csv_has_n_rows() {
        let mut a = small(Some("twist:poly:1"));
        a.format = Format::Csv;
        let out = run(&Command::Assemble(a)).unwrap();
        assert_eq!(out.csv.unwrap().lines().count(), 16);
    }
}
