//! Command-line front end: `validate`, `play`, `bounds` and `spectrum`.
//!
//! Exit status is 0 when every check passed, 1 when a check failed and 2
//! on usage or input errors. Diagnostics go to standard error as a single
//! line starting with `error: `.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use tricausal::bounds::{BoundReport, CausalModel, ClassicalModel, Exact, Witness};
use tricausal::game::{GameEngine, GameKind, GameSpec, ScoreReport};
use tricausal::instruments::{all_to_one_strategy, selective_strategy, Strategy};
use tricausal::process::{build_w, validate, ProcessMatrix, ValidityReport, DEFAULT_TOL};
use tricausal::tensor::{hermitian_eigenvalues, ComplexMatrix};

#[derive(Debug, Parser)]
#[command(
    name = "tricausal",
    version,
    about = "Tripartite signaling games with indefinite causal order"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Absolute tolerance for the numerical checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GameArg {
    AllToOne,
    Selective,
}

impl From<GameArg> for GameKind {
    fn from(g: GameArg) -> Self {
        match g {
            GameArg::AllToOne => GameKind::AllToOne,
            GameArg::Selective => GameKind::Selective,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Convex,
    Adaptive,
}

impl From<ModelArg> for CausalModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Convex => CausalModel::Convex,
            ModelArg::Adaptive => CausalModel::Adaptive,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check positivity, trace and allowed terms of the process matrix.
    Validate(MatrixSource),
    /// Score a strategy on a game and compare with the classical bounds.
    Play {
        #[arg(long, value_enum)]
        game: GameArg,
        /// JSON list of three party programs; defaults to the built-in winning table.
        #[arg(long)]
        strategy_file: Option<PathBuf>,
        #[command(flatten)]
        source: MatrixSource,
    },
    /// Exact classical bound under definite causal order.
    Bounds {
        #[arg(long, value_enum)]
        game: GameArg,
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Size of the one message each laboratory receives (1 or 2).
        #[arg(long, default_value_t = 1)]
        message_bits: u32,
    },
    /// Sorted eigenvalues of the process matrix.
    Spectrum(MatrixSource),
}

#[derive(Debug, Args)]
pub struct MatrixSource {
    /// Process matrix as {"dim":64,"re":[...],"im":[...]}; defaults to the built-in W.
    #[arg(long)]
    pub w_file: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or unreadable input; exit 2.
    Usage(String),
    /// A check ran and failed; exit 1.
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Check(m) => f.write_str(m),
        }
    }
}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// `play` report: the score plus the classical bounds it is compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayReport {
    pub game: String,
    pub per_m: BTreeMap<u8, f64>,
    pub overall: f64,
    pub classical: BTreeMap<String, Exact>,
    pub violates: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
}

pub fn load_matrix(path: &Path) -> Result<ProcessMatrix, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let m: ComplexMatrix =
        serde_json::from_str(&text).map_err(|e| usage(format!("malformed matrix file {}: {e}", path.display())))?;
    ProcessMatrix::new(m).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn matrix_from(source: &MatrixSource) -> Result<ProcessMatrix, CliError> {
    match &source.w_file {
        Some(path) => load_matrix(path),
        None => Ok(build_w()),
    }
}

/// Reads three party programs and checks that each yields CPTP instruments
/// on every round it defines.
pub fn parse_strategy_file(path: &Path) -> Result<Strategy, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let strategy: Strategy =
        serde_json::from_str(&text).map_err(|e| usage(format!("malformed strategy file {}: {e}", path.display())))?;
    for program in strategy.programs() {
        let rounds: Vec<u8> = program.rounds().collect();
        strategy.check(&rounds).map_err(usage)?;
    }
    Ok(strategy)
}

fn render<T: Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    )
}

fn cmd_validate(cli: &Cli, source: &MatrixSource, out: &mut dyn Write) -> Result<bool, CliError> {
    let w = matrix_from(source)?;
    let report = validate(&w, cli.tol).map_err(usage)?;
    match cli.output {
        Output::Json => render(out, &report),
        Output::Text => write_validity(out, &report),
    }
    .map_err(usage)?;
    Ok(report.overall)
}

fn write_validity(out: &mut dyn Write, r: &ValidityReport) -> std::io::Result<()> {
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    writeln!(
        out,
        "positive semi-definite: {} (min eigenvalue {})",
        flag(r.psd_ok),
        r.min_eigenvalue
    )?;
    writeln!(
        out,
        "trace: {} ({}, expected {})",
        flag(r.trace_ok),
        r.trace,
        r.expected
    )?;
    writeln!(out, "allowed terms: {}", flag(r.terms_ok))?;
    for w in &r.offending_words {
        writeln!(out, "  offending term {w}")?;
    }
    writeln!(out, "overall: {}", if r.overall { "valid" } else { "invalid" })
}

fn cmd_play(
    cli: &Cli,
    game: GameArg,
    strategy_file: Option<&Path>,
    source: &MatrixSource,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    let kind = GameKind::from(game);
    let spec = GameSpec::of_kind(kind);
    let strategy = match strategy_file {
        Some(path) => parse_strategy_file(path)?,
        None => match kind {
            GameKind::AllToOne => all_to_one_strategy(),
            GameKind::Selective => selective_strategy(),
        },
    };
    strategy.check(&spec.m_alphabet()).map_err(usage)?;
    let w = matrix_from(source)?;
    let engine = GameEngine::new(&w, cli.tol).map_err(|e| CliError::Check(e.to_string()))?;
    let score = engine.score(&strategy, &spec).map_err(usage)?;

    let mut classical = BTreeMap::new();
    let mut violates = BTreeMap::new();
    for model in [CausalModel::Convex, CausalModel::Adaptive] {
        let bound = tricausal::bounds::bound(&spec, model);
        violates.insert(model.to_string(), score.overall > bound.value.to_f64() + cli.tol);
        classical.insert(model.to_string(), bound.value);
    }
    let ScoreReport { game, per_m, overall } = score;
    let report = PlayReport {
        game,
        per_m,
        overall,
        classical,
        violates,
    };
    match cli.output {
        Output::Json => render(out, &report),
        Output::Text => write_play(out, &report),
    }
    .map_err(usage)?;
    Ok(report.violates.values().all(|&v| v))
}

fn write_play(out: &mut dyn Write, r: &PlayReport) -> std::io::Result<()> {
    writeln!(out, "game: {}", r.game)?;
    for (m, p) in &r.per_m {
        writeln!(out, "m={m}: {p}")?;
    }
    writeln!(out, "overall: {}", r.overall)?;
    for (model, bound) in &r.classical {
        let verdict = if r.violates[model] { "violated" } else { "not violated" };
        writeln!(out, "{model} bound: {bound} ({verdict})")?;
    }
    Ok(())
}

fn cmd_bounds(
    cli: &Cli,
    game: GameArg,
    model: ModelArg,
    message_bits: u32,
    out: &mut dyn Write,
) -> Result<bool, CliError> {
    let spec = GameSpec::of_kind(game.into());
    let classical = ClassicalModel::with_message_bits(message_bits).map_err(usage)?;
    let report = match CausalModel::from(model) {
        CausalModel::Convex => classical.convex_bound(&spec),
        CausalModel::Adaptive => classical.adaptive_bound(&spec),
    }
    .map_err(usage)?;
    match cli.output {
        Output::Json => render(out, &report),
        Output::Text => write_bounds(out, &report),
    }
    .map_err(usage)?;
    Ok(true)
}

fn write_bounds(out: &mut dyn Write, r: &BoundReport) -> std::io::Result<()> {
    writeln!(out, "{} bound for {}: {}", r.model, r.game, r.value)?;
    match &r.witness {
        Witness::Convex { order } => writeln!(out, "witness order: {order}")?,
        Witness::Adaptive { first, orders } => {
            writeln!(out, "witness: {first} first")?;
            for (m, order) in orders {
                writeln!(out, "  m={m}: {order}")?;
            }
        }
    }
    for (m, v) in &r.per_m {
        writeln!(out, "m={m}: {v}")?;
    }
    Ok(())
}

fn cmd_spectrum(cli: &Cli, source: &MatrixSource, out: &mut dyn Write) -> Result<bool, CliError> {
    let w = matrix_from(source)?;
    let eigenvalues = hermitian_eigenvalues(w.matrix()).map_err(usage)?;
    let report = SpectrumReport { eigenvalues };
    match cli.output {
        Output::Json => render(out, &report),
        Output::Text => report.eigenvalues.iter().try_for_each(|v| writeln!(out, "{v}")),
    }
    .map_err(usage)?;
    Ok(true)
}

/// Dispatches a parsed command. `Ok(false)` means a check failed.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool, CliError> {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(usage(format!("invalid tolerance {}", cli.tol)));
    }
    match &cli.command {
        Command::Validate(source) => cmd_validate(cli, source, out),
        Command::Play {
            game,
            strategy_file,
            source,
        } => cmd_play(cli, *game, strategy_file.as_deref(), source, out),
        Command::Bounds {
            game,
            model,
            message_bits,
        } => cmd_bounds(cli, *game, *model, *message_bits, out),
        Command::Spectrum(source) => cmd_spectrum(cli, source, out),
    }
}

/// Folds a multi-line clap diagnostic into one line, dropping usage and tips.
fn one_line(text: &str) -> String {
    let parts: Vec<&str> = text
        .lines()
        .map(str::trim)
        .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .filter(|l| !l.is_empty() && !l.starts_with("tip:"))
        .collect();
    let joined = parts.join(" ");
    if joined.starts_with("error:") {
        joined
    } else {
        format!("error: {joined}")
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let _ = writeln!(err, "{}", one_line(&e.to_string()));
            return 2;
        }
    };
    match execute(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {msg}");
            e.exit_code()
        }
    }
}
