//! Command-line front end: parse → validate → analyze → select → simulate →
//! compare, with deterministic output for fixed inputs and seeds.
//!
//! Exit codes: 0 success, 1 validation errors present, 2 parse failure,
//! 3 usage/configuration error. Standard output carries only the requested
//! artifact; human diagnostics go to standard error.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::decimal::Decimal;
use crate::dsl;
use crate::graph::{self, SelectionPolicy, WeightConfig};
use crate::ontology::{self, ModelExt, TransactionId, ValidatedModel};
use crate::report::{self, OutputFormat};
use crate::sim::{self, ArrivalModel, ScenarioResult, SimConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

/// When set, input paths that do not exist are retried under this directory.
pub const FIXTURE_DIR_ENV: &str = "ONTOBPR_FIXTURE_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "ontobpr",
    version,
    about = "Enterprise-ontology modelling, connectivity analysis and process simulation"
)]
struct Cli {
    /// Output format: table, csv, json, markdown or dot (graph only).
    /// Defaults to table (dot for `graph`).
    #[arg(long, global = true)]
    format: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a model file and report structural errors and warnings
    Validate { input: PathBuf },
    /// Transaction result table: every transaction with its result fact
    Trt { input: PathBuf },
    /// Internal/environmental actor split and boundary transactions
    Boundary { input: PathBuf },
    /// Export the actor-transaction or construction graph
    Graph {
        input: PathBuf,
        /// Which graph to export: atd or ocd
        #[arg(long, default_value = "ocd")]
        kind: String,
    },
    /// Per-actor executes/initiates counts
    Load { input: PathBuf },
    /// Expand a reengineering selection with the most-connected transactions
    Select {
        input: PathBuf,
        /// Seed transaction ids, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        seed: Vec<String>,
        /// argmax, top-k or threshold
        #[arg(long, default_value = "argmax")]
        policy: String,
        /// k for the top-k policy
        #[arg(long)]
        k: Option<usize>,
        /// Weight threshold for the threshold policy
        #[arg(long)]
        theta: Option<String>,
        /// Exclude transactions executed by environmental/composite actors
        #[arg(long)]
        internal_only: bool,
        /// Weight of shared actor roles
        #[arg(long, default_value = "1")]
        w_actor: String,
        /// Weight of process links
        #[arg(long, default_value = "1")]
        w_psd: String,
        /// Weight of shared banks
        #[arg(long, default_value = "1")]
        w_bank: String,
    },
    /// Daily time/cost per function label (analytic or discrete-event)
    Simulate {
        input: PathBuf,
        /// analytic, deterministic or poisson
        #[arg(long, default_value = "analytic")]
        mode: String,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Compare a current-state and a redesigned-state model
    Compare {
        asis: PathBuf,
        tobe: PathBuf,
        /// analytic, deterministic or poisson
        #[arg(long, default_value = "analytic")]
        mode: String,
        #[command(flatten)]
        sim: SimFlags,
    },
    /// Entity-level difference of two models
    Diff { a: PathBuf, b: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct SimFlags {
    /// Key-value (TOML) configuration file; flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    months: Option<u32>,
    #[arg(long)]
    workdays_per_week: Option<u32>,
    #[arg(long)]
    hours_per_day: Option<u32>,
    #[arg(long)]
    replications: Option<u32>,
    /// RNG seed; runs are reproducible by default (seed 0)
    #[arg(long)]
    seed: Option<u64>,
}

impl SimFlags {
    fn build(&self, mode: SimMode) -> Result<SimConfig, Failure> {
        let mut config = match &self.config {
            Some(path) => SimConfig::from_file(path).map_err(usage)?,
            None => SimConfig::default(),
        };
        if let Some(v) = self.months {
            config.months = v;
        }
        if let Some(v) = self.workdays_per_week {
            config.workdays_per_week = v;
        }
        if let Some(v) = self.hours_per_day {
            config.hours_per_day = v;
        }
        if let Some(v) = self.replications {
            config.replications = v;
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        config.arrival_model = match mode {
            SimMode::Poisson => ArrivalModel::Poisson,
            _ => ArrivalModel::Deterministic,
        };
        config.validate().map_err(usage)?;
        Ok(config)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum SimMode {
    Analytic,
    Deterministic,
    Poisson,
}

impl FromStr for SimMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "analytic" => Ok(SimMode::Analytic),
            "deterministic" => Ok(SimMode::Deterministic),
            "poisson" => Ok(SimMode::Poisson),
            other => Err(format!(
                "unknown mode {other:?} (expected analytic, deterministic or poisson)"
            )),
        }
    }
}

/// An error that terminates the run with a message and an exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(error: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: error.to_string(),
    }
}

/// Entry point for `main`.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    run(&args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Runs one invocation. `args[0]` is the program name. Output is
/// byte-deterministic for fixed inputs and seeds.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successful output, not errors.
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

fn parse_format(
    cli_format: &Option<String>,
    default: OutputFormat,
) -> Result<OutputFormat, Failure> {
    match cli_format {
        None => Ok(default),
        Some(text) => OutputFormat::from_str(text).map_err(usage),
    }
}

/// Resolves an input path, falling back to the fixture directory from the
/// environment when the path does not exist as given.
fn resolve_input(path: &Path) -> Result<PathBuf, Failure> {
    if path.exists() {
        return Ok(path.to_path_buf());
    }
    if let Ok(dir) = std::env::var(FIXTURE_DIR_ENV) {
        let candidate = PathBuf::from(dir).join(path);
        if candidate.exists() {
            return Ok(candidate);
        }
    }
    Err(usage(format!(
        "input file {} does not exist",
        path.display()
    )))
}

enum Loaded {
    Model(Box<ValidatedModel>),
    /// Parse diagnostics (exit 2) or validation errors (exit 1) already
    /// written to stderr.
    Failed(i32),
}

fn load_model(path: &Path, err: &mut dyn Write) -> Result<Loaded, Failure> {
    let resolved = resolve_input(path)?;
    let text = std::fs::read_to_string(&resolved)
        .map_err(|e| usage(format!("cannot read {}: {e}", resolved.display())))?;
    let label = path.display().to_string();
    let model = match dsl::parse(&text, &label) {
        Ok(model) => model,
        Err(diagnostics) => {
            for d in &diagnostics {
                let _ = writeln!(err, "{d}");
            }
            let _ = writeln!(err, "{}: {} parse diagnostics", label, diagnostics.len());
            return Ok(Loaded::Failed(EXIT_PARSE));
        }
    };
    match model.validated() {
        Ok(validated) => {
            for warning in validated.warnings() {
                let _ = writeln!(
                    err,
                    "warning: {} at {}: {}",
                    warning.code, warning.location, warning.message
                );
            }
            Ok(Loaded::Model(Box::new(validated)))
        }
        Err(report) => {
            let _ = writeln!(err, "{label} failed validation:");
            let _ = writeln!(err, "{report}");
            Ok(Loaded::Failed(EXIT_VALIDATION))
        }
    }
}

macro_rules! require_model {
    ($path:expr, $err:expr) => {
        match load_model($path, $err)? {
            Loaded::Model(m) => *m,
            Loaded::Failed(code) => return Ok(code),
        }
    };
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Validate { input } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let resolved = resolve_input(input)?;
            let text = std::fs::read_to_string(&resolved)
                .map_err(|e| usage(format!("cannot read {}: {e}", resolved.display())))?;
            let label = input.display().to_string();
            let model = match dsl::parse(&text, &label) {
                Ok(model) => model,
                Err(diagnostics) => {
                    for d in &diagnostics {
                        let _ = writeln!(err, "{d}");
                    }
                    let _ = writeln!(err, "{}: {} parse diagnostics", label, diagnostics.len());
                    return Ok(EXIT_PARSE);
                }
            };
            let validation = ontology::validate_model(&model);
            let rendered = match format {
                OutputFormat::Json => {
                    report::envelope("validate", report::validation_to_value(&validation))
                }
                other => report::render_validation(&validation, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(if validation.is_sound() {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
        Command::Trt { input } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let model = require_model!(input, err);
            let rows = ontology::transaction_result_table(&model);
            let rendered = match format {
                OutputFormat::Json => report::envelope("trt", report::trt_to_value(&rows)),
                other => report::render_trt(&rows, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Boundary { input } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let model = require_model!(input, err);
            let boundary = ontology::boundary(&model);
            let rendered = match format {
                OutputFormat::Json => {
                    report::envelope("boundary", report::boundary_to_value(&boundary))
                }
                other => report::render_boundary(&boundary, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Graph { input, kind } => {
            let format = parse_format(&cli.format, OutputFormat::Dot)?;
            let model = require_model!(input, err);
            let graph = match kind.to_ascii_lowercase().as_str() {
                "atd" => graph::build_atd(&model),
                "ocd" => graph::build_ocd(&model),
                other => {
                    return Err(usage(format!(
                        "unknown graph kind {other:?} (expected atd or ocd)"
                    )))
                }
            };
            let rendered = match format {
                OutputFormat::Json => report::envelope("graph", report::graph_to_value(&graph)),
                other => report::render_graph(&graph, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Load { input } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let model = require_model!(input, err);
            let rows = graph::actor_load(&model);
            let rendered = match format {
                OutputFormat::Json => report::envelope("load", report::load_to_value(&rows)),
                other => report::render_load(&rows, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Select {
            input,
            seed,
            policy,
            k,
            theta,
            internal_only,
            w_actor,
            w_psd,
            w_bank,
        } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let model = require_model!(input, err);
            let seed_set: BTreeSet<TransactionId> =
                seed.iter().map(|s| TransactionId::new(s)).collect();
            let policy = match policy.to_ascii_lowercase().as_str() {
                "argmax" => SelectionPolicy::Argmax,
                "top-k" | "topk" | "top_k" => SelectionPolicy::TopK(
                    k.ok_or_else(|| usage("--k is required for the top-k policy"))?,
                ),
                "threshold" => {
                    let text = theta
                        .as_ref()
                        .ok_or_else(|| usage("--theta is required for the threshold policy"))?;
                    SelectionPolicy::Threshold(Decimal::from_str(text).map_err(usage)?)
                }
                other => {
                    return Err(usage(format!(
                        "unknown policy {other:?} (expected argmax, top-k or threshold)"
                    )))
                }
            };
            let weights = WeightConfig {
                w_actor: Decimal::from_str(w_actor).map_err(usage)?,
                w_psd: Decimal::from_str(w_psd).map_err(usage)?,
                w_bank: Decimal::from_str(w_bank).map_err(usage)?,
            };
            let result =
                graph::expand_selection(&model, &seed_set, &policy, &weights, *internal_only)
                    .map_err(usage)?;
            let rendered = match format {
                OutputFormat::Json => {
                    report::envelope("select", report::selection_to_value(&result))
                }
                other => report::render_selection(&result, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Simulate { input, mode, sim } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let mode: SimMode = mode.parse().map_err(usage)?;
            let model = require_model!(input, err);
            let result = run_scenario(&model, mode, sim, err)?;
            let rendered = match format {
                OutputFormat::Json => {
                    report::envelope("simulate", report::scenario_to_value(&result))
                }
                other => report::render_scenario(&result, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Compare {
            asis,
            tobe,
            mode,
            sim,
        } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let mode: SimMode = mode.parse().map_err(usage)?;
            let asis_model = require_model!(asis, err);
            let tobe_model = require_model!(tobe, err);
            let asis_result = run_scenario(&asis_model, mode, sim, err)?;
            let tobe_result = run_scenario(&tobe_model, mode, sim, err)?;
            let comparison = sim::compare(&asis_result, &tobe_result).map_err(usage)?;
            let rendered = match format {
                OutputFormat::Json => {
                    report::envelope("compare", report::comparison_to_value(&comparison))
                }
                other => report::render_comparison(&comparison, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
        Command::Diff { a, b } => {
            let format = parse_format(&cli.format, OutputFormat::Table)?;
            let model_a = require_model!(a, err);
            let model_b = require_model!(b, err);
            let diff = dsl::model_diff(&model_a, &model_b);
            let rendered = match format {
                OutputFormat::Json => report::envelope("diff", report::diff_to_value(&diff)),
                other => report::render_diff(&diff, other).map_err(usage)?,
            };
            let _ = write!(out, "{rendered}");
            Ok(EXIT_OK)
        }
    }
}

fn run_scenario(
    model: &ValidatedModel,
    mode: SimMode,
    flags: &SimFlags,
    err: &mut dyn Write,
) -> Result<ScenarioResult, Failure> {
    let result = match mode {
        SimMode::Analytic => sim::analytic_totals(model).map_err(usage)?,
        _ => {
            let config = flags.build(mode)?;
            sim::simulate(model, &config).map_err(usage)?
        }
    };
    for warning in &result.warnings {
        let _ = writeln!(err, "warning: {warning}");
    }
    Ok(result)
}
