use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Compute,
    Check,
    Fuzz,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
pub enum Quantity {
    #[value(name = "a_adjoint")]
    #[serde(rename = "a_adjoint")]
    AAdjoint,
    #[value(name = "a_norm")]
    #[serde(rename = "a_norm")]
    ANorm,
    #[value(name = "a_abs")]
    #[serde(rename = "a_abs")]
    AAbs,
    #[value(name = "w_A")]
    #[serde(rename = "w_A")]
    WA,
    #[value(name = "c_A")]
    #[serde(rename = "c_A")]
    CA,
    #[value(name = "r_A")]
    #[serde(rename = "r_A")]
    RA,
    #[value(name = "w_pA")]
    #[serde(rename = "w_pA")]
    WpA,
    #[value(name = "cartesian")]
    #[serde(rename = "cartesian")]
    Cartesian,
    #[value(name = "predicates")]
    #[serde(rename = "predicates")]
    Predicates,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::AAdjoint => "a_adjoint",
            Quantity::ANorm => "a_norm",
            Quantity::AAbs => "a_abs",
            Quantity::WA => "w_A",
            Quantity::CA => "c_A",
            Quantity::RA => "r_A",
            Quantity::WpA => "w_pA",
            Quantity::Cartesian => "cartesian",
            Quantity::Predicates => "predicates",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

/// Seminorm lab: A-numerical radii, A-seminorms and inequality checks.
#[derive(Debug, Parser)]
#[command(name = "seminorm-lab", version)]
pub struct Args {
    #[arg(long, value_enum)]
    pub command: Option<Command>,
    /// operator matrix file; repeat for tuples and multi-operator checks
    #[arg(long = "matrix")]
    pub matrices: Vec<PathBuf>,
    /// context file {"A": matrix, "tol": {..}}; identity when omitted
    #[arg(long)]
    pub context: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub checkers: Option<Vec<String>>,
    #[arg(long)]
    pub instances: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// output file (compute, check, report) or directory (fuzz)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long = "tol-slack")]
    pub tol_slack: Option<f64>,
    /// records JSONL for report
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// JSON config with the same keys as the flags; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    command: Option<Command>,
    #[serde(default)]
    matrix: Vec<PathBuf>,
    context: Option<PathBuf>,
    quantity: Option<Quantity>,
    alpha: Option<f64>,
    p: Option<f64>,
    q: Option<f64>,
    r: Option<f64>,
    checkers: Option<Vec<String>>,
    instances: Option<usize>,
    dims: Option<Vec<usize>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    format: Option<Format>,
    tol_slack: Option<f64>,
    input: Option<PathBuf>,
    threads: Option<usize>,
}

/// Flags merged over the optional config file.
#[derive(Debug)]
pub struct CommandConfig {
    pub command: Command,
    pub matrices: Vec<PathBuf>,
    pub context: Option<PathBuf>,
    pub quantity: Option<Quantity>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub checkers: Option<Vec<String>>,
    pub instances: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol_slack: Option<f64>,
    pub input: Option<PathBuf>,
    pub threads: Option<usize>,
}

fn read_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
}

impl CommandConfig {
    pub fn resolve(args: Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_config(p)?,
            None => FileConfig::default(),
        };
        // config paths are taken relative to the config file
        let base = args.config.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf);
        let rel = |p: PathBuf| match &base {
            Some(b) if p.is_relative() => b.join(p),
            _ => p,
        };
        let command = args
            .command
            .or(file.command)
            .ok_or_else(|| CliError::usage("--command is required (compute, check, fuzz, report)"))?;
        let matrices = if args.matrices.is_empty() { file.matrix.into_iter().map(rel).collect() } else { args.matrices };
        Ok(CommandConfig {
            command,
            matrices,
            context: args.context.or(file.context.map(rel)),
            quantity: args.quantity.or(file.quantity),
            alpha: args.alpha.or(file.alpha),
            p: args.p.or(file.p),
            q: args.q.or(file.q),
            r: args.r.or(file.r),
            checkers: args.checkers.or(file.checkers),
            instances: args.instances.or(file.instances),
            dims: args.dims.or(file.dims),
            seed: args.seed.or(file.seed),
            out: args.out.or(file.out.map(rel)),
            format: args.format.or(file.format),
            tol_slack: args.tol_slack.or(file.tol_slack),
            input: args.input.or(file.input.map(rel)),
            threads: args.threads.or(file.threads),
        })
    }
}
