mod config;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use serde_json::{json, Value};

use config::{Args, Command, CommandConfig, Format, Quantity};
use seminorm_lab::core_linalg::{ComplexMatrix, MatrixFile, TolerancePolicy};
use seminorm_lab::generators::OperatorInstance;
use seminorm_lab::inequality_lab::campaign::{
    assert_violations, records_from_jsonl, records_to_jsonl, summary_to_csv, summary_to_json,
};
use seminorm_lab::inequality_lab::{
    check_instance, checker_by_id, fuzz_campaign, registry, summarize, CampaignPlan, CheckRecord, CheckerSummary,
    InequalityChecker, Params, SearchBudget, Severity, Verdict, Workspace,
};
use seminorm_lab::radii::{c_a, r_a, w_a, w_pa, TupleMode, TupleRadiusQuery, R_A_DEFAULT_LEVELS};
use seminorm_lab::semi_hilbert::{ContextFile, SemiHilbertContext};
use seminorm_lab::LabError;

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        let code = if matches!(e, LabError::InvalidInput(_)) { 2 } else { 3 };
        CliError { code, message: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Writes to the --out file when given, otherwise to stdout.
fn emit(out: Option<&PathBuf>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn load_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    let f: MatrixFile = serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::usage(format!("matrix {}: {e}", path.display())))?;
    Ok(f.to_matrix()?)
}

fn tolerances(cfg: &CommandConfig, mut tol: TolerancePolicy) -> TolerancePolicy {
    if let Some(s) = cfg.tol_slack {
        tol.slack_tol = s;
    }
    tol
}

/// Context and operators; the identity context matches the first operator when no
/// context file is given.
fn load_problem(cfg: &CommandConfig) -> CliResult<(SemiHilbertContext, Vec<ComplexMatrix>)> {
    if cfg.matrices.is_empty() {
        return Err(CliError::usage("at least one --matrix is required"));
    }
    let ops = cfg.matrices.iter().map(|p| load_matrix(p)).collect::<CliResult<Vec<_>>>()?;
    let ctx = match &cfg.context {
        Some(path) => {
            let mut f: ContextFile = serde_json::from_str(&read_text(path)?)
                .map_err(|e| CliError::usage(format!("context {}: {e}", path.display())))?;
            f.tol = tolerances(cfg, f.tol);
            SemiHilbertContext::from_file(&f)?
        }
        None => SemiHilbertContext::new(&ComplexMatrix::identity(ops[0].rows()), tolerances(cfg, TolerancePolicy::default()))?,
    };
    Ok((ctx, ops))
}

fn require_support(ctx: &SemiHilbertContext) -> CliResult<()> {
    if ctx.rank() == 0 {
        return Err(LabError::DegenerateContext.into());
    }
    Ok(())
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    serde_json::to_value(MatrixFile::from(m)).expect("matrix serializes")
}

fn cmd_compute(cfg: &CommandConfig) -> CliResult<u8> {
    let quantity = cfg.quantity.ok_or_else(|| CliError::usage("compute needs --quantity"))?;
    if cfg.format == Some(Format::Csv) {
        return Err(CliError::usage("compute only writes JSON"));
    }
    let (ctx, ops) = load_problem(cfg)?;
    let t = &ops[0];
    let result = match quantity {
        Quantity::AAdjoint => json!({ "value": matrix_value(&ctx.a_adjoint(t)?) }),
        Quantity::ANorm => {
            require_support(&ctx)?;
            json!({ "value": ctx.a_seminorm_op(t) })
        }
        Quantity::AAbs => json!({ "value": matrix_value(&ctx.a_abs(t)?) }),
        Quantity::WA => w_a(&ctx, t)?.to_json(json!({})),
        Quantity::CA => c_a(&ctx, t)?.to_json(json!({})),
        Quantity::RA => {
            require_support(&ctx)?;
            serde_json::to_value(r_a(&ctx, t, R_A_DEFAULT_LEVELS)?).expect("spectral radius serializes")
        }
        Quantity::WpA => {
            let p = cfg.p.unwrap_or(2.0);
            let query = TupleRadiusQuery { operators: ops.clone(), p, mode: TupleMode::Radius };
            w_pa(&ctx, &query)?.to_json(json!({ "p": p, "n": ops.len() }))
        }
        Quantity::Cartesian => {
            let parts = ctx.cartesian(t)?;
            json!({ "real_part": matrix_value(&parts.real_part), "imag_part": matrix_value(&parts.imag_part) })
        }
        Quantity::Predicates => serde_json::to_value(ctx.predicates(t)?).expect("predicates serialize"),
    };
    let mut obj = json!({ "quantity": quantity.name() });
    if let (Value::Object(dst), Value::Object(src)) = (&mut obj, result) {
        dst.extend(src);
    }
    emit(cfg.out.as_ref(), &serde_json::to_string(&obj).expect("result serializes"))?;
    Ok(0)
}

fn resolve_checkers(cfg: &CommandConfig) -> CliResult<Vec<InequalityChecker>> {
    match &cfg.checkers {
        None => Ok(registry().into_iter().filter(|c| c.severity == Severity::Assert).collect()),
        Some(ids) => ids
            .iter()
            .map(|id| checker_by_id(id.trim()).ok_or_else(|| CliError::usage(format!("unknown checker id: {id}"))))
            .collect(),
    }
}

fn flag_params(cfg: &CommandConfig) -> Option<Params> {
    if cfg.alpha.is_none() && cfg.p.is_none() && cfg.q.is_none() && cfg.r.is_none() {
        return None;
    }
    Some(Params { alpha: cfg.alpha, p: cfg.p, q: cfg.q, r: cfg.r, ..Default::default() })
}

fn assert_violated(records: &[CheckRecord]) -> bool {
    let asserts: Vec<String> = registry().into_iter().filter(|c| c.severity == Severity::Assert).map(|c| c.id.to_string()).collect();
    records.iter().any(|r| r.verdict == Verdict::Violated && asserts.contains(&r.checker_id))
}

/// Checks the given operators; parameters come from the flags, or from each
/// checker's grid at --seed.
fn cmd_check(cfg: &CommandConfig) -> CliResult<u8> {
    let checkers = resolve_checkers(cfg)?;
    let (ctx, ops) = load_problem(cfg)?;
    let seed = cfg.seed.unwrap_or(0);
    let slack_tol = ctx.tol().slack_tol;
    let inst = OperatorInstance { ctx, operators: ops, tags: Default::default(), seed };
    let ws = Workspace::new(&inst);
    let fixed = flag_params(cfg);
    let mut records = Vec::new();
    for c in &checkers {
        let grid = match &fixed {
            Some(p) => vec![p.clone()],
            None => c.params_for(seed),
        };
        records.extend(check_instance(c, &ws, &grid, SearchBudget::default(), slack_tol));
    }
    let text = match cfg.format {
        Some(Format::Csv) => summary_to_csv(&summarize(&records, &checkers)),
        _ => records_to_jsonl(&records),
    };
    emit(cfg.out.as_ref(), &text)?;
    Ok(u8::from(assert_violated(&records)))
}

fn cmd_fuzz(cfg: &CommandConfig) -> CliResult<u8> {
    let seed = cfg.seed.ok_or_else(|| CliError::usage("fuzz needs --seed"))?;
    let mut plan = CampaignPlan { seed, ..Default::default() };
    if let Some(ids) = &cfg.checkers {
        plan.checker_ids = ids.iter().map(|s| s.trim().to_string()).collect();
    }
    if let Some(n) = cfg.instances {
        plan.instance_count = n;
    }
    if let Some(d) = &cfg.dims {
        plan.dims = d.clone();
    }
    if let Some(t) = cfg.tol_slack {
        plan.slack_tol = t;
    }
    if let Some(t) = cfg.threads {
        plan.threads = t;
    }
    let report = fuzz_campaign(&plan)?;
    let summary_json = summary_to_json(&report.summary);
    let summary_csv = summary_to_csv(&report.summary);
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::usage(format!("{}: {e}", dir.display())))?;
        write_text(&dir.join("records.jsonl"), &records_to_jsonl(&report.records))?;
        write_text(&dir.join("summary.json"), &summary_json)?;
        write_text(&dir.join("summary.csv"), &summary_csv)?;
    }
    match cfg.format {
        Some(Format::Csv) => emit(None, &summary_csv)?,
        _ => emit(None, &summary_json)?,
    }
    Ok(u8::from(assert_violations(&report.summary) > 0))
}

const TABLE_COLUMNS: [&str; 7] = ["checker_id", "severity", "instances", "records", "violations", "min_rel_slack", "equality_seeds"];

pub fn render_table(summary: &BTreeMap<String, CheckerSummary>) -> String {
    let rows: Vec<[String; 7]> = summary
        .iter()
        .map(|(id, s)| {
            let eq: Vec<String> = s.equality_cases.iter().map(u64::to_string).collect();
            [
                id.clone(),
                s.severity.clone().unwrap_or_else(|| "-".into()),
                s.instances.to_string(),
                s.records.to_string(),
                s.violations.to_string(),
                s.min_rel_slack.map_or_else(|| "-".into(), |v| format!("{v:.3e}")),
                if eq.is_empty() { "-".into() } else { eq.join(",") },
            ]
        })
        .collect();
    let mut widths = TABLE_COLUMNS.map(str::len);
    for r in &rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &[&str]| {
        let parts: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&TABLE_COLUMNS);
    for r in &rows {
        line(&r.iter().map(String::as_str).collect::<Vec<_>>());
    }
    out
}

fn cmd_report(cfg: &CommandConfig) -> CliResult<u8> {
    let input = cfg.input.as_ref().ok_or_else(|| CliError::usage("report needs --input"))?;
    let records = records_from_jsonl(&read_text(input)?)?;
    let summary = summarize(&records, &[]);
    let text = match cfg.format {
        Some(Format::Json) => summary_to_json(&summary),
        Some(Format::Csv) => summary_to_csv(&summary),
        None => render_table(&summary),
    };
    emit(cfg.out.as_ref(), &text)?;
    Ok(0)
}

fn run(args: Args) -> CliResult<u8> {
    let cfg = CommandConfig::resolve(args)?;
    if let Some(t) = cfg.tol_slack {
        if !(t >= 0.0) {
            return Err(CliError::usage("--tol-slack must be non-negative"));
        }
    }
    match cfg.command {
        Command::Compute => cmd_compute(&cfg),
        Command::Check => cmd_check(&cfg),
        Command::Fuzz => cmd_fuzz(&cfg),
        Command::Report => cmd_report(&cfg),
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
